"""Canonical non-planar rooted trees, forests, and admissible cuts.

A tree is stored with its children in canonical order, so structural
equality coincides with equality of the bracket serialization.  The
canonical order puts larger subtrees first; on serializations this is
the lexicographic order in which ``]`` sorts before ``[``, which makes
the single-vertex tree the smallest tree of each size class and lists
bushy trees before ladders (fan first, ladder last within a degree).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

__all__ = [
    "RootedTree",
    "Forest",
    "Cut",
    "TreeParseError",
    "LEAF",
    "EMPTY_FOREST",
    "tree_order",
    "canonicalize",
    "enumerate_trees",
    "enumerate_forests",
    "b_plus",
    "b_minus",
    "admissible_cuts",
    "parse_tree",
    "parse_forest",
]

# Collation used everywhere a deterministic order on serializations is
# needed: identical to ASCII except that ']' compares below '['.
_COLLATE = str.maketrans({"[": "\x01", "]": "\x00"})


def _collate(serial: str) -> str:
    return serial.translate(_COLLATE)


class TreeParseError(ValueError):
    """Raised on malformed tree/forest text; carries the offending position."""

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


@dataclass(frozen=True)
class RootedTree:
    """A non-planar rooted tree; children are kept in canonical order."""

    children: tuple["RootedTree", ...] = ()
    vertex_count: int = field(init=False, compare=False, repr=False)
    serial: str = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        kids = tuple(sorted(self.children, key=_sort_key, reverse=True))
        object.__setattr__(self, "children", kids)
        object.__setattr__(self, "vertex_count", 1 + sum(c.vertex_count for c in kids))
        object.__setattr__(self, "serial", "[" + "".join(c.serial for c in kids) + "]")

    @property
    def fertility(self) -> int:
        return len(self.children)

    def max_fertility(self) -> int:
        return max([self.fertility] + [c.max_fertility() for c in self.children])

    def __eq__(self, other) -> bool:
        return isinstance(other, RootedTree) and self.serial == other.serial

    def __hash__(self) -> int:
        return hash(self.serial)

    def __lt__(self, other: "RootedTree") -> bool:
        return _sort_key(self) < _sort_key(other)

    def __le__(self, other: "RootedTree") -> bool:
        return _sort_key(self) <= _sort_key(other)

    def __repr__(self) -> str:
        return f"RootedTree({self.serial!r})"

    def __str__(self) -> str:
        return self.serial


def _sort_key(t: RootedTree):
    return (t.vertex_count, _collate(t.serial))


@dataclass(frozen=True)
class Forest:
    """A commutative product (multiset) of rooted trees; may be empty."""

    trees: tuple[RootedTree, ...] = ()
    serial: str = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        ts = tuple(sorted(self.trees, key=_sort_key, reverse=True))
        object.__setattr__(self, "trees", ts)
        object.__setattr__(self, "serial", "*".join(t.serial for t in ts) or "1")

    @property
    def degree(self) -> int:
        return sum(t.vertex_count for t in self.trees)

    def is_empty(self) -> bool:
        return not self.trees

    def __eq__(self, other) -> bool:
        return isinstance(other, Forest) and self.serial == other.serial

    def __hash__(self) -> int:
        return hash(self.serial)

    def __mul__(self, other: "Forest") -> "Forest":
        return Forest(self.trees + other.trees)

    def sort_key(self):
        return (self.degree, _collate(self.serial))

    def __repr__(self) -> str:
        return f"Forest({self.serial!r})"

    def __str__(self) -> str:
        return self.serial


LEAF = RootedTree()
EMPTY_FOREST = Forest()


def tree_order(a: RootedTree, b: RootedTree) -> int:
    """Total order on trees: -1, 0 or 1, by (vertex count, collated serial)."""
    ka, kb = _sort_key(a), _sort_key(b)
    return (ka > kb) - (ka < kb)


def canonicalize(children_lists) -> RootedTree:
    """Build the canonical tree from nested sequences of children.

    Accepts either a RootedTree (returned up to re-sorting, hence a no-op
    on canonical input) or a nested list/tuple structure where each node
    is the sequence of its children.
    """
    if isinstance(children_lists, RootedTree):
        return RootedTree(tuple(canonicalize(c) for c in children_lists.children))
    return RootedTree(tuple(canonicalize(c) for c in children_lists))


def b_plus(f: Forest) -> RootedTree:
    """Graft every root of the forest onto one new root vertex."""
    return RootedTree(f.trees)


def b_minus(t: RootedTree) -> Forest:
    """Inverse of b_plus: the forest of root subtrees."""
    return Forest(t.children)


@lru_cache(maxsize=None)
def enumerate_trees(n: int) -> tuple[RootedTree, ...]:
    """All canonical rooted trees with exactly n vertices, sorted."""
    if n <= 0:
        return ()
    if n == 1:
        return (LEAF,)
    smaller: list[RootedTree] = []
    for k in range(1, n):
        smaller.extend(enumerate_trees(k))
    # Children multisets chosen non-increasing in the canonical order, so
    # each tree with n vertices is produced exactly once.
    smaller.sort(key=_sort_key, reverse=True)
    out = [b_plus(Forest(kids)) for kids in _multisets(smaller, 0, n - 1)]
    out.sort(key=_sort_key)
    return tuple(out)


def _multisets(pool: list[RootedTree], start: int, remaining: int):
    """Non-increasing tuples from pool[start:] with vertex counts summing to remaining."""
    if remaining == 0:
        yield ()
        return
    for i in range(start, len(pool)):
        t = pool[i]
        if t.vertex_count > remaining:
            continue
        for rest in _multisets(pool, i, remaining - t.vertex_count):
            yield (t,) + rest


@lru_cache(maxsize=None)
def enumerate_forests(n: int) -> tuple[Forest, ...]:
    """All canonical forests of total degree n, sorted by forest key."""
    if n < 0:
        return ()
    if n == 0:
        return (EMPTY_FOREST,)
    pool = []
    for k in range(1, n + 1):
        pool.extend(enumerate_trees(k))
    pool.sort(key=_sort_key, reverse=True)
    out = [Forest(ts) for ts in _multisets(pool, 0, n)]
    out.sort(key=lambda f: f.sort_key())
    return tuple(out)


@dataclass(frozen=True)
class Cut:
    """An admissible cut: a set of edges given by root-based child-index paths.

    The two trivial cuts carry no usable edge set; `kind` distinguishes them.
    """

    edges: frozenset[tuple[int, ...]]
    kind: str  # 'empty' | 'proper' | 'full'


def admissible_cuts(t: RootedTree) -> list[tuple[Cut, Forest, Forest]]:
    """All admissible cuts of t as (cut, pruned forest, root part).

    The empty cut comes first, proper cuts follow in a deterministic
    recursive order, and the full cut is last.  For every proper cut the
    root part is the single tree containing the original root.
    """
    options = _cut_options(t, ())
    out: list[tuple[Cut, Forest, Forest]] = []
    out.append((Cut(frozenset(), "empty"), EMPTY_FOREST, Forest((t,))))
    for edges, pruned, kept in options:
        if edges:
            out.append((Cut(frozenset(edges), "proper"), Forest(tuple(pruned)), Forest((kept,))))
    out.append((Cut(frozenset(), "full"), Forest((t,)), EMPTY_FOREST))
    return out


def _cut_options(t: RootedTree, path: tuple[int, ...]):
    """Enumerate all edge subsets meeting each root-leaf path at most once.

    Yields (edges, pruned trees, surviving subtree rooted at t's root);
    includes the empty selection.
    """
    per_child = []
    for i, c in enumerate(t.children):
        edge = path + (i,)
        # Either keep the child (recursing into it) or cut the edge above
        # it, which prunes the whole subtree.
        choices = list(_cut_options(c, edge))
        choices.append((frozenset({edge}), (c,), None))
        per_child.append(choices)
    for combo in itertools.product(*per_child):
        edges: frozenset[tuple[int, ...]] = frozenset()
        pruned: tuple[RootedTree, ...] = ()
        kept_children: list[RootedTree] = []
        for sub_edges, sub_pruned, sub_kept in combo:
            edges |= sub_edges
            pruned += tuple(sub_pruned)
            if sub_kept is not None:
                kept_children.append(sub_kept)
        yield edges, pruned, RootedTree(tuple(kept_children))


def parse_tree(text: str) -> RootedTree:
    """Parse a tree in the bracket grammar; children may appear in any order."""
    tree, pos = _parse_tree_at(text, _skip_ws(text, 0))
    pos = _skip_ws(text, pos)
    if pos != len(text):
        raise TreeParseError("trailing input after tree", text, pos)
    return tree


def parse_forest(text: str) -> Forest:
    """Parse a forest: `1` or trees joined by `*`."""
    pos = _skip_ws(text, 0)
    if pos < len(text) and text[pos] == "1":
        pos = _skip_ws(text, pos + 1)
        if pos != len(text):
            raise TreeParseError("trailing input after empty forest", text, pos)
        return EMPTY_FOREST
    trees = []
    while True:
        tree, pos = _parse_tree_at(text, pos)
        trees.append(tree)
        pos = _skip_ws(text, pos)
        if pos < len(text) and text[pos] == "*":
            pos = _skip_ws(text, pos + 1)
            continue
        break
    if pos != len(text):
        raise TreeParseError("trailing input after forest", text, pos)
    return Forest(tuple(trees))


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _parse_tree_at(text: str, pos: int) -> tuple[RootedTree, int]:
    if pos >= len(text) or text[pos] != "[":
        raise TreeParseError("expected '['", text, pos)
    pos = _skip_ws(text, pos + 1)
    children = []
    while pos < len(text) and text[pos] == "[":
        child, pos = _parse_tree_at(text, pos)
        children.append(child)
        pos = _skip_ws(text, pos)
    if pos >= len(text) or text[pos] != "]":
        raise TreeParseError("expected ']'", text, pos)
    return RootedTree(tuple(children)), pos + 1
