"""The Hopf algebra of rooted trees over exact rationals.

Elements are finite rational linear combinations of forests (LinComb) or
of forest pairs (Tensor2).  The coproduct sums over admissible cuts, the
antipode uses the recursive proper-cut formula with a per-tree memo, and
natural growth N_t grafts a copy of t onto every vertex of its argument.

On products of trees N_t acts as a derivation,
N_t(uv) = N_t(u) v + u N_t(v), which is the extension consistent with
grafting-at-every-vertex, with the coproduct formula for N_t, and with
N = d/ds on the Butcher side.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache

from .trees import (
    EMPTY_FOREST,
    LEAF,
    Forest,
    RootedTree,
    TreeParseError,
    _parse_tree_at,
    _skip_ws,
    admissible_cuts,
)

__all__ = [
    "LinComb",
    "Tensor2",
    "multiply",
    "coproduct",
    "counit",
    "antipode",
    "grading_Y",
    "natural_growth",
    "delta_k",
    "ntcoprod_identity",
    "nbrel_identity",
    "parse_lincomb",
]

Rational = Fraction


def _as_forest(x) -> Forest:
    if isinstance(x, RootedTree):
        return Forest((x,))
    if isinstance(x, Forest):
        return x
    raise TypeError(f"expected tree or forest, got {type(x).__name__}")


class LinComb:
    """A finite rational linear combination of forests."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean: dict[Forest, Fraction] = {}
        if terms:
            for forest, coeff in (terms.items() if isinstance(terms, dict) else terms):
                coeff = Fraction(coeff)
                if coeff:
                    c = clean.get(forest, 0) + coeff
                    if c:
                        clean[forest] = c
                    else:
                        clean.pop(forest, None)
        self.terms = clean

    @staticmethod
    def zero() -> "LinComb":
        return LinComb()

    @staticmethod
    def unit() -> "LinComb":
        return LinComb({EMPTY_FOREST: Fraction(1)})

    @staticmethod
    def of(x, coeff=1) -> "LinComb":
        return LinComb({_as_forest(x): Fraction(coeff)})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, LinComb) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "LinComb") -> "LinComb":
        out = dict(self.terms)
        for f, c in other.terms.items():
            s = out.get(f, 0) + c
            if s:
                out[f] = s
            else:
                out.pop(f, None)
        res = LinComb.__new__(LinComb)
        res.terms = out
        return res

    def __neg__(self) -> "LinComb":
        return self.scale(-1)

    def __sub__(self, other: "LinComb") -> "LinComb":
        return self + (-other)

    def scale(self, c) -> "LinComb":
        c = Fraction(c)
        res = LinComb.__new__(LinComb)
        res.terms = {} if not c else {f: c * v for f, v in self.terms.items()}
        return res

    def __mul__(self, other: "LinComb") -> "LinComb":
        out: dict[Forest, Fraction] = {}
        for f1, c1 in self.terms.items():
            for f2, c2 in other.terms.items():
                f = f1 * f2
                s = out.get(f, 0) + c1 * c2
                if s:
                    out[f] = s
                else:
                    out.pop(f, None)
        res = LinComb.__new__(LinComb)
        res.terms = out
        return res

    def map_forests(self, fn) -> "LinComb":
        """Linear extension of a map Forest -> LinComb."""
        out = LinComb.zero()
        for f, c in self.terms.items():
            out = out + fn(f).scale(c)
        return out

    def degrees(self) -> set[int]:
        return {f.degree for f in self.terms}

    def homogeneous_degree(self) -> int | None:
        degs = self.degrees()
        return degs.pop() if len(degs) == 1 else None

    def sorted_terms(self) -> list[tuple[Forest, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts: list[str] = []
        for forest, coeff in self.sorted_terms():
            mag = -coeff if coeff < 0 else coeff
            piece = f"{mag} {forest.serial}"
            if not parts:
                parts.append(piece if coeff > 0 else f"- {piece}")
            else:
                parts.append(("+ " if coeff > 0 else "- ") + piece)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"LinComb({str(self)!r})"


class Tensor2:
    """A finite rational linear combination of forest (x) forest pairs."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean: dict[tuple[Forest, Forest], Fraction] = {}
        if terms:
            for pair, coeff in (terms.items() if isinstance(terms, dict) else terms):
                coeff = Fraction(coeff)
                if coeff:
                    c = clean.get(pair, 0) + coeff
                    if c:
                        clean[pair] = c
                    else:
                        clean.pop(pair, None)
        self.terms = clean

    @staticmethod
    def zero() -> "Tensor2":
        return Tensor2()

    @staticmethod
    def of(left, right, coeff=1) -> "Tensor2":
        return Tensor2({(_as_forest(left), _as_forest(right)): Fraction(coeff)})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Tensor2) and self.terms == other.terms

    def __add__(self, other: "Tensor2") -> "Tensor2":
        out = dict(self.terms)
        for p, c in other.terms.items():
            s = out.get(p, 0) + c
            if s:
                out[p] = s
            else:
                out.pop(p, None)
        res = Tensor2.__new__(Tensor2)
        res.terms = out
        return res

    def __neg__(self) -> "Tensor2":
        return self.scale(-1)

    def __sub__(self, other: "Tensor2") -> "Tensor2":
        return self + (-other)

    def scale(self, c) -> "Tensor2":
        c = Fraction(c)
        res = Tensor2.__new__(Tensor2)
        res.terms = {} if not c else {p: c * v for p, v in self.terms.items()}
        return res

    def __mul__(self, other: "Tensor2") -> "Tensor2":
        out: dict[tuple[Forest, Forest], Fraction] = {}
        for (l1, r1), c1 in self.terms.items():
            for (l2, r2), c2 in other.terms.items():
                p = (l1 * l2, r1 * r2)
                s = out.get(p, 0) + c1 * c2
                if s:
                    out[p] = s
                else:
                    out.pop(p, None)
        res = Tensor2.__new__(Tensor2)
        res.terms = out
        return res

    def map_legs(self, left_fn=None, right_fn=None) -> "Tensor2":
        """Apply Forest -> LinComb maps to the legs, bilinearly."""
        out = Tensor2.zero()
        for (fl, fr), c in self.terms.items():
            lefts = left_fn(fl) if left_fn else LinComb.of(fl)
            rights = right_fn(fr) if right_fn else LinComb.of(fr)
            for gl, cl in lefts.terms.items():
                for gr, cr in rights.terms.items():
                    out = out + Tensor2.of(gl, gr, c * cl * cr)
        return out

    def sorted_terms(self) -> list[tuple[tuple[Forest, Forest], Fraction]]:
        # Plain-ASCII order on the right serialization puts the full-cut
        # leg `1` first; ties break on the left serialization.
        return sorted(self.terms.items(), key=lambda kv: (kv[0][1].serial, kv[0][0].serial))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts: list[str] = []
        for (fl, fr), coeff in self.sorted_terms():
            mag = -coeff if coeff < 0 else coeff
            piece = f"{mag} ({fl.serial} | {fr.serial})"
            if not parts:
                parts.append(piece if coeff > 0 else f"- {piece}")
            else:
                parts.append(("+ " if coeff > 0 else "- ") + piece)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Tensor2({str(self)!r})"


def multiply(a: LinComb, b: LinComb) -> LinComb:
    """Product of H_rt: bilinear extension of disjoint union of forests."""
    return a * b


@lru_cache(maxsize=None)
def _coproduct_tree(t: RootedTree) -> Tensor2:
    out = Tensor2.zero()
    for _cut, pruned, root_part in admissible_cuts(t):
        out = out + Tensor2.of(pruned, root_part)
    return out


def _coproduct_forest(f: Forest) -> Tensor2:
    out = Tensor2.of(EMPTY_FOREST, EMPTY_FOREST)
    for t in f.trees:
        out = out * _coproduct_tree(t)
    return out


def coproduct(x: LinComb | Forest | RootedTree) -> Tensor2:
    """Coproduct: sum of P_c (x) R_c over admissible cuts, multiplicative on forests."""
    if isinstance(x, (RootedTree, Forest)):
        return _coproduct_forest(_as_forest(x))
    out = Tensor2.zero()
    for f, c in x.terms.items():
        out = out + _coproduct_forest(f).scale(c)
    return out


def counit(x: LinComb) -> Fraction:
    """Coefficient of the empty forest."""
    return x.terms.get(EMPTY_FOREST, Fraction(0))


_antipode_memo: dict[RootedTree, LinComb] = {}
_antipode_lock = threading.Lock()


def _antipode_tree(t: RootedTree) -> LinComb:
    cached = _antipode_memo.get(t)
    if cached is not None:
        return cached
    out = LinComb.of(t, -1)
    for cut, pruned, root_part in admissible_cuts(t):
        if cut.kind != "proper":
            continue
        out = out - LinComb.of(pruned) * _antipode_tree(root_part.trees[0])
    with _antipode_lock:
        _antipode_memo[t] = out
    return out


def antipode(x: LinComb | Forest | RootedTree) -> LinComb:
    """Antipode: S(t) = -t - sum over proper cuts of P_c(t) S(R_c(t))."""
    if isinstance(x, (RootedTree, Forest)):
        x = LinComb.of(x)

    def on_forest(f: Forest) -> LinComb:
        out = LinComb.unit()
        for t in f.trees:
            out = out * _antipode_tree(t)
        return out

    return x.map_forests(on_forest)


def grading_Y(x: LinComb | Forest | RootedTree) -> LinComb:
    """Grading operator: each forest scaled by its total vertex count."""
    if isinstance(x, (RootedTree, Forest)):
        x = LinComb.of(x)
    return LinComb({f: c * f.degree for f, c in x.terms.items()})


def _graft_everywhere(t: RootedTree, s: RootedTree) -> LinComb:
    """Sum of trees obtained by attaching t's root to each vertex of s."""
    out = LinComb.of(RootedTree(s.children + (t,)))
    for i, child in enumerate(s.children):
        grown = _graft_everywhere(t, child)
        for f, c in grown.terms.items():
            new_kids = s.children[:i] + (f.trees[0],) + s.children[i + 1:]
            out = out + LinComb.of(RootedTree(new_kids), c)
    return out


def natural_growth(t: RootedTree, x: LinComb | Forest | RootedTree) -> LinComb:
    """Generalized natural growth N_t; a derivation on products of trees."""
    if isinstance(x, (RootedTree, Forest)):
        x = LinComb.of(x)

    def on_forest(f: Forest) -> LinComb:
        out = LinComb.zero()
        for i, s in enumerate(f.trees):
            rest = Forest(f.trees[:i] + f.trees[i + 1:])
            out = out + _graft_everywhere(t, s) * LinComb.of(rest)
        return out

    return x.map_forests(on_forest)


def delta_k(k: int) -> LinComb:
    """Connes-Moscovici generators: delta_1 = the single vertex, delta_{k+1} = N(delta_k)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    out = LinComb.of(LEAF)
    for _ in range(k - 1):
        out = natural_growth(LEAF, out)
    return out


def _grow_or_grade(r: Forest):
    """N over a root part: N_{R_c} for a tree, the grading Y for the empty forest."""
    if r.is_empty():
        return grading_Y
    tree = r.trees[0]
    return lambda x: natural_growth(tree, x)


def ntcoprod_identity(t: RootedTree, s: RootedTree) -> bool:
    """Check the coproduct formula for N_t on s.

    Delta(N_t(s)) = (N_t (x) id) Delta(s)
                    + sum over admissible cuts c of t of
                      (P_c(t) . (x) N_{R_c(t)}) Delta(s),
    where the full cut contributes multiplication by t on the left leg and
    the grading operator on the right leg.
    """
    lhs = coproduct(natural_growth(t, LinComb.of(s)))
    ds = coproduct(LinComb.of(s))
    rhs = ds.map_legs(left_fn=lambda f: natural_growth(t, LinComb.of(f)))
    for _cut, pruned, root_part in admissible_cuts(t):
        grow = _grow_or_grade(root_part)
        rhs = rhs + ds.map_legs(
            left_fn=lambda f, p=pruned: LinComb.of(p * f),
            right_fn=lambda f, g=grow: g(LinComb.of(f)),
        )
    return lhs == rhs


def b_plus_lin(x: LinComb) -> LinComb:
    """Linear extension of the grafting operator B_+ to linear combinations."""
    from .trees import b_plus

    return x.map_forests(lambda f: LinComb.of(b_plus(f)))


def nbrel_identity(t0: RootedTree, parts: Forest) -> bool:
    """Check N_{t0}(B_+(parts)) = B_+(t0 parts) + sum_i B_+(parts with part_i grown)."""
    from .trees import b_plus

    host = b_plus(parts)
    lhs = natural_growth(t0, LinComb.of(host))
    rhs = LinComb.of(b_plus(Forest(parts.trees + (t0,))))
    for i, part in enumerate(parts.trees):
        rest = parts.trees[:i] + parts.trees[i + 1:]
        grown = natural_growth(t0, LinComb.of(part))
        rhs = rhs + b_plus_lin(grown * LinComb.of(Forest(rest)))
    return lhs == rhs


def parse_lincomb(text: str) -> LinComb:
    """Parse `c1 F1 + c2 F2 + ...`; coefficients are optional and default to 1."""
    pos = _skip_ws(text, 0)
    if pos == len(text):
        raise TreeParseError("empty expression", text, pos)
    if text.strip() == "0":
        return LinComb.zero()
    out = LinComb.zero()
    sign = Fraction(1)
    first = True
    while pos < len(text):
        if not first or text[pos] in "+-":
            if pos >= len(text) or text[pos] not in "+-":
                raise TreeParseError("expected '+' or '-'", text, pos)
            sign = Fraction(1) if text[pos] == "+" else Fraction(-1)
            pos = _skip_ws(text, pos + 1)
        first = False
        coeff, pos = _parse_coeff(text, pos)
        forest, pos = _parse_forest_at(text, pos)
        out = out + LinComb.of(forest, sign * coeff)
        pos = _skip_ws(text, pos)
    return out


def _parse_coeff(text: str, pos: int) -> tuple[Fraction, int]:
    start = pos
    while pos < len(text) and (text[pos].isdigit() or text[pos] == "/"):
        pos += 1
    if pos == start:
        return Fraction(1), pos
    token = text[start:pos]
    # A bare `1` may be the empty forest rather than a coefficient.
    rest = _skip_ws(text, pos)
    if token == "1" and (rest == len(text) or text[rest] in "+-"):
        return Fraction(1), start
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise TreeParseError("malformed rational coefficient", text, start) from None
    return value, _skip_ws(text, pos)


def _parse_forest_at(text: str, pos: int) -> tuple[Forest, int]:
    if pos < len(text) and text[pos] == "1":
        return EMPTY_FOREST, pos + 1
    trees = []
    while True:
        tree, pos = _parse_tree_at(text, pos)
        trees.append(tree)
        save = pos
        pos = _skip_ws(text, pos)
        if pos < len(text) and text[pos] == "*":
            pos = _skip_ws(text, pos + 1)
            continue
        pos = save
        break
    return Forest(tuple(trees)), pos
