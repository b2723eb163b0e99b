"""Generation of trees by natural growth, fan graphs, and sub-Hopf algebras."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .hopf import LinComb, Tensor2, coproduct, natural_growth
from .linalg import in_span, independent_rows, solve_consistent
from .trees import EMPTY_FOREST, LEAF, Forest, RootedTree, b_plus

__all__ = [
    "GrowthExpr",
    "GrowthLeaf",
    "GrowthApply",
    "GrowthCombo",
    "decompose",
    "eval_growth_expr",
    "fan_graph",
    "fan_coproduct",
    "fan_closed_form_report",
    "GradedBasis",
    "generate_subalgebra",
    "ClosureReport",
    "closure_check",
    "parse_growth_expr",
]


class GrowthExpr:
    """Expression over the leaf, N_t applications, and rational combinations."""

    __slots__ = ()


@dataclass(frozen=True)
class GrowthLeaf(GrowthExpr):
    __slots__ = ()

    def __str__(self) -> str:
        return "."


@dataclass(frozen=True)
class GrowthApply(GrowthExpr):
    tree: RootedTree
    sub: GrowthExpr

    def __str__(self) -> str:
        return f"N{{{self.tree.serial}}}({self.sub})"


@dataclass(frozen=True)
class GrowthCombo(GrowthExpr):
    parts: tuple[tuple[Fraction, GrowthExpr], ...]

    def __str__(self) -> str:
        bits = []
        for coeff, expr in self.parts:
            mag = -coeff if coeff < 0 else coeff
            body = f"({expr})" if isinstance(expr, GrowthCombo) else str(expr)
            piece = f"{mag} {body}"
            if not bits:
                bits.append(piece if coeff > 0 else f"- {piece}")
            else:
                bits.append(("+ " if coeff > 0 else "- ") + piece)
        return " ".join(bits) if bits else "0"


def eval_growth_expr(e: GrowthExpr) -> LinComb:
    """Evaluate: the leaf is the single vertex, N_t via natural growth."""
    if isinstance(e, GrowthLeaf):
        return LinComb.of(LEAF)
    if isinstance(e, GrowthApply):
        return natural_growth(e.tree, eval_growth_expr(e.sub))
    if isinstance(e, GrowthCombo):
        out = LinComb.zero()
        for coeff, sub in e.parts:
            out = out + eval_growth_expr(sub).scale(coeff)
        return out
    raise TypeError(f"not a growth expression: {type(e).__name__}")


_decompose_memo: dict[RootedTree, GrowthExpr] = {}


def decompose(t: RootedTree) -> GrowthExpr:
    """Write t as iterated natural growth applied to the single vertex.

    Follows the induction on root fertility: with t = B_+(rest, t_m) for
    t_m the largest root child,

        t = N_{t_m}(B_+(rest)) - sum_i B_+(rest with rest_i grown by t_m),

    and each correction tree has smaller root fertility, so the recursion
    terminates.  Decompositions are not unique; this returns the proof's.
    """
    cached = _decompose_memo.get(t)
    if cached is not None:
        return cached
    if t == LEAF:
        return GrowthLeaf()
    t_m = t.children[0]  # canonical storage is largest-first
    rest = t.children[1:]
    base = RootedTree(rest)
    main = GrowthApply(t_m, decompose(base))
    parts: list[tuple[Fraction, GrowthExpr]] = [(Fraction(1), main)]
    for i, part in enumerate(rest):
        others = rest[:i] + rest[i + 1:]
        grown = natural_growth(t_m, LinComb.of(part))
        for forest, coeff in grown.sorted_terms():
            correction = b_plus(Forest(others) * forest)
            parts.append((-coeff, decompose(correction)))
    expr: GrowthExpr = main if len(parts) == 1 else GrowthCombo(tuple(parts))
    _decompose_memo[t] = expr
    return expr


def fan_graph(i: int) -> RootedTree:
    """The fan F_i: i vertices, i-1 leaves all attached to the root."""
    if i < 1:
        raise ValueError(f"fan index must be >= 1, got {i}")
    return b_plus(Forest((LEAF,) * (i - 1)))


def fan_coproduct(n: int) -> Tensor2:
    """Coproduct of the fan F_n, computed from the cut sum."""
    return coproduct(LinComb.of(fan_graph(n)))


def fan_closed_form_report(n: int) -> dict:
    """Compare Delta(F_n) with the binomial closed form.

    The closed form checked is
        Delta F_n = 1 (x) F_n + F_n (x) 1
                    + sum_{i=1}^{n-1} C(n-1, i) dot^i (x) F_{n-i},
    where dot^i is the forest of i single vertices.  The report records
    whether the right leg realizes F_{n-i} or F_{n-i-1}.
    """
    computed = fan_coproduct(n)

    def closed(sub: int) -> Tensor2 | None:
        out = Tensor2.of(EMPTY_FOREST, Forest((fan_graph(n),)))
        out = out + Tensor2.of(Forest((fan_graph(n),)), EMPTY_FOREST)
        for i in range(1, n):
            k = n - i if sub == 0 else n - i - 1
            if k < 1:
                return None
            dots = Forest((LEAF,) * i)
            out = out + Tensor2.of(dots, Forest((fan_graph(k),)), comb(n - 1, i))
        return out

    with_n_minus_i = closed(0)
    with_paper = closed(1)
    binomials = {}
    for (left, right), coeff in computed.terms.items():
        if left.trees and all(t == LEAF for t in left.trees) and not right.is_empty():
            binomials[left.degree] = coeff
    return {
        "n": n,
        "computed": computed,
        "matches_f_n_minus_i": computed == with_n_minus_i,
        "matches_paper_f_n_minus_i_minus_1": with_paper is not None and computed == with_paper,
        "binomial_coefficients": binomials,
        "expected_binomials": {i: comb(n - 1, i) for i in range(1, n)},
    }


@dataclass
class GradedBasis:
    """Per-degree spanning bases of a growth subalgebra A_S."""

    generators: tuple[RootedTree, ...]
    max_degree: int
    by_degree: dict[int, list[LinComb]]

    def degree_span(self, d: int) -> list[LinComb]:
        if d == 0:
            return [LinComb.unit()]
        return self.by_degree.get(d, [])


def _lincomb_vector(x: LinComb, index: dict[Forest, int], size: int) -> list[Fraction]:
    v = [Fraction(0)] * size
    for f, c in x.terms.items():
        v[index[f]] = c
    return v


def generate_subalgebra(S, max_degree: int) -> GradedBasis:
    """Spanning bases for A_S = Q[S][iterated N_t growths], degree by degree.

    Iterated growth words N_{t_n}(...(N_{t_1}(s))...) with s, t_i in S are
    enumerated breadth-first by degree, then closed under products, and
    each graded component is reduced to an independent basis by exact row
    reduction.
    """
    gens = tuple(sorted(set(S)))
    if not gens:
        raise ValueError("generating set must be non-empty")
    if max_degree < max(t.vertex_count for t in gens):
        raise ValueError("max_degree must cover the generating set")

    atoms: list[LinComb] = [LinComb.of(t) for t in gens]
    frontier = list(atoms)
    while frontier:
        new_frontier = []
        for elem in frontier:
            deg = elem.homogeneous_degree()
            for t in gens:
                if deg + t.vertex_count <= max_degree:
                    grown = natural_growth(t, elem)
                    if grown:
                        atoms.append(grown)
                        new_frontier.append(grown)
        frontier = new_frontier

    # Products of atoms, by multisets with bounded total degree.
    products: dict[int, list[LinComb]] = {d: [] for d in range(1, max_degree + 1)}

    def extend(start: int, current: LinComb, degree: int):
        products[degree].append(current)
        for j in range(start, len(atoms)):
            d = atoms[j].homogeneous_degree()
            if degree + d <= max_degree:
                extend(j, current * atoms[j], degree + d)

    for j, atom in enumerate(atoms):
        extend(j, atom, atom.homogeneous_degree())

    by_degree: dict[int, list[LinComb]] = {}
    for d in range(1, max_degree + 1):
        elems = products[d]
        if not elems:
            by_degree[d] = []
            continue
        forests = sorted({f for e in elems for f in e.terms}, key=lambda f: f.sort_key())
        index = {f: i for i, f in enumerate(forests)}
        rows = [_lincomb_vector(e, index, len(forests)) for e in elems]
        keep = independent_rows(rows)
        by_degree[d] = [elems[i] for i in keep]
    return GradedBasis(generators=gens, max_degree=max_degree, by_degree=by_degree)


@dataclass
class ClosureReport:
    ok: bool
    element: LinComb | None = None
    bidegree: tuple[int, int] | None = None
    term: tuple[Forest, Forest] | None = None

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "closed under the coproduct"
        return (
            f"coproduct escapes the span: element {self.element}, "
            f"bidegree {self.bidegree}, term ({self.term[0]} | {self.term[1]})"
        )


def closure_check(basis: GradedBasis) -> ClosureReport:
    """Check every basis element's coproduct stays inside span (x) span."""
    for d in range(1, basis.max_degree + 1):
        for elem in basis.degree_span(d):
            delta = coproduct(elem)
            components: dict[tuple[int, int], dict[tuple[Forest, Forest], Fraction]] = {}
            for (fl, fr), c in delta.terms.items():
                components.setdefault((fl.degree, fr.degree), {})[(fl, fr)] = c
            for (dl, dr), comp in sorted(components.items()):
                left_basis = basis.degree_span(dl)
                right_basis = basis.degree_span(dr)
                if not _component_in_span(comp, left_basis, right_basis):
                    worst = min(comp, key=lambda p: (p[0].sort_key(), p[1].sort_key()))
                    return ClosureReport(False, elem, (dl, dr), worst)
    return ClosureReport(True)


def _component_in_span(component, left_basis, right_basis) -> bool:
    if not left_basis or not right_basis:
        return not component
    products = []
    support = set(component)
    for bl, br in itertools.product(left_basis, right_basis):
        prod: dict[tuple[Forest, Forest], Fraction] = {}
        for fl, cl in bl.terms.items():
            for fr, cr in br.terms.items():
                pair = (fl, fr)
                prod[pair] = prod.get(pair, Fraction(0)) + cl * cr
        products.append(prod)
        support.update(prod)
    pairs = sorted(support, key=lambda p: (p[0].sort_key(), p[1].sort_key()))
    index = {p: i for i, p in enumerate(pairs)}
    # One linear system per component: columns are basis products.
    a = [[Fraction(0)] * len(products) for _ in pairs]
    for j, prod in enumerate(products):
        for pair, c in prod.items():
            a[index[pair]][j] = c
    target = [Fraction(0)] * len(pairs)
    for pair, c in component.items():
        target[index[pair]] = c
    return solve_consistent(a, target) is not None


def parse_growth_expr(text: str):
    """Parse the GrowthExpr text format; inverse of str() on expressions."""
    from .trees import TreeParseError, _parse_tree_at, _skip_ws

    def parse_atom(pos: int):
        pos = _skip_ws(text, pos)
        if pos < len(text) and text[pos] == ".":
            return GrowthLeaf(), pos + 1
        if pos < len(text) and text[pos] == "(":
            sub, p = parse_sum(pos + 1)
            p = _skip_ws(text, p)
            if p >= len(text) or text[p] != ")":
                raise TreeParseError("expected ')'", text, p)
            return sub, p + 1
        if text.startswith("N{", pos):
            tree, p = _parse_tree_at(text, pos + 2)
            if p >= len(text) or text[p] != "}":
                raise TreeParseError("expected '}'", text, p)
            p = _skip_ws(text, p + 1)
            if p >= len(text) or text[p] != "(":
                raise TreeParseError("expected '('", text, p)
            sub, p = parse_sum(p + 1)
            p = _skip_ws(text, p)
            if p >= len(text) or text[p] != ")":
                raise TreeParseError("expected ')'", text, p)
            return GrowthApply(tree, sub), p + 1
        raise TreeParseError("expected '.' or 'N{'", text, pos)

    def parse_term(pos: int):
        pos = _skip_ws(text, pos)
        start = pos
        while pos < len(text) and (text[pos].isdigit() or text[pos] == "/"):
            pos += 1
        coeff = Fraction(1)
        if pos > start:
            coeff = Fraction(text[start:pos])
        atom, pos = parse_atom(pos)
        return coeff, atom, pos

    def parse_sum(pos: int):
        parts = []
        sign = Fraction(1)
        pos = _skip_ws(text, pos)
        if pos < len(text) and text[pos] == "-":
            sign = Fraction(-1)
            pos += 1
        while True:
            coeff, atom, pos = parse_term(pos)
            parts.append((sign * coeff, atom))
            pos = _skip_ws(text, pos)
            if pos < len(text) and text[pos] in "+-":
                sign = Fraction(1) if text[pos] == "+" else Fraction(-1)
                pos += 1
                continue
            break
        if len(parts) == 1 and parts[0][0] == 1:
            return parts[0][1], pos
        return GrowthCombo(tuple(parts)), pos

    expr, pos = parse_sum(0)
    pos = _skip_ws(text, pos)
    if pos != len(text):
        from .trees import TreeParseError as TPE

        raise TPE("trailing input after expression", text, pos)
    return expr
