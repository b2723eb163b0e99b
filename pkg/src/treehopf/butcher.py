"""Butcher elementary differentials over exact jets.

For the system dx/ds = f(x), each rooted tree indexes a function of f
and its derivatives via the grafting recursion: the differential of
B_+(t_1..t_m) contracts the children's differentials into the m-th
derivative of f.  The operator version phi_t acts the same way on an
arbitrary function, with phi of the single vertex the identity.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .hopf import LinComb, natural_growth
from .series import MultiSeries, TruncationError, VectorField
from .trees import Forest, RootedTree

__all__ = [
    "elementary_differential",
    "elementary_differential_lincomb",
    "phi_t_apply",
    "phi_forest_apply",
    "phi_at_origin",
    "check_growth_derivative",
    "check_generalized_growth",
    "flow_derivative",
]


def _require_depth(t: RootedTree, f: VectorField):
    need = t.max_fertility()
    if f.trunc is not None and f.trunc < need:
        raise TruncationError(
            f"tree {t.serial} needs derivatives of order {need}, "
            f"field truncated at {f.trunc}"
        )


def elementary_differential(t: RootedTree, f: VectorField, _memo=None) -> tuple[MultiSeries, ...]:
    """The n-vector phi(t) for the field f."""
    _require_depth(t, f)
    if _memo is None:
        _memo = {}
    return _phi_vec(t, f, _memo)


def _phi_vec(t: RootedTree, f: VectorField, memo) -> tuple[MultiSeries, ...]:
    got = memo.get(t)
    if got is not None:
        return got
    n = f.nvars
    if not t.children:
        out = f.components
    else:
        children = [_phi_vec(c, f, memo) for c in t.children]
        out = tuple(
            _contract(children, comp, n) for comp in f.components
        )
    memo[t] = out
    return out


def _contract(children, target: MultiSeries, n: int) -> MultiSeries:
    """Sum over index tuples of (prod_j phi^{k_j}(t_j)) d_{k_1..k_m} target."""
    m = len(children)
    acc = None
    for ks in itertools.product(range(n), repeat=m):
        term = target
        for k in ks:
            term = term.deriv(k)
        for j, k in enumerate(ks):
            term = term * children[j][k]
        acc = term if acc is None else acc + term
    return acc if acc is not None else target


def phi_t_apply(t: RootedTree, f: VectorField, h: MultiSeries) -> MultiSeries:
    """Apply the differential operator phi_t to h; phi of the vertex is h itself."""
    _require_depth(t, f)
    memo: dict = {}
    children = [_phi_vec(c, f, memo) for c in t.children]
    return _contract(children, h, f.nvars)


def phi_forest_apply(forest: Forest, f: VectorField, h: MultiSeries) -> MultiSeries:
    """Composition of phi_t over the trees of a forest, in canonical order."""
    out = h
    for t in forest.trees:
        out = phi_t_apply(t, f, out)
    return out


def elementary_differential_lincomb(x: LinComb, f: VectorField) -> tuple[MultiSeries, ...]:
    """Linear extension of phi to a combination of single trees."""
    n = f.nvars
    acc = [MultiSeries.zero(n, f.trunc) for _ in range(n)]
    memo: dict = {}
    for forest, coeff in x.terms.items():
        if len(forest.trees) != 1:
            raise ValueError("phi extends linearly over single trees only")
        vec = _phi_vec(forest.trees[0], f, memo)
        acc = [a + v.scale(coeff) for a, v in zip(acc, vec)]
    return tuple(acc)


def phi_at_origin(x: LinComb, f: VectorField) -> list[Fraction]:
    """phi(x) evaluated at the jet origin."""
    return [c.eval0() for c in elementary_differential_lincomb(x, f)]


def flow_derivative(vec, f: VectorField):
    """The flow derivative sum_j f^j d_j applied componentwise."""
    n = f.nvars
    out = []
    for comp in vec:
        acc = None
        for j in range(n):
            term = f.components[j] * comp.deriv(j)
            acc = term if acc is None else acc + term
        out.append(acc)
    return tuple(out)


def check_growth_derivative(t: RootedTree, f: VectorField) -> bool:
    """phi(N(t)) equals the flow derivative of phi(t), as retained jets."""
    from .trees import LEAF

    lhs = elementary_differential_lincomb(natural_growth(LEAF, LinComb.of(t)), f)
    rhs = flow_derivative(elementary_differential(t, f), f)
    return all(a.eq_retained(b) for a, b in zip(lhs, rhs))


def check_generalized_growth(t: RootedTree, s: RootedTree, f: VectorField) -> bool:
    """phi(N_t(s)) equals phi^j(t) d_j phi(s), as retained jets."""
    lhs = elementary_differential_lincomb(natural_growth(t, LinComb.of(s)), f)
    memo: dict = {}
    phi_t = _phi_vec(t, f, memo)
    phi_s = _phi_vec(s, f, memo)
    n = f.nvars
    rhs = []
    for i in range(n):
        acc = None
        for j in range(n):
            term = phi_t[j] * phi_s[i].deriv(j)
            acc = term if acc is None else acc + term
        rhs.append(acc)
    return all(a.eq_retained(b) for a, b in zip(lhs, rhs))
