import itertools
import random
from fractions import Fraction
from math import factorial

import pytest

from treehopf import (
    Forest,
    LEAF,
    LinComb,
    MultiSeries,
    ODEProblem,
    TruncationError,
    VectorField,
    b_plus,
    check_generalized_growth,
    check_growth_derivative,
    delta_k,
    elementary_differential,
    elementary_differential_lincomb,
    enumerate_trees,
    natural_growth,
    parse_tree,
    phi_at_origin,
    phi_forest_apply,
    phi_t_apply,
    series_solve,
)
from treehopf.verify import random_quadratic_field

L2 = parse_tree("[[]]")
CHERRY = parse_tree("[[][]]")
PAPER_T = b_plus(Forest((LEAF, L2)))

FIELD = random_quadratic_field(2, 0)


def test_phi_of_vertex_is_field():
    vec = elementary_differential(LEAF, FIELD)
    assert all(a.eq_retained(b) for a, b in zip(vec, FIELD.components))


def test_phi_of_ladder_is_directional_derivative():
    vec = elementary_differential(L2, FIELD)
    for i in range(2):
        want = MultiSeries.zero(2)
        for j in range(2):
            want = want + FIELD.components[j] * FIELD.components[i].deriv(j)
        assert vec[i].eq_retained(want)


def test_phi_paper_four_vertex_example():
    # phi^k(t) = sum_{i,j,l} f^j f^l (d_l f^i) (d_i d_j f^k) for the
    # 4-vertex tree grafting a vertex and a 2-chain onto the root.
    vec = elementary_differential(PAPER_T, FIELD)
    f = FIELD.components
    for k in range(2):
        want = MultiSeries.zero(2)
        for i, j, l in itertools.product(range(2), repeat=3):
            want = want + f[j] * f[l] * f[i].deriv(l) * f[k].deriv(i).deriv(j)
        assert vec[k].eq_retained(want)


def test_scalar_linear_field_kills_branching():
    fx = VectorField([MultiSeries(1, {(1,): 1})])
    xjet = MultiSeries(1, {(1,): 1})
    for n in range(1, 6):
        for t in enumerate_trees(n):
            vec = elementary_differential(t, fx)[0]
            if t.max_fertility() <= 1:
                assert vec.eq_retained(xjet), t.serial
            else:
                assert vec.is_zero(), t.serial


def test_phi_linear_extension_matches_termwise():
    x = delta_k(3)
    got = elementary_differential_lincomb(x, FIELD)
    want = [MultiSeries.zero(2) for _ in range(2)]
    for forest, c in x.terms.items():
        vec = elementary_differential(forest.trees[0], FIELD)
        want = [w + v.scale(c) for w, v in zip(want, vec)]
    assert all(a.eq_retained(b) for a, b in zip(got, want))


def test_phi_t_identity_and_field_consistency():
    h = MultiSeries(2, {(1, 1): 1, (0, 2): Fraction(1, 3)})
    assert phi_t_apply(LEAF, FIELD, h).eq_retained(h)
    for n in range(1, 6):
        for t in enumerate_trees(n):
            got = phi_t_apply(t, FIELD, FIELD.components[0])
            assert got.eq_retained(elementary_differential(t, FIELD)[0]), t.serial


def test_phi_operator_composition():
    # phi_{N_t} o phi_{t'} = phi_{N_t(t')}
    h = MultiSeries(2, {(2, 0): 1, (0, 1): -1})
    trees = [t for n in range(1, 4) for t in enumerate_trees(n)]
    for t in trees:
        for u in trees:
            if t.vertex_count + u.vertex_count > 5:
                continue
            inner = phi_t_apply(u, FIELD, h)
            vec = elementary_differential(t, FIELD)
            lhs = MultiSeries.zero(2)
            for j in range(2):
                lhs = lhs + vec[j] * inner.deriv(j)
            grown = natural_growth(t, LinComb.of(u))
            rhs = MultiSeries.zero(2)
            for forest, c in grown.terms.items():
                rhs = rhs + phi_forest_apply(forest, FIELD, h).scale(c)
            assert lhs.eq_retained(rhs), (t.serial, u.serial)


def test_phi_multiplicative_over_forests():
    # the differential attached to a forest is the product of the trees'
    # differentials, and it agrees with separate per-tree evaluation
    rng = random.Random(5)
    trees = [t for n in range(1, 4) for t in enumerate_trees(n)]
    for _ in range(8):
        t1, t2 = rng.choice(trees), rng.choice(trees)
        v1 = elementary_differential(t1, FIELD)
        v2 = elementary_differential(t2, FIELD)
        combined = [a * b for a, b in zip(v1, v2)]
        v1_again = elementary_differential(t1, FIELD)
        assert all(a.eq_retained(b * c) for a, b, c in zip(combined, v1_again, v2))


def test_phi_forest_apply_is_canonical_order_composition():
    h = MultiSeries(2, {(1, 0): 1, (0, 2): Fraction(1, 2)})
    forest = Forest((L2, CHERRY))
    step = h
    for t in forest.trees:
        step = phi_t_apply(t, FIELD, step)
    assert phi_forest_apply(forest, FIELD, h).eq_retained(step)


def test_truncation_error_names_required_depth():
    shallow = VectorField([c.with_trunc(1) for c in FIELD.components])
    with pytest.raises(TruncationError) as err:
        elementary_differential(CHERRY, shallow)
    assert "order 2" in str(err.value)


def test_taylor_bridge_seed0():
    sol = series_solve(ODEProblem(FIELD, 6))
    for k in range(1, 7):
        want = [c * factorial(k) for c in sol[k]]
        assert phi_at_origin(delta_k(k), FIELD) == want, k


def test_growth_derivative_lemma():
    assert check_growth_derivative(LEAF, FIELD)
    fsq = VectorField([MultiSeries(1, {(2,): 1})])
    assert check_growth_derivative(CHERRY, fsq)
    lhs = elementary_differential_lincomb(
        natural_growth(LEAF, LinComb.of(CHERRY)), fsq)
    assert not lhs[0].is_zero()
    for n in range(1, 6):
        for t in enumerate_trees(n):
            assert check_growth_derivative(t, FIELD), t.serial


def test_generalized_growth_lemma():
    assert check_generalized_growth(CHERRY, L2, FIELD)
    trees = [t for n in range(1, 6) for t in enumerate_trees(n)]
    for t in trees:
        for s in trees:
            if t.vertex_count + s.vertex_count <= 6:
                assert check_generalized_growth(t, s, FIELD), (t.serial, s.serial)


def test_phi_depth_bound_and_truncation_stability():
    # phi(t) needs f-derivatives only up to the maximal fertility, and a
    # deeper field truncation never changes the retained coefficients
    t = PAPER_T
    assert t.max_fertility() == 2
    shallow = VectorField([c.with_trunc(4) for c in FIELD.components])
    deep = VectorField([c.with_trunc(9) for c in FIELD.components])
    a = elementary_differential(t, shallow)
    b = elementary_differential(t, deep)
    for x, y in zip(a, b):
        assert x.eq_retained(y)
    exact = elementary_differential(t, FIELD)
    for x, y in zip(a, exact):
        assert x.eq_retained(y)
