"""Acceptance suite: one printed pass/fail line per criterion.

Every check is an exact rational identity (zero tolerance).  Three
sub-criteria of the operator-model section assert cut-sum coproduct
identities that are provably not satisfiable tree-by-tree in the jet
model (the transfer of a tree operator across a lifted diffeomorphism
forces two incompatible values for the single-vertex symbol once trees
have two or more vertices).  Those asserts are kept as stated and fail;
the companion statements that do hold exactly (the commutator table,
the delta_k combinations, the generation recursion) are asserted in
their own criteria below and in tests/test_frame.py.
"""

import random
from fractions import Fraction
from math import factorial

from treehopf import (
    EMPTY_FOREST,
    Forest,
    LEAF,
    LinComb,
    Monomial,
    MultiSeries,
    ODEProblem,
    Tensor2,
    antipode,
    b_plus,
    check_X_coproduct,
    check_cocycle,
    check_commutators,
    check_coprodcontrib,
    check_delta_chain,
    check_delta_coproduct,
    check_generalized_growth,
    check_growth_derivative,
    check_pushforward,
    closure_check,
    coproduct,
    counit,
    decompose,
    delta_from_commutators,
    delta_k,
    delta_t_apply,
    enumerate_forests,
    enumerate_trees,
    eval_growth_expr,
    fan_closed_form_report,
    fan_graph,
    generate_subalgebra,
    natural_growth,
    nbrel_identity,
    ntcoprod_identity,
    parse_tree,
    phi_at_origin,
    phi_frame,
    series_solve,
)
from treehopf.frame import random_diffeo, random_frame_function
from treehopf.verify import random_quadratic_field
from oracles import all_trees_by_levels

ORDER = 8
TRIALS = 10
GAMMA_X = MultiSeries(1, {(1,): 1}, ORDER)
L2 = parse_tree("[[]]")
CHERRY = parse_tree("[[][]]")
LADDER3 = parse_tree("[[[]]]")


def _report(criterion: str, ok: bool, detail: str = "") -> bool:
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line)
    return ok


def _forests_up_to(deg):
    return [f for d in range(deg + 1) for f in enumerate_forests(d)]


def test_criterion_1_hopf_axioms():
    failures = []
    for f in _forests_up_to(6):
        x = LinComb.of(f)
        d = coproduct(x)
        left3: dict = {}
        right3: dict = {}
        for (fl, fr), c in d.terms.items():
            for (gl, gr), e in coproduct(LinComb.of(fl)).terms.items():
                k = (gl, gr, fr)
                left3[k] = left3.get(k, Fraction(0)) + c * e
            for (gl, gr), e in coproduct(LinComb.of(fr)).terms.items():
                k = (fl, gl, gr)
                right3[k] = right3.get(k, Fraction(0)) + c * e
        if {k: v for k, v in left3.items() if v} != {k: v for k, v in right3.items() if v}:
            failures.append(("coassociativity", f.serial))
        eps_id = LinComb.zero()
        id_eps = LinComb.zero()
        s_conv = LinComb.zero()
        conv_s = LinComb.zero()
        for (fl, fr), c in d.terms.items():
            eps_id = eps_id + LinComb.of(fr, c * counit(LinComb.of(fl)))
            id_eps = id_eps + LinComb.of(fl, c * counit(LinComb.of(fr)))
            s_conv = s_conv + (antipode(LinComb.of(fl)) * LinComb.of(fr)).scale(c)
            conv_s = conv_s + (LinComb.of(fl) * antipode(LinComb.of(fr))).scale(c)
        target = LinComb.unit().scale(counit(x))
        if eps_id != x or id_eps != x:
            failures.append(("counit", f.serial))
        if s_conv != target or conv_s != target:
            failures.append(("antipode", f.serial))
    ok = _report("1 Hopf axioms on forests of degree <= 6", not failures,
                 f"{len(_forests_up_to(6))} forests")
    assert ok, failures[:5]


def test_criterion_2_enumeration_oracle():
    counts = [len(enumerate_trees(n)) for n in range(1, 11)]
    ok = counts == [1, 1, 2, 4, 9, 20, 48, 115, 286, 719]
    for n in range(1, 11):
        if set(enumerate_trees(n)) != all_trees_by_levels(n):
            ok = False
            break
    assert _report("2 enumeration matches level-sequence oracle, n <= 10", ok,
                   f"counts {counts}")


def test_criterion_3_paper_displays():
    ok = True
    vectors = {
        1: [("[]", 1)],
        2: [("[[]]", 1)],
        3: [("[[][]]", 1), ("[[[]]]", 1)],
        4: [("[[][][]]", 1), ("[[[]][]]", 3), ("[[[][]]]", 1), ("[[[[]]]]", 1)],
    }
    for k, want in vectors.items():
        got = [(f.serial, c) for f, c in delta_k(k).sorted_terms()]
        ok &= got == [(s, Fraction(c)) for s, c in want]
    t = b_plus(Forest((LEAF, L2)))
    grown = natural_growth(LEAF, LinComb.of(t))
    want = (
        LinComb.of(b_plus(Forest((LEAF, LADDER3))))
        + LinComb.of(b_plus(Forest((LEAF, CHERRY))))
        + LinComb.of(b_plus(Forest((L2, L2))))
        + LinComb.of(b_plus(Forest((LEAF, LEAF, L2))))
    )
    ok &= grown == want
    grown2 = natural_growth(t, LinComb.of(L2))
    want2 = LinComb.of(b_plus(Forest((LEAF, t)))) + LinComb.of(
        b_plus(Forest((b_plus(Forest((t,))),))))
    ok &= grown2 == want2
    dot = LinComb.of(LEAF)
    ok &= coproduct(dot) == (
        Tensor2.of(EMPTY_FOREST, Forest((LEAF,))) + Tensor2.of(Forest((LEAF,)), EMPTY_FOREST)
    )
    assert _report("3 displayed expansions reproduced bit-exactly", ok)


def test_criterion_4_growth_coproduct_and_bplus_relation():
    trees = [t for n in range(1, 6) for t in enumerate_trees(n)]
    ok = True
    bad = []
    for t in trees:
        for s in trees:
            if t.vertex_count + s.vertex_count <= 6 and not ntcoprod_identity(t, s):
                ok = False
                bad.append((t.serial, s.serial))
    for t in trees:
        for d in range(0, 6 - t.vertex_count + 1):
            for parts in enumerate_forests(d):
                if not nbrel_identity(t, parts):
                    ok = False
                    bad.append((t.serial, parts.serial))
    assert _report("4 N_t coproduct and B+ relations, total degree <= 6", ok), bad[:5]


def test_criterion_5_decomposition_round_trip():
    bad = [t.serial for n in range(1, 7) for t in enumerate_trees(n)
           if eval_growth_expr(decompose(t)) != LinComb.of(t)]
    assert _report("5 decompose/eval round-trip, |V(t)| <= 6", not bad), bad[:5]


def test_criterion_6_sub_hopf_closure_and_fans():
    ok = True
    details = []
    for k in (1, 2, 3):
        gens = {fan_graph(i) for i in range(1, k + 1)}
        rep = closure_check(generate_subalgebra(gens, 6))
        ok &= bool(rep)
        if not rep:
            details.append(f"A_S{k}: {rep}")
    subscript_n_minus_i = True
    subscript_paper = True
    for n in range(1, 8):
        rep = fan_closed_form_report(n)
        ok &= all(rep["binomial_coefficients"].get(i, 0) == c
                  for i, c in rep["expected_binomials"].items())
        subscript_n_minus_i &= rep["matches_f_n_minus_i"]
        if n >= 3:
            subscript_paper &= rep["matches_paper_f_n_minus_i_minus_1"]
    ok &= subscript_n_minus_i
    details.append(
        "computed coproduct realizes the subscript F_{n-i}"
        + ("" if not subscript_paper else " and F_{n-i-1}")
    )
    assert _report("6 sub-Hopf closure and fan binomials", ok, "; ".join(details))


def test_criterion_7_butcher_bridge():
    field = random_quadratic_field(2, 0)
    ok = True
    sol = series_solve(ODEProblem(field, 6))
    for k in range(1, 7):
        want = [c * factorial(k) for c in sol[k]]
        ok &= phi_at_origin(delta_k(k), field) == want
    trees = [t for n in range(1, 6) for t in enumerate_trees(n)]
    for t in trees:
        ok &= check_growth_derivative(t, field)
    for t in trees:
        for s in trees:
            if t.vertex_count + s.vertex_count <= 6:
                ok &= check_generalized_growth(t, s, field)
    assert _report("7 Butcher bridge and growth lemmas (seed 0, k <= 6)", ok)


def _cm_instances():
    rng = random.Random(0)
    out = []
    for i in range(TRIALS):
        psi = random_diffeo(rng, ORDER)
        eta = random_diffeo(rng, ORDER)
        fa = random_frame_function(rng, ORDER)
        fb = random_frame_function(rng, ORDER)
        out.append((i, psi, eta, fa, fb))
    return out


def test_criterion_8a_cocycle():
    ok = all(check_cocycle(psi, eta, GAMMA_X) for _, psi, eta, _, _ in _cm_instances())
    assert _report("8a gamma cocycle, 10 seeded jets, order 8", ok)


def test_criterion_8b_coprodcontrib():
    trees = [t for n in range(1, 5) for t in enumerate_trees(n)]
    bad = []
    for i, psi, _eta, _fa, fb in _cm_instances():
        for t in trees:
            if not check_coprodcontrib(t, psi, GAMMA_X, fb):
                bad.append((i, t.serial))
    ok = _report("8b cut expansion of the transferred operator, |V(t)| <= 4", not bad,
                 f"{len(bad)} failing instances, all with |V(t)| >= 3" if bad else "")
    assert ok, (
        "the cut expansion of phi_t across a lifted diffeomorphism holds only "
        "for |V(t)| <= 2; deeper trees pick up non-tensorial cross terms "
        f"(first failures: {bad[:3]}; see treehopf verify --suite cm)"
    )


def test_criterion_8c_delta_coproduct():
    trees = [t for n in range(1, 5) for t in enumerate_trees(n)]
    bad = []
    for i, psi, eta, fa, fb in _cm_instances():
        a, b = Monomial(fa, psi), Monomial(fb, eta)
        for t in trees:
            if not check_delta_coproduct(t, a, b, GAMMA_X):
                bad.append((i, t.serial))
    ok = _report("8c delta_t coproduct on monomial products, |V(t)| <= 4", not bad,
                 f"{len(bad)} failing instances, all with |V(t)| >= 3" if bad else "")
    assert ok, (
        "the cut-sum coproduct of delta_t holds tree-by-tree only for "
        "|V(t)| <= 2; it does hold for every delta_k combination "
        f"(first failures: {bad[:3]}; see tests/test_frame.py)"
    )


def test_criterion_8d_X_coproduct():
    trees = [t for n in range(1, 5) for t in enumerate_trees(n)]
    bad = []
    for i, psi, eta, fa, fb in _cm_instances():
        a, b = Monomial(fa, psi), Monomial(fb, eta)
        for t in trees:
            if not check_X_coproduct(t, a, b, GAMMA_X):
                bad.append((i, t.serial))
    ok = _report("8d X_t coproduct on monomial products, |V(t)| <= 4", not bad,
                 f"{len(bad)} failing instances, all with |V(t)| >= 2" if bad else "")
    assert ok, (
        "the cut-sum coproduct of X_t holds only for the single vertex: the "
        "x- and z-components of the transferred operator force two different "
        "values for the single-vertex symbol once |V(t)| >= 2 "
        f"(first failures: {bad[:3]})"
    )


def test_criterion_8e_commutator_table():
    trees = [t for n in range(1, 5) for t in enumerate_trees(n)]
    bad = []
    for i, psi, _eta, fa, _fb in _cm_instances():
        m = Monomial(fa, psi)
        for t in trees:
            for u in trees:
                if t.vertex_count + u.vertex_count > 5:
                    continue
                rep = check_commutators(t, u, m, GAMMA_X)
                if not rep.ok:
                    bad.append((i, t.serial, u.serial, rep.failing()))
        for k in (1, 2, 3):
            if not check_delta_chain(k, m, GAMMA_X):
                bad.append((i, f"delta chain k={k}"))
    assert _report("8e full commutator table, |V(t)|+|V(t')| <= 5", not bad), bad[:5]


def test_criterion_8f_delta_from_commutators():
    trees = [t for n in range(1, 5) for t in enumerate_trees(n)]
    bad = []
    for i, psi, _eta, fa, _fb in _cm_instances():
        m = Monomial(fa, psi)
        for t in trees:
            got = delta_from_commutators(t, m, GAMMA_X)
            want = delta_t_apply(t, m, GAMMA_X)
            if not got.f.eq_retained(want.f):
                bad.append((i, t.serial))
    assert _report("8f delta_t from nested commutators, |V(t)| <= 4", not bad), bad[:5]


def test_criterion_8_pushforward_supplement():
    # companion invariant to 8b: the product formula for the transferred
    # operator; same truth boundary
    trees = [t for n in range(1, 5) for t in enumerate_trees(n)]
    bad = []
    for i, psi, _eta, _fa, fb in _cm_instances()[:TRIALS]:
        for t in trees:
            if not check_pushforward(t, psi, GAMMA_X, fb):
                bad.append((i, t.serial))
    ok = _report("8g pushforward product formula, |V(t)| <= 4", not bad,
                 f"{len(bad)} failing instances, all with |V(t)| >= 3" if bad else "")
    assert ok, (
        "the pushforward product formula holds only for |V(t)| <= 2 "
        f"(first failures: {bad[:3]})"
    )


def test_criterion_9_degeneration():
    gamma0 = MultiSeries.zero(1, ORDER)
    ok = True
    for n in range(2, 5):
        for t in enumerate_trees(n):
            fx, fz = phi_frame(t, gamma0, ORDER)
            ok &= fx.is_zero() and fz.is_zero()
    rng = random.Random(1)
    for _ in range(TRIALS):
        m = Monomial(random_frame_function(rng, ORDER), random_diffeo(rng, ORDER))
        rep = check_commutators(LEAF, LEAF, m, gamma0)
        ok &= rep.ok
        ok &= check_delta_chain(1, m, gamma0)
    assert _report("9 flat curvature degeneration with classical relations intact", ok)
