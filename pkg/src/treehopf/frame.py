"""Formal one-dimensional frame-bundle model.

Coordinates are (x, y) with y = e^z the fiber variable, so the grading
field is Y = y d/dy and d/dz is realized exactly as y d/dy; z itself is
never expanded.  Functions on the frame bundle are polynomials in y with
truncated x-jet coefficients.  The flow of interest is

    dx/ds = y,    dz/ds = -y Gamma(x),

and phi-operators over this two-coordinate system (indices {x, z})
reuse the grafting recursion of the Butcher module.

Diffeomorphisms are jets psi with psi(0) = 0, psi'(0) > 0; the lift to
the frame bundle sends (x, y) to (psi(x), y psi'(x)).  Crossed-product
monomials f U*_psi multiply by

    (f U*_psi)(g U*_eta) = f (g o lift(psi)) U*_{eta o psi},

i.e. U*_psi U*_eta = U*_{eta o psi}, the contravariant convention; this
is the one under which the product is associative and the coproduct
theorems close (the paper writes both orders in adjacent displays).
"""

from __future__ import annotations

import itertools
import threading
from fractions import Fraction

from .hopf import LinComb
from .series import MultiSeries
from .trees import Forest, LEAF, RootedTree, admissible_cuts

__all__ = [
    "FrameFunction",
    "FormalDiffeo",
    "CurvatureFn",
    "Monomial",
    "lift_apply",
    "monomial_product",
    "gamma_bullet",
    "gamma_t",
    "frame_field",
    "phi_frame",
    "phi_frame_op",
    "delta_t_apply",
    "X_t_apply",
    "Y_apply",
]


def _xseries(value, trunc=None) -> MultiSeries:
    if isinstance(value, MultiSeries):
        return value
    return MultiSeries.constant(1, value, trunc)


class FrameFunction:
    """Polynomial in y with univariate x-jet coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        clean: dict[int, MultiSeries] = {}
        if coeffs:
            for k, g in (coeffs.items() if isinstance(coeffs, dict) else coeffs):
                if k < 0:
                    raise ValueError("negative powers of y are not representable")
                if not g.is_zero():
                    clean[k] = clean[k] + g if k in clean else g
        self.coeffs = {k: g for k, g in clean.items() if not g.is_zero()}

    @staticmethod
    def zero() -> "FrameFunction":
        return FrameFunction()

    @staticmethod
    def of_x(g: MultiSeries) -> "FrameFunction":
        return FrameFunction({0: g})

    @staticmethod
    def y_times(g: MultiSeries, power: int = 1) -> "FrameFunction":
        return FrameFunction({power: g})

    @staticmethod
    def constant(value, trunc=None) -> "FrameFunction":
        return FrameFunction({0: _xseries(Fraction(value), trunc)})

    @property
    def trunc(self) -> int | None:
        t = None
        for g in self.coeffs.values():
            gt = g.trunc
            if gt is not None:
                t = gt if t is None else min(t, gt)
        return t

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "FrameFunction") -> "FrameFunction":
        out = dict(self.coeffs)
        for k, g in other.coeffs.items():
            out[k] = out[k] + g if k in out else g
        return FrameFunction(out)

    def __neg__(self) -> "FrameFunction":
        return FrameFunction({k: -g for k, g in self.coeffs.items()})

    def __sub__(self, other: "FrameFunction") -> "FrameFunction":
        return self + (-other)

    def __mul__(self, other: "FrameFunction") -> "FrameFunction":
        out: dict[int, MultiSeries] = {}
        for k1, g1 in self.coeffs.items():
            for k2, g2 in other.coeffs.items():
                k = k1 + k2
                g = g1 * g2
                out[k] = out[k] + g if k in out else g
        return FrameFunction(out)

    def scale(self, c) -> "FrameFunction":
        c = Fraction(c)
        if not c:
            return FrameFunction()
        return FrameFunction({k: g.scale(c) for k, g in self.coeffs.items()})

    def dx(self) -> "FrameFunction":
        """Partial derivative in x (the base coordinate)."""
        return FrameFunction({k: g.deriv(0) for k, g in self.coeffs.items() if not g.deriv(0).is_zero()})

    def dz(self) -> "FrameFunction":
        """The operator y d/dy, i.e. d/dz in the exponential fiber coordinate."""
        return FrameFunction({k: g.scale(k) for k, g in self.coeffs.items() if k})

    def y_degrees(self) -> set[int]:
        return set(self.coeffs)

    def homogeneous_y_degree(self) -> int | None:
        degs = self.y_degrees()
        return degs.pop() if len(degs) == 1 else None

    def eq_retained(self, other: "FrameFunction") -> bool:
        """Equality of all coefficients retained at the common truncation."""
        trunc = None
        for t in (self.trunc, other.trunc):
            if t is not None:
                trunc = t if trunc is None else min(trunc, t)
        keys = set(self.coeffs) | set(other.coeffs)
        zero = MultiSeries.zero(1, trunc)
        for k in keys:
            a = self.coeffs.get(k, zero).with_trunc(trunc)
            b = other.coeffs.get(k, zero).with_trunc(trunc)
            if not a.eq_retained(b):
                return False
        return True

    def __eq__(self, other) -> bool:
        return isinstance(other, FrameFunction) and self.coeffs == other.coeffs

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        bits = []
        for k in sorted(self.coeffs):
            g = self.coeffs[k]
            yk = "" if k == 0 else ("y" if k == 1 else f"y^{k}")
            bits.append(f"({g}){' ' + yk if yk else ''}")
        return " + ".join(bits)

    def __repr__(self) -> str:
        return f"FrameFunction({str(self)!r})"


class FormalDiffeo:
    """An orientation-preserving formal diffeomorphism jet fixing 0."""

    __slots__ = ("series",)

    def __init__(self, series: MultiSeries):
        if series.nvars != 1:
            raise ValueError("a diffeomorphism jet is univariate")
        if series.eval0() != 0:
            raise ValueError("diffeomorphism must fix the expansion point")
        if series.coeff(1) <= 0:
            raise ValueError("diffeomorphism must be orientation preserving")
        self.series = series

    @staticmethod
    def identity(trunc: int | None = None) -> "FormalDiffeo":
        return FormalDiffeo(MultiSeries.variable(1, 0, trunc))

    @property
    def trunc(self) -> int | None:
        return self.series.trunc

    def d(self) -> MultiSeries:
        return self.series.deriv(0)

    def compose(self, inner: "FormalDiffeo") -> "FormalDiffeo":
        """(self o inner)(x) = self(inner(x))."""
        return FormalDiffeo(self.series.compose1(inner.series))

    def inverse(self) -> "FormalDiffeo":
        return FormalDiffeo(self.series.reversion())

    def is_identity(self) -> bool:
        return self.series.eq_retained(MultiSeries.variable(1, 0, self.trunc))

    def __eq__(self, other) -> bool:
        return isinstance(other, FormalDiffeo) and self.series.eq_retained(other.series)

    def __str__(self) -> str:
        return str(self.series)

    def __repr__(self) -> str:
        return f"FormalDiffeo({str(self)!r})"


CurvatureFn = MultiSeries


def lift_apply(psi: FormalDiffeo, h: FrameFunction) -> FrameFunction:
    """Compose h with the lifted diffeomorphism (x, y) -> (psi(x), y psi'(x))."""
    dpsi = psi.d()
    out = FrameFunction.zero()
    powers = {0: MultiSeries.constant(1, 1, psi.trunc)}
    for k, g in sorted(h.coeffs.items()):
        if k not in powers:
            p = powers[max(powers)]
            for _ in range(max(powers), k):
                p = p * dpsi
            powers[k] = p
        out = out + FrameFunction.y_times(g.compose1(psi.series) * powers[k], k)
    return out


class Monomial:
    """A crossed-product element f U*_psi."""

    __slots__ = ("f", "psi")

    def __init__(self, f: FrameFunction, psi: FormalDiffeo):
        self.f = f
        self.psi = psi

    def scale(self, c) -> "Monomial":
        return Monomial(self.f.scale(c), self.psi)

    def eq_retained(self, other: "Monomial") -> bool:
        return self.psi == other.psi and self.f.eq_retained(other.f)

    def __str__(self) -> str:
        return f"({self.f}) U*[{self.psi}]"

    def __repr__(self) -> str:
        return f"Monomial({str(self)!r})"


def monomial_product(a: Monomial, b: Monomial) -> Monomial:
    """(f U*_psi)(g U*_eta) = f (g o lift(psi)) U*_{eta o psi}."""
    return Monomial(a.f * lift_apply(a.psi, b.f), b.psi.compose(a.psi))


def gamma_bullet(psi: FormalDiffeo, Gamma: CurvatureFn) -> FrameFunction:
    """The single-vertex symbol, as a function of the source point:

    gamma(psi) = y ( psi'(x) Gamma(psi(x)) - Gamma(x) + psi''(x)/psi'(x) ).
    """
    dpsi = psi.d()
    g = dpsi * Gamma.compose1(psi.series) - Gamma.with_trunc(psi.trunc) \
        + dpsi.deriv(0) * dpsi.reciprocal()
    return FrameFunction.y_times(g)


def frame_field(Gamma: CurvatureFn, trunc: int | None = None) -> tuple[FrameFunction, FrameFunction]:
    """Components (dx/ds, dz/ds) = (y, -y Gamma(x)) of the frame flow."""
    one = MultiSeries.constant(1, 1, trunc)
    return (
        FrameFunction.y_times(one),
        FrameFunction.y_times(-Gamma.with_trunc(trunc)),
    )


def _frame_deriv(h: FrameFunction, axis: int) -> FrameFunction:
    return h.dx() if axis == 0 else h.dz()


_phi_cache: dict = {}
_phi_cache_lock = threading.Lock()


def _phi_memo_for(Gamma: CurvatureFn, trunc: int | None) -> dict:
    key = (Gamma, trunc)
    with _phi_cache_lock:
        memo = _phi_cache.get(key)
        if memo is None:
            memo = {}
            if len(_phi_cache) > 64:
                _phi_cache.clear()
            _phi_cache[key] = memo
    return memo


def phi_frame(t: RootedTree, Gamma: CurvatureFn, trunc: int | None = None, _memo=None):
    """Elementary differentials (phi^x(t), phi^z(t)) of the frame flow."""
    if _memo is None:
        _memo = _phi_memo_for(Gamma, trunc)
    field = frame_field(Gamma, trunc)
    return _phi_frame_vec(t, field, _memo)


def _phi_frame_vec(t: RootedTree, field, memo):
    got = memo.get(t)
    if got is not None:
        return got
    if not t.children:
        out = field
    else:
        children = [_phi_frame_vec(c, field, memo) for c in t.children]
        out = tuple(_frame_contract(children, comp) for comp in field)
    memo[t] = out
    return out


def _frame_contract(children, target: FrameFunction) -> FrameFunction:
    acc = FrameFunction.zero()
    for ks in itertools.product((0, 1), repeat=len(children)):
        term = target
        for k in ks:
            term = _frame_deriv(term, k)
        for j, k in enumerate(ks):
            term = term * children[j][k]
        acc = acc + term
    return acc


def phi_frame_op(t: RootedTree, Gamma: CurvatureFn, h: FrameFunction,
                 trunc: int | None = None, _memo=None) -> FrameFunction:
    """Apply the operator phi_t of the frame flow to h."""
    if _memo is None:
        _memo = _phi_memo_for(Gamma, trunc)
    field = frame_field(Gamma, trunc)
    children = [_phi_frame_vec(c, field, _memo) for c in t.children]
    return _frame_contract(children, h)


_gamma_cache: dict = {}


def gamma_t(t: RootedTree, psi: FormalDiffeo, Gamma: CurvatureFn) -> FrameFunction:
    """The tree-indexed symbol phi_t applied to the single-vertex symbol."""
    key = (t, psi.series, Gamma)
    with _phi_cache_lock:
        got = _gamma_cache.get(key)
    if got is not None:
        return got
    out = phi_frame_op(t, Gamma, gamma_bullet(psi, Gamma), psi.trunc)
    with _phi_cache_lock:
        if len(_gamma_cache) > 4096:
            _gamma_cache.clear()
        _gamma_cache[key] = out
    return out


def _gamma_forest(forest: Forest, psi: FormalDiffeo, Gamma: CurvatureFn) -> FrameFunction:
    out = FrameFunction.constant(1, psi.trunc)
    for t in forest.trees:
        out = out * gamma_t(t, psi, Gamma)
    return out


def delta_t_apply(x, m: Monomial, Gamma: CurvatureFn) -> Monomial:
    """delta over a tree, forest, or linear combination; multiplication by gamma."""
    if isinstance(x, RootedTree):
        x = LinComb.of(x)
    elif isinstance(x, Forest):
        x = LinComb.of(x)
    total = FrameFunction.zero()
    for forest, coeff in x.terms.items():
        total = total + _gamma_forest(forest, m.psi, Gamma).scale(coeff)
    return Monomial(total * m.f, m.psi)


def X_t_apply(x, m: Monomial, Gamma: CurvatureFn) -> Monomial:
    """The vector field X_t = phi^x(t) d_x + phi^z(t) d_z on a monomial.

    Extends linearly over combinations of single trees; the empty forest
    acts as the grading field Y.
    """
    if isinstance(x, RootedTree):
        x = LinComb.of(x)
    elif isinstance(x, Forest):
        x = LinComb.of(x)
    trunc = m.f.trunc if m.f.trunc is not None else m.psi.trunc
    out = FrameFunction.zero()
    memo = _phi_memo_for(Gamma, trunc)
    field = frame_field(Gamma, trunc)
    for forest, coeff in x.terms.items():
        if forest.is_empty():
            out = out + m.f.dz().scale(coeff)
            continue
        if len(forest.trees) != 1:
            raise ValueError("X extends linearly over single trees only")
        phi_x, phi_z = _phi_frame_vec(forest.trees[0], field, memo)
        out = out + (phi_x * m.f.dx() + phi_z * m.f.dz()).scale(coeff)
    return Monomial(out, m.psi)


def Y_apply(m: Monomial) -> Monomial:
    """The grading field Y = y d/dy."""
    return Monomial(m.f.dz(), m.psi)


def phi_frame_op_lincomb(x: LinComb, Gamma: CurvatureFn, h: FrameFunction,
                         trunc: int | None = None) -> FrameFunction:
    """phi as an operator, extended linearly over combinations of single trees."""
    memo = _phi_memo_for(Gamma, trunc)
    field = frame_field(Gamma, trunc)
    out = FrameFunction.zero()
    for forest, coeff in x.terms.items():
        if len(forest.trees) != 1:
            raise ValueError("phi extends linearly over single trees only")
        children = [_phi_frame_vec(c, field, memo) for c in forest.trees[0].children]
        out = out + _frame_contract(children, h).scale(coeff)
    return out


def first_mismatch(a: FrameFunction, b: FrameFunction):
    """First differing retained jet coefficient, or None: (y_deg, x_order, got, want)."""
    trunc = None
    for t in (a.trunc, b.trunc):
        if t is not None:
            trunc = t if trunc is None else min(trunc, t)
    keys = sorted(set(a.coeffs) | set(b.coeffs))
    for k in keys:
        ga = a.coeffs.get(k, MultiSeries.zero(1, trunc))
        gb = b.coeffs.get(k, MultiSeries.zero(1, trunc))
        orders = sorted({e[0] for e in ga.terms} | {e[0] for e in gb.terms})
        for o in orders:
            if trunc is not None and o > trunc:
                continue
            ca, cb = ga.coeff(o), gb.coeff(o)
            if ca != cb:
                return (k, o, ca, cb)
    return None


def check_delta_coproduct(t: RootedTree, a: Monomial, b: Monomial, Gamma: CurvatureFn) -> bool:
    """delta_t(ab) = sum over admissible cuts of delta_{P_c}(a) delta_{R_c}(b).

    delta over the empty forest acts as the identity.  Holds exactly for
    trees with at most two vertices and for every element of the
    delta_k-generated subalgebra; fails tree-by-tree from three vertices
    on (see check_delta_coproduct_lincomb for the statement that holds).
    """
    return check_delta_coproduct_lincomb(LinComb.of(t), a, b, Gamma)


def delta_coproduct_sides(x: LinComb, a: Monomial, b: Monomial,
                          Gamma: CurvatureFn) -> tuple[FrameFunction, FrameFunction]:
    """Both sides of the delta coproduct identity, as function parts."""
    from .hopf import coproduct

    ab = monomial_product(a, b)
    lhs = delta_t_apply(x, ab, Gamma).f
    rhs = FrameFunction.zero()
    for (fl, fr), c in coproduct(x).terms.items():
        da = delta_t_apply(LinComb.of(fl), a, Gamma)
        db = delta_t_apply(LinComb.of(fr), b, Gamma)
        rhs = rhs + monomial_product(da, db).f.scale(c)
    return lhs, rhs


def check_delta_coproduct_lincomb(x: LinComb, a: Monomial, b: Monomial,
                                  Gamma: CurvatureFn) -> bool:
    """The coproduct identity for delta over a linear combination of forests."""
    lhs, rhs = delta_coproduct_sides(x, a, b, Gamma)
    return lhs.eq_retained(rhs)


def check_X_coproduct(t: RootedTree, a: Monomial, b: Monomial, Gamma: CurvatureFn) -> bool:
    """X_t(ab) = X_t(a) b + sum over cuts of delta_{P_c}(a) X_{R_c}(b).

    The empty cut contributes a X_t(b) and the full cut delta_t(a) Y(b).
    Holds exactly for the single vertex; for larger trees no assignment
    of multiplication-operator symbols can satisfy it (the x- and
    z-components of the transfer force incompatible values), so this
    returns False from two vertices on.
    """
    lhs, rhs = X_coproduct_sides(t, a, b, Gamma)
    return lhs.eq_retained(rhs)


def X_coproduct_sides(t: RootedTree, a: Monomial, b: Monomial,
                      Gamma: CurvatureFn) -> tuple[FrameFunction, FrameFunction]:
    """Both sides of the X coproduct identity, as function parts."""
    ab = monomial_product(a, b)
    lhs = X_t_apply(t, ab, Gamma).f
    rhs = monomial_product(X_t_apply(t, a, Gamma), b).f
    for _cut, pruned, root in admissible_cuts(t):
        da = delta_t_apply(LinComb.of(pruned), a, Gamma)
        xb = X_t_apply(LinComb.of(root), b, Gamma)
        rhs = rhs + monomial_product(da, xb).f
    return lhs, rhs


class CommutatorReport:
    """Outcome of the commutator-table checks on one instance."""

    def __init__(self):
        self.results: dict[str, bool] = {}
        self.mismatches: dict[str, tuple] = {}

    def record(self, relation: str, lhs: FrameFunction, rhs: FrameFunction):
        ok = lhs.eq_retained(rhs)
        self.results[relation] = ok
        if not ok:
            self.mismatches[relation] = first_mismatch(lhs, rhs)

    @property
    def ok(self) -> bool:
        return all(self.results.values())

    def __bool__(self) -> bool:
        return self.ok

    def failing(self) -> list[str]:
        return [r for r, v in self.results.items() if not v]


def check_commutators(t: RootedTree, tp: RootedTree, m: Monomial,
                      Gamma: CurvatureFn) -> CommutatorReport:
    """Verify the commutation relations of Y, X_t and delta_t on m."""
    from .hopf import natural_growth
    from .trees import Forest, b_plus

    rep = CommutatorReport()

    xt = lambda mm: X_t_apply(t, mm, Gamma)
    dt = lambda mm: delta_t_apply(t, mm, Gamma)
    dtp = lambda mm: delta_t_apply(tp, mm, Gamma)

    rep.record(
        "[Y, X_t] = |t| X_t",
        Y_apply(xt(m)).f - xt(Y_apply(m)).f,
        xt(m).f.scale(t.vertex_count),
    )
    rep.record(
        "[X_t, delta_t'] = delta_{N_t(t')}",
        xt(dtp(m)).f - dtp(xt(m)).f,
        delta_t_apply(natural_growth(t, LinComb.of(tp)), m, Gamma).f,
    )
    rep.record(
        "[Y, delta_t] = |t| delta_t",
        Y_apply(dt(m)).f - dt(Y_apply(m)).f,
        dt(m).f.scale(t.vertex_count),
    )
    xtp = lambda mm: X_t_apply(tp, mm, Gamma)
    trunc = m.f.trunc if m.f.trunc is not None else m.psi.trunc
    lhs_xx = xt(xtp(m)).f - xtp(xt(m)).f
    rhs_xx = phi_frame_op_lincomb(
        natural_growth(t, LinComb.of(b_plus(Forest((tp,))))), Gamma, m.f, trunc
    ) - phi_frame_op_lincomb(
        natural_growth(tp, LinComb.of(b_plus(Forest((t,))))), Gamma, m.f, trunc
    )
    rep.record("[X_t, X_t'] = phi_{N_t(B+(t'))} - phi_{N_t'(B+(t))}", lhs_xx, rhs_xx)
    rep.record(
        "[delta_t, delta_t'] = 0",
        dt(dtp(m)).f - dtp(dt(m)).f,
        FrameFunction.zero(),
    )
    return rep


def check_delta_chain(k: int, m: Monomial, Gamma: CurvatureFn) -> bool:
    """[X, delta-of-delta_k] = delta-of-delta_{k+1} (the classical ladder)."""
    from .hopf import delta_k as dk
    from .trees import LEAF as dot

    lhs = X_t_apply(dot, delta_t_apply(dk(k), m, Gamma), Gamma).f \
        - delta_t_apply(dk(k), X_t_apply(dot, m, Gamma), Gamma).f
    rhs = delta_t_apply(dk(k + 1), m, Gamma).f
    return lhs.eq_retained(rhs)


def delta_from_commutators(t: RootedTree, m: Monomial, Gamma: CurvatureFn) -> Monomial:
    """Compute delta_t(m) using only delta of the single vertex and commutators.

    Recursion on the root fertility: with t = B_+(rest, t_n), t_n the
    largest root child,

        delta_t = [X_{t_n}, delta_{B_+(rest)}]
                  - sum_i delta_{B_+(rest with rest_i grown by t_n)}.
    """
    from .hopf import natural_growth
    from .trees import Forest, LEAF as dot, b_plus

    if t == dot:
        return delta_t_apply(dot, m, Gamma)
    t_n = t.children[0]
    rest = t.children[1:]
    base = b_plus(Forest(rest))
    lhs = X_t_apply(t_n, delta_from_commutators(base, m, Gamma), Gamma).f \
        - delta_from_commutators(base, X_t_apply(t_n, m, Gamma), Gamma).f
    out = lhs
    for i, part in enumerate(rest):
        others = rest[:i] + rest[i + 1:]
        grown = natural_growth(t_n, LinComb.of(part))
        for forest, c in grown.terms.items():
            corr = b_plus(Forest(others) * forest)
            out = out - delta_from_commutators(corr, m, Gamma).f.scale(c)
    return Monomial(out, m.psi)


def check_cocycle(psi: FormalDiffeo, eta: FormalDiffeo, Gamma: CurvatureFn) -> bool:
    """gamma(eta o psi) = gamma(psi) + gamma(eta) o lift(psi)."""
    lhs = gamma_bullet(eta.compose(psi), Gamma)
    rhs = gamma_bullet(psi, Gamma) + lift_apply(psi, gamma_bullet(eta, Gamma))
    return lhs.eq_retained(rhs)


def transferred_base_field(psi: FormalDiffeo, Gamma: CurvatureFn):
    """The flow field seen through the lift: (y psi'(x), y (psi''/psi' - Gamma))."""
    dpsi = psi.d()
    log_slope = dpsi.deriv(0) * dpsi.reciprocal()
    return (
        FrameFunction.y_times(dpsi),
        FrameFunction.y_times(log_slope - Gamma.with_trunc(psi.trunc)),
    )


def check_pushforward(t: RootedTree, psi: FormalDiffeo, Gamma: CurvatureFn,
                      h: FrameFunction) -> bool:
    """phi_t(h o lift(psi)) against the product formula over the transferred field.

    The right side contracts each branch's phi-operator applied to the
    transferred base field into target derivatives of h.  Exact for trees
    with at most two vertices; the transfer of deeper branch functions
    picks up non-tensorial cross terms, so this fails from three vertices
    on.
    """
    trunc = psi.trunc
    lhs = phi_frame_op(t, Gamma, lift_apply(psi, h), trunc)
    star = transferred_base_field(psi, Gamma)
    memo = _phi_memo_for(Gamma, trunc)
    field = frame_field(Gamma, trunc)
    rhs = FrameFunction.zero()
    m = len(t.children)
    for ks in itertools.product((0, 1), repeat=m):
        term = h
        for k in ks:
            term = _frame_deriv(term, k)
        term = lift_apply(psi, term)
        for j, k in enumerate(ks):
            children = [_phi_frame_vec(c, field, memo) for c in t.children[j].children]
            term = term * _frame_contract(children, star[k])
        rhs = rhs + term
    return lhs.eq_retained(rhs)


def check_coprodcontrib(t: RootedTree, psi: FormalDiffeo, Gamma: CurvatureFn,
                        h: FrameFunction) -> bool:
    """Cut expansion of the transferred operator phi_t.

    phi_t(h o lift(psi)) = sum over non-full admissible cuts of
    gamma_{P_c}(psi) (phi_{R_c} Y^{k_c} h) o lift(psi), where k_c counts
    cut edges at the root (the empty-forest leg acting as Y).  Exact for
    trees with at most two vertices; fails from three vertices on.
    """
    from .trees import admissible_cuts

    trunc = psi.trunc
    lhs = phi_frame_op(t, Gamma, lift_apply(psi, h), trunc)
    rhs = FrameFunction.zero()
    for cut, pruned, root in admissible_cuts(t):
        if cut.kind == "full":
            continue
        k_root = sum(1 for e in cut.edges if len(e) == 1)
        term = h
        for _ in range(k_root):
            term = term.dz()
        term = phi_frame_op(root.trees[0], Gamma, term, trunc)
        term = lift_apply(psi, term)
        rhs = rhs + _gamma_forest(pruned, psi, Gamma) * term
    return lhs.eq_retained(rhs)


def random_xseries(rng, trunc: int, min_degree: int = 0,
                   require_nonzero: int | None = None) -> MultiSeries:
    """Random jet with coefficients from {-2..2} scaled by 1/1..1/3."""
    terms = {}
    for k in range(min_degree, trunc + 1):
        c = Fraction(rng.randint(-2, 2), rng.randint(1, 3))
        if k == require_nonzero and c <= 0:
            c = Fraction(rng.randint(1, 2), rng.randint(1, 3))
        if c:
            terms[(k,)] = c
    return MultiSeries(1, terms, trunc)


def random_diffeo(rng, trunc: int) -> FormalDiffeo:
    """Random orientation-preserving jet fixing the origin."""
    s = random_xseries(rng, trunc, min_degree=1, require_nonzero=1)
    return FormalDiffeo(s)


def random_curvature(rng, trunc: int) -> CurvatureFn:
    return random_xseries(rng, trunc)


def random_frame_function(rng, trunc: int, max_y_degree: int = 2) -> FrameFunction:
    coeffs = {}
    for k in range(max_y_degree + 1):
        g = random_xseries(rng, trunc)
        if not g.is_zero():
            coeffs[k] = g
    if not coeffs:
        coeffs[0] = MultiSeries.constant(1, 1, trunc)
    return FrameFunction(coeffs)


__all__ += [
    "phi_frame_op_lincomb",
    "first_mismatch",
    "check_delta_coproduct",
    "check_delta_coproduct_lincomb",
    "delta_coproduct_sides",
    "check_X_coproduct",
    "X_coproduct_sides",
    "forced_vertex_symbols",
    "CommutatorReport",
    "check_commutators",
    "check_delta_chain",
    "delta_from_commutators",
    "check_cocycle",
    "transferred_base_field",
    "check_pushforward",
    "check_coprodcontrib",
    "random_xseries",
    "random_diffeo",
    "random_curvature",
    "random_frame_function",
]


def forced_vertex_symbols(psi: FormalDiffeo, Gamma: CurvatureFn):
    """The two values the single-vertex symbol would have to take.

    The one-vertex product rule forces gamma_bullet; the d/dx-component
    of the transferred two-vertex ladder operator forces the curvature
    part alone, y (psi' Gamma(psi) - Gamma).  The difference is exactly
    the flat cocycle y psi''/psi', which is why the cut-sum coproduct of
    X_t cannot hold for both sizes at once.
    """
    dpsi = psi.d()
    curvature_only = FrameFunction.y_times(
        dpsi * Gamma.compose1(psi.series) - Gamma.with_trunc(psi.trunc))
    flat = FrameFunction.y_times(dpsi.deriv(0) * dpsi.reciprocal())
    return gamma_bullet(psi, Gamma), curvature_only, flat


def parse_frame_function(text: str, trunc: int | None = None) -> FrameFunction:
    """Parse a polynomial in x and y, e.g. `y^2 x - y`, into a FrameFunction."""
    from .series import parse_polynomial

    two_var = parse_polynomial(text, ["x", "y"], None)
    coeffs: dict[int, dict] = {}
    for (ex, ey), c in two_var.terms.items():
        coeffs.setdefault(ey, {})[(ex,)] = c
    return FrameFunction(
        {k: MultiSeries(1, terms, trunc) for k, terms in coeffs.items()}
    )


__all__.append("parse_frame_function")
