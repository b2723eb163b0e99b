"""Truncated multivariate power series with exact rational coefficients.

A series carries a truncation order `trunc` (total degree); `trunc=None`
marks an exact polynomial.  Arithmetic propagates the truncation: sums
and products keep the weaker truncation, a partial derivative lowers it
by one.  This makes "requesting deeper truncation never changes retained
coefficients" automatic.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = [
    "MultiSeries",
    "VectorField",
    "ODEProblem",
    "TruncationError",
    "SeriesParseError",
    "series_solve",
    "parse_polynomial",
    "parse_vector_field",
]


class TruncationError(ValueError):
    """A computation needs more retained orders than the input carries."""


class SeriesParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


def _min_trunc(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class MultiSeries:
    """Sparse exponent-map series in `nvars` variables."""

    __slots__ = ("nvars", "trunc", "terms")

    def __init__(self, nvars: int, terms=None, trunc: int | None = None):
        self.nvars = nvars
        self.trunc = trunc
        clean: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for expo, coeff in (terms.items() if isinstance(terms, dict) else terms):
                expo = tuple(expo)
                if len(expo) != nvars:
                    raise ValueError(f"exponent {expo} has wrong arity for {nvars} variables")
                if trunc is not None and sum(expo) > trunc:
                    continue
                coeff = Fraction(coeff)
                if coeff:
                    s = clean.get(expo, 0) + coeff
                    if s:
                        clean[expo] = s
                    else:
                        clean.pop(expo, None)
        self.terms = clean

    @classmethod
    def _raw(cls, nvars: int, terms: dict, trunc: int | None) -> "MultiSeries":
        """Internal constructor: terms must already be normalized."""
        out = cls.__new__(cls)
        out.nvars = nvars
        out.trunc = trunc
        out.terms = terms
        return out

    @staticmethod
    def zero(nvars: int, trunc: int | None = None) -> "MultiSeries":
        return MultiSeries(nvars, {}, trunc)

    @staticmethod
    def constant(nvars: int, value, trunc: int | None = None) -> "MultiSeries":
        return MultiSeries(nvars, {(0,) * nvars: Fraction(value)}, trunc)

    @staticmethod
    def variable(nvars: int, i: int, trunc: int | None = None) -> "MultiSeries":
        expo = tuple(1 if j == i else 0 for j in range(nvars))
        return MultiSeries(nvars, {expo: Fraction(1)}, trunc)

    def with_trunc(self, trunc: int | None) -> "MultiSeries":
        return MultiSeries(self.nvars, self.terms, _min_trunc(self.trunc, trunc))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "MultiSeries") -> "MultiSeries":
        trunc = _min_trunc(self.trunc, other.trunc)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        if trunc is not None and (trunc != self.trunc or trunc != other.trunc):
            out = {e: c for e, c in out.items() if sum(e) <= trunc}
        return MultiSeries._raw(self.nvars, out, trunc)

    def __neg__(self) -> "MultiSeries":
        return MultiSeries._raw(self.nvars, {e: -c for e, c in self.terms.items()}, self.trunc)

    def __sub__(self, other: "MultiSeries") -> "MultiSeries":
        return self + (-other)

    def scale(self, c) -> "MultiSeries":
        c = Fraction(c)
        return MultiSeries._raw(
            self.nvars, {e: c * v for e, v in self.terms.items()} if c else {}, self.trunc)

    def __mul__(self, other: "MultiSeries") -> "MultiSeries":
        trunc = _min_trunc(self.trunc, other.trunc)
        out: dict[tuple[int, ...], Fraction] = {}
        if self.nvars == 1:
            for (i,), c1 in self.terms.items():
                for (j,), c2 in other.terms.items():
                    k = i + j
                    if trunc is not None and k > trunc:
                        continue
                    e = (k,)
                    s = out.get(e, 0) + c1 * c2
                    if s:
                        out[e] = s
                    else:
                        out.pop(e, None)
            return MultiSeries._raw(1, out, trunc)
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if trunc is not None and sum(e) > trunc:
                    continue
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MultiSeries._raw(self.nvars, out, trunc)

    def deriv(self, i: int) -> "MultiSeries":
        out: dict[tuple[int, ...], Fraction] = {}
        for e, c in self.terms.items():
            if e[i]:
                de = e[:i] + (e[i] - 1,) + e[i + 1:]
                out[de] = out.get(de, Fraction(0)) + c * e[i]
        trunc = None if self.trunc is None else max(self.trunc - 1, -1)
        if trunc is not None and trunc < 0:
            raise TruncationError("derivative exhausted the retained orders")
        return MultiSeries._raw(self.nvars, out, trunc)

    def eval0(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def eq_retained(self, other: "MultiSeries") -> bool:
        """Equality up to the common truncation order."""
        trunc = _min_trunc(self.trunc, other.trunc)
        a = {e: c for e, c in self.terms.items() if trunc is None or sum(e) <= trunc}
        b = {e: c for e, c in other.terms.items() if trunc is None or sum(e) <= trunc}
        return a == b

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiSeries)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # Univariate helpers (nvars == 1) used by the frame-bundle model.

    def coeff(self, k: int) -> Fraction:
        assert self.nvars == 1
        return self.terms.get((k,), Fraction(0))

    def compose1(self, inner: "MultiSeries") -> "MultiSeries":
        """Substitute a one-variable series with zero constant term.

        Two exact polynomials compose to an exact polynomial; otherwise
        the weaker truncation is kept.
        """
        assert self.nvars == 1 and inner.nvars == 1
        if inner.eval0() != 0:
            raise ValueError("composition requires zero constant term")
        trunc = _min_trunc(self.trunc, inner.trunc)
        out = MultiSeries.zero(1, trunc)
        power = MultiSeries.constant(1, 1, trunc)
        max_k = self.total_degree()
        for k in range(0, max_k + 1):
            c = self.coeff(k)
            if c:
                out = out + power.scale(c)
            if k < max_k:
                power = power * inner
        return out

    def reciprocal(self) -> "MultiSeries":
        """Inverse of a one-variable unit series, to the retained order."""
        assert self.nvars == 1
        c0 = self.eval0()
        if c0 == 0:
            raise ValueError("series has no reciprocal: zero constant term")
        trunc = self.trunc
        if trunc is None:
            if self.total_degree() == 0:
                return MultiSeries(1, {(0,): 1 / c0})
            raise TruncationError(
                "reciprocal of a non-constant polynomial is an infinite "
                "series; set a truncation order first"
            )
        inv = [Fraction(0)] * (trunc + 1)
        inv[0] = 1 / c0
        for k in range(1, trunc + 1):
            s = Fraction(0)
            for j in range(1, k + 1):
                s += self.coeff(j) * inv[k - j]
            inv[k] = -s / c0
        return MultiSeries(1, {(k,): v for k, v in enumerate(inv)}, self.trunc)

    def reversion(self) -> "MultiSeries":
        """Compositional inverse of a one-variable series with nonzero slope."""
        assert self.nvars == 1
        if self.eval0() != 0 or self.coeff(1) == 0:
            raise ValueError("reversion requires zero constant term and nonzero slope")
        trunc = self.trunc
        if trunc is None:
            if self.total_degree() <= 1:
                return MultiSeries(1, {(1,): 1 / self.coeff(1)})
            raise TruncationError(
                "reversion of a nonlinear polynomial is an infinite series; "
                "set a truncation order first"
            )
        # Solve self(g(x)) = x order by order.
        g = MultiSeries(1, {(1,): 1 / self.coeff(1)}, trunc)
        x = MultiSeries.variable(1, 0, trunc)
        for _ in range(trunc):
            err = self.with_trunc(trunc).compose1(g) - x
            if err.is_zero():
                break
            g = g - err.scale(1 / self.coeff(1))
        return g

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = ["x"] if self.nvars == 1 else [f"x{i+1}" for i in range(self.nvars)]
        bits = []
        for e, c in sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0])):
            factors = []
            for i, k in enumerate(e):
                if k == 1:
                    factors.append(names[i])
                elif k > 1:
                    factors.append(f"{names[i]}^{k}")
            mag = -c if c < 0 else c
            body = " ".join([str(mag)] + factors) if (mag != 1 or not factors) else " ".join(factors)
            if not bits:
                bits.append(body if c > 0 else f"- {body}")
            else:
                bits.append(("+ " if c > 0 else "- ") + body)
        return " ".join(bits)

    def __repr__(self) -> str:
        return f"MultiSeries({str(self)!r}, trunc={self.trunc})"


class VectorField:
    """An ODE right-hand side: one series per coordinate."""

    __slots__ = ("components",)

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise ValueError("a vector field needs at least one component")
        n = components[0].nvars
        if len(components) != n:
            raise ValueError(f"{len(components)} components for {n} variables")
        self.components = components

    @property
    def nvars(self) -> int:
        return len(self.components)

    @property
    def trunc(self) -> int | None:
        t = None
        for c in self.components:
            t = _min_trunc(t, c.trunc)
        return t

    def with_trunc(self, trunc: int | None) -> "VectorField":
        return VectorField(tuple(c.with_trunc(trunc) for c in self.components))

    def __eq__(self, other) -> bool:
        return isinstance(other, VectorField) and self.components == other.components


class ODEProblem:
    """Formal initial value problem at the jet origin."""

    __slots__ = ("field", "taylor_order")

    def __init__(self, field: VectorField, taylor_order: int):
        if taylor_order < 1:
            raise ValueError("taylor_order must be >= 1")
        if field.trunc is not None and taylor_order > field.trunc:
            raise TruncationError(
                f"taylor order {taylor_order} exceeds field truncation {field.trunc}"
            )
        self.field = field
        self.taylor_order = taylor_order


def series_solve(p: ODEProblem) -> list[list[Fraction]]:
    """Taylor coefficients of the formal flow through the origin.

    Returns coefficient vectors c_0 .. c_K with x^i(s) = sum_k c_k[i] s^k;
    the step is c_{k+1} = (s^k coefficient of f(x(s))) / (k+1).
    """
    n = p.field.nvars
    K = p.taylor_order
    coeffs: list[list[Fraction]] = [[Fraction(0)] * n]
    for k in range(K):
        rhs = _eval_field_on_jet(p.field, coeffs, k)
        coeffs.append([c / (k + 1) for c in rhs])
    return coeffs


def _eval_field_on_jet(field: VectorField, coeffs: list[list[Fraction]], order: int) -> list[Fraction]:
    """The s^order coefficient of f(x(s)) for the partial jet x(s)."""
    n = field.nvars
    jets = [[coeffs[k][i] for k in range(len(coeffs))] for i in range(n)]
    out = []
    for comp in field.components:
        acc = [Fraction(0)] * (order + 1)
        for expo, c in comp.terms.items():
            prod = [Fraction(1)] + [Fraction(0)] * order
            for i, e in enumerate(expo):
                for _ in range(e):
                    prod = _poly_mul_trunc(prod, jets[i], order)
            for k in range(order + 1):
                acc[k] += c * prod[k]
        out.append(acc[order])
    return out


def _poly_mul_trunc(a: list[Fraction], b: list[Fraction], order: int) -> list[Fraction]:
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a):
        if ai and i <= order:
            for j, bj in enumerate(b):
                if i + j > order:
                    break
                if bj:
                    out[i + j] += ai * bj
    return out


def parse_polynomial(text: str, var_names: list[str], trunc: int | None = None) -> MultiSeries:
    """Parse a polynomial like `x2 + 1/2 x1^2 - 3 x1 x2` exactly."""
    n = len(var_names)
    pos = 0
    out = MultiSeries.zero(n, trunc)
    sign = Fraction(1)
    first = True

    def skip(p):
        while p < len(text) and text[p].isspace():
            p += 1
        return p

    pos = skip(pos)
    if pos == len(text):
        raise SeriesParseError("empty polynomial", text, pos)
    while pos < len(text):
        if not first or text[pos] in "+-":
            if text[pos] not in "+-":
                raise SeriesParseError("expected '+' or '-'", text, pos)
            sign = Fraction(1) if text[pos] == "+" else Fraction(-1)
            pos = skip(pos + 1)
        first = False
        coeff = Fraction(1)
        expo = [0] * n
        saw_factor = False
        while pos < len(text) and text[pos] not in "+-":
            if text[pos] == "*":
                pos = skip(pos + 1)
                continue
            if text[pos].isdigit():
                start = pos
                while pos < len(text) and (text[pos].isdigit() or text[pos] == "/"):
                    pos += 1
                try:
                    coeff *= Fraction(text[start:pos])
                except (ValueError, ZeroDivisionError):
                    raise SeriesParseError("malformed rational", text, start) from None
                saw_factor = True
            else:
                matched = None
                for i, name in sorted(enumerate(var_names), key=lambda kv: -len(kv[1])):
                    if text.startswith(name, pos):
                        matched = i
                        pos += len(name)
                        break
                if matched is None:
                    raise SeriesParseError("unknown symbol", text, pos)
                power = 1
                if pos < len(text) and text[pos] == "^":
                    pos += 1
                    start = pos
                    while pos < len(text) and text[pos].isdigit():
                        pos += 1
                    if pos == start:
                        raise SeriesParseError("expected exponent", text, pos)
                    power = int(text[start:pos])
                expo[matched] += power
                saw_factor = True
            pos = skip(pos)
        if not saw_factor:
            raise SeriesParseError("expected a term", text, pos)
        out = out + MultiSeries(n, {tuple(expo): sign * coeff}, trunc)
    return out


def parse_vector_field(text: str, trunc: int | None = None) -> VectorField:
    """Parse lines `f1 = ...` .. `fn = ...` over variables x1..xn."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise SeriesParseError("empty vector field", text, 0)
    n = len(lines)
    names = [f"x{i+1}" for i in range(n)]
    comps: list[MultiSeries | None] = [None] * n
    for ln in lines:
        if "=" not in ln:
            raise SeriesParseError("expected `fi = polynomial`", ln, 0)
        lhs, rhs = ln.split("=", 1)
        lhs = lhs.strip()
        if not (lhs.startswith("f") and lhs[1:].isdigit()):
            raise SeriesParseError("component must be named f1..fn", ln, 0)
        idx = int(lhs[1:]) - 1
        if not 0 <= idx < n:
            raise SeriesParseError(f"component {lhs} out of range for {n} lines", ln, 0)
        comps[idx] = parse_polynomial(rhs.strip(), names, trunc)
    if any(c is None for c in comps):
        raise SeriesParseError("missing component definition", text, 0)
    return VectorField(tuple(comps))
