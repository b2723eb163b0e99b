"""Exact rational Gaussian elimination for small dense systems."""

from __future__ import annotations

from fractions import Fraction

__all__ = ["rref", "independent_rows", "in_span", "solve_consistent"]


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form of a copy of `rows`, with pivot columns."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    n_cols = len(m[0])
    pivots: list[int] = []
    piv_r = 0
    for col in range(n_cols):
        sel = None
        for r in range(piv_r, len(m)):
            if m[r][col]:
                sel = r
                break
        if sel is None:
            continue
        m[piv_r], m[sel] = m[sel], m[piv_r]
        inv = Fraction(1, 1) / m[piv_r][col]
        m[piv_r] = [v * inv for v in m[piv_r]]
        for r in range(len(m)):
            if r != piv_r and m[r][col]:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[piv_r])]
        pivots.append(col)
        piv_r += 1
        if piv_r == len(m):
            break
    return m, pivots


def independent_rows(rows: list[list[Fraction]]) -> list[int]:
    """Indices of a maximal independent subset, scanning in order."""
    kept: list[list[Fraction]] = []
    kept_idx: list[int] = []
    for i, row in enumerate(rows):
        if not in_span(kept, row):
            kept.append(row)
            kept_idx.append(i)
    return kept_idx


def in_span(rows: list[list[Fraction]], target: list[Fraction]) -> bool:
    """True iff target is a rational linear combination of the rows."""
    if not any(target):
        return True
    if not rows:
        return False
    return solve_consistent([list(col) for col in zip(*rows)], target) is not None


def solve_consistent(a: list[list[Fraction]], b: list[Fraction]):
    """Solve A x = b exactly; returns one solution or None if inconsistent."""
    n_rows = len(a)
    n_cols = len(a[0]) if a else 0
    aug = [list(a[r]) + [b[r]] for r in range(n_rows)]
    reduced, pivots = rref(aug)
    if n_cols in pivots:
        return None
    x = [Fraction(0)] * n_cols
    for r, col in enumerate(pivots):
        x[col] = reduced[r][-1]
    return x
