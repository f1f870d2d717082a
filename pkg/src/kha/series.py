"""Laurent expansions of rational functions at var -> 0 and var -> infinity.

A rational function is stored as a product of factors, so each factor is
expanded on its own (a finite polynomial, or the inverse series of one)
and the truncated series are multiplied.  Coefficients are returned as
rational functions in the remaining variables; the part of ``f`` that
does not involve ``var`` is carried along unexpanded.
"""

from __future__ import annotations

import enum
from functools import lru_cache
from typing import Iterable

from .arith import (
    LaurentPoly, RationalFunction, VarId, ONE, ZERO, _BITS, _var_index, rf,
)

__all__ = [
    "Direction", "AT_ZERO", "AT_INFINITY", "LaurentSeries", "expand_at",
    "delta_coefficient", "delta_coefficients", "coefficient", "limit",
    "DEFAULT_ORDER",
]

DEFAULT_ORDER = 8


class Direction(enum.Enum):
    AT_ZERO = "0"
    AT_INFINITY = "inf"

    @classmethod
    def of(cls, x) -> "Direction":
        if isinstance(x, cls):
            return x
        s = str(x).lower()
        if s in ("0", "zero", "at_zero"):
            return cls.AT_ZERO
        if s in ("inf", "infinity", "oo", "at_infinity"):
            return cls.AT_INFINITY
        raise ValueError(f"unknown expansion direction {x!r}")


AT_ZERO = Direction.AT_ZERO
AT_INFINITY = Direction.AT_INFINITY


class LaurentSeries:
    """Truncated Laurent series in one variable.

    ``coeffs`` holds exact coefficients for every exponent in the closed
    window ``[lo, hi]``; exponents outside the window that lie on the
    convergent side are unknown, the others are zero.
    """

    __slots__ = ("var", "direction", "lo", "hi", "coeffs")

    def __init__(self, var: VarId, direction: Direction, lo: int, hi: int, coeffs: dict):
        self.var = var
        self.direction = direction
        self.lo = lo
        self.hi = hi
        self.coeffs = {e: c for e, c in coeffs.items() if not c.is_zero()}

    @property
    def order(self) -> int:
        return self.hi - self.lo + 1

    def __getitem__(self, e: int) -> RationalFunction:
        if self.direction is AT_ZERO and e > self.hi:
            raise IndexError(f"exponent {e} beyond truncation {self.hi}")
        if self.direction is AT_INFINITY and e < self.lo:
            raise IndexError(f"exponent {e} beyond truncation {self.lo}")
        return self.coeffs.get(e, ZERO)

    def items(self):
        return sorted(self.coeffs.items())

    def __repr__(self):
        body = ", ".join(f"{e}: {c}" for e, c in self.items())
        return f"LaurentSeries({self.var}, {self.direction.name}, [{self.lo}, {self.hi}], {{{body}}})"


# -- one factor -------------------------------------------------------------

def _split_by_degree(p: LaurentPoly, vi: int, flip: bool) -> dict[int, LaurentPoly]:
    shift = _BITS * vi
    out: dict[int, dict] = {}
    from .arith import _degree

    for m, c in p.terms.items():
        j = _degree(m, vi)
        out.setdefault(-j if flip else j, {})[m - (j << shift)] = c
    return {j: LaurentPoly._raw(t) for j, t in out.items()}


def _mul_trunc(a: list, b: list, n: int) -> list:
    out = []
    for s in range(n + 1):
        acc = None
        for i in range(max(0, s - len(b) + 1), min(s, len(a) - 1) + 1):
            x, y = a[i], b[s - i]
            if x.is_zero() or y.is_zero():
                continue
            t = x * y
            acc = t if acc is None else acc + t
        out.append(acc if acc is not None else _zero_like(a, b))
    return out


def _zero_like(a, b):
    if any(isinstance(x, RationalFunction) for x in (a[0], b[0])):
        return ZERO
    return LaurentPoly._raw({})


@lru_cache(maxsize=1 << 15)
def _factor_series(p: LaurentPoly, k: int, vi: int, flip: bool, n: int):
    """Expand p**k around the low end of its (possibly flipped) degree range.

    Returns (lead exponent, lead coefficient or None if it is a monomial
    already folded in, relative coefficient list of length n + 1).
    """
    parts = _split_by_degree(p, vi, flip)
    j0 = min(parts)
    c0 = parts[j0]
    if c0.is_monomial():
        inv = c0.monomial_inverse()
        rel = {j - j0: c * inv for j, c in parts.items()}
        lead = c0
        lead_is_unit = True
    else:
        c0rf = RationalFunction.factored(c0, -1)
        rel = {j - j0: (ONE if j == j0 else RationalFunction._raw(c, {}) * c0rf) for j, c in parts.items()}
        lead = c0
        lead_is_unit = False
    top = max(rel)
    if k > 0:
        base = [rel.get(j, _zero_of(rel)) for j in range(top + 1)]
        out = [_one_of(rel)]
        for _ in range(k):
            out = _mul_trunc(out, base, n)
        out = out + [_zero_of(rel)] * (n + 1 - len(out))
        out = out[: n + 1]
    else:
        base = [rel.get(j, _zero_of(rel)) for j in range(top + 1)]
        poly = [_one_of(rel)]
        for _ in range(-k):
            poly = _mul_trunc(poly, base, n)
        # invert 1 + a_1 x + ... by recurrence
        inv = [_one_of(rel)]
        for s in range(1, n + 1):
            acc = None
            for j in range(1, min(s, len(poly) - 1) + 1):
                if poly[j].is_zero() or inv[s - j].is_zero():
                    continue
                t = poly[j] * inv[s - j]
                acc = t if acc is None else acc + t
            inv.append(-acc if acc is not None else _zero_of(rel))
        out = inv
    return j0 * k, (lead, lead_is_unit), out


def _one_of(rel):
    return ONE if any(isinstance(c, RationalFunction) for c in rel.values()) else LaurentPoly.constant(1)


def _zero_of(rel):
    return ZERO if any(isinstance(c, RationalFunction) for c in rel.values()) else LaurentPoly._raw({})


def _pieces(f: RationalFunction, v: VarId):
    """Split f into (var-free scalar, [(factor, k)] involving var)."""
    vi = _var_index(v)
    scalar = RationalFunction._raw(LaurentPoly.constant(1), {})
    pieces = []
    poly_parts = _split_by_degree(f.poly, vi, False)
    if len(poly_parts) == 1:
        (j, c), = poly_parts.items()
        scalar = scalar * RationalFunction._raw(c, {})
        if j:
            pieces.append((LaurentPoly.variable(v, 1), j))
    else:
        pieces.append((f.poly, 1))
    fac_scalar = {}
    for g, k in f.factors.items():
        if v in g.variables():
            pieces.append((g, k))
        else:
            fac_scalar[g] = k
    if fac_scalar:
        scalar = scalar * RationalFunction._raw(LaurentPoly.constant(1), fac_scalar)
    return scalar, pieces


def _expand(f: RationalFunction, v: VarId, direction: Direction, lo_needed=None, hi_needed=None, order=None):
    """Core expansion; returns (lead exponent, relative coeff list, scalar).

    Exponents are in the flipped frame for AT_INFINITY (e -> -e).
    """
    flip = direction is AT_INFINITY
    vi = _var_index(v)
    scalar, pieces = _pieces(f, v)
    # leading exponents need a first pass at n = 0
    lead = 0
    for g, k in pieces:
        j0, _, _ = _factor_series(g, k, vi, flip, 0)
        lead += j0
    return scalar, pieces, lead, vi, flip


def _series_coeffs(scalar, pieces, vi, flip, n):
    acc = None
    lead_scalar = scalar
    for g, k in pieces:
        _, (c0, unit), coeffs = _factor_series(g, k, vi, flip, n)
        if unit:
            lead_scalar = lead_scalar * RationalFunction._raw(c0 ** k if k > 0 else c0.monomial_inverse() ** (-k), {})
        else:
            lead_scalar = lead_scalar * RationalFunction.factored(c0, k)
        acc = coeffs if acc is None else _mul_trunc(acc, coeffs, n)
    if acc is None:
        acc = [LaurentPoly.constant(1)] + [LaurentPoly._raw({})] * n
    return lead_scalar, acc


def _to_rf(x) -> RationalFunction:
    return x if isinstance(x, RationalFunction) else RationalFunction._raw(x, {})


def _window_coeffs(f: RationalFunction, v: VarId, direction: Direction, exps: Iterable[int]) -> dict[int, RationalFunction]:
    """Exact coefficients of f's expansion at the given exponents."""
    exps = list(exps)
    if f.is_zero():
        return {e: ZERO for e in exps}
    scalar, pieces, lead, vi, flip = _expand(f, v, direction)
    rel = [(-e if flip else e) - lead for e in exps]
    n = max(rel)
    if n < 0:
        return {e: ZERO for e in exps}
    lead_scalar, acc = _series_coeffs(scalar, pieces, vi, flip, n)
    out = {}
    for e, r in zip(exps, rel):
        if r < 0 or acc[r].is_zero():
            out[e] = ZERO
        else:
            out[e] = lead_scalar * _to_rf(acc[r])
    return out


def _lead_exponent(f: RationalFunction, v: VarId, direction: Direction) -> int:
    _, _, lead, _, flip = _expand(f, v, direction)
    return -lead if flip else lead


def expand_at(f, var: VarId, direction=AT_ZERO, order: int = DEFAULT_ORDER) -> LaurentSeries:
    """Laurent expansion of f in ``var``: ``order`` terms from the leading one."""
    f = rf(f)
    direction = Direction.of(direction)
    if order < 1:
        raise ValueError("order must be positive")
    if f.is_zero():
        return LaurentSeries(var, direction, 0, order - 1 if direction is AT_ZERO else 0, {})
    lead = _lead_exponent(f, var, direction)
    if direction is AT_ZERO:
        exps = range(lead, lead + order)
        lo, hi = lead, lead + order - 1
    else:
        exps = range(lead - order + 1, lead + 1)
        lo, hi = lead - order + 1, lead
    return LaurentSeries(var, direction, lo, hi, _window_coeffs(f, var, direction, exps))


def coefficient(f, var: VarId, direction, d: int) -> RationalFunction:
    """[var^d] of the expansion of f in the given direction."""
    return _window_coeffs(rf(f), var, Direction.of(direction), [d])[d]


def delta_coefficients(f, var: VarId, ds: Iterable[int]) -> dict[int, RationalFunction]:
    """{d: [var^d](f at infinity) - [var^d](f at 0)} for every d in ds."""
    f = rf(f)
    ds = sorted(set(ds))
    if not ds:
        return {}
    at_inf = _window_coeffs(f, var, AT_INFINITY, ds)
    at_zero = _window_coeffs(f, var, AT_ZERO, ds)
    return {d: at_inf[d] - at_zero[d] for d in ds}


def delta_coefficient(f, var: VarId, d: int) -> RationalFunction:
    """[var^d] of the expansion at infinity minus [var^d] of the expansion at 0."""
    return delta_coefficients(f, var, [d])[d]


def limit(f, var: VarId, direction) -> RationalFunction:
    """Exact limit var -> 0 or infinity; raises if f diverges there."""
    f = rf(f)
    direction = Direction.of(direction)
    if f.is_zero():
        return ZERO
    lead = _lead_exponent(f, var, direction)
    if (direction is AT_ZERO and lead < 0) or (direction is AT_INFINITY and lead > 0):
        raise ValueError(f"{f} diverges as {var} -> {direction.value}")
    return coefficient(f, var, direction, 0)
