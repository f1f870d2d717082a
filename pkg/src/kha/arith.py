"""Exact multivariate Laurent polynomials and rational functions over Q.

Monomials are packed into a single Python integer: the exponent of the
k-th registered variable is the k-th digit of a balanced base-2**32
expansion.  Multiplying monomials is then integer addition, and the
integer order is a group order on monomials, which exact division relies
on.  Variables are registered lazily and the packing is private to the
process; pickling goes through the decoded form.

A ``RationalFunction`` is kept as ``poly * prod(factor ** k)`` where the
factors are normalized Laurent polynomials and ``k`` may be negative.
Denominators are therefore always products of known factors, so sums can
be put over a least common denominator without any polynomial gcd.
"""

from __future__ import annotations

import heapq
import math
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

__all__ = [
    "QH", "T", "U", "Z", "AUX",
    "VarId", "qh_var", "t_var", "u_var", "z_var", "aux_var",
    "LaurentPoly", "RationalFunction", "PoleError", "ParseError",
    "rf", "var", "qh", "q", "const", "rf_eq", "arith", "substitute",
    "parse", "to_text",
]

QH, T, U, Z, AUX = range(5)

_BITS = 32
_BASE = 1 << _BITS
_MASK = _BASE - 1
_HALF = 1 << (_BITS - 1)


class VarId(tuple):
    """A variable: (kind, key, slot), ordered QH < T < U < Z < AUX."""

    __slots__ = ()

    def __new__(cls, kind: int, key: str = "", slot: int = 0):
        return tuple.__new__(cls, (kind, str(key), int(slot)))

    def __getnewargs__(self):
        return tuple(self)

    @property
    def kind(self) -> int:
        return self[0]

    @property
    def key(self) -> str:
        return self[1]

    @property
    def slot(self) -> int:
        return self[2]

    def __str__(self) -> str:
        kind, key, slot = self
        if kind == QH:
            return "qh"
        if kind == T:
            return f"t[{key}]"
        if kind == U:
            return f"u[{key},{slot}]"
        if kind == Z:
            return f"z[{key},{slot}]"
        return key

    def __repr__(self) -> str:
        return f"VarId({str(self)!r})"


def qh_var() -> VarId:
    return VarId(QH)


def t_var(edge: str) -> VarId:
    return VarId(T, edge)


def u_var(vertex: str, slot: int) -> VarId:
    if slot < 1:
        raise ValueError("slots start at 1")
    return VarId(U, vertex, slot)


def z_var(vertex: str, slot: int) -> VarId:
    if slot < 1:
        raise ValueError("slots start at 1")
    return VarId(Z, vertex, slot)


def aux_var(name: str) -> VarId:
    return VarId(AUX, name)


# -- variable registry ------------------------------------------------------

_lock = threading.Lock()
_index: dict[VarId, int] = {}
_vars: list[VarId] = []
_bias: list[int] = []


def _var_index(v: VarId) -> int:
    i = _index.get(v)
    if i is None:
        with _lock:
            i = _index.get(v)
            if i is None:
                i = len(_vars)
                _vars.append(v)
                prev = _bias[-1] if _bias else 0
                _bias.append(prev + (_HALF << (_BITS * i)))
                _index[v] = i
    return i


def _mono(v: VarId, e: int = 1) -> int:
    if not -_HALF < e < _HALF:
        raise OverflowError("exponent out of range")
    return e << (_BITS * _var_index(v))


def _decode(m: int) -> list[tuple[int, int]]:
    """Packed monomial -> [(registry index, exponent)], zero exponents dropped."""
    out = []
    i = 0
    while m:
        d = m & _MASK
        if d >= _HALF:
            d -= _BASE
        if d:
            out.append((i, d))
        m = (m - d) >> _BITS
        i += 1
    return out


def _degree(m: int, i: int) -> int:
    if i >= len(_bias):
        return 0
    return (((m + _bias[i]) >> (_BITS * i)) & _MASK) - _HALF


def _decode_vars(m: int) -> list[tuple[VarId, int]]:
    return sorted((_vars[i], e) for i, e in _decode(m))


def _encode_vars(pairs: Iterable[tuple[VarId, int]]) -> int:
    return sum(_mono(v, e) for v, e in pairs)


def _num(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _div(a, b):
    if type(a) is int and type(b) is int:
        if a % b == 0:
            return a // b
        return Fraction(a, b)
    return _num(Fraction(a) / b)


Scalar = Union[int, Fraction]


# -- Laurent polynomials ------------------------------------------------------

class LaurentPoly:
    """Sparse Laurent polynomial with rational coefficients (immutable)."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[int, Scalar] | None = None):
        self.terms = {m: c for m, c in terms.items() if c} if terms else {}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "LaurentPoly":
        p = object.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, c: Scalar) -> "LaurentPoly":
        c = _num(c)
        return cls._raw({0: c} if c else {})

    @classmethod
    def monomial(cls, pairs: Iterable[tuple[VarId, int]] = (), coeff: Scalar = 1) -> "LaurentPoly":
        coeff = _num(coeff)
        return cls._raw({_encode_vars(pairs): coeff} if coeff else {})

    @classmethod
    def variable(cls, v: VarId, e: int = 1) -> "LaurentPoly":
        return cls._raw({_mono(v, e): 1})

    def __reduce__(self):
        items = [(_decode_vars(m), c) for m, c in self.terms.items()]
        return (_poly_from_items, (items,))

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self) -> Scalar:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.terms.get(0, 0)

    def variables(self) -> set[VarId]:
        idx = set()
        for m in self.terms:
            idx.update(i for i, _ in _decode(m))
        return {_vars[i] for i in idx}

    def degree_range(self, v: VarId) -> tuple[int, int]:
        i = _var_index(v)
        degs = [_degree(m, i) for m in self.terms]
        return min(degs), max(degs)

    def __len__(self) -> int:
        return len(self.terms)

    # arithmetic
    def __add__(self, other):
        if isinstance(other, LaurentPoly):
            if not other.terms:
                return self
            if not self.terms:
                return other
            if len(other.terms) > len(self.terms):
                self, other = other, self
            t = dict(self.terms)
            for m, c in other.terms.items():
                s = t.get(m, 0) + c
                if s:
                    t[m] = s
                else:
                    t.pop(m, None)
            return LaurentPoly._raw(t)
        if isinstance(other, (int, Fraction)):
            return self + LaurentPoly.constant(other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (LaurentPoly, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            a, b = self.terms, other.terms
            if not a or not b:
                return LaurentPoly._raw({})
            if len(a) < len(b):
                a, b = b, a
            if len(b) == 1:
                (mb, cb), = b.items()
                if cb == 1:
                    return LaurentPoly._raw({m + mb: c for m, c in a.items()})
                return LaurentPoly._raw({m + mb: c * cb for m, c in a.items()})
            t: dict[int, Scalar] = {}
            get = t.get
            for mb, cb in b.items():
                for ma, ca in a.items():
                    k = ma + mb
                    t[k] = get(k, 0) + ca * cb
            return LaurentPoly._raw({m: c for m, c in t.items() if c})
        if isinstance(other, (int, Fraction)):
            other = _num(other)
            if not other:
                return LaurentPoly._raw({})
            return LaurentPoly._raw({m: _num(c * other) for m, c in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.monomial_inverse() ** (-n)
        result = LaurentPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def monomial_inverse(self) -> "LaurentPoly":
        if len(self.terms) != 1:
            raise ZeroDivisionError("only monomials are units in the Laurent ring")
        (m, c), = self.terms.items()
        return LaurentPoly._raw({-m: _div(1, c)})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return LaurentPoly._raw({m: _div(c, other) for m, c in self.terms.items()})
        if isinstance(other, LaurentPoly) and len(other.terms) == 1:
            return self * other.monomial_inverse()
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # structure in one variable
    def coefficients_in(self, v: VarId) -> dict[int, "LaurentPoly"]:
        """Split as sum_j c_j * v**j; the c_j are free of v."""
        i = _var_index(v)
        shift = _BITS * i
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            j = _degree(m, i)
            out.setdefault(j, {})[m - (j << shift)] = c
        return {j: LaurentPoly._raw(t) for j, t in out.items()}

    def map_monomials(self, images: Mapping[int, tuple[Scalar, int]]) -> "LaurentPoly":
        """Substitute registry index -> (scalar, packed monomial), simultaneously."""
        t: dict[int, Scalar] = {}
        idx = list(images.items())
        for m0, c in self.terms.items():
            m = m0
            for i, (s, mono) in idx:
                e = _degree(m0, i)
                if e:
                    m = m - (e << (_BITS * i)) + e * mono
                    if s != 1:
                        c = _num(c * Fraction(s) ** e)
            t[m] = t.get(m, 0) + c
        return LaurentPoly._raw({m: c for m, c in t.items() if c})

    def __repr__(self):
        return f"LaurentPoly({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


def _poly_from_items(items) -> LaurentPoly:
    t: dict[int, Scalar] = {}
    for pairs, c in items:
        m = _encode_vars(pairs)
        t[m] = t.get(m, 0) + c
    return LaurentPoly(t)


# -- monomial order used for printing and normalization ---------------------

def _lex_sorted_terms(p: LaurentPoly) -> list[tuple[int, Scalar]]:
    """Terms in descending lexicographic order, earliest variable most significant."""
    decoded = {m: dict(_decode(m)) for m in p.terms}
    all_idx = sorted({i for d in decoded.values() for i in d}, key=lambda i: _vars[i])

    def key(m):
        d = decoded[m]
        return tuple(d.get(i, 0) for i in all_idx)

    return sorted(p.terms.items(), key=lambda mc: key(mc[0]), reverse=True)


@lru_cache(maxsize=1 << 16)
def _split(p: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly | None]:
    """p = unit * core, unit a scalar monomial, core normalized or None."""
    if len(p.terms) == 1:
        return p, None
    decoded = [(dict(_decode(m)), c) for m, c in p.terms.items()]
    idx = set()
    for d, _ in decoded:
        idx.update(d)
    content = 0
    for i in idx:
        low = min(d.get(i, 0) for d, _ in decoded)
        if low:
            content += low << (_BITS * i)
    coeffs = list(p.terms.values())
    den = math.lcm(*(Fraction(c).denominator for c in coeffs))
    ints = [int(Fraction(c) * den) for c in coeffs]
    g = math.gcd(*ints)
    scale = Fraction(g, den)
    core = LaurentPoly._raw({m - content: _num(Fraction(c) / scale) for m, c in p.terms.items()})
    lead = _lex_sorted_terms(core)[0][1]
    if lead < 0:
        core = -core
        scale = -scale
    return LaurentPoly._raw({content: _num(scale)}), core


def exact_divide(p: LaurentPoly, d: LaurentPoly) -> LaurentPoly | None:
    """Return p / d if d divides p in the Laurent ring, else None."""
    if not d.terms:
        raise ZeroDivisionError("division by zero polynomial")
    if not p.terms:
        return p
    if len(d.terms) == 1:
        return p * d.monomial_inverse()
    dterms = sorted(d.terms.items(), reverse=True)
    lead_m, lead_c = dterms[0]
    # per-variable exponent box for the quotient
    pd = [dict(_decode(m)) for m in p.terms]
    dd = [dict(_decode(m)) for m in d.terms]
    idx = set()
    for x in pd + dd:
        idx.update(x)
    box = {}
    for i in idx:
        pe = [x.get(i, 0) for x in pd]
        de = [x.get(i, 0) for x in dd]
        lo, hi = min(pe) - min(de), max(pe) - max(de)
        if lo > hi:
            return None
        box[i] = (lo, hi)
    rem = dict(p.terms)
    heap = [-m for m in rem]
    heapq.heapify(heap)
    quot: dict[int, Scalar] = {}
    while heap:
        m = -heapq.heappop(heap)
        c = rem.get(m)
        if c is None:
            continue
        qm = m - lead_m
        qd = dict(_decode(qm))
        for i in set(qd) | set(box):
            if i not in box:
                return None
            lo, hi = box[i]
            if not lo <= qd.get(i, 0) <= hi:
                return None
        qc = _div(c, lead_c)
        quot[qm] = qc
        for mm, cc in dterms:
            k = qm + mm
            nv = rem.get(k, 0) - qc * cc
            if nv:
                if k not in rem:
                    heapq.heappush(heap, -k)
                rem[k] = _num(nv)
            else:
                rem.pop(k, None)
    return LaurentPoly._raw(quot)


# -- rational functions -----------------------------------------------------

class PoleError(ZeroDivisionError):
    """A denominator vanished identically."""

    def __init__(self, message: str, factor: LaurentPoly | None = None):
        super().__init__(message)
        self.factor = factor


class ParseError(ValueError):
    pass


_pow_cache: dict[tuple[LaurentPoly, int], LaurentPoly] = {}


def _fpow(f: LaurentPoly, k: int) -> LaurentPoly:
    if k == 1:
        return f
    key = (f, k)
    r = _pow_cache.get(key)
    if r is None:
        r = f ** k
        if len(_pow_cache) < 1 << 14:
            _pow_cache[key] = r
    return r


class RationalFunction:
    """Exact rational function ``poly * prod(factor ** k)`` (immutable).

    Equality is mathematical (a - b == 0), so instances are unhashable.
    """

    __slots__ = ("poly", "factors")

    def __init__(self, poly: LaurentPoly | Scalar = 0, factors: Mapping[LaurentPoly, int] | None = None):
        if not isinstance(poly, LaurentPoly):
            poly = LaurentPoly.constant(poly)
        self.poly = poly
        self.factors = dict(factors) if (factors and poly.terms) else {}

    @classmethod
    def _raw(cls, poly: LaurentPoly, factors: dict) -> "RationalFunction":
        r = object.__new__(cls)
        r.poly = poly
        r.factors = factors if poly.terms else {}
        return r

    @classmethod
    def from_poly(cls, p: LaurentPoly) -> "RationalFunction":
        return cls._raw(p, {})

    @classmethod
    def factored(cls, p: LaurentPoly, k: int = 1) -> "RationalFunction":
        """p ** k with p stored as a normalized factor."""
        if not p.terms:
            if k < 0:
                raise PoleError("division by zero")
            return cls._raw(p, {})
        unit, core = _split(p)
        unit = unit ** k
        return cls._raw(unit, {core: k} if core is not None else {})

    # queries
    def is_zero(self) -> bool:
        return not self.poly.terms

    def __bool__(self):
        return bool(self.poly.terms)

    def is_laurent_polynomial(self) -> bool:
        return all(k > 0 for k in self.cancel().factors.values())

    def is_constant(self) -> bool:
        r = self.cancel()
        return all(k > 0 for k in r.factors.values()) and r.numerator().is_constant()

    def constant_value(self) -> Scalar:
        r = self.cancel()
        if any(k < 0 for k in r.factors.values()):
            raise ValueError("not a constant")
        return r.numerator().constant_value()

    def variables(self) -> set[VarId]:
        out = self.poly.variables()
        for f in self.factors:
            out |= f.variables()
        return out

    def numerator(self) -> LaurentPoly:
        p = self.poly
        for f, k in self.factors.items():
            if k > 0:
                p = p * _fpow(f, k)
        return p

    def denominator(self) -> LaurentPoly:
        p = LaurentPoly.constant(1)
        for f, k in self.factors.items():
            if k < 0:
                p = p * _fpow(f, -k)
        return p

    def as_poly(self) -> LaurentPoly:
        r = self.cancel()
        if any(k < 0 for k in r.factors.values()):
            raise ValueError("not a Laurent polynomial")
        return r.numerator()

    def __reduce__(self):
        return (RationalFunction, (self.poly, self.factors))

    # arithmetic
    @staticmethod
    def coerce(x) -> "RationalFunction":
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, LaurentPoly):
            return RationalFunction._raw(x, {})
        if isinstance(x, (int, Fraction)):
            return RationalFunction._raw(LaurentPoly.constant(x), {})
        raise TypeError(f"cannot coerce {type(x).__name__} to RationalFunction")

    def __mul__(self, other):
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        if not self.poly.terms or not other.poly.terms:
            return ZERO
        a, b = self.factors, other.factors
        if not b:
            fac = a
        elif not a:
            fac = b
        else:
            fac = dict(a)
            for f, k in b.items():
                s = fac.get(f, 0) + k
                if s:
                    fac[f] = s
                else:
                    del fac[f]
        return RationalFunction._raw(self.poly * other.poly, fac)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self.poly.terms:
            raise PoleError("division by zero")
        unit, core = _split(self.poly)
        fac = {f: -k for f, k in self.factors.items()}
        if core is not None:
            s = fac.get(core, 0) - 1
            if s:
                fac[core] = s
            else:
                del fac[core]
        return RationalFunction._raw(unit.monomial_inverse(), fac)

    def __truediv__(self, other):
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return ONE
        return RationalFunction._raw(self.poly ** n, {f: k * n for f, k in self.factors.items()})

    def __neg__(self):
        return RationalFunction._raw(-self.poly, self.factors)

    def __add__(self, other):
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        if not other.poly.terms:
            return self
        if not self.poly.terms:
            return other
        fa, fb = self.factors, other.factors
        if fa == fb:
            s = self.poly + other.poly
            return RationalFunction._raw(s, dict(fa) if s.terms else {})
        common = {}
        pa, pb = self.poly, other.poly
        for f in set(fa) | set(fb):
            ka, kb = fa.get(f, 0), fb.get(f, 0)
            k = min(ka, kb)
            if k:
                common[f] = k
            if ka > k:
                pa = pa * _fpow(f, ka - k)
            if kb > k:
                pb = pb * _fpow(f, kb - k)
        s = pa + pb
        return RationalFunction._raw(s, common if s.terms else {})

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return other + (-self)

    def __eq__(self, other):
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def cancel(self, full: bool = True) -> "RationalFunction":
        """Divide out denominator factors that divide the numerator.

        With ``full`` the positive factors are first expanded into the
        polynomial part, so composite numerator factors can cancel too.
        """
        poly = self.poly
        fac = dict(self.factors)
        if not any(k < 0 for k in fac.values()):
            return self
        if full and any(k > 0 for k in fac.values()):
            for f, k in self.factors.items():
                if k > 0:
                    poly = poly * _fpow(f, k)
                    del fac[f]
        changed = poly is not self.poly
        for f, k in list(fac.items()):
            while k < 0:
                qt = exact_divide(poly, f)
                if qt is None:
                    break
                poly, k = qt, k + 1
                changed = True
            if k:
                fac[f] = k
            else:
                del fac[f]
        if not changed:
            return self
        return RationalFunction._raw(poly, fac)

    def __repr__(self):
        return f"RationalFunction({to_text(self)!r})"

    def __str__(self):
        return to_text(self)


ZERO = RationalFunction._raw(LaurentPoly._raw({}), {})
ONE = RationalFunction._raw(LaurentPoly._raw({0: 1}), {})


def rf(x) -> RationalFunction:
    """Coerce a number, polynomial or canonical text to a RationalFunction."""
    if isinstance(x, str):
        return parse(x)
    return RationalFunction.coerce(x)


def var(v: VarId, e: int = 1) -> RationalFunction:
    return RationalFunction._raw(LaurentPoly.variable(v, e), {})


def const(c: Scalar) -> RationalFunction:
    return RationalFunction.coerce(_num(Fraction(c)) if not isinstance(c, int) else c)


def qh(e: int = 1) -> RationalFunction:
    """Powers of the square root of q."""
    return var(qh_var(), e)


def q(e: int = 1) -> RationalFunction:
    """Powers of q, always encoded through qh**2."""
    return var(qh_var(), 2 * e)


def rf_eq(a, b) -> bool:
    """True iff a - b vanishes identically."""
    return rf(a) == rf(b)


def arith(a, b, op: str) -> RationalFunction:
    a, b = rf(a), rf(b)
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        if b.is_zero():
            raise PoleError("division by zero")
        return a / b
    if op == "neg":
        return -a
    if op == "sub":
        return a - b
    raise ValueError(f"unknown operation {op!r}")


# -- substitution -------------------------------------------------------------

def _monomial_image(value: RationalFunction):
    if value.factors or len(value.poly.terms) != 1:
        return None
    (m, c), = value.poly.terms.items()
    return c, m


def substitute(f, bindings: Mapping[VarId, object]) -> RationalFunction:
    """Simultaneous substitution of variables by rational functions."""
    f = rf(f)
    if not bindings or f.is_zero():
        return f
    f = f.cancel(full=False)
    vals = {v: rf(x) for v, x in bindings.items()}
    mono = {}
    for v, x in vals.items():
        img = _monomial_image(x)
        if img is None:
            break
        mono[_var_index(v)] = img
    else:
        return _substitute_monomial(f, mono)
    return _substitute_general(f, vals)


def _substitute_monomial(f: RationalFunction, images) -> RationalFunction:
    poly = f.poly.map_monomials(images)
    result = RationalFunction._raw(poly, {})
    vanished = not poly.terms
    for fac, k in f.factors.items():
        g = fac.map_monomials(images)
        if not g.terms:
            if k < 0:
                raise PoleError(f"denominator factor {format_poly(fac)} vanishes", fac)
            vanished = True
        elif not vanished:
            result = result * RationalFunction.factored(g, k)
    return ZERO if vanished else result


def _substitute_poly_general(p: LaurentPoly, vals: Mapping[VarId, RationalFunction]) -> RationalFunction:
    idx = {_var_index(v): x for v, x in vals.items()}
    groups: dict[tuple, dict] = {}
    for m, c in p.terms.items():
        key = []
        rest = m
        for i in idx:
            e = _degree(m, i)
            key.append(e)
            rest -= e << (_BITS * i)
        groups.setdefault(tuple(key), {})[rest] = c
    total = ZERO
    for key, terms in groups.items():
        term = RationalFunction._raw(LaurentPoly._raw(terms), {})
        for (i, x), e in zip(idx.items(), key):
            if e:
                term = term * (x ** e)
        total = total + term
    return total


def _substitute_general(f: RationalFunction, vals) -> RationalFunction:
    result = _substitute_poly_general(f.poly, vals)
    vanished = result.is_zero()
    for fac, k in f.factors.items():
        g = _substitute_poly_general(fac, vals)
        if g.is_zero():
            if k < 0:
                raise PoleError(f"denominator factor {format_poly(fac)} vanishes", fac)
            vanished = True
        elif not vanished:
            result = result * (g ** k)
    return ZERO if vanished else result


# -- canonical text -----------------------------------------------------------

def _format_mono(m: int) -> str:
    return "*".join(f"{v}^{e}" for v, e in _decode_vars(m))


def format_poly(p: LaurentPoly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for n, (m, c) in enumerate(_lex_sorted_terms(p)):
        mono = _format_mono(m)
        if n == 0:
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        else:
            parts.append(" - " if c < 0 else " + ")
            a = abs(c)
            if not mono:
                parts.append(str(a))
            elif a == 1:
                parts.append(mono)
            else:
                parts.append(f"{a}*{mono}")
    return "".join(parts)


def _core_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """gcd of two Laurent polynomials up to units, via sympy's sparse rings."""
    from sympy import QQ
    from sympy.polys.rings import ring

    idx = sorted({i for p in (a, b) for m in p.terms for i, _ in _decode(m)})
    if not idx:
        return LaurentPoly.constant(1)
    pos = {i: n for n, i in enumerate(idx)}
    R, *_ = ring([f"v{i}" for i in idx], QQ)

    def lift(p):
        low = {i: min(dict(_decode(m)).get(i, 0) for m in p.terms) for i in idx}
        out = {}
        for m, c in p.terms.items():
            d = dict(_decode(m))
            key = [0] * len(idx)
            for i in idx:
                key[pos[i]] = d.get(i, 0) - low[i]
            out[tuple(key)] = QQ(Fraction(c).numerator, Fraction(c).denominator)
        return R.from_dict(out)

    g = lift(a).gcd(lift(b))
    terms = {}
    for key, c in g.terms():
        m = sum(e << (_BITS * i) for i, e in zip(idx, key))
        terms[m] = _num(Fraction(int(c.numerator), int(c.denominator)))
    return LaurentPoly._raw(terms)


def to_text(f) -> str:
    """Canonical serialization: ``num`` or ``(num) / (den)``, in lowest terms.

    The denominator is primitive, free of monomial content, and has a
    positive leading coefficient, so equal values print identically.
    """
    f = rf(f).cancel()
    den = f.denominator()
    num = f.numerator()
    if not den.is_constant() and len(num.terms) > 1:
        g = _core_gcd(num, den)
        if len(g.terms) > 1:
            num, den = exact_divide(num, g), exact_divide(den, g)
    unit, core = _split(den)
    num = num * unit.monomial_inverse()
    if core is None:
        return format_poly(num)
    return f"({format_poly(num)}) / ({format_poly(core)})"


_TOKEN_SPEC = [
    ("ws", r"\s+"),
    ("num", r"\d+"),
    ("name", r"[A-Za-z_][A-Za-z0-9_]*(?:\[[^\]]*\])?"),
    ("op", r"[-+*/^()]"),
]


def _tokenize(text: str):
    import re

    rx = re.compile("|".join(f"(?P<{k}>{p})" for k, p in _TOKEN_SPEC))
    pos = 0
    out = []
    while pos < len(text):
        mt = rx.match(text, pos)
        if mt is None:
            raise ParseError(f"unexpected character {text[pos]!r} at column {pos + 1}")
        kind = mt.lastgroup
        if kind != "ws":
            out.append((kind, mt.group(), pos))
        pos = mt.end()
    out.append(("end", "", pos))
    return out


def name_to_var(name: str) -> VarId:
    import re

    if name == "qh":
        return qh_var()
    mt = re.fullmatch(r"t\[([^\],]+)\]", name)
    if mt:
        return t_var(mt.group(1))
    mt = re.fullmatch(r"([uz])\[([^\],]+),\s*(\d+)\]", name)
    if mt:
        ctor = u_var if mt.group(1) == "u" else z_var
        return ctor(mt.group(2), int(mt.group(3)))
    return aux_var(name)


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r} at column {tok[2] + 1}, found {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> RationalFunction:
        r = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"trailing input at column {tok[2] + 1}")
        return r

    def expr(self):
        r = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            r = r + t if op == "+" else r - t
        return r

    def term(self):
        r = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            t = self.unary()
            if op == "*":
                r = r * t
            else:
                if t.is_zero():
                    raise PoleError("division by zero")
                r = r / t
        return r

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            while self.peek()[1] in ("-", "+"):
                if self.take()[1] == "-":
                    sign = -sign
            if self.peek()[1] == "(":
                self.take()
                e = self.expr()
                self.take(")")
                if not e.is_constant() or Fraction(e.constant_value()).denominator != 1:
                    raise ParseError("exponent must be an integer")
                n = int(e.constant_value())
            else:
                tok = self.take()
                if tok[0] != "num":
                    raise ParseError(f"expected integer exponent at column {tok[2] + 1}")
                n = int(tok[1])
            base = base ** (sign * n)
        return base

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            return RationalFunction.coerce(int(text))
        if kind == "name":
            return var(name_to_var(text))
        if text == "(":
            r = self.expr()
            self.take(")")
            return r
        raise ParseError(f"unexpected token {text or 'end of input'!r} at column {pos + 1}")


def parse(text: str) -> RationalFunction:
    """Parse canonical text (or any +,-,*,/,^ expression) into a RationalFunction."""
    return _Parser(text).parse()
