"""Shuffle algebra of a quiver: symmetric functions with the zeta-kernel product."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .arith import (
    RationalFunction, LaurentPoly, VarId, ONE, ZERO, Z, q, rf, substitute, to_text, var, z_var,
)
from .quiver import DimVector, Quiver

__all__ = [
    "MAX_BLOCK", "IntegrityError", "ShuffleElement", "symmetrize", "shuffle_mul",
    "generator", "unit", "word_to_shuffle", "iterated_product", "wheel_check", "WheelReport",
    "parse_word",
]

MAX_BLOCK = 4


class IntegrityError(RuntimeError):
    """An identity that must hold by construction failed: an implementation bug."""


def _check_degree(n: Sequence[int]) -> None:
    for x in n:
        if x < 0:
            raise ValueError("shuffle degrees are non-negative")
        if x > MAX_BLOCK:
            raise ValueError(f"unsupported degree: at most {MAX_BLOCK} variables per vertex")


def zvars(quiver: Quiver, n: Sequence[int]) -> list[VarId]:
    return [z_var(i, a) for i, k in zip(quiver.vertices, n) for a in range(1, k + 1)]


class ShuffleElement:
    """An element of the shuffle algebra in degree ``n``; value in z[i,a], a <= n_i."""

    __slots__ = ("quiver", "degree", "value")

    def __init__(self, quiver: Quiver, degree: Sequence[int], value):
        self.quiver = quiver
        self.degree = quiver.vector(list(degree))
        _check_degree(self.degree)
        self.value = rf(value)

    def is_polynomial(self) -> bool:
        return self.value.is_laurent_polynomial()

    def variables(self) -> list[VarId]:
        return zvars(self.quiver, self.degree)

    def is_symmetric(self) -> bool:
        for i, n in zip(self.quiver.vertices, self.degree):
            for a in range(1, n):
                swap = {z_var(i, a): var(z_var(i, a + 1)), z_var(i, a + 1): var(z_var(i, a))}
                if substitute(self.value, swap) != self.value:
                    return False
        return True

    def __mul__(self, other: "ShuffleElement") -> "ShuffleElement":
        return shuffle_mul(self, other)

    def __add__(self, other: "ShuffleElement") -> "ShuffleElement":
        self._same_space(other)
        return ShuffleElement(self.quiver, self.degree, self.value + other.value)

    def __sub__(self, other: "ShuffleElement") -> "ShuffleElement":
        self._same_space(other)
        return ShuffleElement(self.quiver, self.degree, self.value - other.value)

    def scale(self, c) -> "ShuffleElement":
        return ShuffleElement(self.quiver, self.degree, self.value * rf(c))

    def _same_space(self, other):
        if self.quiver != other.quiver or self.degree != other.degree:
            raise ValueError("shuffle elements live in different graded pieces")

    def __eq__(self, other):
        if not isinstance(other, ShuffleElement):
            return NotImplemented
        return self.quiver == other.quiver and self.degree == other.degree and self.value == other.value

    __hash__ = None

    def __repr__(self):
        return f"ShuffleElement(degree={list(self.degree)}, value={to_text(self.value)!r})"


def _block_permutations(quiver: Quiver, n: Sequence[int]):
    """Yield monomial substitutions for every element of prod_i S(n_i)."""
    blocks = []
    for i, k in zip(quiver.vertices, n):
        blocks.append([(i, p) for p in itertools.permutations(range(1, k + 1))])
    for choice in itertools.product(*blocks):
        sub = {}
        for i, perm in choice:
            for a, b in enumerate(perm, start=1):
                if a != b:
                    sub[z_var(i, a)] = var(z_var(i, b))
        yield sub


def symmetrize(quiver: Quiver, f, n: Sequence[int]) -> ShuffleElement:
    """Sum of f over all permutations within each vertex block (no 1/n! factor)."""
    n = quiver.vector(list(n))
    _check_degree(n)
    f = rf(f)
    allowed = set(zvars(quiver, n))
    stray = {v for v in f.variables() if v.kind == Z and v not in allowed}
    if stray:
        raise ValueError(f"variables {sorted(map(str, stray))} outside degree {list(n)}")
    total = ZERO
    for sub in _block_permutations(quiver, n):
        total = total + (substitute(f, sub) if sub else f)
    return ShuffleElement(quiver, n, total.cancel())


def _diagonal_factors(f: RationalFunction) -> list[LaurentPoly]:
    """Denominator factors of the form z[i,a] - z[i,b] (up to units)."""
    out = []
    for g, k in f.factors.items():
        if k >= 0 or len(g.terms) != 2:
            continue
        vs = g.variables()
        if len(vs) == 2 and all(v.kind == Z for v in vs) and len({v.key for v in vs}) == 1:
            if sorted(g.terms.values()) == [-1, 1]:
                out.append(g)
    return out


def shuffle_mul(left: ShuffleElement, right: ShuffleElement) -> ShuffleElement:
    """Shuffle product with the 1/(n! n'!) normalization, n! = prod_i n_i!.

    For block-symmetric inputs the normalized symmetrization equals a sum
    over the ways of splitting each block into the two factors' slots.
    """
    if left.quiver != right.quiver:
        raise ValueError("shuffle elements over different quivers")
    quiver = left.quiver
    n, m = left.degree, right.degree
    total_deg = n + m
    _check_degree(total_deg)
    verts = quiver.vertices
    splits = []
    for i, a, b in zip(verts, n, m):
        splits.append([(i, c) for c in itertools.combinations(range(1, a + b + 1), a)])
    total = ZERO
    for choice in itertools.product(*splits):
        slots_l, slots_r = {}, {}
        for (i, chosen), a, b in zip(choice, n, m):
            rest = [s for s in range(1, a + b + 1) if s not in chosen]
            slots_l[i], slots_r[i] = list(chosen), rest
        sub_l = {z_var(i, k): var(z_var(i, s)) for i in verts for k, s in enumerate(slots_l[i], 1) if k != s}
        sub_r = {z_var(i, k): var(z_var(i, s)) for i in verts for k, s in enumerate(slots_r[i], 1)}
        term = substitute(left.value, sub_l) * substitute(right.value, sub_r)
        for i in verts:
            for a in slots_l[i]:
                za = var(z_var(i, a))
                for j in verts:
                    for b in slots_r[j]:
                        term = term * quiver.zeta(j, i, var(z_var(j, b)) / za)
        total = total + term
    total = total.cancel()
    if _diagonal_factors(total) and not (_diagonal_factors(left.value) or _diagonal_factors(right.value)):
        raise IntegrityError("diagonal poles z[i,a] - z[i,b] survived symmetrization")
    return ShuffleElement(quiver, total_deg, total)


def unit(quiver: Quiver) -> ShuffleElement:
    return ShuffleElement(quiver, quiver.zero(), ONE)


def generator(quiver: Quiver, i: str, d: int) -> ShuffleElement:
    """The degree-one element z[i,1]**d."""
    return ShuffleElement(quiver, quiver.unit(i), var(z_var(i, 1), d))


def word_to_shuffle(quiver: Quiver, word: Iterable[tuple[str, int]]) -> ShuffleElement:
    """Image of f_{i1,d1} ... f_{in,dn}: full Sym, slots assigned first-come per vertex."""
    word = list(word)
    counts = {i: 0 for i in quiver.vertices}
    placed = []
    f = ONE
    for i, d in word:
        if i not in counts:
            raise ValueError(f"unknown vertex {i!r}")
        counts[i] += 1
        zl = var(z_var(i, counts[i]))
        f = f * zl ** d
        for j, zk in placed:
            f = f * quiver.zeta(i, j, zl / zk)
        placed.append((i, zl))
    return symmetrize(quiver, f, [counts[i] for i in quiver.vertices])


def iterated_product(quiver: Quiver, word: Iterable[tuple[str, int]]) -> ShuffleElement:
    """Left-to-right shuffle product of generators; equals word_to_shuffle."""
    out = unit(quiver)
    for i, d in word:
        out = shuffle_mul(out, generator(quiver, i, d))
    return out


def parse_word(text: str) -> list[tuple[str, int]]:
    """'1:0,2:-1' -> [('1', 0), ('2', -1)]; the empty string is the empty word."""
    word = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if ":" not in part:
            raise ValueError(f"bad letter {part!r}; expected vertex:exponent")
        i, d = part.rsplit(":", 1)
        word.append((i.strip(), int(d)))
    return word


@dataclass
class WheelReport:
    passed: bool
    vacuous: bool
    checked: int
    violation: dict | None = None
    detail: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "vacuous": self.vacuous,
            "checked": self.checked,
            "violation": self.violation,
        }


def _wheels(quiver: Quiver, n: Sequence[int]):
    """Yield (label, substitution) for every wheel specialization in degree n."""
    size = dict(zip(quiver.vertices, n))
    qq = q()
    for e in quiver.edges:
        i, j = e.src, e.dst
        te = quiver.t(e)
        # first family: z[i,a] = q z[j,b] / t_e = q z[i,c]
        for a, c in itertools.permutations(range(1, size[i] + 1), 2):
            for b in range(1, size[j] + 1):
                if i == j and b in (a, c):
                    continue
                zc = var(z_var(i, c))
                sub = {z_var(i, a): qq * zc, z_var(j, b): te * zc}
                yield {"edge": e.id, "wheel": 1, "a": a, "b": b, "c": c,
                       "specialization": f"z[{i},{a}] = q*z[{j},{b}]/t[{e.id}] = q*z[{i},{c}]"}, sub
        # second family: z[j,a] = t_e z[i,b] = q z[j,c]
        for a, c in itertools.permutations(range(1, size[j] + 1), 2):
            for b in range(1, size[i] + 1):
                if i == j and b in (a, c):
                    continue
                zc = var(z_var(j, c))
                sub = {z_var(j, a): qq * zc, z_var(i, b): qq / te * zc}
                yield {"edge": e.id, "wheel": 2, "a": a, "b": b, "c": c,
                       "specialization": f"z[{j},{a}] = t[{e.id}]*z[{i},{b}] = q*z[{j},{c}]"}, sub


def wheel_check(element: ShuffleElement) -> WheelReport:
    """Test vanishing on every wheel specialization of every edge."""
    value = element.value.cancel()
    if not value.is_laurent_polynomial():
        raise ValueError("wheel conditions apply to Laurent polynomial elements")
    checked = 0
    for label, sub in _wheels(element.quiver, element.degree):
        checked += 1
        image = substitute(value, sub)
        if not image.is_zero():
            label["value"] = to_text(image)
            return WheelReport(False, False, checked, label)
    return WheelReport(True, checked == 0, checked)
