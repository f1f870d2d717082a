"""K-classes in Chern roots, exterior powers, sdet, and vacuum computations.

A K-class is an integer combination of monomials (line bundles) and is
stored as a ``LaurentPoly`` with integer coefficients.  Chern roots of
the tautological bundle at vertex i are the free symbols ``x[i,a]``;
framing characters are ``u[i,a]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .arith import (
    LaurentPoly, RationalFunction, VarId, ONE, ZERO, aux_var, qh, qh_var, rf, substitute,
    t_var, u_var, var,
)
from .quiver import Quiver
from .series import delta_coefficient, delta_coefficients

__all__ = [
    "KClass", "SdetValue", "chern_root", "line", "wedge", "wedge_series", "sdet",
    "tautological", "framing", "universal_complex_class", "projectivization_pushforward",
    "h_series", "h_exponent", "e_vacuum", "f_vacuum", "commutator_integrand",
    "ef_commutator_grid", "ef_commutator_check", "residue_check", "MAX_ENTRY",
]

KClass = LaurentPoly
MAX_ENTRY = 3


def chern_root(i: str, a: int) -> VarId:
    return aux_var(f"x[{i},{a}]")


def line(v: VarId, e: int = 1) -> KClass:
    return LaurentPoly.variable(v, e)


def _qh_line(e: int) -> KClass:
    return LaurentPoly.variable(qh_var(), e)


def tautological(quiver: Quiver, v: Sequence[int]) -> dict[str, KClass]:
    """V_i as the sum of its Chern roots."""
    return {i: sum((line(chern_root(i, a)) for a in range(1, n + 1)), LaurentPoly())
            for i, n in zip(quiver.vertices, v)}


def framing(quiver: Quiver, w: Sequence[int]) -> dict[str, KClass]:
    return {i: sum((line(u_var(i, a)) for a in range(1, n + 1)), LaurentPoly())
            for i, n in zip(quiver.vertices, w)}


def _check_class(x: KClass) -> None:
    for c in x.terms.values():
        if not isinstance(c, int):
            raise ValueError("K-classes have integer coefficients")


def wedge(x: KClass) -> RationalFunction:
    """Exterior algebra: prod over monomials m of (1 - m) ** mult."""
    _check_class(x)
    out = ONE
    one = LaurentPoly.constant(1)
    for m, c in x.terms.items():
        out = out * RationalFunction.factored(one - LaurentPoly._raw({m: 1}), c)
    return out


def wedge_series(x: KClass, z: VarId) -> RationalFunction:
    """wedge(x / z) as a rational function of z."""
    return wedge(x * line(z, -1))


@dataclass(frozen=True)
class SdetValue:
    sign: int
    monomial: LaurentPoly

    def to_rf(self) -> RationalFunction:
        return RationalFunction.from_poly(self.monomial * self.sign)


def sdet(x: KClass) -> SdetValue:
    """(-1)**rank times the product of the line bundles, multiplicatively extended."""
    _check_class(x)
    rank = sum(x.terms.values())
    mono = 0
    for m, c in x.terms.items():
        mono += c * m
    return SdetValue(-1 if rank % 2 else 1, LaurentPoly._raw({mono: 1}))


def universal_complex_class(quiver: Quiver, i: str, v: Sequence[int], w: Sequence[int],
                            taut: dict | None = None, frame: dict | None = None) -> KClass:
    """[U_i] = W_i + sum_{i->j} (q/t_e) V_j + sum_{j->i} t_e V_j - (1+q) V_i."""
    V = taut if taut is not None else tautological(quiver, v)
    W = frame if frame is not None else framing(quiver, w)
    q_ = _qh_line(2)
    out = W[i] - (1 + q_) * V[i]
    for e in quiver.edges:
        te = line(t_var(e.id))
        if e.src == i:
            out = out + q_ * line(t_var(e.id), -1) * V[e.dst]
        if e.dst == i:
            out = out + te * V[e.src]
    return out


def projectivization_pushforward(u: KClass, z: VarId, d: int) -> RationalFunction:
    """{wedge(-U/z)}_{z^d}: the push-forward of O(d) from the projectivization."""
    return delta_coefficient(wedge_series(-u, z), z, d)


def h_exponent(quiver: Quiver, i: str, v: Sequence[int], w: Sequence[int]) -> int:
    """2 * the q-exponent of h_{i,0}, i.e. the qh-exponent w.e_i - (v, e_i)."""
    e = quiver.unit(i)
    return quiver.dot(w, e) - quiver.sym_form(v, e)


def h_series(quiver: Quiver, i: str, v: Sequence[int], w: Sequence[int], z: VarId,
             taut: dict | None = None, frame: dict | None = None) -> RationalFunction:
    """Eigenvalue function of h_i(z) on K(w)_v, with the given tautological classes."""
    u = universal_complex_class(quiver, i, v, w, taut, frame)
    coef = _qh_line(-2) - 1
    return qh(h_exponent(quiver, i, v, w)) * wedge_series(coef * u, z)


def _check_sizes(v: Sequence[int], w: Sequence[int]) -> None:
    for x in list(v) + list(w):
        if x < 0 or x > MAX_ENTRY:
            raise ValueError(f"unsupported sizes: entries of v and w must lie in [0, {MAX_ENTRY}]")


def _recip(x: KClass) -> KClass:
    return LaurentPoly._raw({-m: c for m, c in x.terms.items()})


def e_vacuum(quiver: Quiver, i: str, d: int, v: Sequence[int], w: Sequence[int]) -> RationalFunction:
    """e_{i,d}(1) for 1 in K(w)_v, in the Chern roots of the target sector v + e_i."""
    target = quiver.vector(list(v)) + quiver.unit(i)
    _check_sizes(target, w)
    z = aux_var("z")
    V, W = tautological(quiver, target), framing(quiver, w)
    zl, qinv = line(z), _qh_line(-2)
    expo = quiver.dot(w, quiver.unit(i)) - quiver.euler_form(target, quiver.unit(i))
    num = wedge(W[i] * qinv * line(z, -1))
    for e in quiver.edges:
        te = line(t_var(e.id))
        if e.src == i:
            num = num * wedge(te * zl * _recip(V[e.dst]))
        if e.dst == i:
            num = num * wedge(te * V[e.src] * qinv * line(z, -1))
    den = wedge(V[i] * qinv * line(z, -1)) * wedge(zl * _recip(V[i]))
    return delta_coefficient(qh(expo) * num / den, z, d)


def f_vacuum(quiver: Quiver, i: str, k: int, v: Sequence[int], w: Sequence[int]) -> RationalFunction:
    """f_{i,k}(1) for 1 in K(w)_v, in the Chern roots of the target v - e_i (0 if empty)."""
    v = quiver.vector(list(v))
    if v[quiver.index(i)] == 0:
        return ZERO
    target = v - quiver.unit(i)
    _check_sizes(target, w)
    y = aux_var("y")
    V, W = tautological(quiver, target), framing(quiver, w)
    yl, qinv = line(y), _qh_line(-2)
    expo = quiver.euler_form(quiver.unit(i), target)
    num = wedge(V[i] * line(y, -1)) * wedge(yl * qinv * _recip(V[i]))
    den = wedge(W[i] * line(y, -1))
    for e in quiver.edges:
        te = line(t_var(e.id))
        if e.src == i:
            den = den * wedge(te * yl * qinv * _recip(V[e.dst]))
        if e.dst == i:
            den = den * wedge(te * V[e.src] * line(y, -1))
    return delta_coefficient(qh(expo) * num / den, y, k)


def commutator_integrand(quiver: Quiver, i: str, v: Sequence[int], w: Sequence[int],
                         y: VarId, z: VarId) -> RationalFunction:
    """The two-variable function whose iterated {.}_{y^k}, {.}_{z^d} give e f (1) and f e (1)."""
    ei = quiver.unit(i)
    v = quiver.vector(list(v))
    expo = quiver.dot(w, ei) + quiver.euler_form(ei, v - ei) - quiver.euler_form(v, ei)
    V, W = tautological(quiver, v), framing(quiver, w)
    yl, zl, qinv = line(y), line(z), _qh_line(-2)
    out = qh(expo)
    for e in quiver.loops(i):
        te = line(t_var(e.id))
        out = out * wedge(te * yl * qinv * line(z, -1) + te * zl * line(y, -1))
    out = out / wedge(zl * line(y, -1) + yl * qinv * line(z, -1))
    out = out * wedge(W[i] * qinv * line(z, -1)) / wedge(W[i] * line(y, -1))
    out = out * wedge(V[i] * line(y, -1)) / wedge(V[i] * qinv * line(z, -1))
    out = out * wedge(yl * qinv * _recip(V[i])) / wedge(zl * _recip(V[i]))
    for e in quiver.edges:
        te = line(t_var(e.id))
        if e.src == i:
            out = out * wedge(te * zl * _recip(V[e.dst])) / wedge(te * yl * qinv * _recip(V[e.dst]))
        if e.dst == i:
            out = out * wedge(te * V[e.src] * qinv * line(z, -1)) / wedge(te * V[e.src] * line(y, -1))
    return out


def ef_commutator_grid(quiver: Quiver, i: str, v: Sequence[int], w: Sequence[int],
                       ds: Iterable[int], ks: Iterable[int]) -> dict[tuple[int, int], tuple]:
    """{(d, k): (e f (1) - f e (1), right-hand side)} over the whole (d, k) grid."""
    v, w = quiver.vector(list(v)), quiver.vector(list(w))
    _check_sizes(v, w)
    ds, ks = sorted(set(ds)), sorted(set(ks))
    y, z = aux_var("y"), aux_var("z")
    integrand = commutator_integrand(quiver, i, v, w, y, z)
    ef_y = delta_coefficients(integrand, y, ks)
    ef = {(d, k): c for k in ks for d, c in delta_coefficients(ef_y[k], z, ds).items()}
    fe_z = delta_coefficients(integrand, z, ds)
    fe = {(d, k): c for d in ds for k, c in delta_coefficients(fe_z[d], y, ks).items()}
    h = h_series(quiver, i, v, w, z)
    gamma = quiver.gamma(i)
    rhs_n = delta_coefficients(h, z, sorted({d + k for d in ds for k in ks}))
    return {(d, k): (ef[d, k] - fe[d, k], gamma * rhs_n[d + k]) for d in ds for k in ks}


def ef_commutator_check(quiver: Quiver, i: str, d: int, k: int, v: Sequence[int], w: Sequence[int]) -> bool:
    lhs, rhs = ef_commutator_grid(quiver, i, v, w, [d], [k])[d, k]
    return lhs == rhs


def residue_check(quiver: Quiver, i: str, v: Sequence[int], w: Sequence[int]) -> dict[str, bool]:
    """Pole structure of the integrand along the diagonal directions y = z and y = q z.

    ``diagonal``: the residue at y = z, normalized by (1 - z/y), is gamma_i
    times the h-eigenvalue function.  ``shifted``: the normalized residue at
    y = q z is a Laurent polynomial in z, so it contributes nothing to any
    {.}_{z^n} extraction.
    """
    v, w = quiver.vector(list(v)), quiver.vector(list(w))
    y, z = aux_var("y"), aux_var("z")
    integrand = commutator_integrand(quiver, i, v, w, y, z)
    zl, yl = var(z), var(y)
    at_diag = substitute(integrand * (1 - zl / yl), {y: zl})
    gamma = quiver.gamma(i)
    h = h_series(quiver, i, v, w, z)
    at_shift = substitute(integrand * (1 - yl / (qh(2) * zl)), {y: qh(2) * zl})
    return {
        "diagonal": at_diag == gamma * h,
        "shifted": at_shift.is_laurent_polynomial()
        or all(c.is_zero() for c in delta_coefficients(at_shift, z, range(-4, 5)).values()),
    }
