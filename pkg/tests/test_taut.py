import pytest
import sympy
from hypothesis import given, strategies as st

from kha.arith import LaurentPoly, ONE, ZERO, aux_var, qh, qh_var, rf, t_var, to_text, u_var, var
from kha.quiver import a1, a2, jordan
from kha.series import delta_coefficients
from kha.taut import (
    chern_root, e_vacuum, ef_commutator_check, ef_commutator_grid, f_vacuum, h_series, line,
    projectivization_pushforward, residue_check, sdet, universal_complex_class, wedge,
)
from oracle import to_sympy

BASIS = [line(qh_var()), line(t_var("a")), line(u_var("1", 1)), line(chern_root("1", 1)), line(qh_var(), -2)]


@st.composite
def kclasses(draw):
    out = LaurentPoly()
    for b in draw(st.lists(st.sampled_from(BASIS), max_size=3)):
        out = out + draw(st.integers(-2, 2)) * b
    return out


def test_a1_vacuum_golden_value():
    assert to_text(e_vacuum(a1(), "1", 0, [0], [1])) == "-1*u[1,1]^1*x[1,1]^-1"
    assert to_text(f_vacuum(a1(), "1", 0, [1], [1])) == "1"
    assert f_vacuum(a1(), "1", 0, [0], [1]) == ZERO


def test_wedge_and_sdet_basics():
    x = line(chern_root("1", 1))
    assert wedge(x) == 1 - var(chern_root("1", 1))
    assert wedge(-x) * wedge(x) == ONE
    s = sdet(2 * x - line(qh_var()))
    assert s.sign == -1 and s.to_rf() == -var(chern_root("1", 1), 2) * qh(-1)
    with pytest.raises(ValueError):
        wedge(LaurentPoly.constant(1) / 2)


@given(kclasses(), kclasses())
def test_wedge_turns_sums_into_products(a, b):
    assert wedge(a + b) == wedge(a) * wedge(b)


@given(kclasses(), kclasses())
def test_sdet_is_multiplicative(a, b):
    assert sdet(a + b).to_rf() == sdet(a).to_rf() * sdet(b).to_rf()


def test_h_series_on_a1_against_sympy():
    z = aux_var("z")
    h = h_series(a1(), "1", [1], [2], z)
    zs, qhs, u1, u2, x1 = sympy.symbols("z qh u_1_1 u_1_2 x_1_1")
    q = qhs ** 2
    # U = W - (1+q)V; the qh-prefactor w - 2v vanishes at v = 1, w = 2
    w = lambda m: (1 - m / zs)
    expected = (w(u1 / q) * w(u2 / q) / (w(u1) * w(u2))) * (w(x1) * w(x1 * q) / (w(x1 / q) * w(x1)))
    assert sympy.simplify(to_sympy(h) - expected) == 0


def test_projectivization_pushforward_of_trivial_bundle():
    z = aux_var("z")
    u = line(u_var("1", 1))
    # P(C u): a point, so O(0) pushes forward to 1
    assert projectivization_pushforward(u, z, 0) == ONE


@pytest.mark.parametrize("quiver, v, w", [(a1(), [1], [2]), (jordan(), [1], [1]), (a2(), [1, 0], [1, 1]), (a2(), [1, 1], [0, 1])])
def test_commutator_grid(quiver, v, w):
    for i in quiver.vertices:
        grid = ef_commutator_grid(quiver, i, v, w, range(-2, 3), range(-2, 3))
        assert all(lhs == rhs for lhs, rhs in grid.values())


def test_commutator_check_detects_a_wrong_right_hand_side():
    grid = ef_commutator_grid(jordan(), "1", [2], [1], [0], [1])
    lhs, rhs = grid[0, 1]
    assert lhs == rhs and not rhs.is_zero()
    assert lhs != rhs * qh(2)
    assert ef_commutator_check(jordan(), "1", 0, 1, [2], [1])


@pytest.mark.parametrize("quiver, v, w", [(a1(), [2], [2]), (jordan(), [2], [1]), (a2(), [1, 1], [1, 2])])
def test_residue_structure(quiver, v, w):
    for i in quiver.vertices:
        assert residue_check(quiver, i, v, w) == {"diagonal": True, "shifted": True}


def test_universal_class_counts_loops_twice():
    J = jordan()
    u = universal_complex_class(J, "1", [1], [1])
    x = line(chern_root("1", 1))
    t = line(t_var("a"))
    assert u == line(u_var("1", 1)) - (1 + line(qh_var(), 2)) * x + line(qh_var(), 2) * line(t_var("a"), -1) * x + t * x


def test_sizes_are_bounded():
    with pytest.raises(ValueError, match="unsupported sizes"):
        e_vacuum(a1(), "1", 0, [3], [4])
