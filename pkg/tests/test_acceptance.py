"""Acceptance run: ten exact checks, one PASS/FAIL line each.

Run under pytest (lines are printed even when output is captured) or
directly with ``python3 tests/test_acceptance.py``.
"""

import itertools
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from kha.arith import LaurentPoly, ONE, aux_var, parse, qh, rf, substitute, t_var, to_text, u_var, var
from kha.fixedpoint import FixedPointModule, _rel5_expected, relation_suite
from kha.quiver import a1, a2, edge_free, jordan
from kha.rmatrix import coproduct_relation_check, limit_checks
from kha.series import delta_coefficients, expand_at
from kha.shuffle import generator, shuffle_mul, wheel_check, word_to_shuffle
from kha.taut import ef_commutator_grid, residue_check
from builders import random_symmetric

DEGREES = range(-2, 3)

TITLES = {
    1: "A1 relations 0-5 on every sector, w in {(1),(2)}",
    2: "vacuum commutators on Jordan and A2",
    3: "symbolic e/f commutator identity in free Chern roots",
    4: "shuffle product: golden value, associativity, grading",
    5: "f-words agree with their shuffle images on fixed points",
    6: "length-3 words satisfy the wheel conditions on Jordan and A2",
    7: "R-matrix block limits at u -> 0 and u -> infinity",
    8: "modified pairing is diagonal and nondegenerate",
    9: "coproduct respects [e, f] on K(w1) x K(w2)",
    10: "kernel: polynomial delta parts vanish, text and series invariants",
}


def _announce(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}: {title}" + (f" ({detail})" if detail else "")
    capture = _CAPTURE.get("manager")
    if capture is not None:
        with capture.global_and_fixture_disabled():
            print(line, flush=True)
    else:
        print(line, flush=True)


_CAPTURE: dict = {}


@pytest.fixture(autouse=True)
def _expose_capture(request):
    _CAPTURE["manager"] = request.config.pluginmanager.getplugin("capturemanager")
    yield
    _CAPTURE.pop("manager", None)


def _framings(quiver, top):
    return [list(w) for w in itertools.product(range(top + 1), repeat=len(quiver.vertices))]


# 1 ----------------------------------------------------------------------------

def criterion_1():
    checks, ok = 0, True
    for w in ([1], [2]):
        report = relation_suite(a1(), w, vmax=None, dmin=-2, dmax=2)
        checks += len(report.checks)
        ok &= report.passed and not report.skipped and set(report.summary()) == {f"rel{n}" for n in range(6)}
    return ok, f"{checks} operator identities"


def test_criterion_1_a1_relation_suite():
    ok, detail = criterion_1()
    _announce(1, TITLES[1], ok, detail)
    assert ok


# 2 ----------------------------------------------------------------------------

def criterion_2():
    checks, ok = 0, True
    for quiver in (jordan(), a2()):
        for w in _framings(quiver, 2):
            M = FixedPointModule(quiver, w)
            vac = M.vector(M.vacuum())
            for i, j in itertools.product(quiver.vertices, repeat=2):
                for d, k in itertools.product(DEGREES, repeat=2):
                    lhs = M.e(i, d, M.f(j, k, vac)) - M.f(j, k, M.e(i, d, vac))
                    ok &= lhs == _rel5_expected(M, i, j, d, k, M.vacuum())
                    checks += 1
    M = FixedPointModule(a1(), [1])
    vac = M.vector(M.vacuum())
    hand = M.e("1", 0, M.f("1", 0, vac)) - M.f("1", 0, M.e("1", 0, vac)) == -vac
    return ok and hand, f"{checks} vacuum commutators, A1 [e10,f10] = -1: {hand}"


def test_criterion_2_vacuum_commutator():
    ok, detail = criterion_2()
    _announce(2, TITLES[2], ok, detail)
    assert ok


# 3 ----------------------------------------------------------------------------

def criterion_3():
    checks, ok = 0, True
    for quiver in (a1(), jordan(), a2()):
        for v in _framings(quiver, 2):
            for w in _framings(quiver, 2):
                for i in quiver.vertices:
                    grid = ef_commutator_grid(quiver, i, v, w, DEGREES, DEGREES)
                    ok &= all(lhs == rhs for lhs, rhs in grid.values())
                    checks += len(grid)
                    ok &= all(residue_check(quiver, i, v, w).values())
    return ok, f"{checks} (d,k) grid points plus residue structure"


def test_criterion_3_symbolic_commutator_identity():
    ok, detail = criterion_3()
    _announce(3, TITLES[3], ok, detail)
    assert ok


# 4 ----------------------------------------------------------------------------

def criterion_4():
    Q = a1()
    g = generator(Q, "1", 0)
    golden = to_text(shuffle_mul(g, g).value) == "qh^1 + qh^-1"
    rng = random.Random(4)
    assoc = True
    graded = True
    for _ in range(50):
        while True:
            degs = [rng.randint(0, 2) for _ in range(3)]
            if sum(degs) <= 4:
                break
        a, b, c = (random_symmetric(Q, [n], rng) for n in degs)
        left, right = (a * b) * c, a * (b * c)
        assoc &= left == right
        graded &= left.degree == (sum(degs),) and (a * b).degree == (degs[0] + degs[1],)
    return golden and assoc and graded, f"golden {golden}, 50 triples associative {assoc}, grading {graded}"


def test_criterion_4_shuffle_kernel():
    ok, detail = criterion_4()
    _announce(4, TITLES[4], ok, detail)
    assert ok


# 5 ----------------------------------------------------------------------------

def _words(quiver, max_len):
    letters = [(i, d) for i in quiver.vertices for d in DEGREES]
    for n in range(1, max_len + 1):
        yield from itertools.product(letters, repeat=n)


def criterion_5():
    checks, ok = 0, True
    for quiver in (a1(), a2(), jordan()):
        for w in itertools.product((1, 2), repeat=len(quiver.vertices)):
            M = FixedPointModule(quiver, w)
            labels = [S for v in M.sectors() for S in M.basis(v)]
            for word in _words(quiver, 3):
                element = word_to_shuffle(quiver, word)
                for S in labels:
                    x = M.vector(S)
                    ok &= M.act_word_f(word, x) == M.act_shuffle(element, x)
                    checks += 1
    return ok, f"{checks} word/basis pairs"


def test_criterion_5_shuffle_fixed_point_consistency():
    ok, detail = criterion_5()
    _announce(5, TITLES[5], ok, detail)
    assert ok


# 6 ----------------------------------------------------------------------------

def criterion_6():
    checks, ok = 0, True
    for quiver in (jordan(), a2()):
        letters = [(i, d) for i in quiver.vertices for d in DEGREES]
        for word in itertools.product(letters, repeat=3):
            report = wheel_check(word_to_shuffle(quiver, word))
            ok &= report.passed
            checks += report.checked
    return ok, f"{checks} wheel specializations"


def test_criterion_6_wheel_conditions():
    ok, detail = criterion_6()
    _announce(6, TITLES[6], ok, detail)
    assert ok


# 7 ----------------------------------------------------------------------------

def criterion_7():
    checks, ok = 0, True
    for quiver, framings in ((a1(), ([1], [2])), (jordan(), ([1], [2]))):
        for w in framings:
            report = limit_checks(quiver, "1", w)
            ok &= report.passed and {"limit-a", "limit-b", "limit-c"} <= set(report.summary())
            checks += len(report.checks)
    return ok, f"{checks} exact limits"


def test_criterion_7_r_block_limits():
    ok, detail = criterion_7()
    _announce(7, TITLES[7], ok, detail)
    assert ok


# 8 ----------------------------------------------------------------------------

def criterion_8():
    checks, ok = 0, True
    cases = [(a1(), [w]) for w in (1, 2, 3)] + [(jordan(), [w]) for w in (1, 2)]
    cases += [(a2(), list(w)) for w in itertools.product((1, 2), repeat=2)]
    for quiver, w in cases:
        M = FixedPointModule(quiver, w)
        for v in M.sectors():
            gram = M.gram_matrix(v)
            for a, b in itertools.product(range(len(gram)), repeat=2):
                ok &= gram[a][b].is_zero() == (a != b)
                checks += 1
    unit = FixedPointModule(a1(), [1]).pairing_diag(((1,),)) == ONE
    return ok and unit, f"{checks} Gram entries, A1 v=1 w=1 entry is 1: {unit}"


def test_criterion_8_pairing_perfectness():
    ok, detail = criterion_8()
    _announce(8, TITLES[8], ok, detail)
    assert ok


# 9 ----------------------------------------------------------------------------

def criterion_9():
    checks, ok = 0, True
    for quiver in (a1(), edge_free(2)):
        w = [1] * len(quiver.vertices)
        for i in quiver.vertices:
            report = coproduct_relation_check(quiver, w, w, i)
            ok &= report.passed
            checks += len(report.checks)
    return ok, f"{checks} tensor basis vectors"


def test_criterion_9_coproduct():
    ok, detail = criterion_9()
    _announce(9, TITLES[9], ok, detail)
    assert ok


# 10 ---------------------------------------------------------------------------

def criterion_10():
    Z, W = aux_var("z"), aux_var("w")
    rng = random.Random(10)
    zero_delta = True
    for _ in range(1000):
        p = LaurentPoly()
        for _ in range(rng.randint(1, 6)):
            pairs = [(Z, rng.randint(-5, 5)), (W, rng.randint(-2, 2)), (t_var("a"), rng.randint(-1, 1))]
            p = p + LaurentPoly.monomial(pairs[: rng.randint(1, 3)], rng.randint(-4, 4))
        zero_delta &= all(c.is_zero() for c in delta_coefficients(rf(p), Z, range(-6, 7)).values())
    z, w, u = var(Z), var(W), var(u_var("1", 1))
    samples = [
        (z - qh(2) * w) / (qh() * (z - w)),
        1 / ((1 - z / w) * (1 - qh(2) * u / z)),
        (u ** 2 - qh(-2)) / (u + qh(-1)),
        qh(3) * var(t_var("a"), -1) - 2 * z * w,
    ]
    round_trip = all(parse(to_text(f)) == f and to_text(parse(to_text(f))) == to_text(f) for f in samples)
    canonical = all(to_text(f) == to_text((f * (z + 3)) / (z + 3)) for f in samples)
    s = aux_var("s")
    series_ok = True
    for f in samples[:2]:
        at_inf = expand_at(f, Z, "inf", order=5)
        flipped = expand_at(substitute(f, {Z: 1 / var(s)}), s, "0", order=5)
        series_ok &= all(at_inf[e] == flipped[-e] for e in range(at_inf.lo, at_inf.hi + 1))
    ok = zero_delta and round_trip and canonical and series_ok
    return ok, f"1000 polynomials {zero_delta}, round trip {round_trip}, canonical {canonical}, series {series_ok}"


def test_criterion_10_kernel_properties():
    ok, detail = criterion_10()
    _announce(10, TITLES[10], ok, detail)
    assert ok


if __name__ == "__main__":
    results = []
    for n, fn in enumerate([criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10], start=1):
        ok, detail = fn()
        _announce(n, TITLES[n], ok, detail)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
