import itertools
import random

import pytest

from kha.arith import ONE, qh, rf, var
from kha.fixedpoint import (
    ELL, FixedPointModule, UnsupportedScope, WeightFunction, _rel5_expected, relation_suite,
)
from kha.quiver import a1, a2, edge_free, jordan
from kha.shuffle import word_to_shuffle
from builders import random_word


def test_vacuum_commutator_on_a1():
    M = FixedPointModule(a1(), [1])
    x = M.vector(M.vacuum())
    assert M.e("1", 0, M.f("1", 0, x)) - M.f("1", 0, M.e("1", 0, x)) == -x


def test_pairing_normalization():
    M = FixedPointModule(a1(), [1])
    assert M.pairing_diag(((1,),)) == ONE
    assert M.pairing_diag(M.vacuum()) == ONE


@pytest.mark.parametrize("quiver, w", [(a1(), [2]), (a1(), [3]), (jordan(), [2]), (a2(), [1, 2])])
def test_gram_matrix_is_diagonal_and_nondegenerate(quiver, w):
    M = FixedPointModule(quiver, w)
    for v in M.sectors():
        gram = M.gram_matrix(v)
        for a, b in itertools.product(range(len(gram)), repeat=2):
            assert gram[a][b].is_zero() == (a != b)


def test_e_is_adjoint_to_f():
    M = FixedPointModule(a2(), [2, 1])
    for v in M.sectors():
        for S in M.basis(v):
            for i in M.quiver.vertices:
                for T in M.basis(v - M.quiver.unit(i)):
                    lhs = M.pairing(M.f(i, 1, M.vector(S)), M.vector(T))
                    rhs = M.pairing(M.vector(S), M.e(i, 1, M.vector(T)))
                    assert lhs == rhs


@pytest.mark.parametrize("quiver, w", [(a1(), [1]), (a1(), [2]), (edge_free(2), [1, 1])])
def test_full_relation_suite_on_edge_free_quivers(quiver, w):
    report = relation_suite(quiver, w, vmax=None, dmin=-1, dmax=1)
    assert report.passed and not report.skipped
    assert set(report.summary()) == {f"rel{n}" for n in range(6)}


@pytest.mark.parametrize("quiver, w", [(jordan(), [2]), (a2(), [1, 1])])
def test_relation_suite_gates_rel5_when_edges_exist(quiver, w):
    report = relation_suite(quiver, w, vmax=None, dmin=-1, dmax=1)
    assert report.passed
    assert report.skipped[0]["relation"] == "rel5"
    with pytest.raises(UnsupportedScope, match="non-Grassmannian"):
        relation_suite(quiver, w, vmax=None, dmin=0, dmax=0, rel5_scope="full")


def test_gating_is_needed_for_the_jordan_quiver():
    # forcing rel 5 beyond the vacuum sector exposes the missing fixed points
    M = FixedPointModule(jordan(), [2])
    S = ((1,),)
    x = M.vector(S)
    lhs = M.e("1", 0, M.f("1", 0, x)) - M.f("1", 0, M.e("1", 0, x))
    assert lhs != _rel5_expected(M, "1", "1", 0, 0, S)


@pytest.mark.parametrize("seed", range(4))
def test_word_action_matches_shuffle_action(seed):
    rng = random.Random(seed)
    for Q, w in ((a1(), [2]), (a2(), [1, 1]), (jordan(), [2])):
        M = FixedPointModule(Q, w)
        word = random_word(Q, rng.randint(1, 2), rng)
        element = word_to_shuffle(Q, word)
        for v in M.sectors():
            for S in M.basis(v):
                x = M.vector(S)
                assert M.act_word_f(word, x) == M.act_shuffle(element, x)


def test_literal_shuffle_action_divides_by_block_factorials():
    M = FixedPointModule(a1(), [2])
    element = word_to_shuffle(a1(), [("1", 0), ("1", 1)])
    x = M.vector(((1, 2),))
    assert M.act_shuffle(element, x, literal=True) == rf(1) / 2 * M.act_shuffle(element, x)


def test_weight_functions():
    M = FixedPointModule(a1(), [1])
    x = M.vector(((1,),))
    assert M.act_f_weighted("1", WeightFunction.monomial(2), x) == M.f("1", 2, x)
    doubled = WeightFunction(2 * var(ELL) ** 2)
    assert M.act_f_weighted("1", doubled, x) == 2 * M.f("1", 2, x)


def test_vectors_and_labels():
    M = FixedPointModule(a2(), [2, 1])
    assert M.basis([1, 1]) == [((1,), (1,)), ((2,), (1,))]
    assert M.basis([3, 0]) == []
    with pytest.raises(ValueError):
        M.check_label([[3], []])
    x = M.vector(((1,), ()))
    assert (x - x).is_zero() and (2 * x).to_json() == [{"label": [[1], []], "coeff": "2"}]
    with pytest.raises(ValueError):
        x + FixedPointModule(a2(), [1, 1]).vector(((1,), ()))


def test_diagonal_operators():
    M = FixedPointModule(a1(), [2])
    S = ((1,),)
    u1, u2 = M.u("1", 1), M.u("1", 2)
    assert M.diagonal_eigenvalue("a", "1", S, 1) == u1 * (1 - qh(-2))
    assert M.diagonal_eigenvalue("b", "1", S, -1) == (1 / u1 + 1 / u2) * (1 - qh(2))
    assert M.diagonal_eigenvalue("qv", "1", S, -1) == qh(-1)
    assert M.diagonal_eigenvalue("h0inv", "1", S) == ONE
    with pytest.raises(ValueError):
        M.diagonal_eigenvalue("a", "1", S, 0)
    with pytest.raises(ValueError):
        M.diagonal_eigenvalue("c", "1", S)
