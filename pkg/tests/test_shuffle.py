import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from kha.arith import ONE, parse, q, qh, rf, to_text, var, z_var
from kha.quiver import a1, a2, jordan
from kha.shuffle import (
    MAX_BLOCK, ShuffleElement, generator, iterated_product, parse_word, shuffle_mul, symmetrize, unit,
    wheel_check, word_to_shuffle,
)
from builders import random_symmetric, random_word

QUIVERS = {"A1": a1(), "A2": a2(), "Jordan": jordan()}


def test_two_generators_on_a1():
    g = generator(a1(), "1", 0)
    assert to_text((g * g).value) == "qh^1 + qh^-1"


def test_hand_symmetrized_product_with_exponents():
    # f_{1,1} * f_{1,0} on A1: z1 zeta(z2/z1)... summed over the two slot assignments
    Q = a1()
    z1, z2 = var(z_var("1", 1)), var(z_var("1", 2))
    zeta = lambda x: (x - q()) / (qh() * (x - 1))
    hand = z1 * zeta(z2 / z1) + z2 * zeta(z1 / z2)
    assert (generator(Q, "1", 1) * generator(Q, "1", 0)).value == hand


def test_unit_and_grading():
    Q = a2()
    x = random_symmetric(Q, [1, 1], random.Random(3))
    assert unit(Q) * x == x and x * unit(Q) == x
    y = random_symmetric(Q, [2, 0], random.Random(4))
    assert (x * y).degree == (3, 1)


@pytest.mark.parametrize("name", sorted(QUIVERS))
def test_associativity_on_random_triples(name):
    Q = QUIVERS[name]
    rng = random.Random(name)
    for _ in range(4):
        a, b, c = (random_symmetric(Q, [rng.randint(0, 1) for _ in Q.vertices], rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)


@pytest.mark.parametrize("name", sorted(QUIVERS))
def test_products_stay_symmetric(name):
    Q = QUIVERS[name]
    rng = random.Random(11)
    a = random_symmetric(Q, Q.unit(Q.vertices[0]), rng)
    b = random_symmetric(Q, Q.unit(Q.vertices[-1]), rng)
    assert (a * b).is_symmetric()


@settings(max_examples=25)
@given(st.lists(st.tuples(st.sampled_from(["1", "2"]), st.integers(-2, 2)), max_size=3))
def test_word_image_is_iterated_product(word):
    Q = a2()
    assert word_to_shuffle(Q, word) == iterated_product(Q, word)


def test_symmetrize_counts_every_permutation():
    Q = a1()
    assert symmetrize(Q, ONE, [3]).value == rf(6)
    with pytest.raises(ValueError):
        symmetrize(Q, var(z_var("1", 3)), [2])


def test_degree_limits():
    with pytest.raises(ValueError, match="unsupported degree"):
        ShuffleElement(a1(), [MAX_BLOCK + 1], ONE)
    with pytest.raises(ValueError):
        ShuffleElement(a1(), [-1], ONE)


def test_wheel_conditions():
    J = jordan()
    assert wheel_check(word_to_shuffle(J, [("1", 0), ("1", 1), ("1", -1)])).passed
    bad = wheel_check(ShuffleElement(J, [3], ONE))
    assert not bad.passed and bad.violation["edge"] == "a"
    vac = wheel_check(generator(J, "1", 2))
    assert vac.passed and vac.vacuous
    assert wheel_check(ShuffleElement(a1(), [3], ONE)).vacuous


@pytest.mark.parametrize("seed", range(6))
def test_wheels_vanish_on_random_words(seed):
    rng = random.Random(seed)
    for Q in (a2(), jordan()):
        assert wheel_check(word_to_shuffle(Q, random_word(Q, 3, rng))).passed


def test_wheel_needs_polynomials():
    with pytest.raises(ValueError):
        wheel_check(ShuffleElement(jordan(), [1], 1 / (var(z_var("1", 1)) - 1)))


def test_parse_word():
    assert parse_word("1:0, 2:-1") == [("1", 0), ("2", -1)]
    assert parse_word("") == []
    with pytest.raises(ValueError):
        parse_word("1")
