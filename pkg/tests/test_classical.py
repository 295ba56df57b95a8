import random
from fractions import Fraction
from itertools import product

import pytest

from conftest import random_chain
from mod4sum.classical import (
    combine_bounds,
    evaluate_chain_dp,
    evaluate_chain_naive,
    evaluate_mixture,
    guess_table,
    ignores_some_input,
    propagate,
    reference_chain,
)
from mod4sum.core import ProtocolChain, enumerate_inputs, mod4_target, parse_chain, run_chain
from mod4sum.errors import InconsistentBoundsError
from mod4sum.probability import SuccessProbability

ALL_N3 = [ProtocolChain.from_ints(v) for v in product(range(16), range(256))]


@pytest.mark.parametrize(
    "n, expected",
    [(3, Fraction(3, 4)), (4, Fraction(3, 4)), (5, Fraction(5, 8)), (6, Fraction(5, 8)),
     (7, Fraction(9, 16)), (8, Fraction(9, 16))],
)
def test_reference_chain_values(n, expected):
    assert evaluate_chain_dp(reference_chain(n)) == expected


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_reference_chain_naive_matches(n):
    assert evaluate_chain_naive(reference_chain(n)) == evaluate_chain_dp(reference_chain(n))


def test_reference_chain_text():
    assert str(reference_chain(3)) == "0011|01011010"
    assert str(reference_chain(5)) == "0011|01011010|01011010|01011010"
    with pytest.raises(ValueError):
        reference_chain(2)


def test_all_zero_chain_is_half():
    p = evaluate_chain_naive(parse_chain("0000|00000000"))
    assert p == Fraction(1, 2)
    assert p.total == 32


def test_dp_equals_naive_all_n3():
    for chain in ALL_N3:
        assert evaluate_chain_dp(chain) == evaluate_chain_naive(chain), chain


@pytest.mark.parametrize("n, count", [(4, 1000), (5, 200)])
def test_dp_equals_naive_random(rng, n, count):
    for _ in range(count):
        chain = random_chain(rng, n)
        dp, naive = evaluate_chain_dp(chain), evaluate_chain_naive(chain)
        assert (dp.correct, dp.total) == (naive.correct, naive.total), chain


def test_distribution_total():
    for n in (3, 5, 7):
        dist = propagate(reference_chain(n))
        assert sum(map(sum, dist)) == 4 ** (n - 1)


def test_probability_range_all_n3():
    for chain in ALL_N3:
        assert Fraction(1, 2) <= evaluate_chain_dp(chain) <= 1


def test_guess_table_is_majority(rng):
    for _ in range(50):
        chain = random_chain(rng, 4)
        guesses = guess_table(chain)
        hits = sum(
            guesses[(x[-1], run_chain(chain, x))] == mod4_target(x) for x in enumerate_inputs(4)
        )
        assert Fraction(hits, 128) == evaluate_chain_dp(chain)


def test_no_communication_gives_half():
    broken = [c for c in ALL_N3 if ignores_some_input(c)]
    structural = [
        c for c in ALL_N3
        if len(set(c.tables[0].bits)) == 1 or c.tables[1].ignores_message()
    ]
    assert set(structural) <= set(broken)
    assert len(structural) == 2 * 256 + 16 * 16 - 2 * 16
    for chain in broken:
        assert evaluate_chain_dp(chain) == Fraction(1, 2), chain


def test_mixture_never_beats_optimum():
    r = random.Random(7)
    values = {c: evaluate_chain_dp(c).fraction for c in ALL_N3}
    best = max(values.values())
    for _ in range(100):
        k = r.randint(1, 6)
        members = r.sample(ALL_N3, k)
        raw = [r.randint(1, 20) for _ in range(k)]
        weights = [Fraction(w, sum(raw)) for w in raw]
        mixed = evaluate_mixture(members, weights)
        assert mixed == sum(w * values[c] for c, w in zip(members, weights))
        assert mixed <= best


def test_mixture_validates_weights():
    c = reference_chain(3)
    with pytest.raises(ValueError):
        evaluate_mixture([c], [Fraction(1, 2)])
    with pytest.raises(ValueError):
        evaluate_mixture([c, c], [Fraction(1)])


F = Fraction


def test_combine_bounds_equality_at_six():
    out = combine_bounds({5: F(5, 8)}, {6: F(5, 8)})
    assert out[6].exact and out[6].lower == F(5, 8)


def test_combine_bounds_interval_at_seven():
    out = combine_bounds({5: F(5, 8)}, {7: F(9, 16)})
    assert not out[7].exact
    assert (out[7].lower, out[7].upper) == (F(9, 16), F(5, 8))


def test_combine_bounds_empty_lower():
    out = combine_bounds({3: F(3, 4), 5: F(5, 8)}, {}, n_values=[6, 7])
    assert out[3].exact and out[5].exact
    assert (out[6].lower, out[6].upper) == (0, F(5, 8))
    assert (out[7].lower, out[7].upper) == (0, F(5, 8))


def test_combine_bounds_uses_min_over_smaller_n():
    out = combine_bounds({3: F(3, 4), 5: F(5, 8)}, {4: F(3, 4)})
    assert out[4].exact and out[4].upper == F(3, 4)


def test_combine_bounds_without_exact_is_open():
    out = combine_bounds({}, {6: F(5, 8)})
    assert (out[6].lower, out[6].upper) == (F(5, 8), 1)


@pytest.mark.parametrize(
    "exact, lower", [({5: F(5, 8)}, {6: F(3, 4)}), ({3: F(3, 4), 4: F(7, 8)}, {})]
)
def test_combine_bounds_inconsistent(exact, lower):
    with pytest.raises(InconsistentBoundsError):
        combine_bounds(exact, lower)


def test_combine_bounds_accepts_success_probability():
    out = combine_bounds({5: SuccessProbability(320, 512)}, {6: SuccessProbability(1280, 2048)})
    assert out[6].exact


def test_success_probability_compares_exactly():
    a, b = SuccessProbability(3, 4), SuccessProbability(24, 32)
    assert a == b and hash(a) == hash(b)
    assert SuccessProbability(5, 8) < a
    assert a == Fraction(3, 4)
    with pytest.raises(ValueError):
        SuccessProbability(5, 4)
