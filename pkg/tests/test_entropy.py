import itertools
import math
from collections import Counter

import numpy as np
import pytest

from homometry import entropy as en
from homometry.combs import LatticeConfig2D, make_window
from homometry.errors import InvalidInput
from homometry.generators import (bernoullise, gen_bernoulli, gen_dimer, gen_iid_2d, gen_ledrappier,
                                  gen_rudin_shapiro)
from homometry.rng import SeededRng


def exact_dimer_block_entropy(L: int) -> float:
    """H_L of the stationary dimer process, by enumerating phase and decorations."""
    probs = Counter()
    for phase in (0, 1):
        nd = (L + phase + 1) // 2 + 1
        for signs in itertools.product((1, -1), repeat=nd):
            seq = [v for e in signs for v in (e, -e)]
            probs[tuple(seq[phase:phase + L])] += 0.5 / 2**nd
    return -sum(p * math.log2(p) for p in probs.values())


# frozen from the enumeration above; r_L = H_{L+1} - H_L
DIMER_EXACT_RATE = {1: 0.8113, 7: 0.5389, 8: 0.5236, 15: 0.5024}


def test_dimer_exact_rates_frozen():
    for L, r in DIMER_EXACT_RATE.items():
        assert exact_dimer_block_entropy(L + 1) - exact_dimer_block_entropy(L) == pytest.approx(r, abs=5e-5)


def test_constant_window_zero_entropy():
    rep = en.block_entropy(make_window(0, np.ones(1000)), 6)
    assert np.all(rep.block_entropies == 0)


def test_bernoulli_half_rate():
    rep = en.block_entropy(gen_bernoulli(2**18, 0.5, SeededRng(1)), 8)
    assert abs(rep.rate_at(7) - 1.0) <= 0.02


def test_bernoulli_three_quarter_rate():
    rep = en.block_entropy(gen_bernoulli(2**18, 0.75, SeededRng(1)), 8)
    assert abs(rep.rate_at(7) - en.entropy_reference("bernoulli", p=0.75)) <= 0.02


def test_dimer_rate_seven_matches_enumeration():
    rep = en.block_entropy(gen_dimer(2**18, SeededRng(1)), 8)
    assert abs(rep.rate_at(7) - DIMER_EXACT_RATE[7]) <= 0.005


def test_dimer_rate_converges_to_half():
    L, r = en.entropy_rate(gen_dimer(2**18, SeededRng(1)))
    assert L >= 8 and abs(r - 0.5) <= 0.03


def test_rs_conditional_entropy_small():
    rep = en.block_entropy(gen_rudin_shapiro(0, 2**16 - 1), 16)
    assert rep.rate_at(15) <= 0.15


def test_monotone_and_subadditive():
    for w in (gen_bernoulli(2**16, 0.6, SeededRng(0)), gen_dimer(2**16, SeededRng(0)),
              gen_rudin_shapiro(0, 2**16 - 1)):
        rep = en.block_entropy(w, 10)
        assert np.all(np.diff(rep.block_entropies) >= -1e-12)
        assert np.all(np.diff(rep.rate_estimates) <= 0.05)


def test_undersampling_guard():
    with pytest.raises(InvalidInput):
        en.block_entropy(gen_bernoulli(1024, 0.5, SeededRng(0)), 12)
    with pytest.raises(InvalidInput):
        en.block_entropy(gen_bernoulli(1024, 0.5, SeededRng(0)), 15)  # > log2 N + 4


def test_block_entropy_needs_two_letters():
    with pytest.raises(InvalidInput):
        en.block_entropy(make_window(0, [0, 1, 2] * 100), 2)


def test_entropy_references():
    assert en.entropy_reference("bernoulli", p=0.5) == 1.0
    assert en.entropy_reference("rs") == 0.0
    assert en.entropy_reference("dimer") == 0.5
    assert en.entropy_reference("bernoulli", p=0.75) == pytest.approx(0.8113, abs=1e-4)
    assert en.entropy_reference("meyer", q=0.5) == 0.5
    with pytest.raises(InvalidInput):
        en.entropy_reference("visible")


def test_bernoullised_family_spans_range():
    base = gen_rudin_shapiro(0, 2**16 - 1)
    rates = [en.entropy_rate(bernoullise(base, p, SeededRng(0)))[1] for p in (0.0, 0.5, 1.0)]
    assert rates[0] <= 0.15 and rates[2] <= 0.15 and rates[1] >= 0.95


# -- 2D census -----------------------------------------------------------------


def enumerate_ledrappier_patches(L: int) -> int:
    seen = set()
    for row in itertools.product((1, -1), repeat=2 * L - 1):
        seen.add(gen_ledrappier(L, L, bottom_row=row).weights.tobytes())
    return len(seen)


@pytest.mark.parametrize("L", [1, 2, 3])
def test_ledrappier_patch_enumeration(L):
    assert enumerate_ledrappier_patches(L) == 2 ** (2 * L - 1)


def test_ledrappier_census_bound_and_saturation():
    rep = en.patch_census_2d(gen_ledrappier(256, 256, SeededRng(0)), 4, 10_000)
    assert np.all(np.log2(rep.patch_counts) <= 2 * rep.block_lengths - 1)
    assert rep.patch_counts.tolist() == [enumerate_ledrappier_patches(L) for L in (1, 2, 3)] + [128]


def test_constant_census():
    rep = en.patch_census_2d(LatticeConfig2D((0, 0), np.ones((20, 20))), 4, 1000)
    assert rep.patch_counts.tolist() == [1, 1, 1, 1]
    assert en.rank1_test(rep) == "degenerate"


def test_iid_census_all_two_by_two():
    rep = en.patch_census_2d(gen_iid_2d(128, 128, SeededRng(0)), 2, 10_000)
    assert rep.patch_counts[1] == 16


def test_exhaustive_census():
    c = gen_ledrappier(10, 10, SeededRng(3))
    rep = en.patch_census_2d(c, 2, exhaustive=True)
    direct = {c.weights[y:y + 2, x:x + 2].tobytes() for y in range(9) for x in range(9)}
    assert rep.patch_counts[1] == len(direct)


def test_census_monotone():
    rep = en.patch_census_2d(gen_iid_2d(64, 64, SeededRng(0)), 5, 5000)
    assert np.all(np.diff(rep.patch_counts) >= 0)


def test_census_guards():
    c = gen_iid_2d(8, 8, SeededRng(0))
    with pytest.raises(InvalidInput):
        en.patch_census_2d(c, 7, 1000)
    with pytest.raises(InvalidInput):
        en.patch_census_2d(c, 2, 10)
    with pytest.raises(InvalidInput):
        en.patch_census_2d(gen_iid_2d(3, 3, SeededRng(0)), 4, 1000)


def test_rank_verdicts():
    led = en.patch_census_2d(gen_ledrappier(256, 256, SeededRng(0)), 4, 10_000)
    iid = en.patch_census_2d(gen_iid_2d(256, 256, SeededRng(0)), 4, 10_000)
    assert en.rank1_test(led) == "rank1"
    assert en.rank1_test(iid) == "full-rank"


def test_rank_test_needs_counts():
    with pytest.raises(InvalidInput):
        en.rank1_test(en.block_entropy(make_window(0, [1, -1] * 50), 2))
