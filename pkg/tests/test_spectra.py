import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from homometry import spectra as sp
from homometry.combs import LatticeConfig2D, make_window, tensor_product
from homometry.correlation import autocorr_1d
from homometry.errors import InvalidInput
from homometry.generators import (gen_bernoulli, gen_dimer, gen_ledrappier, gen_meyer_example,
                                  gen_rudin_shapiro, gen_visible, dimer_factor)
from homometry.rng import SeededRng


def fourier_series_of_eta(eta, k):
    """Independent route: sum_m eta(m) e^{-2 pi i k m} over every lag."""
    return np.real(np.sum(eta.coefficients * np.exp(-2j * np.pi * k * eta.lags)))


# -- periodogram ---------------------------------------------------------------


def test_constant_comb_cancels_at_half():
    for blocks in (1, 4, 16):
        e = sp.periodogram_1d(make_window(0, np.ones(1024)), [0.25, 0.5], blocks)
        L = 1024 // blocks
        assert e.density[1] <= 4 / L


@settings(max_examples=40)
@given(st.lists(st.sampled_from([-1.0, 1.0, 0.0, 2.5]), min_size=1, max_size=64))
def test_one_block_periodogram_is_fourier_series_of_eta(vals):
    w = make_window(0, vals)
    eta = autocorr_1d(w, len(vals) - 1)
    k = np.linspace(0, 1, 37, endpoint=False)
    est = sp.periodogram_1d(w, k, 1, candidates=())
    expected = np.array([fourier_series_of_eta(eta, kk) for kk in k])
    np.testing.assert_allclose(est.density, expected, atol=1e-9)


def test_plancherel_full_grid():
    w = gen_bernoulli(4096, 0.3, SeededRng(2))
    blocks = 16
    L = 4096 // blocks
    est = sp.periodogram_1d(w, sp.uniform_grid(L), blocks, candidates=())
    assert abs(est.density.mean() - autocorr_1d(w, 1).at(0)) <= 2 / L


def test_density_nonnegative():
    est = sp.periodogram_1d(gen_bernoulli(4096, 0.8, SeededRng(0)), blocks=8)
    assert np.all(est.density >= 0)


def test_dimer_density_zero_at_origin():
    est = sp.periodogram_1d(gen_dimer(2**16, SeededRng(0)), blocks=64)
    assert est.density[0] <= 0.05


def test_rs_periodogram_flat():
    est = sp.periodogram_1d(gen_rudin_shapiro(0, 2**16 - 1), blocks=64)
    assert np.max(np.abs(est.density - 1)) <= 0.05


def test_dimer_periodogram_mean_matches_formula():
    # tapered expectation is 1 - (1 - 1/L) cos(2 pi k); average over 16 seeds
    L, k = 1024, sp.uniform_grid(64)
    dens = np.mean([sp.periodogram_1d(gen_dimer(2**16, SeededRng(s)), k, 64, ()).density for s in range(16)], axis=0)
    assert np.max(np.abs(dens - (1 - np.cos(2 * np.pi * k)))) <= 0.15
    assert np.mean(np.abs(dens - (1 - np.cos(2 * np.pi * k)))) <= 0.03


def test_periodogram_errors():
    w = make_window(0, np.ones(8))
    with pytest.raises(InvalidInput):
        sp.periodogram_1d(w, [], 1)
    with pytest.raises(InvalidInput):
        sp.periodogram_1d(w, [0.1], 9)
    with pytest.raises(InvalidInput):
        sp.periodogram_1d(w, [1.2], 1)
    with pytest.raises(InvalidInput):
        sp.periodogram_1d(w, [0.3, 0.1], 1)


# -- Bragg masses ---------------------------------------------------------------


def test_constant_comb_unit_mass():
    m, floor = sp.bragg_mass(make_window(0, np.ones(4096)), 0.0)
    assert m == 1.0 and floor == 10 / 4096


def test_bernoulli_mass():
    n = 2**16
    m = np.mean([sp.bragg_mass(gen_bernoulli(n, 0.75, SeededRng(s)), 0.0)[0] for s in range(16)])
    assert abs(m - 0.25) <= 0.01


def test_fair_bernoulli_no_mass():
    n = 2**16
    m, floor = sp.bragg_mass(gen_bernoulli(n, 0.5, SeededRng(0)), 0.0)
    assert m <= floor


def test_alternating_mass_at_half():
    w = make_window(0, (-1.0) ** np.arange(2048))
    assert sp.bragg_mass(w, 0.5)[0] == pytest.approx(1.0, abs=1e-12)


def test_classification():
    assert sp.classify_point_mass(make_window(0, np.ones(4096)), 0.0)["verdict"] == "pp"
    assert sp.classify_point_mass(gen_bernoulli(4096, 0.5, SeededRng(1)), 0.3)["verdict"] == "none"
    # alternating first half, constant second half: the k=0 mass appears only on doubling
    w = make_window(0, np.r_[(-1.0) ** np.arange(2048), np.ones(2048)])
    assert sp.classify_point_mass(w, 0.0)["verdict"] == "unstable"


def test_point_mass_records():
    est = sp.periodogram_1d(dimer_factor(gen_dimer(2**16, SeededRng(3))), blocks=64)
    for k in (0.0, 0.5):
        pm = est.mass_at(k)
        assert abs(pm.mass - 0.25) <= 0.01 and pm.detected and pm.stderr > 0


def test_point_masses_bounded_by_eta0():
    w = gen_meyer_example(4096, 0.5, SeededRng(0))
    est = sp.periodogram_1d(w, blocks=4)
    eta0 = autocorr_1d(w, 1).at(0)
    assert all(0 <= pm.mass <= eta0 for pm in est.point_masses)


# -- 2D ------------------------------------------------------------------------


def test_2d_constant_cancels():
    est = sp.periodogram_2d(LatticeConfig2D((0, 0), np.ones((32, 32))), [0.0, 0.5], 4)
    k = est.k_grid
    i = np.nonzero((k[:, 0] == 0.5) & (k[:, 1] == 0.5))[0][0]
    assert est.density[i] <= 1e-20


def test_2d_matches_direct_sum():
    a = np.random.default_rng(5).choice([-1.0, 1.0], (8, 8))
    est = sp.periodogram_2d(LatticeConfig2D((0, 0), a), [0.0, 0.125, 0.3], 1, ())
    for (k1, k2), d in zip(est.k_grid, est.density):
        x, y = np.meshgrid(np.arange(8), np.arange(8), indexing="xy")
        F = np.sum(a * np.exp(-2j * np.pi * (k1 * x + k2 * y)))
        assert d == pytest.approx(abs(F) ** 2 / 64, abs=1e-9)


def test_rs_product_flat_2d():
    n = 256
    c = tensor_product(gen_rudin_shapiro(0, n - 1), gen_rudin_shapiro(0, n - 1))
    est = sp.periodogram_2d(c, blocks=16)
    assert np.max(np.abs(est.density - 1)) <= 0.1


def test_2d_blocks_must_be_square():
    with pytest.raises(InvalidInput):
        sp.periodogram_2d(LatticeConfig2D((0, 0), np.ones((8, 8))), blocks=8)


def test_ledrappier_mass_at_origin_small():
    m, floor = sp.bragg_mass_2d(gen_ledrappier(256, 256, SeededRng(0)), (0.0, 0.0))
    assert m <= floor


# -- point sets ----------------------------------------------------------------


@pytest.fixture(scope="module")
def visible2000():
    return gen_visible(2000.0)


def test_visible_mass_at_origin(visible2000):
    m, _ = sp.bragg_mass_pointset(visible2000, (0.0, 0.0))
    assert abs(m / (6 / math.pi**2) ** 2 - 1) <= 0.02


def test_visible_half_half_stable(visible2000):
    a = sp.bragg_mass_pointset(gen_visible(1000.0), (0.5, 0.5))[0]
    b = sp.bragg_mass_pointset(visible2000, (0.5, 0.5))[0]
    assert abs(b / a - 1) <= 0.25


def test_visible_irrational_below_floor(visible2000):
    m, floor = sp.bragg_mass_pointset(visible2000, (1 / math.sqrt(8), 1 / math.sqrt(12)))
    assert m <= floor


def test_visible_mass_direct_sum_small():
    v = gen_visible(20.0)
    k = (0.3, 0.7)
    amp = sum(np.exp(-2j * np.pi * (k[0] * m + k[1] * n)) for m, n in v.points)
    assert sp.bragg_mass_pointset(v, k)[0] == pytest.approx(abs(amp / (math.pi * 400)) ** 2, rel=1e-10)


# -- references ------------------------------------------------------------------


def test_ref_bernoulli_values():
    assert sp.ref_bernoulli(0.5) == sp.ref_rs()
    r = sp.ref_bernoulli(1.0)
    assert r.mass_at(0.0) == 1.0 and r.density(0.3) == 0.0
    r = sp.ref_bernoulli(0.75)
    assert r.mass_at(0.0) == 0.25 and r.density(0.4) == 0.75


def test_ref_rs():
    r = sp.ref_rs()
    assert r.density(0.3) == 1 and r.mass_at(0.0) == 0


def test_ref_dimer():
    r = sp.ref_dimer()
    assert r.density(0.0) == 0
    assert r.density(0.5) == pytest.approx(2.0)
    assert r.density(0.25) == pytest.approx(1.0)
    assert r.point_part == ()


def test_ref_dimer_factor():
    r = sp.ref_dimer_factor()
    assert r.mass_at(0.0) == 0.25 and r.mass_at(0.5) == 0.25 and r.density(0.3) == 0.5
    assert r.mass_at(0.25) == 0


def test_ref_ledrappier():
    r = sp.ref_ledrappier()
    assert r.density(np.array([0.3, 0.7])) == 1
    assert r.mass_at((0.0, 0.0)) == 0
    assert r == sp.ref_full_shift_2d()


def test_ref_meyer():
    r = sp.ref_meyer_example(1.0)
    assert r.mass_at(0.0) == 1 and r.mass_at(0.5) == 0 and r.density(0.2) == 0
    r = sp.ref_meyer_example(0.0)
    assert r.mass_at(0.0) == 0.25 and r.mass_at(0.5) == 0.25 and r.density(0.2) == 0
    r = sp.ref_meyer_example(0.5)
    assert r.mass_at(0.0) == 0.5625 and r.mass_at(0.5) == 0.0625 and r.density(0.2) == 0.125
    with pytest.raises(InvalidInput):
        sp.ref_meyer_example(1.5)


def test_ref_meyer_q0_matches_window():
    w = gen_meyer_example(4096, 0.0)
    for k in (0.0, 0.5):
        assert sp.bragg_mass(w, k)[0] == pytest.approx(0.25, abs=1e-12)


@pytest.mark.slow
def test_ref_meyer_validated_empirically():
    # the derived q = 0.5 constants against the empirical oracle at N = 2^18
    n, q = 2**18, 0.5
    ref = sp.ref_meyer_example(q)
    ws = [gen_meyer_example(n, q, SeededRng(s, 7)) for s in range(16)]
    m0 = np.mean([sp.bragg_mass(w, 0.0)[0] for w in ws])
    mh = np.mean([sp.bragg_mass(w, 0.5)[0] for w in ws])
    k = np.r_[np.arange(26, 103), np.arange(154, 231)] / 256  # [0.1, 0.4] and [0.6, 0.9]
    ac = np.mean([sp.periodogram_1d(w, k, 256, ()).density.mean() for w in ws])
    assert abs(m0 - ref.mass_at(0.0)) <= 0.005
    assert abs(mh - ref.mass_at(0.5)) <= 0.0025
    assert abs(ac - ref.density(0.3)) <= 0.005


def test_reference_rejects_bad_values():
    with pytest.raises(InvalidInput):
        sp.PointComponent("Z", 0.0, -1.0)
    with pytest.raises(InvalidInput):
        sp.PointComponent("Q", 0.0, 1.0)
    with pytest.raises(InvalidInput):
        sp.reference("thue-morse")


# -- distances -------------------------------------------------------------------


def _exact_estimate(ref, k, L=1024):
    pms = tuple(sp.PointMass(loc, m) for loc, m in ref.locations())
    return sp.SpectralEstimate(k, ref.density(k), pms, L, 1, L)


@pytest.mark.parametrize("ref", [sp.ref_rs(), sp.ref_dimer(), sp.ref_dimer_factor(),
                                 sp.ref_bernoulli(0.75), sp.ref_meyer_example(0.5)])
def test_distance_of_exact_samples_is_zero(ref):
    est = _exact_estimate(ref, sp.uniform_grid())
    assert sp.measure_distance(est, ref) == (0.0, 0.0)


def test_distance_excludes_peak_neighbourhood():
    ref = sp.ref_dimer_factor()
    k = sp.uniform_grid(256)
    dens = ref.density(k).copy()
    dens[0] = 99.0  # spike sitting on the atom at 0
    est = sp.SpectralEstimate(k, dens, tuple(sp.PointMass(l, m) for l, m in ref.locations()), 1024, 1, 1024)
    assert sp.measure_distance(est, ref)[0] == 0.0


def test_distance_penalises_spurious_peak():
    ref = sp.ref_rs()
    k = sp.uniform_grid(16)
    est = sp.SpectralEstimate(k, np.ones(16), (sp.PointMass(0.0, 0.3),), 1024, 1, 1024)
    assert sp.measure_distance(est, ref)[1] == pytest.approx(0.3)


def test_distance_requires_reference_atoms():
    ref = sp.ref_dimer_factor()
    est = sp.SpectralEstimate(sp.uniform_grid(8), np.zeros(8), (), 64, 1, 64)
    with pytest.raises(InvalidInput):
        sp.measure_distance(est, ref)


def test_distance_rs_and_dimer():
    rs = sp.periodogram_1d(gen_rudin_shapiro(0, 2**16 - 1), blocks=64)
    assert sp.measure_distance(rs, sp.ref_rs())[0] <= 0.05


def test_distance_constant_comb_exact_pp():
    est = sp.periodogram_1d(make_window(0, np.ones(4096)), blocks=64)
    assert sp.measure_distance(est, sp.ref_bernoulli(1.0))[1] <= 1e-9
