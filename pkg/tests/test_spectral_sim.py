import json
import math

import numpy as np
import pytest
from scipy import integrate

from wksbounds.errors import InputError, ResolutionError
from wksbounds.kernel import SamplingConfig, truncated_sum
from wksbounds.ms_bounds import SpectralMeasure, exact_ms_error
from wksbounds.orlicz import make_custom, make_gaussian, make_weibull_piecewise
from wksbounds.spectral_sim import (TailEstimate, draw_coefficients, gaussian_model,
                                    mc_lp_exceedance, mc_pointwise_ms, mc_uniform_exceedance,
                                    phi_sqrt_convex, sample_paths, sample_weibull, simulate_gaussian,
                                    simulate_ssub_weibull, trial_rng, trig_basis, weibull_model,
                                    weibull_second_moment)

CFG = SamplingConfig(1.0, 0.75, 1.0, 20)
FLAT = SpectralMeasure.flat(0.75, 16, B0=1.0)


def test_tail_estimate_fields():
    est = TailEstimate(exceed_count=3, trials=100, seed=5, metric="sup")
    assert est.p_hat == 0.03
    assert est.std_err == pytest.approx(math.sqrt(0.03 * 0.97 / 100))
    rec = json.loads(est.to_json())
    assert rec["p_hat"] == 0.03 and rec["seed"] == 5


def test_single_pair_autocovariance():
    lam0, tau = 0.6, 1.7
    meas = SpectralMeasure.symmetric([lam0], [2.0])
    vals = sample_paths(gaussian_model(meas), [0.0, tau], 100_000, seed=3)
    prod = vals[:, 0] * vals[:, 1]
    se = prod.std(ddof=1) / math.sqrt(len(prod))
    assert abs(prod.mean() - 2.0 * math.cos(tau * lam0)) <= 3 * se
    sq = vals[:, 0] ** 2
    assert abs(sq.mean() - 2.0) <= 3 * sq.std(ddof=1) / math.sqrt(len(sq))


def test_zero_mass_gives_zero_path():
    meas = SpectralMeasure.symmetric([0.3, 0.5], [0.0, 0.0])
    path = simulate_gaussian(meas, np.linspace(0, 1, 11), seed=1)
    assert np.all(path.values == 0.0)


def test_asymmetric_measure_rejected():
    with pytest.raises(InputError):
        simulate_gaussian(SpectralMeasure([0.3], [1.0]), np.linspace(0, 1, 5), seed=0)


def test_path_lattice_samples_reconstruct():
    path = simulate_gaussian(FLAT, np.linspace(0, 1, 9), seed=4, config=CFG)
    assert path.lattice_samples.shape == (41,)
    recon = truncated_sum(path.lattice_samples, CFG, path.grid)
    # n = 20 sinc terms reproduce the path to the mean-square bound scale
    assert np.max(np.abs(recon - path.values)) < 0.05


def test_weibull_marginal_tail():
    alpha = 3.0
    rng = trial_rng(2024, 0)
    xi = sample_weibull(rng, 1_000_000, alpha)
    for x in (0.5, 1.0, 2.0):
        p = 0.5 * math.exp(-x ** alpha / alpha)
        emp = float(np.mean(xi >= x))
        assert abs(emp - p) <= 3 * math.sqrt(p * (1 - p) / xi.size)


def test_weibull_second_moment_quadrature():
    alpha = 2.0
    # density of |xi|: d/dx (1 - exp(-x^alpha/alpha)) = x^(alpha-1) exp(-x^alpha/alpha)
    quad, _ = integrate.quad(lambda x: x * x * x ** (alpha - 1) * math.exp(-x ** alpha / alpha),
                             0, np.inf)
    assert weibull_second_moment(alpha) == pytest.approx(quad, rel=1e-10)
    xi = sample_weibull(trial_rng(7, 0), 400_000, alpha)
    sq = xi ** 2
    assert abs(sq.mean() - quad) <= 3 * sq.std() / math.sqrt(sq.size)


def test_constant_basis_gives_constant_path():
    grid = np.linspace(0, 1, 7)
    path = simulate_ssub_weibull([lambda t: np.ones_like(t)], 4.0, seed=9, grid=grid)
    assert np.all(path.values == path.values[0])
    coef = sample_weibull(trial_rng(9, 0), 1, 4.0)[0]
    assert path.values[0] == coef


def test_weibull_model_errors():
    with pytest.raises(InputError):
        weibull_model([], 3.0)
    with pytest.raises(InputError):
        weibull_model([lambda t: t], 1.5)


def test_phi_sqrt_convexity():
    assert phi_sqrt_convex(make_weibull_piecewise(4.0))
    assert phi_sqrt_convex(make_gaussian())
    assert not phi_sqrt_convex(make_custom(lambda x: x ** 1.5 / 1.5))


def test_huge_eps_never_exceeds():
    model = gaussian_model(FLAT)
    assert mc_lp_exceedance(model, CFG, 2, 1e6, 200, seed=1).p_hat == 0.0
    assert mc_uniform_exceedance(model, CFG, 1e6, 200, seed=1).p_hat == 0.0


def test_small_eps_always_exceeds():
    model = gaussian_model(FLAT)
    assert mc_lp_exceedance(model, CFG, 2, 1e-30, 50, seed=1).p_hat == 1.0


def test_resolution_error():
    cfg = SamplingConfig(1.0, 0.75, 100.0, 40)
    with pytest.raises(ResolutionError):
        mc_lp_exceedance(gaussian_model(FLAT), cfg, 2, 1.0, 10, seed=0, grid_points=65)


def test_seeded_determinism(tmp_path):
    model = gaussian_model(FLAT)
    a = mc_uniform_exceedance(model, CFG, 1e-3, 300, seed=42, dump=tmp_path / "a.csv")
    b = mc_uniform_exceedance(model, CFG, 1e-3, 300, seed=42, dump=tmp_path / "b.csv")
    assert a == b
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.csv").read_text().splitlines()[0] == "trial,metric_value,exceeded"
    c = mc_uniform_exceedance(model, CFG, 1e-3, 300, seed=43)
    assert c.seed != a.seed


def test_chunking_does_not_change_streams():
    # trial i always uses stream i, whatever chunk it lands in
    model = gaussian_model(FLAT)
    full = draw_coefficients(model, 8, 2100)
    tail = draw_coefficients(model, 8, 100, start=2000)
    assert np.array_equal(full[2000:], tail)


def test_grid_doubling_changes_integral_little(tmp_path):
    model = gaussian_model(FLAT)
    cfg = SamplingConfig(1.0, 0.75, 1.0, 5)
    d1, d2 = tmp_path / "g1.csv", tmp_path / "g2.csv"
    mc_lp_exceedance(model, cfg, 2, 1.0, 100, seed=5, grid_points=257, dump=d1)
    mc_lp_exceedance(model, cfg, 2, 1.0, 100, seed=5, grid_points=513, dump=d2)
    v1 = np.loadtxt(d1, delimiter=",", skiprows=1)[:, 1]
    v2 = np.loadtxt(d2, delimiter=",", skiprows=1)[:, 1]
    assert np.max(np.abs(v1 - v2) / v2) < 0.01


def test_refinement_gap_small():
    model = gaussian_model(FLAT)
    eps = 1e-3
    _, gap = mc_uniform_exceedance(model, CFG, eps, 500, seed=6, return_gap=True)
    assert 0.0 <= gap < 0.005 * eps


def test_pointwise_mc_matches_exact():
    meas = SpectralMeasure.symmetric([0.2, 0.5, 0.7], [0.5, 0.3, 0.2])
    cfg = SamplingConfig(1.0, 0.75, 1.0, 10)
    t = 0.77
    exact = exact_ms_error(meas, cfg, t)
    mean, se = mc_pointwise_ms(gaussian_model(meas), cfg, t, 100_000, seed=17)
    assert abs(mean - exact) <= 3 * se


def test_weibull_trig_model_variance():
    alpha = 4.0
    model = weibull_model(trig_basis(FLAT, weibull_second_moment(alpha)), alpha)
    vals = sample_paths(model, [0.4], 40_000, seed=2)[:, 0]
    sq = vals ** 2
    assert abs(sq.mean() - FLAT.B0) <= 3 * sq.std(ddof=1) / math.sqrt(sq.size)
