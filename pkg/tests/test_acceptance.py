"""Acceptance suite: one test, and one printed PASS/FAIL line, per criterion."""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from wksbounds.kernel import SamplingConfig, abel_sum_bound_check, sine_sum_bound_check, z_star
from wksbounds.lp_approx import ProcessSpec, certify_lp, min_terms_lp
from wksbounds.ms_bounds import (SpectralMeasure, b_n, belyaev_bound, c_n,
                                 exact_increment_error, exact_ms_error)
from wksbounds.orlicz import (conjugate, conjugate_numeric, make_gaussian, make_power,
                              make_weibull_piecewise)
from wksbounds.spectral_sim import gaussian_model, mc_lp_exceedance, mc_uniform_exceedance
from wksbounds.uniform_approx import (entropy_integral, holder_integral_closed, holder_model,
                                      holder_tail_factor_limit, min_terms_uniform,
                                      uniform_tail_general, uniform_tail_wks)

pytestmark = pytest.mark.acceptance

GAUSS = ProcessSpec.gaussian_spec(B0=1.0, lam=0.75)
MEASURE = SpectralMeasure.flat(0.75, 16, B0=1.0)


def test_criterion_01_conjugate_duality(criterion):
    t0 = time.perf_counter()
    fams = [make_power(a) for a in (1.25, 1.5, 2.0)] + \
           [make_weibull_piecewise(a) for a in (2.0, 3.0, 4.0)]
    xs = np.linspace(0.1, 10.0, 50)
    err_conj = max(abs(conjugate(f, x) - conjugate_numeric(f, x)) for f in fams for x in xs)
    err_bi = max(abs(conjugate_numeric(f.dual(), x) - f.evaluate(x)) for f in fams for x in xs)
    dt = time.perf_counter() - t0
    ok = err_conj <= 1e-8 and err_bi <= 1e-6 and dt < 1.0
    assert criterion(1, ok, f"max|phi*-sup|={err_conj:.2e} (tol 1e-8), "
                            f"max|phi**-phi|={err_bi:.2e} (tol 1e-6), {dt:.2f}s")


def test_criterion_02_sine_sum_fuzz(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    bad1 = bad2 = 0
    for _ in range(10_000):
        n = int(rng.integers(0, 200))
        m = n + int(rng.integers(1, 200))
        bad1 += not sine_sum_bound_check(n, m, float(rng.uniform(1e-3, 1.0)))[2]
        a = np.sort(rng.uniform(0.0, 3.0, int(rng.integers(3, 60))))[::-1]
        bad2 += not abel_sum_bound_check(a, float(rng.uniform(1e-3, 1.0)),
                                         n=int(rng.integers(0, 100)))[2]
    dt = time.perf_counter() - t0
    ok = bad1 == 0 and bad2 == 0 and dt < 1.0
    assert criterion(2, ok, f"sine-sum violations {bad1}/10000, Abel violations {bad2}/10000, "
                            f"{dt:.2f}s")


def _fuzz_cases(seed, count):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        omega = rng.uniform(0.5, 4.0)
        lam = omega * rng.uniform(0.3, 0.9)
        T = rng.uniform(0.2, 5.0)
        k = int(rng.integers(1, 11))  # up to 20 symmetric atoms
        meas = SpectralMeasure.symmetric(rng.uniform(0.0, lam * (1 - 1e-12), k),
                                         rng.uniform(0.0, 1.0, k) + 1e-9)
        z = rng.uniform(0.02, 0.98)
        n = math.ceil(omega * T / (math.pi * math.sqrt(z))) + int(rng.integers(0, 6))
        yield rng, meas, SamplingConfig(omega, lam, T, n, z)


def test_criterion_03_exact_oracle_domination(criterion):
    t0 = time.perf_counter()
    viol_c = viol_b = checks = 0
    worst = 0.0
    for rng, meas, cfg in _fuzz_cases(3, 200):
        for t in cfg.T * (1.0 - rng.uniform(0.0, 1.0, 5)):  # t in (0, T]
            ex = exact_ms_error(meas, cfg, t)
            cb = c_n(cfg, meas.B0, t).bound_value
            viol_c += ex > cb * (1 + 1e-12)
            viol_b += ex > belyaev_bound(cfg, meas.B0, t) * (1 + 1e-12)
            worst = max(worst, ex / cb)
            checks += 1
    dt = time.perf_counter() - t0
    ok = viol_c == 0 and viol_b == 0 and dt < 10.0
    assert criterion(3, ok, f"{checks} points on 200 spectra: C_n violations {viol_c}, "
                            f"classical-bound violations {viol_b}, max exact/bound {worst:.3g}, "
                            f"{dt:.2f}s")


def test_criterion_04_increment_domination(criterion):
    t0 = time.perf_counter()
    viol = checks = 0
    worst = 0.0
    for rng, meas, cfg in _fuzz_cases(4, 200):
        for _ in range(5):
            t, s = cfg.T * (1.0 - rng.uniform(0.0, 1.0, 2))
            ex = exact_increment_error(meas, cfg, t, s)
            bound = b_n(cfg, meas.B0, t, s).bound_value
            viol += ex > bound * (1 + 1e-12)
            if bound > 0:
                worst = max(worst, ex / bound)
            checks += 1
    dt = time.perf_counter() - t0
    ok = viol == 0 and dt < 10.0
    assert criterion(4, ok, f"{checks} (t,s) pairs: violations {viol}, "
                            f"max exact/bound {worst:.3g}, {dt:.2f}s")


def test_criterion_05_term_count_shapes(criterion):
    t0 = time.perf_counter()
    grid = np.linspace(0.05, 1.0, 20)
    dgrid = np.linspace(0.05, 0.95, 19)  # delta = 1 has no reliability content
    surf = np.array([[min_terms_lp(GAUSS, 1.0, 1.0, 2.0, e, d)[0] for d in dgrid] for e in grid])
    mono = bool(np.all(np.diff(surf, axis=0) <= 0) and np.all(np.diff(surf, axis=1) <= 0))
    finite = bool(np.all(surf > 0))
    zok = all(z_star(1.0, 1.0, int(n)) < 1 for n in surf.ravel())
    ps = np.linspace(1.0, 2.0, 21)
    curve = []
    minimal = True
    for p in ps:
        n, _ = min_terms_lp(GAUSS, 1.0, 1.0, p, 0.1, 0.1)
        curve.append(n)
        minimal &= certify_lp(GAUSS, GAUSS.sampling(1.0, 1.0, n), p, 0.1, 0.1).certified
        if n > 1:
            minimal &= not certify_lp(GAUSS, GAUSS.sampling(1.0, 1.0, n - 1), p, 0.1, 0.1).certified
    dt = time.perf_counter() - t0
    ok = mono and finite and zok and minimal and dt < 30.0
    assert criterion(5, ok, f"surface {surf.shape} monotone={mono} z*<1={zok} "
                            f"n range {surf.min()}..{surf.max()}; p-curve n(1)={curve[0]} "
                            f"n(2)={curve[-1]} minimal={minimal}; {dt:.2f}s")


def test_criterion_06_lp_mc_domination(criterion):
    t0 = time.perf_counter()
    model = gaussian_model(MEASURE)
    parts = []
    ok = True
    for i, (eps, delta) in enumerate(((0.5, 0.1), (0.2, 0.05))):
        n, _ = min_terms_lp(GAUSS, 1.0, 1.0, 2.0, eps, delta)
        est = mc_lp_exceedance(model, GAUSS.sampling(1.0, 1.0, n), 2.0, eps, 10_000,
                               seed=600 + i)
        good = est.p_hat <= delta + 3 * est.std_err
        ok &= good
        parts.append(f"(eps={eps},delta={delta}) n={n} p_hat={est.p_hat:.4g}")
    dt = time.perf_counter() - t0
    ok = ok and dt < 120.0
    assert criterion(6, ok, "; ".join(parts) + f"; {dt:.1f}s")


def test_criterion_07_uniform_mc_domination(criterion):
    t0 = time.perf_counter()
    eps, delta = 0.5, 0.1
    n, cert = min_terms_uniform(GAUSS, 1.0, 1.0, eps, delta, "paper")
    est, gap = mc_uniform_exceedance(gaussian_model(MEASURE), GAUSS.sampling(1.0, 1.0, n),
                                     eps, 10_000, seed=700, grid_points=1025, return_gap=True)
    dt = time.perf_counter() - t0
    ok = est.p_hat <= delta + 3 * est.std_err and dt < 120.0
    assert criterion(7, ok, f"n={n} (bound {cert.bound_with_2:.4g}) p_hat={est.p_hat:.4g} "
                            f"se={est.std_err:.2g} max refinement gap {gap:.2e}; {dt:.1f}s")


def test_criterion_08_uniform_asymptotics(criterion):
    t0 = time.perf_counter()
    eps, theta = 1.0, 0.5
    ns = [8 * 2 ** k for k in range(8)]
    certs = [uniform_tail_wks(GAUSS, GAUSS.sampling(1.0, 1.0, n), theta, eps) for n in ns]
    prod = [c.C_n_const * n for c, n in zip(certs, ns)]
    rel = abs(prod[-1] / prod[-2] - 1.0)
    bounds = [c.bound for c in certs]
    mono = bool(np.all(np.diff(bounds) <= 0))
    dt = time.perf_counter() - t0
    ok = rel < 0.01 and mono and dt < 1.0
    assert criterion(8, ok, f"C_n*n: {prod[0]:.4g} -> {prod[-1]:.4g} (last doubling "
                            f"{rel:.2%}); bound non-increasing={mono} "
                            f"({bounds[0]:.3g} -> {bounds[-1]:.3g}); {dt:.3f}s")


def test_criterion_09_holder_entropy_bound(criterion):
    t0 = time.perf_counter()
    T, eps0, u = 1.0, 1.0, 2.0
    phi = make_gaussian()
    worst_rel = 0.0
    violations = 0
    points = 0
    for kappa, beta, C in ((1.0, 0.5, 1.0), (0.5, 0.25, 2.0)):
        model = holder_model(C, kappa, beta, T, eps0)
        for v in (0.1, 0.5, 1.0):
            q = entropy_integral(model, v)
            worst_rel = max(worst_rel, abs(q / holder_integral_closed(C, kappa, beta, T, v) - 1))
        # finite-beta tail (quadrature-backed) against its beta -> 0 relaxation
        for theta in np.linspace(0.01, 0.99, 50):
            finite = uniform_tail_general(model, phi, theta, u) / 2.0
            limit = math.exp(-conjugate(phi, u * (1 - theta) / eps0)) * \
                holder_tail_factor_limit(C, kappa, T, theta, eps0)
            violations += finite > limit * (1 + 1e-6)
            points += 1
    dt = time.perf_counter() - t0
    closed_ok = worst_rel <= 1e-8
    dom_ok = violations == 0
    ok = closed_ok and dom_ok and dt < 1.0
    assert criterion(9, ok, f"closed form vs quadrature max rel err {worst_rel:.1e} "
                            f"(ok={closed_ok}); beta->0 bound >= finite-beta value at "
                            f"{points - violations}/{points} grid points (ok={dom_ok}); {dt:.2f}s")


def test_criterion_10_verify_determinism(criterion, tmp_path):
    cmd = [sys.executable, "-m", "wksbounds.cli", "verify", "--seed", "42"]
    runs = [subprocess.run(cmd, capture_output=True, text=True, cwd=tmp_path) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout and runs[0].stdout != ""
    codes = [r.returncode for r in runs]
    ok = same and codes == [0, 0]
    assert criterion(10, ok, f"two runs byte-identical={same}, exit codes {codes}, "
                             f"{len(runs[0].stdout.splitlines())} report lines")
