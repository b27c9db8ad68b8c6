import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from wksbounds.errors import GateError, InputError, UnsatisfiableError
from wksbounds.kernel import SamplingConfig, z_star
from wksbounds.lp_approx import (ProcessSpec, certify_lp, certify_lp_gaussian, min_terms_lp,
                                 min_terms_lp_relaxed, s_np, s_np_relaxed, tail_bound_lp)
from wksbounds.ms_bounds import cn_coefficients
from wksbounds.orlicz import make_power

GAUSS = ProcessSpec.gaussian_spec(B0=1.0, lam=0.75)

# 30-digit mpmath quadrature at omega = T = 1, n = 20, z = z*
S20_P2 = 0.0771598771668321360624250929142
S20_P15 = 0.14637650691677962768192954955
TAIL20 = 0.0783257620028051307248099367204


def test_spec_validation():
    with pytest.raises(InputError):
        ProcessSpec(B0=1.0, lam=0.75)
    with pytest.raises(InputError):
        ProcessSpec(B0=1.0, lam=0.75, C_X=2.0, gaussian=True)
    assert GAUSS.phi.family == "gaussian" and GAUSS.C_X == 1.0


def test_s_np_reference():
    cfg = GAUSS.sampling(1.0, 1.0, 20)
    assert s_np(GAUSS, cfg, 2) == pytest.approx(S20_P2, rel=1e-13)
    assert s_np(GAUSS, cfg, 1.5) == pytest.approx(S20_P15, rel=1e-9)


def test_s_np_p2_polynomial_closed_form():
    cfg = GAUSS.sampling(1.0, 1.0, 20)
    a1, a0 = cn_coefficients(1.0, 0.75, 20, cfg.z_used)
    closed = (a1 ** 2 / 3 + a1 * a0 + a0 ** 2) / 400
    quad, _ = integrate.quad(lambda t: (a1 * t + a0) ** 2, 0, 1, epsabs=0, epsrel=1e-13)
    assert s_np(GAUSS, cfg, 2) == pytest.approx(closed, rel=1e-13)
    assert closed == pytest.approx(quad / 400, rel=1e-10)


def test_s_np_small_T_and_homogeneity():
    tiny = s_np(GAUSS, GAUSS.sampling(1.0, 1e-9, 5), 2)
    assert tiny < 1e-6
    spec = ProcessSpec(B0=4.0, lam=0.75, C_X=3.0, phi=make_power(1.5))
    cfg = spec.sampling(1.0, 1.0, 20)
    for p in (1.0, 1.5, 2.0, 3.0):
        assert s_np(spec, cfg, p) == pytest.approx(3.0 ** p * 2.0 ** p * s_np(GAUSS, cfg, p),
                                                   rel=1e-9)


def test_s_np_gate():
    cfg = SamplingConfig(1.0, 0.75, 10.0, 3, z=0.5)
    with pytest.raises(GateError):
        s_np(GAUSS, cfg, 2)


def test_tail_gaussian_closed_form():
    cfg = GAUSS.sampling(1.0, 1.0, 20)
    for p in (1.0, 1.5, 2.0, 2.5):
        S = s_np(GAUSS, cfg, p)
        eps = 3.0 * S * p ** (p / 2)
        cert = tail_bound_lp(GAUSS, cfg, p, eps)
        assert cert.threshold_ok
        assert cert.tail_bound == pytest.approx(2 * math.exp(-(eps / S) ** (2 / p) / 2), rel=1e-12)
    cert = tail_bound_lp(GAUSS, cfg, 2, 0.5)
    assert cert.tail_bound == pytest.approx(TAIL20, rel=1e-12)


def test_gate_gaussian_threshold():
    cfg = GAUSS.sampling(1.0, 1.0, 20)
    S = s_np(GAUSS, cfg, 2)
    assert not tail_bound_lp(GAUSS, cfg, 2, 2 * S * 0.999).threshold_ok
    assert tail_bound_lp(GAUSS, cfg, 2, 2 * S * 1.001).threshold_ok
    assert tail_bound_lp(GAUSS, cfg, 2, 0.5 * S).tail_bound is None


def test_power_family_form():
    alpha = 1.5
    gamma = 3.0
    spec = ProcessSpec(B0=1.0, lam=0.75, C_X=1.0, phi=make_power(alpha))
    cfg = spec.sampling(1.0, 1.0, 30)
    p = 2.0
    c = s_np(spec, cfg, p)
    thr = c * p ** ((alpha - 1) * p / alpha)
    assert not tail_bound_lp(spec, cfg, p, thr * 0.999).threshold_ok
    cert = tail_bound_lp(spec, cfg, p, thr * 1.5)
    assert cert.tail_bound == pytest.approx(
        2 * math.exp(-(thr * 1.5 / c) ** (gamma / p) / gamma), rel=1e-12)


def test_tail_decreasing_in_eps():
    cfg = GAUSS.sampling(1.0, 1.0, 20)
    tails = [tail_bound_lp(GAUSS, cfg, 2, e).tail_bound for e in np.geomspace(0.2, 50, 40)]
    assert np.all(np.diff(tails) < 0) and tails[-1] < 1e-100


@given(p=st.floats(1.0, 2.0), eps=st.floats(0.01, 1.0), delta=st.floats(0.01, 0.99),
       n=st.integers(1, 400))
@settings(max_examples=200, deadline=None)
def test_gaussian_corollary_consistency(p, eps, delta, n):
    cfg = GAUSS.sampling(1.0, 1.0, n)
    cert = certify_lp(GAUSS, cfg, p, eps, delta)
    S = cert.S_np
    closed = certify_lp_gaussian(S, p, eps, delta)
    rhs = eps / max(p ** (p / 2), (2 * math.log(2 / delta)) ** (p / 2))
    if abs(S - rhs) > 1e-9 * rhs:  # skip razor-edge ties
        assert cert.certified == closed
    if cert.certified:
        assert cert.threshold_ok and cert.tail_bound <= delta


def test_vacuous_reliability():
    cfg = GAUSS.sampling(1.0, 1.0, 2)
    assert certify_lp(GAUSS, cfg, 2, 1e6, 0.999).certified


def test_certified_flips_once():
    flags = [certify_lp(GAUSS, GAUSS.sampling(1.0, 1.0, n), 2, 0.2, 0.05).certified
             for n in range(1, 200)]
    changes = sum(a != b for a, b in zip(flags, flags[1:]))
    assert changes == 1 and flags[-1]


def test_min_terms_reference():
    # frozen solver output, each re-checked for minimality
    for (eps, delta), expect in {(0.5, 0.1): 20, (0.2, 0.05): 34}.items():
        n, z = min_terms_lp(GAUSS, 1.0, 1.0, 2, eps, delta)
        assert n == expect and z == pytest.approx(z_star(1.0, 1.0, n))
        assert certify_lp(GAUSS, GAUSS.sampling(1.0, 1.0, n), 2, eps, delta).certified
        assert not certify_lp(GAUSS, GAUSS.sampling(1.0, 1.0, n - 1), 2, eps, delta).certified


def test_relaxed_rule_is_looser():
    for eps, delta in ((0.5, 0.1), (0.2, 0.05), (0.05, 0.05)):
        n_full, _ = min_terms_lp(GAUSS, 1.0, 1.0, 2, eps, delta)
        n_rel, _ = min_terms_lp_relaxed(GAUSS, 1.0, 1.0, 2, eps, delta)
        assert n_rel >= n_full
        for n in (5, 20, 100):
            assert s_np_relaxed(GAUSS, 1.0, 1.0, n, 2) >= s_np(GAUSS, GAUSS.sampling(1.0, 1.0, n), 2)


def test_min_terms_unsatisfiable():
    with pytest.raises(UnsatisfiableError):
        min_terms_lp(GAUSS, 1.0, 1.0, 2, 1e-12, 1e-12, cap=50)


def test_min_terms_large_horizon_floor():
    n, z = min_terms_lp(GAUSS, 1.0, 20.0, 2, 100.0, 0.1)
    assert z < 1 and n >= math.floor(20 / math.pi) + 1
