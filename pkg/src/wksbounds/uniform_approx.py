"""Uniform (sup-norm) tail bounds via entropy integrals.

The general bound for a phi-sub-Gaussian process on an index set with
``eps0 = sup tau_phi`` reads::

    P{sup |X| >= u} <= 2 exp(-phi*(u (1-theta)/eps0)) r^{-1}(I_r(theta eps0)/(theta eps0))

with ``I_r(v) = int_0^v r(N(u)) du`` and ``N`` the metric massiveness.  On
``[0, T]`` with ``tau_phi(X(t) - X(s)) <= sigma(|t-s|)`` the massiveness is
majorized by ``T/(2 sigma^{-1}(u)) + 1``.  For Hoelder-type ``sigma(h) = C h^kappa``
and ``r(v) = (v-1)^beta`` everything is explicit, and letting ``beta -> 0``
gives the factor ``T/2 (e C/(theta eps0))^(1/kappa) + 1`` used for the
sampling error below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate

from ._numerics import golden_max
from .errors import DivergenceError, DomainError, GateError, InputError, UnsatisfiableError
from .kernel import SamplingConfig, z_star
from .lp_approx import DEFAULT_N_CAP, ProcessSpec, _n_floor
from .ms_bounds import cn_coefficients, w_q_terms
from .orlicz import conjugate

__all__ = [
    "EntropyModel",
    "UniformCertificate",
    "holder_model",
    "entropy_integral",
    "holder_integral_closed",
    "holder_tail_factor",
    "holder_tail_factor_limit",
    "uniform_tail_general",
    "moment_bound_general",
    "wks_constants",
    "uniform_tail_wks",
    "certify_uniform",
    "min_terms_uniform",
]

THETA_LO = 1e-6
THETA_HI = 1.0 - 1e-6


@dataclass(frozen=True)
class EntropyModel:
    """Entropy data for the sup bound.

    Either ``massiveness`` (``v -> N(v)``) or the pair ``sigma``/``sigma_inv``
    together with the horizon ``T`` must be given; the latter uses the
    majorant ``N(u) <= T/(2 sigma^{-1}(u)) + 1``.
    """

    eps0: float
    r: Callable[[float], float]
    r_inv: Callable[[float], float]
    massiveness: Optional[Callable[[float], float]] = None
    sigma: Optional[Callable[[float], float]] = None
    sigma_inv: Optional[Callable[[float], float]] = None
    T: Optional[float] = None

    def __post_init__(self):
        if not self.eps0 > 0:
            raise DomainError("need eps0 > 0")
        if self.massiveness is None and (self.sigma_inv is None or self.T is None):
            raise InputError("need massiveness N(v), or sigma_inv together with T")

    def covering_number(self, u):
        if self.sigma_inv is not None and self.T is not None:
            return self.T / (2.0 * self.sigma_inv(u)) + 1.0
        return self.massiveness(u)


def holder_model(C, kappa, beta, T, eps0):
    """``sigma(h) = C h^kappa`` and ``r(v) = (v-1)^beta`` with ``0 < beta < kappa <= 1``."""
    if not 0 < kappa <= 1:
        raise DomainError("need 0 < kappa <= 1")
    if not 0 < beta:
        raise DomainError("need beta > 0")
    return EntropyModel(
        eps0=eps0,
        r=lambda v: max(v - 1.0, 0.0) ** beta,
        r_inv=lambda v: v ** (1.0 / beta) + 1.0,
        sigma=lambda h: C * h ** kappa,
        sigma_inv=lambda u: (u / C) ** (1.0 / kappa),
        T=T,
    )


def entropy_integral(model, v, rtol=1e-12, max_pieces=4000):
    """``int_0^v r(N(u)) du`` by dyadic refinement towards the origin.

    The range is split into ``[v 2^-(j+1), v 2^-j]``.  Pieces shrink
    geometrically for an integrable singularity; refinement stops once the
    geometric extrapolation of the remaining tail is below ``rtol`` of the
    running total, and that extrapolated tail is added.  A non-finite piece,
    or pieces that fail to shrink within ``max_pieces`` halvings, raise
    :class:`DivergenceError`.
    """
    if v < 0:
        raise DomainError("need v >= 0")
    if v == 0:
        return 0.0
    integrand = lambda u: model.r(model.covering_number(u))
    total = 0.0
    hi = v
    prev = None
    for _ in range(max_pieces):
        lo = hi / 2.0
        try:
            piece, _err = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)
        except (OverflowError, ZeroDivisionError):
            raise DivergenceError(f"integrand overflows near u={lo:g}") from None
        if not math.isfinite(piece):
            raise DivergenceError(f"non-finite integrand near u={lo:g}")
        total += piece
        if piece == 0.0 and (prev == 0.0 or prev is None):
            if prev == 0.0:
                return total
        elif prev is not None and prev > 0:
            rho = piece / prev
            if rho < 1.0:
                tail = piece * rho / (1.0 - rho)
                if tail <= rtol * total:
                    return total + tail
        prev = piece
        hi = lo
        if hi == 0.0:
            break
    raise DivergenceError(
        f"entropy integral over (0, {v:g}] did not stabilize after {max_pieces} halvings")


def holder_integral_closed(C, kappa, beta, T, v):
    """Closed form ``(C^(1/kappa) T/2)^beta v^(1-beta/kappa) / (1 - beta/kappa)``."""
    if not 0 < beta < kappa:
        raise DomainError("closed form needs 0 < beta < kappa")
    return (C ** (1.0 / kappa) * T / 2.0) ** beta * v ** (1.0 - beta / kappa) / (1.0 - beta / kappa)


def holder_tail_factor(C, kappa, beta, T, theta, eps0):
    """``r^{-1}(I(theta eps0)/(theta eps0))`` in closed form for finite ``beta``."""
    return (C ** (1.0 / kappa) * T / 2.0 * (1.0 - beta / kappa) ** (-1.0 / beta)
            * (theta * eps0) ** (-1.0 / kappa) + 1.0)


def holder_tail_factor_limit(C, kappa, T, theta, eps0):
    """The ``beta -> 0`` limit ``T/2 (e C/(theta eps0))^(1/kappa) + 1``."""
    return T / 2.0 * (math.e * C / (theta * eps0)) ** (1.0 / kappa) + 1.0


def _entropy_factor(model, theta):
    v = theta * model.eps0
    return model.r_inv(entropy_integral(model, v) / v)


def uniform_tail_general(model, phi, theta, u):
    """``2 A(theta, u)``: the sup-tail bound from an entropy model."""
    if not 0 < theta < 1:
        raise DomainError("need theta in (0, 1)")
    if u < 0:
        raise DomainError("need u >= 0")
    expo = conjugate(phi, u * (1.0 - theta) / model.eps0)
    return 2.0 * math.exp(-expo) * _entropy_factor(model, theta)


def moment_bound_general(model, phi, lam, theta):
    """``2 Q(lam, theta)``: bound on ``E exp(lam sup |X|)``."""
    if not 0 < theta < 1:
        raise DomainError("need theta in (0, 1)")
    return 2.0 * math.exp(phi.evaluate(lam * model.eps0 / (1.0 - theta))) * _entropy_factor(model, theta)


@dataclass(frozen=True)
class UniformCertificate:
    """Sup-norm bound at one ``(n, eps, theta)``.

    ``bound`` is the value without the leading factor 2 (as the single-step
    statement prints it); ``bound_with_2`` restores the factor carried by
    the general entropy bound and is what certification compares to
    ``delta``.
    """

    eps: float
    delta: Optional[float]
    n: int
    theta_used: Optional[float]
    C_n_const: float
    b_n_const: float
    bound: Optional[float]
    bound_with_2: Optional[float]
    certified: bool = False
    gate_ok: bool = True
    diagnostics: dict = field(default_factory=dict)


def wks_constants(spec, config):
    """``(C_n, b_n)`` at ``z = z*``: ``C_n = C_X B0 S^2 / n`` and ``b_n = b_n(T, T)``.

    Also returns the diagnostic ``C_X sqrt(B0) S / n``, which is what the
    sup of the standard deviation actually gives; when it exceeds ``C_n`` the
    constant used in the bound is smaller than the proof's estimate.
    """
    z = config.z_star
    if not z < 1:
        raise GateError("z* = omega^2 T^2/(n^2 pi^2) < 1", f"z*={z:.6g}")
    n, T = config.n, config.T
    a1, a0 = cn_coefficients(config.omega, config.lam, n, z)
    s = a1 * T + a0
    cn = spec.C_X * spec.B0 * s * s / n
    w, q = w_q_terms(config.omega, n, z, T, T)
    bn = spec.B0 * (w + q / (1.0 - config.ratio)) ** 2
    eps0_sd = spec.C_X * math.sqrt(spec.B0) * s / n
    return cn, bn, {"z_star": z, "S": s, "eps0_sd": eps0_sd, "eps0_sd_exceeds_Cn": eps0_sd > cn}


def _log_bound(spec, config, cn, bn, theta, eps):
    expo = conjugate(spec.phi, eps * (1.0 - theta) / cn)
    c_holder = spec.C_X * math.sqrt(bn) / config.n
    factor = holder_tail_factor_limit(c_holder, 1.0, config.T, theta, cn)
    return -expo + math.log(factor)


def uniform_tail_wks(spec, config, theta, eps):
    """Sup bound for ``X - X_n`` on ``[0, T]`` at the given ``theta``.

    ``exp(-phi*(eps (1-theta)/C_n)) (e T C_X sqrt(b_n) / (2 n theta C_n) + 1)``,
    assembled from the Hoelder ``beta -> 0`` factor with ``kappa = 1`` and
    ``C = C_X sqrt(b_n)/n``.
    """
    if not 0 < theta < 1:
        raise DomainError("need theta in (0, 1)")
    if not eps > 0:
        raise DomainError("need eps > 0")
    if abs(config.lam - spec.lam) > 1e-15 * max(1.0, spec.lam):
        raise InputError("band edge mismatch between spec and config")
    cn, bn, diag = wks_constants(spec, config)
    b = math.exp(_log_bound(spec, config, cn, bn, theta, eps))
    return UniformCertificate(eps=eps, delta=None, n=config.n, theta_used=theta,
                              C_n_const=cn, b_n_const=bn, bound=b, bound_with_2=2.0 * b,
                              diagnostics=diag)


def _optimal_theta(spec, config, cn, bn, eps, extra=()):
    f = lambda th: -_log_bound(spec, config, cn, bn, th, eps)
    grid = np.linspace(THETA_LO, THETA_HI, 64)
    vals = [f(th) for th in grid]
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    th, v = golden_max(f, lo, hi, xtol=1e-6)
    best = max([(v, th), (vals[i], grid[i])] + [(f(x), x) for x in extra])
    return best[1]


def certify_uniform(spec, config, eps, delta, theta_strategy="optimize"):
    """Uniform accuracy ``eps`` / reliability ``1 - delta`` check.

    ``theta_strategy`` is a float (fixed theta), ``"paper"`` (``theta = C_n/eps``,
    gated on ``eps > C_n``) or ``"optimize"`` (coarse scan plus golden-section
    over ``(1e-6, 1 - 1e-6)``; ``C_n/eps`` is included as a candidate so
    the optimum never loses to it).  Certified iff ``bound_with_2 <= delta``.
    """
    if not 0 < delta < 1:
        raise DomainError("need 0 < delta < 1")
    if not eps > 0:
        raise DomainError("need eps > 0")
    cn, bn, diag = wks_constants(spec, config)
    ratio_theta = cn / eps if eps > cn else None
    if theta_strategy == "paper":
        if ratio_theta is None:
            return UniformCertificate(eps=eps, delta=delta, n=config.n, theta_used=None,
                                      C_n_const=cn, b_n_const=bn, bound=None,
                                      bound_with_2=None, certified=False, gate_ok=False,
                                      diagnostics={**diag, "gate": "eps > C_n"})
        theta = ratio_theta
    elif theta_strategy == "optimize":
        extra = (ratio_theta,) if ratio_theta is not None and THETA_LO <= ratio_theta <= THETA_HI else ()
        theta = _optimal_theta(spec, config, cn, bn, eps, extra)
    elif isinstance(theta_strategy, (int, float)) and not isinstance(theta_strategy, bool):
        theta = float(theta_strategy)
    else:
        raise InputError(f"unknown theta strategy {theta_strategy!r}")
    cert = uniform_tail_wks(spec, config, theta, eps)
    return UniformCertificate(**{**cert.__dict__, "delta": delta,
                                 "certified": cert.bound_with_2 <= delta})


def min_terms_uniform(spec, omega, T, eps, delta, theta_strategy="optimize",
                      cap=DEFAULT_N_CAP, probe=16):
    """Smallest ``n`` with ``z*(n) < 1`` whose uniform certificate passes.

    Doubling then bisection; afterwards ``probe`` evenly spaced orders below
    the answer are re-checked, and if any of them is certified the predicate
    was not monotone there and a linear scan from the search floor is used
    instead.  Returns ``(n, certificate)``.
    """
    cache = {}

    def cert(n):
        if n not in cache:
            cache[n] = certify_uniform(spec, SamplingConfig(omega, spec.lam, T, n),
                                       eps, delta, theta_strategy)
        return cache[n]

    floor = _n_floor(omega, T)
    if floor > cap:
        raise UnsatisfiableError(f"search floor {floor} above cap {cap}")
    lo = hi = floor
    if not cert(floor).certified:
        while True:
            hi = min(2 * hi, cap)
            if cert(hi).certified:
                break
            if hi >= cap:
                raise UnsatisfiableError(f"no n <= {cap} certifies eps={eps}, delta={delta}")
            lo = hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if cert(mid).certified:
                hi = mid
            else:
                lo = mid
    n = hi
    if n > floor:
        probes = np.unique(np.linspace(floor, n - 1, min(probe, n - floor)).astype(int))
        if any(cert(int(m)).certified for m in probes):
            for m in range(floor, n):
                if cert(m).certified:
                    n = m
                    break
    return n, cert(n)
