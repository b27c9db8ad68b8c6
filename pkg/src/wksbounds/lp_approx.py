"""Tail bounds and term counts for approximation in ``L_p([0, T])``.

For a strictly phi-sub-Gaussian process with determinative constant ``C_X``
the error integral ``int_0^T |X - X_n|^p dt`` exceeds ``eps`` with
probability at most ``2 exp(-phi*((eps/S_np)^(1/p)))`` once
``eps > S_np * f(p (S_np/eps)^(1/p))^p``, where
``S_np = (C_X/n)^p int_0^T C_n(t)^(p/2) dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from ._numerics import adaptive_simpson
from .errors import DomainError, GateError, InputError, UnsatisfiableError
from .kernel import SamplingConfig, z_star
from .ms_bounds import cn_coefficients
from .orlicz import OrliczFunction, conjugate, make_gaussian

__all__ = [
    "ProcessSpec",
    "LpCertificate",
    "s_np",
    "s_np_relaxed",
    "tail_bound_lp",
    "certify_lp",
    "certify_lp_gaussian",
    "min_terms_lp",
    "min_terms_lp_relaxed",
    "DEFAULT_N_CAP",
]

DEFAULT_N_CAP = 10 ** 9


@dataclass(frozen=True)
class ProcessSpec:
    """Stationary bandlimited process model.

    ``gaussian=True`` forces ``phi = x^2/2`` and ``C_X = 1``.
    """

    B0: float
    lam: float
    C_X: float = 1.0
    phi: Optional[OrliczFunction] = None
    gaussian: bool = False

    def __post_init__(self):
        if self.gaussian:
            if self.phi is not None and self.phi.family != "gaussian":
                raise InputError("gaussian spec cannot carry a non-Gaussian phi")
            if self.C_X != 1.0:
                raise InputError("gaussian spec has determinative constant 1")
            object.__setattr__(self, "phi", make_gaussian())
        if self.phi is None:
            raise InputError("process spec needs an N-function (or gaussian=True)")
        if not (self.B0 > 0 and self.lam > 0 and self.C_X > 0):
            raise DomainError("need B0 > 0, lam > 0, C_X > 0")

    @classmethod
    def gaussian_spec(cls, B0=1.0, lam=0.75):
        return cls(B0=B0, lam=lam, gaussian=True)

    def sampling(self, omega, T, n, z=None):
        return SamplingConfig(omega, self.lam, T, n, z)


@dataclass(frozen=True)
class LpCertificate:
    p: float
    T: float
    eps: float
    delta: Optional[float]
    n: int
    z: float
    S_np: float
    threshold_ok: bool
    tail_bound: Optional[float]
    certified: bool = False
    extras: dict = field(default_factory=dict)


def _check(spec, config):
    if abs(config.lam - spec.lam) > 1e-15 * max(1.0, spec.lam):
        raise InputError(f"band edge mismatch: config {config.lam} vs spec {spec.lam}")


def _integral_power(a1, a0, T, p):
    """``int_0^T (a1 t + a0)^p dt``: exact for even integer ``p``, Simpson otherwise."""
    if float(p).is_integer() and int(p) % 2 == 0:
        q = int(p) + 1
        return ((a1 * T + a0) ** q - a0 ** q) / (q * a1)
    scale = (a1 * T + a0) ** p * T
    return adaptive_simpson(lambda t: (a1 * t + a0) ** p, 0.0, T,
                            tol=1e-10 * scale, max_depth=40)


def s_np(spec, config, p):
    """``(C_X/n)^p int_0^T C_n(t)^(p/2) dt`` at the config's ``z`` (default ``z*``).

    One ``z`` serves the whole interval, validated at ``t = T``.
    """
    if p < 1:
        raise DomainError(f"need p >= 1, got {p}")
    _check(spec, config)
    z = config.z_used
    config.require_admissible(config.T, z)
    a1, a0 = cn_coefficients(config.omega, config.lam, config.n, z)
    integral = _integral_power(a1, a0, config.T, p)
    return (spec.C_X / config.n) ** p * spec.B0 ** (p / 2.0) * integral


def s_np_relaxed(spec, omega, T, n, p):
    """Closed-form majorant ``C_X^p B0^(p/2) T (A1 T + A0)^p / n^p`` with ``1/n <= 1`` in ``A0``."""
    z = z_star(omega, T, n)
    if not z < 1:
        raise GateError("z* = omega^2 T^2/(n^2 pi^2) < 1", f"z*={z:.6g}")
    a1 = 4.0 * omega / (math.pi ** 2 * (1.0 - z))
    a0 = 4.0 * (z + 2.0) / (math.pi * (1.0 - z) ** 2 * (1.0 - spec.lam / omega))
    return spec.C_X ** p * spec.B0 ** (p / 2.0) * T * (a1 * T + a0) ** p / n ** p


def _gate(phi, S, eps, p):
    """``eps > S f(p (S/eps)^(1/p))^p``; returns ``(ok, threshold)``."""
    thr = S * phi.density(p * (S / eps) ** (1.0 / p)) ** p
    return eps > thr, thr


def tail_bound_lp(spec, config, p, eps):
    """Certificate carrying ``2 exp(-phi*((eps/S_np)^(1/p)))`` when the gate holds.

    A failed gate is not an error: ``threshold_ok`` is false and no tail
    claim is made (``tail_bound=None``).
    """
    if not eps > 0:
        raise DomainError("need eps > 0")
    S = s_np(spec, config, p)
    ok, thr = _gate(spec.phi, S, eps, p)
    tail = 2.0 * math.exp(-conjugate(spec.phi, (eps / S) ** (1.0 / p))) if ok else None
    return LpCertificate(p=p, T=config.T, eps=eps, delta=None, n=config.n,
                         z=config.z_used, S_np=S, threshold_ok=ok, tail_bound=tail,
                         extras={"threshold": thr})


def certify_lp(spec, config, p, eps, delta):
    """Accuracy ``eps`` / reliability ``1 - delta`` check in ``L_p([0, T])``.

    Certified iff the validity gate holds and
    ``exp(-phi*((eps/S_np)^(1/p))) <= delta/2``.
    """
    if not 0 < delta < 1:
        raise DomainError("need 0 < delta < 1")
    cert = tail_bound_lp(spec, config, p, eps)
    ok = cert.threshold_ok and cert.tail_bound / 2.0 <= delta / 2.0
    return LpCertificate(**{**cert.__dict__, "delta": delta, "certified": ok})


def certify_lp_gaussian(S_hat, p, eps, delta):
    """Gaussian closed form: ``S_hat < eps / max(p^(p/2), (2 ln(2/delta))^(p/2))``."""
    return S_hat < eps / max(p ** (p / 2.0), (2.0 * math.log(2.0 / delta)) ** (p / 2.0))


def _n_floor(omega, T):
    """Smallest ``n`` with ``z*(n) < 1``."""
    return max(1, math.floor(omega * T / math.pi) + 1)


def _search(pred, n0, cap):
    """Smallest ``n >= n0`` with ``pred(n)`` for a monotone predicate (doubling + bisection)."""
    if n0 > cap:
        raise UnsatisfiableError(f"search floor {n0} above cap {cap}")
    if pred(n0):
        return n0
    lo, hi = n0, n0
    while True:
        hi = min(2 * hi, cap)
        if pred(hi):
            break
        if hi >= cap:
            raise UnsatisfiableError(f"no n <= {cap} satisfies the certificate")
        lo = hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def min_terms_lp(spec, omega, T, p, eps, delta, cap=DEFAULT_N_CAP):
    """Smallest ``n`` certified by :func:`certify_lp` at ``z = z*(n)``.

    Returns ``(n, z_used)``.  The certificate is monotone in ``n`` because
    ``S_np`` decreases when ``n`` grows and ``z*`` shrinks, which is what
    makes bisection valid.
    """
    def pred(n):
        return certify_lp(spec, SamplingConfig(omega, spec.lam, T, n), p, eps, delta).certified

    n = _search(pred, _n_floor(omega, T), cap)
    return n, z_star(omega, T, n)


def min_terms_lp_relaxed(spec, omega, T, p, eps, delta, cap=DEFAULT_N_CAP):
    """Term count from the closed-form majorant of ``S_np`` (Gaussian reliability rule).

    This is the looser rule used for the term-count surfaces: it needs
    ``B0^(p/2) T (A1 T + A0)^p / n^p <= eps / max(p^(p/2), (2 ln(2/delta))^(p/2))``.
    """
    rhs = eps / max(p ** (p / 2.0), (2.0 * math.log(2.0 / delta)) ** (p / 2.0))

    def pred(n):
        return s_np_relaxed(spec, omega, T, n, p) <= rhs

    n = _search(pred, _n_floor(omega, T), cap)
    return n, z_star(omega, T, n)
