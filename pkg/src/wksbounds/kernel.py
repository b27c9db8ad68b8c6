"""Cardinal-series machinery for the sampling expansion.

A process bandlimited to ``[-lam, lam)`` sampled at ``k*pi/omega`` with
``omega > lam`` is rebuilt as ``sum_k sinc(omega*t - k*pi) * X(k*pi/omega)``.
This module evaluates the truncated ``2n+1``-term sum, the paired residual
kernel ``R_k(t, lam)`` of the tail terms ``+-k``, and the two sine-sum
inequalities that drive the truncation estimates.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import DomainError, GateError, InputError

__all__ = [
    "SamplingConfig",
    "z_star",
    "sinc_weight",
    "sinc_matrix",
    "lattice",
    "truncated_sum",
    "residual_kernel",
    "residual_kernel_direct",
    "sine_sum_bound_check",
    "abel_sum_bound_check",
    "load_samples_csv",
]

SINGULAR_TOL = 1e-8
# relative slack when comparing n against omega*t/(pi*sqrt(z)); the tight
# choice of z makes the two sides equal up to rounding
_GATE_RTOL = 1e-12


def z_star(omega, T, n):
    """Tight safety parameter ``omega**2 T**2 / (n**2 pi**2)``."""
    return (omega * T / (n * math.pi)) ** 2


@dataclass(frozen=True)
class SamplingConfig:
    """Sampling rate, band edge, horizon, truncation order and safety parameter.

    ``z=None`` selects ``z* = (omega T / (n pi))**2``, which must then be
    below one.
    """

    omega: float
    lam: float
    T: float
    n: int
    z: Optional[float] = None

    def __post_init__(self):
        if not (self.omega > self.lam > 0):
            raise DomainError(f"need omega > lam > 0, got omega={self.omega}, lam={self.lam}")
        if not self.T > 0:
            raise DomainError(f"need T > 0, got {self.T}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"need integer n >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if self.z is not None and not 0 < self.z < 1:
            raise DomainError(f"need z in (0, 1), got {self.z}")

    @property
    def z_star(self):
        return z_star(self.omega, self.T, self.n)

    @property
    def z_used(self):
        return self.z_star if self.z is None else self.z

    @property
    def ratio(self):
        """``lam / omega``, strictly below one."""
        return self.lam / self.omega

    def admissible_at(self, t, z=None):
        """``n >= omega t / (pi sqrt z)`` for the given (or configured) z."""
        z = self.z_used if z is None else z
        if not 0 < z < 1:
            return False
        need = self.omega * t / (math.pi * math.sqrt(z))
        return self.n >= need * (1.0 - _GATE_RTOL)

    def require_admissible(self, t, z=None):
        z = self.z_used if z is None else z
        if not 0 < z < 1:
            raise GateError("0 < z < 1", f"z={z:.6g}")
        if not self.admissible_at(t, z):
            need = self.omega * t / (math.pi * math.sqrt(z))
            raise GateError("n >= omega*t/(pi*sqrt(z))",
                            f"n={self.n}, omega*t/(pi*sqrt(z))={need:.6g}")

    def with_n(self, n, z=None):
        return SamplingConfig(self.omega, self.lam, self.T, n, z)

    @property
    def sample_times(self):
        return lattice(self.omega, self.n)


def lattice(omega, n):
    """Sample instants ``k*pi/omega`` for ``k = -n..n``."""
    return np.arange(-n, n + 1) * (math.pi / omega)


def _sinc_arg(x):
    """``sin(x)/x`` with the removable singularity taken analytically."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < SINGULAR_TOL
    xs = x[small]
    out[small] = 1.0 - xs * xs / 6.0
    xl = x[~small]
    out[~small] = np.sin(xl) / xl
    return out


def sinc_weight(omega, t, k):
    """Cardinal weight ``sin(omega t - k pi) / (omega t - k pi)``."""
    return float(_sinc_arg(omega * t - k * math.pi))


def sinc_matrix(omega, n, times):
    """Weights with shape ``(2n+1, len(times))``; row ``j`` is ``k = j - n``."""
    ks = np.arange(-n, n + 1)[:, None]
    arg = omega * np.asarray(times, dtype=float)[None, :] - ks * math.pi
    # sin(omega t - k pi) = (-1)^k sin(omega t): cheaper and exact at lattice points
    sign = np.where(ks % 2 == 0, 1.0, -1.0)
    s = np.sin(omega * np.asarray(times, dtype=float))[None, :] * sign
    small = np.abs(arg) < SINGULAR_TOL
    safe = np.where(small, 1.0, arg)
    w = s / safe
    return np.where(small, 1.0 - arg * arg / 6.0, w)


def _as_dense(samples, n):
    if isinstance(samples, Mapping):
        missing = [k for k in range(-n, n + 1) if k not in samples]
        if missing:
            raise InputError(f"missing sample indices {missing[:5]}"
                             + (" ..." if len(missing) > 5 else ""))
        return np.array([float(samples[k]) for k in range(-n, n + 1)])
    arr = np.asarray(samples, dtype=float)
    if arr.shape != (2 * n + 1,):
        raise InputError(f"expected {2 * n + 1} samples for n={n}, got shape {arr.shape}")
    return arr


def truncated_sum(samples, config, t):
    """Evaluate ``X_n(t) = sum_{|k|<=n} sinc(omega t - k pi) X(k pi/omega)``.

    ``samples`` is either a mapping ``k -> value`` or a dense sequence
    indexed ``-n..n``.  ``t`` may be a scalar or an array.
    """
    vals = _as_dense(samples, config.n)
    scalar = np.ndim(t) == 0
    w = sinc_matrix(config.omega, config.n, np.atleast_1d(t))
    out = vals @ w
    return float(out[0]) if scalar else out


def residual_kernel(config, t, lam, k):
    """Paired tail kernel ``R_k(t, lam)`` for ``k >= 1`` (closed form).

    Equal to ``e^{ik pi lam/omega} sinc(omega t - k pi)
    + e^{-ik pi lam/omega} sinc(omega t + k pi)``; near ``omega t = +-k pi``
    the two-term form is used since the closed form is 0/0 there.
    """
    if int(k) != k or k < 1:
        raise DomainError("residual kernel pairs +-k; need integer k >= 1")
    omega = config.omega
    if abs(lam) > omega:
        raise DomainError(f"|lam|={abs(lam)} exceeds omega={omega}")
    wt = omega * t
    kp = k * math.pi
    if abs(wt - kp) < SINGULAR_TOL or abs(wt + kp) < SINGULAR_TOL:
        return residual_kernel_direct(omega, t, lam, k)
    phase = kp * (1.0 - lam / omega)
    common = math.sin(wt) / (wt * wt - kp * kp)
    return complex(2.0 * wt * common * math.cos(phase),
                   -2.0 * kp * common * math.sin(phase))


def residual_kernel_direct(omega, t, lam, k):
    """Two-term definition of ``R_k``; the independent form of the kernel."""
    a = k * math.pi * lam / omega
    plus = _sinc_arg(omega * t - k * math.pi).item()
    minus = _sinc_arg(omega * t + k * math.pi).item()
    return complex(math.cos(a), math.sin(a)) * plus + complex(math.cos(a), -math.sin(a)) * minus


def sine_sum_bound_check(n, m, nu):
    """``|sum_{k=n}^m sin(k pi nu)| <= 1/nu`` for ``0 <= n < m``, ``nu`` in ``(0, 1]``.

    Returns ``(sum, bound, holds)``.
    """
    if not (0 <= n < m) or not 0 < nu <= 1:
        raise DomainError("need 0 <= n < m and nu in (0, 1]")
    ks = np.arange(n, m + 1)
    s = abs(float(np.sum(np.sin(ks * math.pi * nu))))
    bound = 1.0 / nu
    return s, bound, s <= bound + 1e-12


def abel_sum_bound_check(a, nu, n=0):
    """Abel-summation bound for ``|sum_{k=n}^m a_k sin(k pi nu)|``.

    ``a`` holds ``a_n, ..., a_{m+1}`` (one entry past the summation range).
    Returns ``(lhs, rhs, holds)`` with
    ``rhs = (sum_{k=n}^m |a_{k+1} - a_k| + |a_{m+1}|) / nu``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size < 3:
        raise InputError("need a_n..a_{m+1} with m > n (at least 3 values)")
    if not 0 < nu <= 1 or n < 0:
        raise DomainError("need nu in (0, 1] and n >= 0")
    ks = np.arange(n, n + a.size - 1)
    lhs = abs(float(np.sum(a[:-1] * np.sin(ks * math.pi * nu))))
    rhs = (float(np.sum(np.abs(np.diff(a)))) + abs(float(a[-1]))) / nu
    return lhs, rhs, lhs <= rhs + 1e-12


def load_samples_csv(path):
    """Read ``k,value`` rows (``#`` comments and a header row allowed)."""
    out = {}
    with open(path, newline="") as fh:
        rows = csv.reader(line for line in fh if not line.lstrip().startswith("#"))
        for row in rows:
            if not row:
                continue
            try:
                k, v = int(row[0]), float(row[1])
            except (ValueError, IndexError):
                if not out and row[0].strip().lower() == "k":
                    continue
                raise InputError(f"bad sample row {row!r} in {path}") from None
            out[k] = v
    return out
