"""Mean-square truncation bounds and the exact discrete-spectrum oracle.

For a stationary process with spectral measure on ``[-lam, lam)`` and
``n >= omega t / (pi sqrt z)``::

    E|X(t) - X_n(t)|^2 <= C_n(t) / n^2
    C_n(t) = B(0) * (4 omega t / (pi^2 (1-z))
                     + 4 (z + 1 + 1/n) / (pi (1-z)^2 (1 - lam/omega)))^2

and the increments of the error process obey
``E(Y_n(t) - Y_n(s))^2 <= ((t-s)/n)^2 b_n(t, s)``.  The classical
bound ``belyaev_bound`` is kept for comparison.  For a spectral measure
made of atoms the error is available exactly, which is what every bound
here is checked against.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GateError, InputError
from .kernel import SamplingConfig, lattice, sinc_matrix

__all__ = [
    "SpectralMeasure",
    "MsBoundReport",
    "cn_coefficients",
    "c_n",
    "b_n",
    "belyaev_bound",
    "exact_ms_error",
    "exact_increment_error",
    "error_transfer",
]


@dataclass(frozen=True)
class SpectralMeasure:
    """Discrete spectral measure: atoms ``lambdas`` with non-negative ``masses``.

    ``B(tau) = sum_j mass_j cos(tau lambda_j)`` when the atoms are symmetric.
    """

    lambdas: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float).ravel()
        m = np.asarray(self.masses, dtype=float).ravel()
        if lam.shape != m.shape:
            raise InputError("lambdas and masses must have equal length")
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            raise InputError("masses must be finite and non-negative")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "masses", m)

    @property
    def total_mass(self):
        return float(np.sum(self.masses))

    B0 = total_mass

    def covariance(self, tau):
        tau = np.asarray(tau, dtype=float)
        return np.cos(np.multiply.outer(tau, self.lambdas)) @ self.masses

    def check_band(self, band):
        """Raise unless every atom sits in ``[-band, band)``."""
        bad = (self.lambdas < -band) | (self.lambdas >= band)
        if np.any(bad):
            raise InputError(f"atom(s) {self.lambdas[bad][:3]} outside [-{band}, {band})")

    def is_symmetric(self, atol=1e-12):
        order = np.argsort(self.lambdas)
        rev = np.argsort(-self.lambdas)
        return (np.allclose(self.lambdas[order], -self.lambdas[rev], atol=atol)
                and np.allclose(self.masses[order], self.masses[rev], atol=atol))

    @classmethod
    def symmetric(cls, freqs, masses):
        """Pairs ``+-freq`` each carrying half of ``mass`` (a zero frequency keeps it whole)."""
        freqs = np.asarray(freqs, dtype=float)
        masses = np.asarray(masses, dtype=float)
        lam, m = [], []
        for f, w in zip(freqs, masses):
            if f == 0.0:
                lam.append(0.0)
                m.append(w)
            else:
                lam += [abs(f), -abs(f)]
                m += [w / 2.0, w / 2.0]
        return cls(np.array(lam), np.array(m))

    @classmethod
    def from_density(cls, density, band, n_atoms, B0=None):
        """Midpoint discretization of an even spectral density on ``(-band, band)``.

        ``n_atoms`` midpoints are placed on ``(0, band)`` and mirrored; when
        ``B0`` is given the masses are rescaled to that total.
        """
        h = band / n_atoms
        mids = (np.arange(n_atoms) + 0.5) * h
        w = np.array([density(x) for x in mids]) * h * 2.0
        if B0 is not None:
            w *= B0 / w.sum()
        return cls.symmetric(mids, w)

    @classmethod
    def flat(cls, band, n_pairs, B0=1.0):
        return cls.from_density(lambda x: 1.0, band, n_pairs, B0=B0)

    @classmethod
    def from_csv(cls, path):
        """Rows ``lambda,mass``; ``#`` comments and a header line are skipped."""
        lam, m = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(l for l in fh if not l.lstrip().startswith("#")):
                if not row:
                    continue
                try:
                    lam.append(float(row[0]))
                    m.append(float(row[1]))
                except (ValueError, IndexError):
                    if not lam and row[0].strip().lower() in ("lambda", "lam"):
                        continue
                    raise InputError(f"bad spectral row {row!r} in {path}") from None
        return cls(np.array(lam), np.array(m))


@dataclass(frozen=True)
class MsBoundReport:
    """Bound value, its constants, and whether the admissibility gate held."""

    bound_value: float
    constants: dict = field(default_factory=dict)
    admissible: bool = True


def cn_coefficients(omega, lam, n, z):
    """Slope and intercept of ``sqrt(C_n(t)/B(0)) = A1 t + A0``."""
    a1 = 4.0 * omega / (math.pi ** 2 * (1.0 - z))
    a0 = 4.0 * (z + 1.0 + 1.0 / n) / (math.pi * (1.0 - z) ** 2 * (1.0 - lam / omega))
    return a1, a0


def _tight_z(config, t):
    if config.z is not None:
        return config.z
    return (config.omega * t / (math.pi * config.n)) ** 2


def c_n(config, B0, t, strict=True):
    """``C_n(t)`` and the mean-square bound ``C_n(t)/n^2``.

    When the config leaves ``z`` unset the tight value
    ``(omega t/(pi n))^2`` is used.  With ``strict`` an inadmissible
    ``(n, t, z)`` raises :class:`GateError`; otherwise the report comes back
    with ``admissible=False``.
    """
    if B0 <= 0:
        raise InputError("B0 must be positive")
    z = _tight_z(config, t)
    ok = 0 < z < 1 and config.admissible_at(t, z)
    if strict and not ok:
        config.require_admissible(t, z)
    a1, a0 = cn_coefficients(config.omega, config.lam, config.n, z) if z < 1 else (math.inf, math.inf)
    s = a1 * t + a0
    cn = B0 * s * s
    return MsBoundReport(
        bound_value=cn / config.n ** 2,
        constants={"C_n": cn, "S_n": s, "A1": a1, "A0": a0, "z": z},
        admissible=ok,
    )


def w_q_terms(omega, n, z, t, s):
    """The two pieces ``W_n(t, s)`` and ``Q_n(t, s)`` of the increment constant."""
    w = (4.0 * omega / (math.pi ** 2 * (1.0 - z))) * (
        omega * s + 1.0 + omega ** 2 * (s + t) * s / (math.pi ** 2 * n ** 2 * (1.0 - z)))
    q = (2.0 * omega / (math.pi * (1.0 - z) ** 2)) * (
        z + 1.0 + 1.0 / n + 2.0 * omega * (s + t) / (n * math.pi ** 2))
    return w, q


def b_n(config, B0, t, s, strict=True):
    """``b_n(t, s)`` and the increment bound ``((t-s)/n)^2 b_n(t, s)``."""
    if B0 <= 0:
        raise InputError("B0 must be positive")
    tmax = max(t, s)
    z = _tight_z(config, tmax)
    ok = 0 < z < 1 and config.admissible_at(tmax, z)
    if strict and not ok:
        config.require_admissible(tmax, z)
    w, q = w_q_terms(config.omega, config.n, z, t, s)
    bn = B0 * (w + q / (1.0 - config.ratio)) ** 2
    return MsBoundReport(
        bound_value=((t - s) / config.n) ** 2 * bn,
        constants={"b_n": bn, "W_n": w, "Q_n": q, "z": z},
        admissible=ok,
    )


def belyaev_bound(config, B0, t):
    """Classical ``16 omega^2 (2 pi + t omega)^2 B(0) / (pi^4 n^2 (1 - lam/omega)^2)``."""
    om = config.omega
    return (16.0 * om ** 2 * (2.0 * math.pi + t * om) ** 2 * B0
            / (math.pi ** 4 * config.n ** 2 * (1.0 - config.ratio) ** 2))


def error_transfer(omega, n, lambdas, times):
    """Complex transfer ``e^{i t lam} - sum_{|k|<=n} e^{i k pi lam/omega} sinc(omega t - k pi)``.

    Shape ``(len(lambdas), len(times))``.  The error process is the spectral
    integral of this kernel, so its second moment is ``sum mass |.|^2``.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    ks = np.arange(-n, n + 1)
    phase = np.exp(1j * np.multiply.outer(lambdas, ks) * (math.pi / omega))
    w = sinc_matrix(omega, n, times)
    return np.exp(1j * np.multiply.outer(lambdas, times)) - phase @ w


def exact_ms_error(measure, config, t, k_max=None):
    """Exact ``E|X(t) - X_n(t)|^2`` for a discrete spectral measure.

    ``k_max`` is accepted for interface symmetry and ignored; the direct
    form only needs the ``2n+1`` retained terms.
    """
    measure.check_band(config.lam)
    scalar = np.ndim(t) == 0
    e = error_transfer(config.omega, config.n, measure.lambdas, t)
    out = measure.masses @ (np.abs(e) ** 2)
    return float(out[0]) if scalar else out


def exact_increment_error(measure, config, t, s):
    """Exact ``E(Y_n(t) - Y_n(s))^2`` with ``Y_n = X - X_n``."""
    measure.check_band(config.lam)
    e = error_transfer(config.omega, config.n, measure.lambdas, [t, s])
    return float(measure.masses @ (np.abs(e[:, 0] - e[:, 1]) ** 2))


def emit_rows(measure, config, B0, times):
    """Rows ``(t, bound, oracle, admissible)`` for the ms-report CSV."""
    rows = []
    oracle = exact_ms_error(measure, config, np.asarray(times)) if measure is not None else None
    for i, t in enumerate(times):
        rep = c_n(config, B0, t, strict=False)
        rows.append((t, rep.bound_value, None if oracle is None else float(oracle[i]), rep.admissible))
    return rows
