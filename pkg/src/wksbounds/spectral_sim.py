"""Path simulation and Monte Carlo exceedance estimates.

Paths are finite random linear combinations ``X(t) = sum_j xi_j e_j(t)``:

* Gaussian, discrete spectrum -- ``e_j`` are ``sqrt(m) cos(lam t)`` and
  ``sqrt(m) sin(lam t)`` per symmetric atom pair, ``xi_j`` standard normal;
  the covariance is exactly ``sum m cos(lam (t-s))``.
* Karhunen-Loeve type with two-sided Weibull(alpha) coefficients,
  ``P{xi >= x} = exp(-x^alpha/alpha)/2``, drawn by inverse CDF.

Each trial draws from its own Philox stream keyed by ``(seed, trial)``, so
results do not depend on batching and are reproducible bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from ._numerics import golden_max_vec
from .errors import InputError, ResolutionError
from .kernel import lattice, sinc_matrix
from .ms_bounds import SpectralMeasure

__all__ = [
    "PathSample",
    "TailEstimate",
    "LinearPathModel",
    "gaussian_model",
    "weibull_model",
    "trig_basis",
    "trial_rng",
    "draw_coefficients",
    "sample_weibull",
    "weibull_second_moment",
    "phi_sqrt_convex",
    "simulate_gaussian",
    "simulate_ssub_weibull",
    "mc_lp_exceedance",
    "mc_uniform_exceedance",
    "mc_pointwise_ms",
    "MIN_POINTS_PER_LOBE",
]

MIN_POINTS_PER_LOBE = 8
_CHUNK = 1024


@dataclass(frozen=True)
class PathSample:
    grid: np.ndarray
    values: np.ndarray
    lattice_samples: Optional[np.ndarray] = None


@dataclass(frozen=True)
class TailEstimate:
    exceed_count: int
    trials: int
    seed: int
    metric: str = ""

    @property
    def p_hat(self):
        return self.exceed_count / self.trials

    @property
    def std_err(self):
        p = self.p_hat
        return math.sqrt(p * (1.0 - p) / self.trials)

    def to_dict(self):
        d = asdict(self)
        d.update(p_hat=self.p_hat, std_err=self.std_err)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class LinearPathModel:
    """``X(t) = coef . basis(t)`` with i.i.d. coefficients from ``sampler``.

    ``basis`` maps a 1-D time array to shape ``(n_coef, len(times))``;
    ``sampler(rng, size)`` returns ``size`` coefficients.
    """

    basis: Callable[[np.ndarray], np.ndarray]
    sampler: Callable[[np.random.Generator, int], np.ndarray]
    n_coef: int
    name: str = "linear"


def trial_rng(seed, trial):
    """Independent Philox stream for one trial."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(trial),))
    return np.random.Generator(np.random.Philox(ss))


def draw_coefficients(model, seed, trials, start=0):
    """Coefficient matrix ``(trials, n_coef)``; row ``i`` comes from stream ``start + i``."""
    out = np.empty((trials, model.n_coef))
    for i in range(trials):
        out[i] = model.sampler(trial_rng(seed, start + i), model.n_coef)
    return out


def _pair_masses(measure):
    if not measure.is_symmetric():
        raise InputError("real-valued paths need a symmetric spectral measure")
    lam = measure.lambdas
    pos = lam > 0
    freqs = list(lam[pos])
    weights = list(2.0 * measure.masses[pos])
    zero = measure.masses[lam == 0].sum()
    return np.array(freqs), np.array(weights), float(zero)


def trig_basis(measure, coef_variance=1.0):
    """Cos/sin basis for a symmetric discrete spectrum.

    Scaled so that coefficients of variance ``coef_variance`` reproduce the
    covariance ``sum m cos(lam tau)``.
    """
    freqs, weights, zero = _pair_masses(measure)
    amp = np.sqrt(weights / coef_variance)
    amp0 = math.sqrt(zero / coef_variance)

    def basis(times):
        t = np.asarray(times, dtype=float)
        arg = np.multiply.outer(freqs, t)
        rows = [amp[:, None] * np.cos(arg), amp[:, None] * np.sin(arg)]
        if zero > 0:
            rows.append(np.full((1, t.size), amp0))
        return np.vstack(rows)

    size = 2 * len(freqs) + (1 if zero > 0 else 0)
    return basis, size


def gaussian_model(measure):
    basis, size = trig_basis(measure)
    return LinearPathModel(basis=basis, sampler=lambda rng, m: rng.standard_normal(m),
                           n_coef=size, name="gaussian")


def sample_weibull(rng, size, alpha):
    """Two-sided Weibull: ``|xi| = (alpha ln(1/U))^(1/alpha)`` with a fair random sign."""
    u = rng.random(size)
    # 1 - u lies in (0, 1], so the log is finite
    mag = (alpha * -np.log1p(-u)) ** (1.0 / alpha)
    sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    return sign * mag


def weibull_second_moment(alpha):
    """``E xi^2 = alpha^(2/alpha) Gamma(1 + 2/alpha)``."""
    return alpha ** (2.0 / alpha) * math.gamma(1.0 + 2.0 / alpha)


def phi_sqrt_convex(phi, xmax=16.0, points=400):
    """Midpoint-convexity check of ``x -> phi(sqrt x)`` on a grid in ``(0, xmax]``."""
    x = np.linspace(xmax / points, xmax, points)
    g = np.array([phi.evaluate(math.sqrt(v)) for v in x])
    mids = np.array([phi.evaluate(math.sqrt(v)) for v in 0.5 * (x[:-2] + x[2:])])
    return bool(np.all(mids <= 0.5 * (g[:-2] + g[2:]) * (1 + 1e-12) + 1e-15))


def weibull_model(basis_funcs, alpha):
    """Karhunen-Loeve type model with i.i.d. two-sided Weibull(alpha) coefficients.

    ``basis_funcs`` is either a sequence of scalar-or-array callables
    ``e_j(t)`` or a ``(basis, size)`` pair as returned by :func:`trig_basis`.
    """
    if alpha < 2:
        raise InputError("weibull coefficients need alpha >= 2")
    if isinstance(basis_funcs, tuple) and len(basis_funcs) == 2 and callable(basis_funcs[0]):
        basis, size = basis_funcs
    else:
        funcs = list(basis_funcs)
        if not funcs:
            raise InputError("empty basis")

        def basis(times):
            t = np.asarray(times, dtype=float)
            return np.vstack([np.broadcast_to(np.asarray(f(t), dtype=float), t.shape)
                              for f in funcs])

        size = len(funcs)
    if size == 0:
        raise InputError("empty basis")
    return LinearPathModel(basis=basis, sampler=lambda rng, m: sample_weibull(rng, m, alpha),
                           n_coef=size, name=f"weibull(alpha={alpha:g})")


def _path(model, grid, seed, config):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
        raise InputError("grid must be strictly increasing")
    c = model.sampler(trial_rng(seed, 0), model.n_coef)
    values = c @ model.basis(grid)
    lat = None
    if config is not None:
        lat = c @ model.basis(lattice(config.omega, config.n))
    return PathSample(grid=grid, values=values, lattice_samples=lat)


def simulate_gaussian(measure, grid, seed, config=None):
    """One Gaussian path on ``grid`` (and at the sampling lattice when ``config`` is given)."""
    return _path(gaussian_model(measure), grid, seed, config)


def simulate_ssub_weibull(basis_funcs, alpha, seed, grid, config=None):
    """One Weibull Karhunen-Loeve path."""
    return _path(weibull_model(basis_funcs, alpha), grid, seed, config)


def _grid(config, grid_points):
    if grid_points < 3:
        raise ResolutionError("need at least 3 grid points")
    if grid_points % 2 == 0:
        grid_points += 1
    grid = np.linspace(0.0, config.T, grid_points)
    h = grid[1] - grid[0]
    lobe = math.pi / config.omega
    if h > lobe / MIN_POINTS_PER_LOBE:
        raise ResolutionError(
            f"grid step {h:.4g} exceeds pi/omega/{MIN_POINTS_PER_LOBE} = {lobe / MIN_POINTS_PER_LOBE:.4g}")
    return grid


def _error_chunks(model, config, times, trials, seed):
    """Yield ``(start, coefs, err)`` with ``err = X - X_n`` on ``times`` per chunk of trials."""
    b_t = model.basis(times)
    b_lat = model.basis(lattice(config.omega, config.n))
    # X - X_n = c . (basis(t) - basis(lattice) @ W) is linear in the coefficients
    w = sinc_matrix(config.omega, config.n, times)
    for start in range(0, trials, _CHUNK):
        m = min(_CHUNK, trials - start)
        c = draw_coefficients(model, seed, m, start)
        x = c @ b_t
        xn = (c @ b_lat) @ w
        yield start, c, x - xn


def _dump(path, rows, header):
    if path is None:
        return
    with open(path, "w") as fh:
        fh.write(header)
        fh.write("trial,metric_value,exceeded\n")
        for i, v, e in rows:
            fh.write(f"{i},{v:.17g},{int(e)}\n")


def mc_lp_exceedance(model, config, p, eps, trials, seed, grid_points=513, dump=None,
                     dump_header=""):
    """Empirical ``P{int_0^T |X - X_n|^p dt > eps}`` (composite Simpson on the grid)."""
    if trials < 1:
        raise InputError("need trials >= 1")
    grid = _grid(config, grid_points)
    count = 0
    rows = []
    for start, _, err in _error_chunks(model, config, grid, trials, seed):
        vals = integrate.simpson(np.abs(err) ** p, x=grid, axis=1)
        exc = vals > eps
        count += int(exc.sum())
        if dump is not None:
            rows += [(start + i, v, e) for i, (v, e) in enumerate(zip(vals, exc))]
    _dump(dump, rows, dump_header)
    return TailEstimate(exceed_count=count, trials=trials, seed=seed, metric=f"L{p:g}")


def _refine_sup(model, config, grid, coefs, err):
    """Golden-section refinement of ``max |X - X_n|`` around each trial's grid argmax."""
    idx = np.argmax(np.abs(err), axis=1)
    lo = grid[np.maximum(idx - 1, 0)]
    hi = grid[np.minimum(idx + 1, len(grid) - 1)]
    lat = coefs @ model.basis(lattice(config.omega, config.n))

    def f(ts):
        b = model.basis(ts)
        w = sinc_matrix(config.omega, config.n, ts)
        return np.abs(np.einsum("ij,ji->i", coefs, b) - np.einsum("ik,ki->i", lat, w))

    _, fmax = golden_max_vec(f, lo, hi, iters=40)
    return np.maximum(np.abs(err)[np.arange(len(idx)), idx], fmax)


def mc_uniform_exceedance(model, config, eps, trials, seed, grid_points=1025, refine=True,
                          dump=None, dump_header="", return_gap=False):
    """Empirical ``P{sup_[0,T] |X - X_n| > eps}``.

    The sup is the grid maximum, refined by a golden-section search on the
    two grid cells around it.  With ``return_gap`` the largest relative gap
    between refined and grid maxima is returned as well.
    """
    if trials < 1:
        raise InputError("need trials >= 1")
    grid = _grid(config, grid_points)
    count = 0
    rows = []
    gap = 0.0
    for start, c, err in _error_chunks(model, config, grid, trials, seed):
        gmax = np.max(np.abs(err), axis=1)
        sup = _refine_sup(model, config, grid, c, err) if refine else gmax
        gap = max(gap, float(np.max(sup - gmax)))
        exc = sup > eps
        count += int(exc.sum())
        if dump is not None:
            rows += [(start + i, v, e) for i, (v, e) in enumerate(zip(sup, exc))]
    _dump(dump, rows, dump_header)
    est = TailEstimate(exceed_count=count, trials=trials, seed=seed, metric="sup")
    return (est, gap) if return_gap else est


def mc_pointwise_ms(model, config, t, trials, seed):
    """Monte Carlo mean of ``|X(t) - X_n(t)|^2`` with its standard error."""
    vals = np.concatenate([err[:, 0] ** 2 for _, _, err in
                           _error_chunks(model, config, np.array([float(t)]), trials, seed)])
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(trials))


def sample_paths(model, grid, trials, seed):
    """``(trials, len(grid))`` path values from the per-trial streams."""
    c = draw_coefficients(model, seed, trials)
    return c @ model.basis(np.asarray(grid, dtype=float))
