"""Orlicz N-functions, their densities, Young-Fenchel conjugates and inverses.

An N-function ``phi`` is even, convex, vanishes at zero, and grows
sub-linearly at the origin and super-linearly at infinity.  It admits the
representation ``phi(u) = int_0^|u| f(v) dv`` with a non-decreasing density
``f``.  The built-in families are

* ``power:alpha=a``   -- ``|x|**a / a`` with ``1 < a <= 2``;
* ``gaussian``        -- ``x**2 / 2`` (the power family at ``a = 2``);
* ``weibull:alpha=a`` -- ``x**2 / a`` on ``|x| <= 1`` and ``|x|**a / a``
  beyond, ``a >= 2``, which matches two-sided Weibull tails.

Anything else can be wrapped as a ``custom`` family from a monotone convex
evaluator; its conjugate and inverse are then computed numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from ._numerics import golden_max
from .errors import ComputationError, DomainError, InputError

__all__ = [
    "OrliczFunction",
    "ConditionQReport",
    "make_power",
    "make_gaussian",
    "make_weibull_piecewise",
    "make_custom",
    "conjugate",
    "conjugate_numeric",
    "check_condition_q",
    "parse_family",
]

_Y_START = 1.0
_Y_CAP = 1e150


@dataclass(frozen=True)
class OrliczFunction:
    """An immutable N-function with closed-form pieces where available.

    ``family`` is one of ``"power"``, ``"gaussian"``, ``"weibull"`` or
    ``"custom"``; ``alpha`` is the family parameter (``None`` for custom).
    The callables act on non-negative arguments; the public methods apply
    evenness.
    """

    family: str
    alpha: Optional[float]
    _phi: Callable[[float], float] = field(repr=False)
    _density: Optional[Callable[[float], float]] = field(repr=False, default=None)
    _conj: Optional[Callable[[float], float]] = field(repr=False, default=None)
    _inv: Optional[Callable[[float], float]] = field(repr=False, default=None)
    name: str = ""

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        return self._phi(abs(x))

    def density(self, v):
        """Right-continuous density ``f(v)`` for ``v >= 0``."""
        if v < 0:
            raise DomainError("density is defined for v >= 0")
        if self._density is not None:
            return self._density(v)
        # one-sided difference quotient; right-continuity of f makes the
        # forward quotient the right choice at kinks
        h = 1e-7 * max(1.0, v)
        return (self._phi(v + h) - self._phi(v)) / h

    def conjugate_evaluate(self, x):
        return conjugate(self, x)

    def inverse(self, y):
        """``phi^{-1}(y)``: the non-negative root of ``phi(x) = y``."""
        if y < 0:
            raise DomainError("inverse is defined for y >= 0")
        if y == 0:
            return 0.0
        if self._inv is not None:
            return self._inv(y)
        hi = 1.0
        while self._phi(hi) < y:
            hi *= 2.0
            if hi > _Y_CAP:
                raise ComputationError(f"cannot bracket phi^-1({y})")
        return optimize.brentq(lambda x: self._phi(x) - y, 0.0, hi,
                               xtol=1e-15, rtol=4 * np.finfo(float).eps)

    @property
    def gamma(self):
        """Conjugate exponent ``alpha / (alpha - 1)`` for the built-in families."""
        if self.alpha is None:
            raise DomainError("custom family has no conjugate exponent")
        return self.alpha / (self.alpha - 1.0)

    @property
    def has_closed_conjugate(self):
        return self._conj is not None

    def dual(self):
        """The conjugate ``phi*`` wrapped as a custom N-function."""
        return make_custom(lambda x: conjugate(self, x), name=f"({self.label})*")

    @property
    def label(self):
        """Config-grammar string, e.g. ``power:alpha=1.5``."""
        if self.family == "gaussian":
            return "gaussian"
        if self.family in ("power", "weibull"):
            return f"{self.family}:alpha={self.alpha:g}"
        return self.name or "custom"


@dataclass(frozen=True)
class ConditionQReport:
    """Estimate of ``lim_{x->0} phi(x)/x**2``.

    ``limit_estimate`` is ``math.inf`` when the ratio grows without bound;
    ``inconclusive`` is set when the ratios neither settle nor trend.
    """

    limit_estimate: float
    satisfied: bool
    inconclusive: bool = False
    ratios: tuple = ()


def make_power(alpha):
    """``phi(x) = |x|**alpha / alpha`` with ``1 < alpha <= 2``."""
    alpha = float(alpha)
    if not 1.0 < alpha <= 2.0:
        raise DomainError(f"power family needs 1 < alpha <= 2, got {alpha}")
    gamma = alpha / (alpha - 1.0)
    return OrliczFunction(
        family="power",
        alpha=alpha,
        _phi=lambda x: x ** alpha / alpha,
        _density=lambda v: v ** (alpha - 1.0),
        _conj=lambda x: x ** gamma / gamma,
        _inv=lambda y: (alpha * y) ** (1.0 / alpha),
    )


def make_gaussian():
    """``phi(x) = x**2 / 2``; self-conjugate."""
    return OrliczFunction(
        family="gaussian",
        alpha=2.0,
        _phi=lambda x: 0.5 * x * x,
        _density=lambda v: v,
        _conj=lambda x: 0.5 * x * x,
        _inv=lambda y: math.sqrt(2.0 * y),
    )


def make_weibull_piecewise(alpha):
    """Two-branch N-function matched to two-sided Weibull(alpha) tails.

    ``phi(x) = x**2/alpha`` for ``|x| <= 1`` and ``|x|**alpha/alpha`` beyond.
    The density jumps from ``2/alpha`` to ``1`` at ``v = 1``, so the
    conjugate has three branches: quadratic up to ``2/alpha``, linear (the
    maximizer is pinned at the kink ``y = 1``) up to ``1``, then the power
    branch with exponent ``gamma = alpha/(alpha-1)``.
    """
    alpha = float(alpha)
    if alpha < 2.0:
        raise DomainError(f"weibull family needs alpha >= 2, got {alpha}")
    gamma = alpha / (alpha - 1.0)

    def phi(x):
        return x * x / alpha if x <= 1.0 else x ** alpha / alpha

    def dens(v):
        return 2.0 * v / alpha if v < 1.0 else v ** (alpha - 1.0)

    def conj(x):
        if x <= 2.0 / alpha:
            return alpha * x * x / 4.0
        if x <= 1.0:
            return x - 1.0 / alpha
        return x ** gamma / gamma

    def inv(y):
        if y <= 1.0 / alpha:
            return math.sqrt(alpha * y)
        return (alpha * y) ** (1.0 / alpha)

    return OrliczFunction(family="weibull", alpha=alpha, _phi=phi,
                          _density=dens, _conj=conj, _inv=inv)


def make_custom(evaluate, density=None, inverse=None, name="custom"):
    """Wrap a user-supplied N-function evaluator (called on ``|x|``)."""
    return OrliczFunction(family="custom", alpha=None, _phi=evaluate,
                          _density=density, _inv=inverse, name=name)


def conjugate(phi, x):
    """Young-Fenchel transform ``sup_y (x*y - phi(y))``.

    Uses the family's closed form when there is one, otherwise the bracketed
    numeric search in :func:`conjugate_numeric`.
    """
    x = abs(float(x))
    if x == 0.0:
        return 0.0
    if phi._conj is not None:
        return phi._conj(x)
    return conjugate_numeric(phi, x)


def _bracket(phi, x):
    """Upper end ``Y`` with the objective already decreasing past ``Y/2``."""
    obj = lambda y: x * y - phi._phi(y)
    y = _Y_START
    while True:
        if obj(2.0 * y) < obj(y):
            return 2.0 * y
        y *= 2.0
        if y > _Y_CAP:
            raise ComputationError(
                f"conjugate search at x={x}: objective still increasing at y={y:g}; "
                "function may not be super-linear")


def conjugate_numeric(phi, x, method="golden"):
    """Numeric ``sup_{y>=0} (|x| y - phi(y))``.

    ``method="golden"`` is the bracket-doubling golden-section search;
    ``method="brent"`` runs scipy's bounded Brent minimizer on the same
    bracket and serves as an independent cross-check.
    """
    x = abs(float(x))
    if x == 0.0:
        return 0.0
    hi = _bracket(phi, x)
    obj = lambda y: x * y - phi._phi(y)
    if method == "golden":
        _, val = golden_max(obj, 0.0, hi, xtol=1e-14)
    elif method == "brent":
        res = optimize.minimize_scalar(lambda y: -obj(y), bounds=(0.0, hi),
                                       method="bounded",
                                       options={"xatol": 1e-13, "maxiter": 2000})
        if not res.success:
            raise ComputationError(f"bounded search failed at x={x}: {res.message}")
        val = max(-res.fun, obj(0.0), obj(hi))
    else:
        raise InputError(f"unknown method {method!r}")
    return max(val, 0.0)


def check_condition_q(phi, kmax=40, rtol=0.01):
    """Estimate ``lim_{x->0} phi(x)/x**2`` on ``x_k = 2**-k``, ``k = 1..kmax``.

    The last three ratios agreeing within ``rtol`` counts as convergence to a
    finite limit.  Otherwise a monotone trend in the tail of the sequence is
    read as ``+inf`` (growing) or ``0`` (shrinking); anything else is flagged
    inconclusive and not satisfied.
    """
    xs = 2.0 ** -np.arange(1, kmax + 1)
    ratios = np.array([phi.evaluate(x) / (x * x) for x in xs])
    tail = ratios[-3:]
    if np.all(np.isfinite(tail)) and tail[-1] > 0 and \
            np.max(tail) - np.min(tail) <= rtol * abs(tail[-1]):
        return ConditionQReport(float(tail[-1]), True, ratios=tuple(ratios))
    steps = np.diff(ratios[-10:])
    if np.all(steps > 0):
        return ConditionQReport(math.inf, True, ratios=tuple(ratios))
    if np.all(steps < 0) or np.all(ratios[-3:] == 0):
        return ConditionQReport(0.0, False, ratios=tuple(ratios))
    return ConditionQReport(float(tail[-1]), False, inconclusive=True,
                            ratios=tuple(ratios))


def parse_family(text):
    """Build an N-function from ``power:alpha=1.5``, ``gaussian`` or ``weibull:alpha=4``."""
    text = text.strip()
    head, _, rest = text.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise InputError(f"bad family parameter {item!r} in {text!r}")
            try:
                params[key.strip()] = float(val)
            except ValueError:
                raise InputError(f"non-numeric value in {text!r}") from None
    head = head.strip().lower()
    if head == "gaussian":
        if params:
            raise InputError("gaussian family takes no parameters")
        return make_gaussian()
    if head in ("power", "weibull"):
        if set(params) != {"alpha"}:
            raise InputError(f"{head} family needs exactly alpha=..., got {text!r}")
        maker = make_power if head == "power" else make_weibull_piecewise
        return maker(params["alpha"])
    raise InputError(f"unknown N-function family {head!r}")
