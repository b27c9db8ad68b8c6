"""Small numerical kernels: golden-section search and adaptive Simpson.

Both are written out here (rather than pulled from scipy) because the
conjugate and theta searches need a bracket-certified maximizer whose
behaviour does not depend on scipy's internal heuristics, and the
integrals over ``[0, T]`` need a deterministic error-controlled rule.
"""

import math

import numpy as np

from .errors import ComputationError

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(func, a, b, xtol=1e-12, maxiter=500):
    """Maximize a unimodal ``func`` on ``[a, b]``.

    Returns ``(x, func(x))``.  The returned value is the best of the final
    bracket interior and its endpoints, so a maximizer sitting on the
    boundary is not lost.
    """
    if not b > a:
        raise ComputationError(f"empty bracket [{a}, {b}]")
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = func(c), func(d)
    it = 0
    while (b - a) > xtol * max(1.0, abs(a) + abs(b)) and it < maxiter:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = func(d)
        it += 1
    cands = [(fc, c), (fd, d), (func(a), a), (func(b), b)]
    fbest, xbest = max(cands)
    return xbest, fbest


def golden_max_vec(func, a, b, iters=60):
    """Vectorized golden-section maximization.

    ``func`` maps an array of abscissae (one per problem) to an array of
    values; ``a`` and ``b`` are arrays of bracket ends.  A fixed iteration
    count keeps all problems in lock-step.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = func(c), func(d)
    for _ in range(iters):
        left = fc >= fd
        # left: keep [a, d], old c becomes d; right: keep [c, b], old d becomes c
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        fresh = np.where(left, b - INVPHI * (b - a), a + INVPHI * (b - a))
        f_fresh = func(fresh)
        c, d = np.where(left, fresh, d), np.where(left, c, fresh)
        fc, fd = np.where(left, f_fresh, fd), np.where(left, fc, f_fresh)
    x = np.where(fc >= fd, c, d)
    return x, np.maximum(fc, fd)


def adaptive_simpson(func, a, b, tol=1e-10, max_depth=40):
    """Integrate ``func`` over ``[a, b]`` by adaptive Simpson with Richardson correction."""
    if b == a:
        return 0.0
    fa, fb = func(a), func(b)
    m = 0.5 * (a + b)
    fm = func(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_rec(func, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_rec(func, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, frm = func(lm), func(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return (_simpson_rec(func, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + _simpson_rec(func, m, b, fm, frm, fb, right, tol / 2.0, depth - 1))
