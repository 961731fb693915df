"""Zero finding on a uniform grid with tangency detection.

Functions are sampled on a uniform grid in ``x``.  Sign changes are refined
by Brent's method.  Local minima of ``|f|`` whose parabolic vertex comes
close to zero are inspected more closely: the extremum is located through
a central-difference derivative, then classified as a crossing pair, a
double zero, or a near miss that callers may promote to a double zero when
a count comes up short.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

DOUBLE_TOL = 1e-12
XTOL = 1e-14
_DERIV_STEP = 1e-5


@dataclass(frozen=True)
class Zero:
    x: float
    mult: int = 1

    @property
    def lam(self):
        return lam_from_x(self.x)


@dataclass(frozen=True)
class NearMiss:
    """A local extremum of f that stays (barely) on one side of zero."""

    x: float
    value: float

    @property
    def lam(self):
        return lam_from_x(self.x)


def lam_from_x(x):
    """Energy from the sign-extended square root parameter."""
    return math.copysign(x * x, x) if np.isscalar(x) else np.sign(x) * x * x


def x_from_lam(lam):
    if np.isscalar(lam):
        return math.copysign(math.sqrt(abs(lam)), lam)
    lam = np.asarray(lam, dtype=float)
    return np.sign(lam) * np.sqrt(np.abs(lam))


def _root(f, a, b):
    return brentq(f, a, b, xtol=XTOL, rtol=4.0 * np.finfo(float).eps, maxiter=500)


def _extremum(f, a, b, sign):
    """Location of the minimum of ``sign * f`` on ``[a, b]``."""

    def d(x):
        return f(x + _DERIV_STEP) - f(x - _DERIV_STEP)

    da, db = d(a), d(b)
    if da * db < 0.0:
        return _root(d, a, b)
    res = minimize_scalar(lambda x: sign * f(x), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x)


def find_zeros(x, fx, f, double_tol=DOUBLE_TOL):
    """All zeros of ``f`` on the span of the grid ``x``.

    Parameters
    ----------
    x, fx
        Uniform grid and the values of ``f`` on it.
    f
        Scalar callable, consistent with ``fx``.
    double_tol
        An extremum with ``|f| <= double_tol`` counts as a double zero.

    Returns
    -------
    zeros : list of Zero, sorted
    near : list of NearMiss
    """
    x = np.asarray(x, dtype=float)
    fx = np.asarray(fx, dtype=float)
    n = x.size
    zeros = []
    near = []

    for i in np.nonzero(fx == 0.0)[0]:
        left = fx[i - 1] if i > 0 else 0.0
        right = fx[i + 1] if i < n - 1 else 0.0
        zeros.append(Zero(float(x[i]), 2 if left * right > 0.0 else 1))

    for i in np.nonzero(fx[:-1] * fx[1:] < 0.0)[0]:
        zeros.append(Zero(_root(f, x[i], x[i + 1])))

    a = np.abs(fx)
    same = (fx[:-2] * fx[1:-1] > 0.0) & (fx[1:-1] * fx[2:] > 0.0)
    cand = np.nonzero(same & (a[1:-1] <= a[:-2]) & (a[1:-1] < a[2:]))[0] + 1
    for i in cand:
        fm, f0, fp = fx[i - 1], fx[i], fx[i + 1]
        b = 0.5 * (fp - fm)
        c = 0.5 * (fp - 2.0 * f0 + fm)
        vertex = f0 - b * b / (4.0 * c) if c != 0.0 else f0
        reach = max(abs(fp - f0), abs(fm - f0))
        if vertex * f0 > 0.0 and abs(vertex) > reach:
            continue
        sign = 1.0 if f0 > 0.0 else -1.0
        xs = _extremum(f, x[i - 1], x[i + 1], sign)
        fs = f(xs)
        if fs * f0 < 0.0:
            zeros.append(Zero(_root(f, x[i - 1], xs)))
            zeros.append(Zero(_root(f, xs, x[i + 1])))
        elif abs(fs) <= double_tol:
            zeros.append(Zero(xs, 2))
        else:
            near.append(NearMiss(xs, fs))

    zeros.sort(key=lambda z: z.x)
    return zeros, near


def expand(zeros):
    """Zeros listed with multiplicity (a double zero appears twice)."""
    out = []
    for z in zeros:
        out.extend([z] * z.mult)
    return out
