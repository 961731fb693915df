"""Hot loops: propagation of -y'' + q y = lam y over one period.

Every kernel returns an ``(n, 4)`` array of ``(theta1, theta1', phi1, phi1')``,
the values at t=1 of the fundamental solutions with
theta(0)=phi'(0)=1, theta'(0)=phi(0)=0.

Each kernel has a numba version and a numpy version that vectorises over
energies; ``propagate_*`` dispatch on :data:`armchair._accel.HAS_NUMBA`.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import HAS_NUMBA, njit

_SQRT3_12 = math.sqrt(3.0) / 12.0


@njit
def _cs_scalar(delta):
    # exp([[0, a], [b, 0]]) = C I + S [[0, a], [b, 0]] with delta = a b
    if delta > 1e-8:
        r = math.sqrt(delta)
        return math.cosh(r), math.sinh(r) / r
    if delta < -1e-8:
        r = math.sqrt(-delta)
        return math.cos(r), math.sin(r) / r
    return 1.0 + delta / 2.0 + delta * delta / 24.0, 1.0 + delta / 6.0 + delta * delta / 120.0


def _cs_array(delta):
    c = np.empty_like(delta)
    s = np.empty_like(delta)
    pos = delta > 1e-8
    neg = delta < -1e-8
    mid = ~(pos | neg)
    r = np.sqrt(delta[pos])
    c[pos] = np.cosh(r)
    s[pos] = np.sinh(r) / r
    r = np.sqrt(-delta[neg])
    c[neg] = np.cos(r)
    s[neg] = np.sin(r) / r
    d = delta[mid]
    c[mid] = 1.0 + d / 2.0 + d * d / 24.0
    s[mid] = 1.0 + d / 6.0 + d * d / 120.0
    return c, s


@njit
def _magnus_nb(lams, q1, q2, h):
    n = lams.shape[0]
    m = q1.shape[0]
    out = np.empty((n, 4))
    for i in range(n):
        lam = lams[i]
        y11 = 1.0
        y12 = 0.0
        y21 = 0.0
        y22 = 1.0
        for j in range(m):
            wbar = 0.5 * (q1[j] + q2[j]) - lam
            d = _SQRT3_12 * h * h * (q1[j] - q2[j])
            c, s = _cs_scalar(d * d + h * h * wbar)
            e11 = c + s * d
            e12 = s * h
            e21 = s * h * wbar
            e22 = c - s * d
            t11 = e11 * y11 + e12 * y21
            t12 = e11 * y12 + e12 * y22
            t21 = e21 * y11 + e22 * y21
            t22 = e21 * y12 + e22 * y22
            y11 = t11
            y12 = t12
            y21 = t21
            y22 = t22
        out[i, 0] = y11
        out[i, 1] = y21
        out[i, 2] = y12
        out[i, 3] = y22
    return out


def _magnus_np(lams, q1, q2, h):
    lams = np.asarray(lams, dtype=float)
    y11 = np.ones_like(lams)
    y12 = np.zeros_like(lams)
    y21 = np.zeros_like(lams)
    y22 = np.ones_like(lams)
    for j in range(q1.shape[0]):
        wbar = 0.5 * (q1[j] + q2[j]) - lams
        d = _SQRT3_12 * h * h * (q1[j] - q2[j])
        c, s = _cs_array(d * d + h * h * wbar)
        e11 = c + s * d
        e12 = s * h
        e21 = s * h * wbar
        e22 = c - s * d
        y11, y12, y21, y22 = (
            e11 * y11 + e12 * y21,
            e11 * y12 + e12 * y22,
            e21 * y11 + e22 * y21,
            e21 * y12 + e22 * y22,
        )
    return np.stack([y11, y21, y12, y22], axis=1)


@njit
def _piecewise_nb(lams, lengths, values, jumps):
    n = lams.shape[0]
    m = lengths.shape[0]
    out = np.empty((n, 4))
    for i in range(n):
        lam = lams[i]
        y11 = 1.0
        y12 = 0.0
        y21 = 0.0
        y22 = 1.0
        for j in range(m):
            L = lengths[j]
            if L > 0.0:
                w = values[j] - lam
                c, s = _cs_scalar(w * L * L)
                e12 = s * L
                e21 = s * L * w
                t11 = c * y11 + e12 * y21
                t12 = c * y12 + e12 * y22
                t21 = e21 * y11 + c * y21
                t22 = e21 * y12 + c * y22
                y11 = t11
                y12 = t12
                y21 = t21
                y22 = t22
            sig = jumps[j]
            if sig != 0.0:
                # y' jumps by sig * y
                y21 = y21 + sig * y11
                y22 = y22 + sig * y12
        out[i, 0] = y11
        out[i, 1] = y21
        out[i, 2] = y12
        out[i, 3] = y22
    return out


def _piecewise_np(lams, lengths, values, jumps):
    lams = np.asarray(lams, dtype=float)
    y11 = np.ones_like(lams)
    y12 = np.zeros_like(lams)
    y21 = np.zeros_like(lams)
    y22 = np.ones_like(lams)
    for L, v, sig in zip(lengths, values, jumps):
        if L > 0.0:
            w = v - lams
            c, s = _cs_array(w * L * L)
            e12 = s * L
            e21 = s * L * w
            y11, y12, y21, y22 = (
                c * y11 + e12 * y21,
                c * y12 + e12 * y22,
                e21 * y11 + c * y21,
                e21 * y12 + c * y22,
            )
        if sig != 0.0:
            y21 = y21 + sig * y11
            y22 = y22 + sig * y12
    return np.stack([y11, y21, y12, y22], axis=1)


def propagate_smooth(lams, q1, q2, h, use_numba=None):
    """Fourth-order Magnus propagation with exact 2x2 exponentials.

    ``q1``/``q2`` hold the potential at the two Gauss nodes of each of the
    equal steps of width ``h``.
    """
    lams = np.ascontiguousarray(np.atleast_1d(lams), dtype=float)
    if use_numba is None:
        use_numba = HAS_NUMBA
    if use_numba:
        return _magnus_nb(lams, np.ascontiguousarray(q1), np.ascontiguousarray(q2), float(h))
    return _magnus_np(lams, q1, q2, h)


def propagate_piecewise(lams, lengths, values, jumps, use_numba=None):
    """Exact propagation through constant segments, each followed by a delta jump."""
    lams = np.ascontiguousarray(np.atleast_1d(lams), dtype=float)
    if use_numba is None:
        use_numba = HAS_NUMBA
    if use_numba:
        return _piecewise_nb(
            lams,
            np.ascontiguousarray(lengths, dtype=float),
            np.ascontiguousarray(values, dtype=float),
            np.ascontiguousarray(jumps, dtype=float),
        )
    return _piecewise_np(lams, lengths, values, jumps)
