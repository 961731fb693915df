"""Lyapunov branches of the fibre operators and their auxiliary functions.

For channel ``k`` with ``c = cos(pi k / N + a)`` and ``s = sin(pi k / N + a)``:

    xi  = (9 F^2 - F_-^2 - 1) / 2 - s^2
    rho = (9 F^2 - s^2) c^2 + s^2 F_-^2
    F_{1,2} = xi +/- sqrt(rho)

A real energy is in the a.c. spectrum of the channel exactly when some
real branch lies in [-1, 1].  The remaining quantities locate the branch
endpoints: periodic points solve ``9 F^2 = g_nu``, antiperiodic points
solve ``9 F^2 = h_nu``, and ``v`` decides whether a resonance (zero of
``rho``) replaces an antiperiodic endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hill import HillValues

SNAP = 1e-14
COMPLEX_PAIR = "complex_pair"
UNDEFINED = "undefined"


@dataclass(frozen=True)
class ChannelParams:
    k: int
    N: int
    a1: float
    a2: float
    ck: float
    sk: float

    @property
    def a(self):
        return self.a1 + self.a2

    @property
    def c2(self):
        return self.ck * self.ck

    @property
    def s2(self):
        return self.sk * self.sk

    @property
    def c_zero(self):
        return self.ck == 0.0

    @property
    def s_zero(self):
        return self.sk == 0.0


def channel_params(k: int, N: int, a1: float, a2: float) -> ChannelParams:
    """Channel constants; cosines and sines within 1e-14 of zero are snapped to 0."""
    if N < 1:
        raise ValueError("N must be >= 1")
    k = int(k) % N
    ang = math.pi * k / N + a1 + a2
    c, s = math.cos(ang), math.sin(ang)
    if abs(c) <= SNAP:
        c, s = 0.0, math.copysign(1.0, s)
    elif abs(s) <= SNAP:
        c, s = math.copysign(1.0, c), 0.0
    return ChannelParams(k, int(N), float(a1), float(a2), c, s)


def channels(N: int, a1: float, a2: float):
    return [channel_params(k, N, a1, a2) for k in range(N)]


@dataclass(frozen=True)
class LyapunovValues:
    lam: float
    F: float
    Fminus: float
    xi: float
    rho: float
    F1: float | str
    F2: float | str
    g1: float
    g2: float
    h1: float
    h2: float
    u: float
    v: float
    fk: float | str
    Dplus: float
    Dminus: float

    @property
    def real_branches(self):
        return self.rho >= 0.0

    def in_band(self):
        """Flags ``(F1 in [-1, 1], F2 in [-1, 1])``; complex branches never are."""
        if not self.real_branches:
            return False, False
        return abs(self.F1) <= 1.0, abs(self.F2) <= 1.0


def lyapunov_arrays(F, Fm, ch: ChannelParams):
    """Vectorised evaluation; returns a dict of arrays (F1, F2 are NaN where rho < 0)."""
    F = np.asarray(F, dtype=float)
    Fm = np.asarray(Fm, dtype=float)
    c2, s2 = ch.c2, ch.s2
    F9 = 9.0 * F * F
    Fm2 = Fm * Fm
    aFm = np.abs(Fm)
    xi = 0.5 * (F9 - Fm2 - 1.0) - s2
    rho = (F9 - s2) * c2 + s2 * Fm2
    root = np.sqrt(np.where(rho >= 0.0, rho, np.nan))
    r = np.sqrt(Fm2 + 4.0 * c2)
    g1 = 5.0 + Fm2 - 2.0 * r
    g2 = 5.0 + Fm2 + 2.0 * r
    h1 = (1.0 - aFm) ** 2
    h2 = (1.0 + aFm) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        fk = s2 * (1.0 - Fm2 / c2) if c2 > 0.0 else np.full_like(F, np.nan)
    return {
        "xi": xi,
        "rho": rho,
        "F1": xi + root,
        "F2": xi - root,
        "g1": g1,
        "g2": g2,
        "h1": h1,
        "h2": h2,
        "u": aFm - s2,
        "v": aFm - c2,
        "fk": fk,
        "Dplus": 4.0 * ((xi - 1.0) ** 2 - rho),
        "Dminus": 4.0 * ((xi + 1.0) ** 2 - rho),
    }


def lyapunov_values(hv: HillValues, ch: ChannelParams) -> LyapunovValues:
    d = lyapunov_arrays(np.array([hv.F]), np.array([hv.Fminus]), ch)
    val = {key: float(arr[0]) for key, arr in d.items()}
    if val["rho"] < 0.0:
        val["F1"] = val["F2"] = COMPLEX_PAIR
    if ch.c_zero:
        val["fk"] = UNDEFINED
    return LyapunovValues(lam=hv.lam, F=hv.F, Fminus=hv.Fminus, **val)


def in_band_mask(F, Fm, ch: ChannelParams, tol=0.0):
    """Boolean arrays: branch nu is real and in ``[-1 - tol, 1 + tol]``."""
    d = lyapunov_arrays(F, Fm, ch)
    real = d["rho"] >= 0.0
    b1 = real & (np.abs(d["F1"]) <= 1.0 + tol)
    b2 = real & (np.abs(d["F2"]) <= 1.0 + tol)
    return b1, b2


def dminus_is_k_independent_check(hv: HillValues, N: int, a: float) -> float:
    """Largest deviation of ``D^-`` across channels from its ``k = 0`` value."""
    vals = [lyapunov_values(hv, channel_params(k, N, a, 0.0)).Dminus for k in range(N)]
    return max(abs(v - vals[0]) for v in vals)
