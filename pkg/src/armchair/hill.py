"""Hill equation data: period map, discriminants and landmarks.

For ``-y'' + q y = lam y`` on [0, 1] let theta, phi be the solutions with
theta(0) = phi'(0) = 1 and theta'(0) = phi(0) = 0.  Everything downstream
is built from ``F = (phi'(1) + theta(1)) / 2`` and
``F_- = (phi'(1) - theta(1)) / 2``.

Energies are scanned in ``x = sign(lam) sqrt(|lam|)``.  The zeros ``eta_n``
of ``F`` split the scan into regions ``(eta_n, eta_{n+1})`` (region 0 is
everything below ``eta_1``); most zero sets used in the package have a
fixed count per region, which is how they get labelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CountMismatch, InternalInconsistency
from .potential import Potential
from .roots import DOUBLE_TOL, Zero, expand, find_zeros, lam_from_x, x_from_lam

SCAN_STEP = 0.01
REFINEMENTS = 2
NEAR_TOL = 1e-8
GAP_TOL = 1e-10


@dataclass(frozen=True)
class HillValues:
    lam: float
    theta1: float
    theta1d: float
    phi1: float
    phi1d: float

    @property
    def F(self):
        return 0.5 * (self.phi1d + self.theta1)

    @property
    def Fminus(self):
        return 0.5 * (self.phi1d - self.theta1)

    @property
    def wronskian(self):
        return self.theta1 * self.phi1d - self.theta1d * self.phi1


class HillSolver:
    """Period map of one potential with a frozen step count.

    Freezing the step count keeps grid values and refinement evaluations
    on the same discrete function.
    """

    def __init__(self, q: Potential, steps: int):
        self.q = q
        self.steps = steps

    def transfer(self, lams):
        return self.q.propagate(np.atleast_1d(np.asarray(lams, dtype=float)), self.steps)

    def values(self, lam) -> HillValues:
        t = self.transfer([lam])[0]
        return HillValues(float(lam), *map(float, t))

    def F(self, lam):
        t = self.transfer(lam)
        return 0.5 * (t[:, 3] + t[:, 0])

    def FF(self, lam):
        """``(F, F_-)`` arrays."""
        t = self.transfer(lam)
        return 0.5 * (t[:, 3] + t[:, 0]), 0.5 * (t[:, 3] - t[:, 0])


@lru_cache(maxsize=64)
def _solver(q, steps):
    return HillSolver(q, steps)


def solver_for(q: Potential, x_max: float) -> HillSolver:
    """Shared solver accurate up to ``lam = x_max**2``."""
    return _solver(q, q.steps_for(max(float(x_max) ** 2, 1.0)))


def fundamental_values(q: Potential, lam: float) -> HillValues:
    """``theta(1), theta'(1), phi(1), phi'(1)`` at one energy."""
    return solver_for(q, math.sqrt(max(abs(lam), 1.0))).values(lam)


def f_derivative(q: Potential, lam: float, order: int = 1, solver: HillSolver | None = None):
    """First or second derivative of F in lam (Richardson-extrapolated central differences)."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if solver is None:
        solver = solver_for(q, math.sqrt(max(abs(lam), 1.0)) + 1.0)
    h = 1e-2 * max(1.0, math.sqrt(abs(lam)))
    if order == 2:
        h *= 4.0

    def central(step):
        fm, f0, fp = solver.F([lam - step, lam, lam + step])
        if order == 1:
            return (fp - fm) / (2.0 * step)
        return (fp - 2.0 * f0 + fm) / (step * step)

    d1, d2, d4 = central(h), central(h / 2.0), central(h / 4.0)
    r1 = (4.0 * d2 - d1) / 3.0
    r2 = (4.0 * d4 - d2) / 3.0
    return float((16.0 * r2 - r1) / 15.0)


@dataclass(frozen=True)
class ScanGrid:
    """Hill data on a uniform ``x`` grid, shared by every channel."""

    solver: HillSolver
    x: np.ndarray
    lam: np.ndarray
    theta1: np.ndarray
    phi1: np.ndarray
    F: np.ndarray
    Fminus: np.ndarray

    @property
    def step(self):
        return float(self.x[1] - self.x[0])

    @property
    def x_max(self):
        return float(self.x[-1])


def _lower_x(solver: HillSolver) -> float:
    lam = min(solver.q.lower_bound(), -1.0)
    for _ in range(200):
        t = solver.transfer([lam])[0]
        F = 0.5 * (t[3] + t[0])
        Fm = 0.5 * (t[3] - t[0])
        if 3.0 * F > abs(Fm) + 4.0 and t[2] > 0.0:
            break
        lam *= 1.5
    return -math.sqrt(-lam)


@lru_cache(maxsize=32)
def scan_grid(q: Potential, x_max: float, step: float = SCAN_STEP) -> ScanGrid:
    solver = solver_for(q, x_max)
    x_lo = _lower_x(solver)
    n = int(math.ceil((x_max - x_lo) / step))
    x = np.linspace(x_lo, x_max, n + 1)
    lam = lam_from_x(x)
    t = solver.transfer(lam)
    for arr in (x, lam, t):
        arr.setflags(write=False)
    F = 0.5 * (t[:, 3] + t[:, 0])
    Fm = 0.5 * (t[:, 3] - t[:, 0])
    F.setflags(write=False)
    Fm.setflags(write=False)
    return ScanGrid(solver, x, lam, t[:, 0], t[:, 2], F, Fm)


def scalar_fn(solver: HillSolver, combine):
    """Wrap ``combine(F, F_-, phi1, lam)`` as a scalar function of ``x``."""

    def f(x):
        lam = lam_from_x(float(x))
        t = solver.transfer([lam])[0]
        return float(combine(0.5 * (t[3] + t[0]), 0.5 * (t[3] - t[0]), t[2], lam))

    return f


def grid_fn(grid: ScanGrid, combine):
    return combine(grid.F, grid.Fminus, grid.phi1, grid.lam)


def zeros_of(grid: ScanGrid, combine, double_tol=DOUBLE_TOL):
    """Zeros (in ``x``) of ``combine(F, F_-, phi1, lam)`` on the grid span."""
    return find_zeros(grid.x, grid_fn(grid, combine), scalar_fn(grid.solver, combine), double_tol)


def eta_zeros(grid: ScanGrid):
    """Zeros of F as ``x`` values; they must all be simple."""
    zeros, _ = zeros_of(grid, lambda F, Fm, p, lam: F)
    if any(z.mult != 1 for z in zeros):
        raise InternalInconsistency("F has a multiple zero")
    return [z.x for z in zeros]


def split_regions(zeros, near, eta_x, expected, label):
    """Bin zeros into eta-regions and check the per-region count.

    ``expected[r]`` is the count for region ``r`` (with multiplicity).
    Regions beyond the last ``eta`` are incomplete and are dropped.  A
    region short by two is healed by the closest near miss below NEAR_TOL,
    which then counts as a double zero.
    """
    edges = np.asarray(eta_x)
    bins = [[] for _ in range(len(edges))]
    for z in expand(zeros):
        r = int(np.searchsorted(edges, z.x))
        if r < len(edges):
            bins[r].append(z)
    for r, want in enumerate(expected[: len(bins)]):
        got = len(bins[r])
        if got == want - 2:
            lo = edges[r - 1] if r > 0 else -math.inf
            cands = [m for m in near if lo < m.x < edges[r] and abs(m.value) <= NEAR_TOL]
            if cands:
                m = min(cands, key=lambda c: abs(c.value))
                z = Zero(m.x, 2)
                bins[r] = sorted(bins[r] + [z, z], key=lambda w: w.x)
                got = want
        if got != want:
            raise CountMismatch(f"{label}: region {r} has {got} zeros, expected {want}")
    return bins


def refine(fn, step=SCAN_STEP):
    """Call ``fn(step)`` with a finer grid after each CountMismatch."""
    err = None
    for i in range(REFINEMENTS + 1):
        try:
            return fn(step / 2 ** i)
        except CountMismatch as exc:
            err = exc
    raise err


@dataclass(frozen=True)
class HillLandmarks:
    """Dirichlet spectrum, zeros of F, band edges and effective masses.

    ``band_edges[n-1] = (lt_n^-, lt_n^+)``; ``gaps_tilde`` holds the same
    pairs with collapsed gaps kept as zero-length intervals; ``masses``
    lists ``(n, M_n^-, M_n^+)`` for open gaps only.
    """

    x_max: float
    lambda0_plus: float
    dirichlet: tuple
    eta: tuple
    band_edges: tuple
    masses: tuple

    @property
    def gaps_tilde(self):
        return self.band_edges

    def gap_open(self, n):
        lo, hi = self.band_edges[n - 1]
        return hi - lo > GAP_TOL

    def mass(self, n):
        for m, lo, hi in self.masses:
            if m == n:
                return lo, hi
        return None


def _landmarks(q: Potential, x_max: float, step: float) -> HillLandmarks:
    grid = scan_grid(q, x_max, step)
    eta_x = eta_zeros(grid)
    m = len(eta_x)
    up, near_up = zeros_of(grid, lambda F, Fm, p, lam: F - 1.0)
    dn, near_dn = zeros_of(grid, lambda F, Fm, p, lam: F + 1.0)
    bins_up = split_regions(up, near_up, eta_x, [1] + [2 if r % 2 == 0 else 0 for r in range(1, m)],
                            "F - 1")
    bins_dn = split_regions(dn, near_dn, eta_x, [0] + [2 if r % 2 == 1 else 0 for r in range(1, m)],
                            "F + 1")
    dz, near_d = zeros_of(grid, lambda F, Fm, p, lam: p)
    bins_d = split_regions(dz, near_d, eta_x, [0] + [1] * (m - 1), "phi1")

    lam0 = bins_up[0][0].lam
    edges = []
    for r in range(1, m):
        pair = bins_up[r] if r % 2 == 0 else bins_dn[r]
        edges.append((pair[0].lam, pair[1].lam))
    dirichlet = [bins_d[r][0].lam for r in range(1, m)]
    for n, (mu, (lo, hi)) in enumerate(zip(dirichlet, edges), start=1):
        tol = 1e-8 * max(1.0, abs(mu))
        if not lo - tol <= mu <= hi + tol:
            raise InternalInconsistency(f"mu_{n} = {mu!r} outside [{lo!r}, {hi!r}]")
    masses = []
    for n, (lo, hi) in enumerate(edges, start=1):
        if hi - lo > GAP_TOL:
            Ms = tuple(-grid.solver.F([e])[0] * f_derivative(q, e, 1, grid.solver) for e in (lo, hi))
            masses.append((n, *Ms))
    return HillLandmarks(
        x_max=float(x_max),
        lambda0_plus=lam0,
        dirichlet=tuple(dirichlet),
        eta=tuple(lam_from_x(e) for e in eta_x),
        band_edges=tuple(edges),
        masses=tuple(masses),
    )


@lru_cache(maxsize=32)
def hill_landmarks(q: Potential, x_max: float) -> HillLandmarks:
    """Landmarks for every index whose eta-region lies below ``x_max``."""
    return refine(lambda step: _landmarks(q, float(x_max), step))


def dirichlet_eigenvalues(q: Potential, x_max: float):
    """Zeros of phi(1, lam) with ``sqrt(lam) <= x_max``."""

    def run(step):
        grid = scan_grid(q, float(x_max), step)
        zeros, near = zeros_of(grid, lambda F, Fm, p, lam: p)
        mus = [z.lam for z in expand(zeros)]
        if any(z.mult != 1 for z in zeros):
            raise CountMismatch("double Dirichlet eigenvalue")
        if abs(len(mus) - math.floor(x_max / math.pi)) > 1:
            raise CountMismatch(f"{len(mus)} Dirichlet eigenvalues below x_max={x_max}")
        return mus

    return refine(run)


__all__ = [
    "HillValues",
    "HillSolver",
    "HillLandmarks",
    "ScanGrid",
    "fundamental_values",
    "f_derivative",
    "hill_landmarks",
    "dirichlet_eigenvalues",
    "scan_grid",
    "solver_for",
    "x_from_lam",
]
