"""Armchair nanotube graph embedded in R^3 and its magnetic phases.

Edges are indexed by ``(n, j, k)``: cell ``n`` along the axis, edge type
``j = 1..6`` and angular position ``k`` modulo ``N``.  Every edge is a unit
segment ``r + t e`` with ``t`` in [0, 1].  The field is uniform along the
axis with vector potential ``A(x) = (B/2) (-x2, x1, 0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryUndefined


def _check_N(N):
    if int(N) != N or N < 2:
        raise GeometryUndefined(f"armchair geometry needs an integer N >= 2, got {N!r}")


def radii(N: int):
    """``(R, R1, R2, h, alpha, beta)`` for the N-fold tube."""
    _check_N(N)
    p1 = math.pi / N
    R = math.sqrt(math.cos(p1) + 1.25) / math.sin(p1)
    R1 = math.sqrt(R * R - 1.0)
    R2 = math.sqrt(4.0 * R * R - 1.0)
    h = math.sqrt(2.0 + R1 * R2 - 2.0 * R * R)
    beta = math.asin(1.0 / R)
    alpha = math.asin(0.5 / R)
    return R, R1, R2, h, alpha, beta


@dataclass(frozen=True)
class NanotubeGeometry:
    """Vertex and edge tables for cells ``n`` in ``cells`` (all ``j``, ``k``)."""

    N: int
    R: float
    R1: float
    R2: float
    h: float
    alpha: float
    beta: float
    cells: tuple
    vertices: dict = field(repr=False)
    edge_vectors: dict = field(repr=False)

    def endpoints(self, omega):
        r = self.vertices[omega]
        return r, r + self.edge_vectors[omega]

    def edges(self):
        """Edge indices in a fixed order: n, then j, then k."""
        return sorted(self.vertices)


def _ring(radius, angle, z):
    return np.array([radius * math.cos(angle), radius * math.sin(angle), z])


def build_geometry(N: int, cells=range(0, 1)) -> NanotubeGeometry:
    """Materialise the vertices ``r_w`` and edge vectors ``e_w`` for a cell window."""
    R, R1, R2, h, alpha, beta = radii(N)
    phi = lambda m: math.pi * m / N  # noqa: E731

    def r(n, j, k):
        k = k % N
        if j == 1:
            return _ring(R, phi(2 * k), 2 * n * h)
        if j == 4:
            return _ring(R, 2 * beta + phi(2 * k), 2 * n * h)
        if j in (2, 5):
            return _ring(R, beta - alpha + phi(2 * k), (2 * n + 1) * h)
        return _ring(R, phi(2 * k + 1), (2 * n + 1) * h)

    ends = {
        1: lambda n, k: r(n, 2, k),
        2: lambda n, k: r(n, 3, k),
        3: lambda n, k: r(n, 4, k),
        4: lambda n, k: r(n, 1, k + 1),
        5: lambda n, k: r(n + 1, 1, k),
        6: lambda n, k: r(n + 1, 4, k),
    }
    vertices = {}
    edge_vectors = {}
    for n in cells:
        for j in range(1, 7):
            for k in range(N):
                start = r(n, j, k)
                vertices[(n, j, k)] = start
                edge_vectors[(n, j, k)] = ends[j](n, k) - start
    return NanotubeGeometry(N, R, R1, R2, h, alpha, beta, tuple(cells), vertices, edge_vectors)


@dataclass(frozen=True)
class MagneticParams:
    B: float
    a1: float
    a2: float

    @property
    def a(self):
        return self.a1 + self.a2


def magnetic_phases(B: float, N: int) -> MagneticParams:
    """Phases ``a1 = B (R2 - R1) / 4`` and ``a2 = B R2 / 4`` picked up along unit edges."""
    _, R1, R2, *_ = radii(N)
    return MagneticParams(float(B), B * (R2 - R1) / 4.0, B * R2 / 4.0)


def field_for_phase(a: float, N: int) -> float:
    """Field amplitude B with total phase ``a1 + a2 = a``."""
    _, R1, R2, *_ = radii(N)
    return 4.0 * a / (2.0 * R2 - R1)


def project_vector_potential(geom: NanotubeGeometry, B: float, omega, t: float) -> float:
    """Tangential component ``(A(r + t e), e)`` of the vector potential on edge ``omega``."""
    r = geom.vertices[omega]
    e = geom.edge_vectors[omega]
    x = r + t * e
    A = 0.5 * B * np.array([-x[1], x[0], 0.0])
    return float(A @ e)
