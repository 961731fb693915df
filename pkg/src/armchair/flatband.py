"""Compactly supported eigenfunctions at Dirichlet energies.

At a Dirichlet eigenvalue ``mu`` every eigenfunction of a fibre operator
vanishes at the vertices, so on each edge it is ``C * phi(t, mu)`` with
``phi(0) = 0, phi'(0) = 1``.  Only the edge coefficients ``C_{n,j}`` need
to be stored.  Writing ``p = phi'(1, mu)`` and ``S = e^{2 pi i k / N}``,
two eigenfunctions supported in cells 0 and 1 exist per channel, and their
translates span the eigenspace.  The constructions split according to
whether ``(sin(pi k / N + a), p^2) = (0, 1)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import InternalInconsistency, NotAnEigenvalue, WrongBranch
from .hill import fundamental_values
from .lyapunov import ChannelParams
from .oracle import end_factors
from .potential import Potential

DIRICHLET_TOL = 1e-9
DEGENERATE_TOL = 1e-9


@dataclass(frozen=True)
class CompactEigenfunction:
    nu: int
    ch: ChannelParams
    mu: float
    phi: float
    kappa1t: complex
    kappa2t: complex
    coeffs: dict
    degenerate: bool
    phi_end: float = 0.0

    def shifted(self, n: int) -> "CompactEigenfunction":
        """The translate supported in cells ``n`` and ``n + 1``."""
        moved = {(m + n, j): c for (m, j), c in self.coeffs.items()}
        return CompactEigenfunction(self.nu, self.ch, self.mu, self.phi, self.kappa1t,
                                    self.kappa2t, moved, self.degenerate, self.phi_end)

    def coefficient(self, n, j):
        return self.coeffs.get((n, j), 0.0)

    def edge_data(self):
        """``(n, j) -> (f(0), f'(0), f(1), f'(1))`` on the support."""
        return {key: (0.0, c, c * self.phi_end, c * self.phi) for key, c in self.coeffs.items()}


def _sk(ch: ChannelParams):
    return cmath.exp(2j * math.pi * ch.k / ch.N)


def kappa_tilde(ch: ChannelParams, phi: float):
    w = _sk(ch) * cmath.exp(2j * ch.a)
    return 1.0 - w * phi ** 2, 1.0 - w * phi ** 4


def is_degenerate(ch: ChannelParams, phi: float) -> bool:
    return ch.s_zero and abs(phi * phi - 1.0) <= DEGENERATE_TOL


def _regular(nu, ph, S, a1, a2, k1, k2):
    a = a1 + a2
    E = lambda x: cmath.exp(1j * x)  # noqa: E731
    if nu == 1:
        return {
            (0, 2): -k2, (0, 5): k2, (0, 6): -k2 * ph * E(a2),
            (1, 1): k1 * ph * E(-a1), (1, 2): k1 * ph ** 2, (1, 3): k1 * ph ** 3 * E(a2),
            (1, 4): ph ** 2 * (ph ** 2 - 1.0) * E(a),
        }
    return {
        (0, 1): k1 * S * ph ** 2 * E(a2), (0, 2): S * ph * (ph ** 2 - 1.0) * E(a),
        (0, 3): k1 * E(-a1), (0, 4): k1 * ph, (0, 5): k2 * S * ph * E(a),
        (0, 6): -k2 * E(-a1), (1, 4): -k2 * ph,
    }


def _degenerate(nu, ph, a1, a2):
    a = a1 + a2
    E = lambda x: cmath.exp(1j * x)  # noqa: E731
    if nu == 1:
        return {
            (0, 1): 1.0, (0, 3): E(a), (0, 4): ph * E(a + a1), (0, 5): ph * E(a1),
            (0, 6): -E(a), (1, 4): -ph * E(a + a1),
        }
    return {(0, 2): 1.0, (0, 5): -1.0, (0, 6): ph * E(a2), (1, 4): E(a)}


def build_compact_eigenfunction(q: Potential, ch: ChannelParams, mu: float, nu: int) -> CompactEigenfunction:
    """Eigenfunction ``psi^(0, nu)`` of channel ``ch`` at the Dirichlet energy ``mu``."""
    if nu not in (1, 2):
        raise ValueError("nu must be 1 or 2")
    hv = fundamental_values(q, mu)
    if abs(hv.phi1) > DIRICHLET_TOL:
        raise NotAnEigenvalue(f"phi_1({mu!r}) = {hv.phi1:.3e} is not zero")
    ph = float(hv.phi1d)
    k1, k2 = kappa_tilde(ch, ph)
    if is_degenerate(ch, ph):
        C = _degenerate(nu, ph, ch.a1, ch.a2)
        degenerate = True
    else:
        if abs(k1) == 0.0 or abs(k2) == 0.0:
            raise InternalInconsistency("kappa-tilde vanishes outside the degenerate case")
        C = _regular(nu, ph, _sk(ch), ch.a1, ch.a2, k1, k2)
        degenerate = False
    C = {key: complex(v) for key, v in C.items() if v != 0}
    return CompactEigenfunction(nu, ch, float(mu), ph, complex(k1), complex(k2), C, degenerate,
                                float(hv.phi1))


def kirchhoff_residual(edge_data: dict, ch: ChannelParams) -> float:
    """Largest violation of the 8 continuity and 4 derivative conditions per cell.

    ``edge_data`` maps ``(n, j)`` to ``(f(0), f'(0), f(1), f'(1))``; edges
    that are absent count as zero.  Every cell from one below the smallest
    to one above the largest present index is checked.
    """
    if not edge_data:
        return 0.0
    p = end_factors(ch)
    zero = (0.0, 0.0, 0.0, 0.0)

    def g(n, j):
        return edge_data.get((n, j), zero)

    cells = [n for n, _ in edge_data]
    worst = 0.0
    for n in range(min(cells) - 1, max(cells) + 2):
        groups = (
            ([p[1] * g(n, 1)[2]], [g(n, 2)[0], g(n, 5)[0]],
             p[1] * g(n, 1)[3] - g(n, 2)[1] - g(n, 5)[1]),
            ([p[2] * g(n, 2)[2]], [g(n, 3)[0], g(n, 6)[0]],
             p[2] * g(n, 2)[3] - g(n, 3)[1] - g(n, 6)[1]),
            ([p[3] * g(n, 3)[2]], [g(n, 4)[0], p[6] * g(n - 1, 6)[2]],
             p[3] * g(n, 3)[3] - g(n, 4)[1] + p[6] * g(n - 1, 6)[3]),
            ([p[4] * g(n, 4)[2]], [g(n, 1)[0], p[5] * g(n - 1, 5)[2]],
             p[4] * g(n, 4)[3] - g(n, 1)[1] + p[5] * g(n - 1, 5)[3]),
        )
        for (base,), others, dsum in groups:
            for o in others:
                worst = max(worst, abs(base - o))
            worst = max(worst, abs(dsum))
    return float(worst)


@dataclass(frozen=True)
class ExpansionCoefficients:
    coeffs: dict

    def __getitem__(self, n):
        return self.coeffs.get(n, (0j, 0j))


def expansion_coefficients(derivs: dict, ch: ChannelParams, phi: float, degenerate: bool | None = None):
    """Coordinates of an eigenfunction in the basis of translated ``psi^(n, nu)``.

    ``derivs`` maps cell ``n`` to the two start derivatives the formula
    needs: ``(f'_{n,5}(0), f'_{n,6}(0))`` in the regular case and
    ``(f'_{n,1}(0), f'_{n,2}(0))`` in the degenerate one.  Passing
    ``degenerate`` that disagrees with ``(ch, phi)`` raises WrongBranch.
    """
    actual = is_degenerate(ch, phi)
    if degenerate is not None and degenerate != actual:
        raise WrongBranch(f"degenerate={degenerate} requested, channel is degenerate={actual}")
    if actual:
        return ExpansionCoefficients({n: (complex(d1), complex(d2)) for n, (d1, d2) in derivs.items()})
    k1, k2 = kappa_tilde(ch, phi)
    S, a, a1 = _sk(ch), ch.a, ch.a1
    den = k1 * k2
    out = {}
    for n, (d5, d6) in derivs.items():
        f1 = (d5 + S * phi * cmath.exp(1j * (a + a1)) * d6) / den
        f2 = -(cmath.exp(1j * a1) * d6 + phi * cmath.exp(1j * a) * d5) / den
        out[n] = (complex(f1), complex(f2))
    return ExpansionCoefficients(out)


def start_derivatives(edge_data: dict, degenerate: bool) -> dict:
    """Extract the per-cell inputs of :func:`expansion_coefficients` from edge data."""
    j1, j2 = (1, 2) if degenerate else (5, 6)
    cells = sorted({n for n, _ in edge_data})
    zero = (0.0, 0.0, 0.0, 0.0)
    return {n: (edge_data.get((n, j1), zero)[1], edge_data.get((n, j2), zero)[1]) for n in cells}
