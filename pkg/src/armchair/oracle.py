"""Independent checks of the closed-form reduction.

``assemble_monodromy`` builds the 4x4 period map of one fibre operator
straight from the vertex conditions, using only the scalar Hill solutions
on each edge.  ``floquet_fd_spectrum`` discretises the periodic cell by
finite differences and never touches a Hill discriminant.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from .errors import NearDirichletSingularity
from .hill import HillSolver, solver_for
from .lyapunov import ChannelParams, lyapunov_values
from .potential import Potential

COND_LIMIT = 1e12
JJ = np.array([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]], dtype=float)


def end_factors(ch: ChannelParams):
    """Phase picked up at the far end of each edge type ``j = 1..6``."""
    sk = cmath.exp(2j * math.pi * ch.k / ch.N)
    e1, e2 = cmath.exp(1j * ch.a1), cmath.exp(1j * ch.a2)
    return {1: e1, 2: e2, 3: e1, 4: e2 * sk, 5: 1.0 / e1, 6: e1}


# Vertex table for one cell: (incoming edges from this cell, incoming edges
# from the previous cell, outgoing edges).  Continuity sets every factored
# end value and every start value equal; the derivative condition is
# sum(p_j f_j'(1)) = sum(f_out'(0)).
VERTICES = (
    ((1,), (), (2, 5)),
    ((2,), (), (3, 6)),
    ((3,), (6,), (4,)),
    ((4,), (5,), (1,)),
)


@dataclass(frozen=True)
class MonodromyMatrix:
    lam: float
    entries: np.ndarray
    cond: float

    @property
    def det(self):
        return complex(np.linalg.det(self.entries))

    def symplectic_residual(self):
        M = self.entries
        return float(np.max(np.abs(M.T @ JJ @ M - JJ)))

    def multipliers(self):
        return np.linalg.eigvals(self.entries)


def _edge_rows(th, thd, ph, phd):
    """Rows giving (f(0), f'(0), f(1), f'(1)) from coefficients (A, B)."""
    return np.array([[1.0, 0.0], [0.0, 1.0], [th, ph], [thd, phd]])


def assemble_monodromy(q: Potential, ch: ChannelParams, lam: float,
                       solver: HillSolver | None = None) -> MonodromyMatrix:
    """Period map of ``(y5, y6, y5', y6')`` at ``t = 1`` across one cell."""
    if solver is None:
        solver = solver_for(q, math.sqrt(max(abs(lam), 1.0)) + 1.0)
    th, thd, ph, phd = solver.transfer([lam])[0]
    p = end_factors(ch)
    rows = _edge_rows(th, thd, ph, phd)

    def coeffs(j, which):
        # row over the 12 unknowns for f_j evaluated per ``which`` in 0..3
        r = np.zeros(12, dtype=complex)
        r[2 * (j - 1): 2 * j] = rows[which]
        return r

    eqs, rhs = [], []
    for inc, prev, out in VERTICES:
        # each row: (unknown part, dependence on the 4 data entries)
        vals = [(p[j] * coeffs(j, 2), np.zeros(4, dtype=complex)) for j in inc]
        for j in prev:
            d = np.zeros(4, dtype=complex)
            d[0 if j == 5 else 1] = p[j]
            vals.append((np.zeros(12, dtype=complex), d))
        vals += [(coeffs(j, 0), np.zeros(4, dtype=complex)) for j in out]
        base_u, base_d = vals[0]
        for u, d in vals[1:]:
            eqs.append(base_u - u)
            rhs.append(d - base_d)
        u = sum(p[j] * coeffs(j, 3) for j in inc) - sum(coeffs(j, 1) for j in out)
        d = np.zeros(4, dtype=complex)
        for j in prev:
            d[2 if j == 5 else 3] = -p[j]
        eqs.append(u)
        rhs.append(d)
    A = np.array(eqs)
    Bm = np.array(rhs)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NearDirichletSingularity(f"vertex system condition number {cond:.3g} at lam={lam!r}")
    X = np.linalg.solve(A, Bm)  # (12, 4): coefficients for each data column
    M = np.empty((4, 4), dtype=complex)
    for col in range(4):
        c = X[:, col]
        M[0, col] = rows[2] @ c[8:10]
        M[1, col] = rows[2] @ c[10:12]
        M[2, col] = rows[3] @ c[8:10]
        M[3, col] = rows[3] @ c[10:12]
    return MonodromyMatrix(float(lam), M, float(cond))


def monodromy_identity_residuals(q: Potential, ch: ChannelParams, lams, taus=(2.0, 1.0 + 1.0j)):
    """Largest residuals of the structural identities over an energy grid.

    Keys: ``det``, ``symplectic``, ``trace`` (Tr M_k against the branch sum),
    ``trace0`` (Tr M_0 against F), ``trace_sq`` (Tr M_k^2), ``trace0_sq``,
    ``charpoly`` (det(M - tau) against the product built from F_{k,1}, F_{k,2})
    and ``dplus`` (the same at tau = 1).
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    solver = solver_for(q, math.sqrt(max(float(np.max(np.abs(lams))), 1.0)) + 1.0)
    ch0 = ChannelParams(0, ch.N, 0.0, 0.0, 1.0, 0.0)
    res = dict.fromkeys(("det", "symplectic", "trace0", "trace", "trace0_sq", "trace_sq",
                         "charpoly", "dplus"), 0.0)
    for lam in lams:
        M = assemble_monodromy(q, ch, lam, solver)
        M0 = assemble_monodromy(q, ch0, lam, solver)
        hv = solver.values(lam)
        F, Fm = hv.F, hv.Fminus
        lv = lyapunov_values(hv, ch)
        s2, c2 = ch.s2, ch.c2
        t0 = np.trace(M0.entries)
        tk = np.trace(M.entries)
        t0sq = np.trace(M0.entries @ M0.entries)
        tksq = np.trace(M.entries @ M.entries)
        T0 = 2.0 * (9.0 * F * F - Fm * Fm - 1.0)
        scale = max(1.0, abs(T0))
        upd = {
            "det": abs(M.det - 1.0),
            "symplectic": M.symplectic_residual() / max(1.0, np.max(np.abs(M.entries)) ** 2),
            "trace0": abs(t0 - T0) / scale,
            "trace": abs(tk - (T0 - 4.0 * s2)) / scale,
            "trace0_sq": abs(t0sq - (72.0 * F * F + 0.5 * T0 * T0 - 4.0)) / scale ** 2,
            "trace_sq": abs(tksq - (72.0 * F * F + 0.5 * T0 * T0 - 4.0 - 8.0 * s2 * T0
                                    - 16.0 * s2 * c2)) / scale ** 2,
        }
        xi, rho = lv.xi, lv.rho
        r = cmath.sqrt(rho)
        F1, F2 = xi + r, xi - r
        for tau in taus:
            lhs = np.linalg.det(M.entries - tau * np.eye(4))
            rhs = (tau * tau - 2.0 * F1 * tau + 1.0) * (tau * tau - 2.0 * F2 * tau + 1.0)
            upd["charpoly"] = max(upd.get("charpoly", 0.0), abs(lhs - rhs) / scale ** 2)
        lhs = np.linalg.det(M.entries - np.eye(4))
        upd["dplus"] = abs(lhs - lv.Dplus) / scale ** 2
        for key, val in upd.items():
            res[key] = max(res[key], float(val))
    return res


# -- finite-difference Floquet discretisation ----------------------------------------

# (start vertex, end vertex, crosses into the next cell) for edges 1..6
_EDGE_ENDS = {1: (3, 0, False), 2: (0, 1, False), 3: (1, 2, False),
              4: (2, 3, False), 5: (0, 3, True), 6: (1, 2, True)}
FD_IMAG_TOL = 1e-6


def _fd_matrix(qt, ch: ChannelParams, m: int, theta: float):
    """Schur-reduced FD matrix on the interior nodes of the six edges."""
    if m < 50:
        raise ValueError("m must be >= 50")
    h = 1.0 / m
    n_in = m - 1
    n = 6 * n_in
    p = end_factors(ch)
    shift = cmath.exp(1j * theta)
    beta = {j: (shift if _EDGE_ENDS[j][2] else 1.0) / p[j] for j in range(1, 7)}

    A = np.zeros((n, n), dtype=complex)
    Aw = np.zeros((n, 4), dtype=complex)
    inv = 1.0 / (h * h)
    for j in range(1, 7):
        s, e, _ = _EDGE_ENDS[j]
        o = (j - 1) * n_in
        idx = np.arange(n_in)
        A[o + idx, o + idx] = 2.0 * inv + qt
        A[o + idx[1:], o + idx[:-1]] = -inv
        A[o + idx[:-1], o + idx[1:]] = -inv
        Aw[o, s] += -inv
        Aw[o + n_in - 1, e] += -inv * beta[j]

    # Kirchhoff rows: C_w w + C_u u = 0, one-sided second-order derivatives
    Cw = np.zeros((4, 4), dtype=complex)
    Cu = np.zeros((4, n), dtype=complex)
    d = 1.0 / (2.0 * h)
    for j in range(1, 7):
        s, e, nxt = _EDGE_ENDS[j]
        o = (j - 1) * n_in
        # -f'(0) at the start vertex
        Cw[s, s] -= -3.0 * d
        Cu[s, o] -= 4.0 * d
        Cu[s, o + 1] -= -1.0 * d
        # +p_j f'(1) at the end vertex, seen from the cell it enters
        w = p[j] * (1.0 / shift if nxt else 1.0)
        Cw[e, e] += w * 3.0 * d * beta[j]
        Cu[e, o + n_in - 1] += w * -4.0 * d
        Cu[e, o + n_in - 2] += w * 1.0 * d
    return A - Aw @ np.linalg.solve(Cw, Cu)


def _eigvals_window(A, lo, hi, k0=24):
    """All eigenvalues of ``A`` in the disc spanned by ``[lo, hi]``, via shift-invert Arnoldi.

    ``k`` doubles until the farthest returned eigenvalue lies outside the
    disc, which certifies that none inside it was missed.
    """
    n = A.shape[0]
    S = sps.csc_matrix(A)
    sigma, radius = 0.5 * (lo + hi), 0.5 * (hi - lo)
    k = min(k0, n - 2)
    while True:
        vals = spla.eigs(S, k=k, sigma=sigma, which="LM", return_eigenvectors=False)
        if k >= n - 2 or np.max(np.abs(vals - sigma)) > radius:
            return vals
        k = min(2 * k, n - 2)
        if k == n - 2:
            return sla.eigvals(A)


def floquet_fd_spectrum(q: Potential, ch: ChannelParams, m: int, thetas, lam_max: float = 30.0,
                        method: str = "dense"):
    """Eigenvalues ``<= lam_max`` of the discretised fibre operator for each quasi-momentum.

    Each edge carries ``m - 1`` interior nodes; the four vertex values are
    eliminated through the Kirchhoff rows.  The reduced matrix is not
    Hermitian, so eigenvalues with a relative imaginary part above
    ``FD_IMAG_TOL`` are dropped and real parts are returned.

    ``method="dense"`` computes the full spectrum; ``"sparse"`` uses
    shift-invert Arnoldi on ``[min q - 10, lam_max]`` and is much faster for
    large ``m``.
    """
    if q.variant == "delta":
        raise ValueError("finite differences need a pointwise potential")
    if method not in ("dense", "sparse"):
        raise ValueError("method must be 'dense' or 'sparse'")
    t = np.arange(1, m) / m
    qt = np.asarray(q(t), dtype=float)
    lo = float(np.min(qt)) - 10.0
    out = []
    for theta in thetas:
        A = _fd_matrix(qt, ch, m, float(theta))
        ev = sla.eigvals(A) if method == "dense" else _eigvals_window(A, lo, float(lam_max))
        keep = np.abs(ev.imag) <= FD_IMAG_TOL * (1.0 + np.abs(ev.real))
        vals = np.sort(ev.real[keep])
        out.append(vals[vals <= lam_max])
    return out
