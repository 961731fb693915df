import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from armchair.errors import NotAnEigenvalue, WrongBranch
from armchair.flatband import (build_compact_eigenfunction, expansion_coefficients, is_degenerate,
                               kappa_tilde, kirchhoff_residual, start_derivatives)
from armchair.hill import dirichlet_eigenvalues, fundamental_values
from armchair.lyapunov import channel_params
from armchair.potential import Potential

PI = math.pi


def test_regular_free_example():
    ch = channel_params(1, 2, 0.0, 0.0)
    psi = build_compact_eigenfunction(Potential.zero(), ch, PI ** 2, 1)
    assert psi.phi == pytest.approx(-1.0, abs=1e-12)
    assert not psi.degenerate
    assert psi.kappa1t == pytest.approx(2.0) and psi.kappa2t == pytest.approx(2.0)
    assert psi.coefficient(1, 4) == pytest.approx(0.0, abs=1e-12)
    assert psi.coefficient(0, 5) == pytest.approx(2.0, abs=1e-12)


def test_degenerate_free_example():
    ch = channel_params(0, 2, 0.0, 0.0)
    psi = build_compact_eigenfunction(Potential.zero(), ch, PI ** 2, 2)
    assert psi.degenerate
    assert psi.coefficient(0, 1) == 0.0
    assert psi.coefficient(0, 2) == pytest.approx(1.0)


def test_translation():
    ch = channel_params(1, 3, 0.2, 0.1)
    psi = build_compact_eigenfunction(Potential.zero(), ch, PI ** 2, 1)
    moved = psi.shifted(5)
    assert {(n - 5, j): c for (n, j), c in moved.coeffs.items()} == psi.coeffs


def test_not_an_eigenvalue():
    with pytest.raises(NotAnEigenvalue):
        build_compact_eigenfunction(Potential.zero(), channel_params(0, 2, 0.1, 0.0), 9.0, 1)


def test_zero_and_perturbed_residual():
    ch = channel_params(1, 2, 0.3, 0.2)
    assert kirchhoff_residual({}, ch) == 0.0
    assert kirchhoff_residual({(0, 1): (0.0, 0.0, 0.0, 0.0)}, ch) == 0.0
    psi = build_compact_eigenfunction(Potential.zero(), ch, PI ** 2, 2)
    data = psi.edge_data()
    assert kirchhoff_residual(data, ch) <= 1e-10
    key = next(iter(data))
    f0, d0, f1, d1 = data[key]
    data[key] = (f0, d0 + 1e-3, f1, d1)
    assert kirchhoff_residual(data, ch) >= 1e-4


@pytest.mark.parametrize("q", [Potential.zero(), Potential.fourier([1.0], [0.6]),
                               Potential.delta([(0.3, 5.0)])])
@pytest.mark.parametrize("N,a1,a2", [(2, 0.0, 0.0), (3, 0.21, 0.17), (4, 0.05, 0.34)])
def test_constructed_functions_solve_the_problem(q, N, a1, a2):
    for mu in dirichlet_eigenvalues(q, 7.0)[:2]:
        for k in range(N):
            ch = channel_params(k, N, a1, a2)
            for nu in (1, 2):
                psi = build_compact_eigenfunction(q, ch, mu, nu)
                assert kirchhoff_residual(psi.edge_data(), ch) <= 1e-10
                for f0, _, f1, _ in psi.edge_data().values():
                    assert abs(f0) <= 1e-9 and abs(f1) <= 1e-8
                assert {n for n, _ in psi.coeffs} <= {0, 1}


def test_profile_solves_the_ode():
    q = Potential.fourier([1.0], [0.6])
    mu = dirichlet_eigenvalues(q, 4.0)[0]
    # phi(t, mu) on a fine grid, then check -y'' + q y = mu y at interior points
    from scipy.integrate import solve_ivp
    sol = solve_ivp(lambda t, y: [y[1], (q(t) - mu) * y[0]], (0, 1), [0.0, 1.0],
                    dense_output=True, rtol=1e-12, atol=1e-14)
    assert abs(sol.y[0, -1]) <= 1e-8
    ts = np.linspace(0.05, 0.95, 10)
    h = 1e-4
    y = lambda t: sol.sol(t)[0]  # noqa: E731
    for t in ts:
        ypp = (y(t + h) - 2 * y(t) + y(t - h)) / h ** 2
        assert abs(-ypp + q(t) * y(t) - mu * y(t)) <= 1e-4 * max(1.0, abs(mu * y(t)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 5), st.integers(1, 6), st.floats(-2, 2), st.floats(-3, 3))
def test_degeneracy_dichotomy(k, N, a, phi):
    ch = channel_params(k, N, a, 0.0)
    k1, k2 = kappa_tilde(ch, phi)
    if is_degenerate(ch, phi):
        assert abs(k1 * k2) <= 1e-8
    else:
        assert abs(k1 * k2) > 0.0


def test_degenerate_dichotomy_hits():
    ch = channel_params(0, 3, 0.0, 0.0)
    assert is_degenerate(ch, -1.0) and is_degenerate(ch, 1.0)
    assert abs(kappa_tilde(ch, 1.0)[0]) == 0.0


def _rank2(q, ch, mu):
    a = build_compact_eigenfunction(q, ch, mu, 1)
    b = build_compact_eigenfunction(q, ch, mu, 2)
    keys = [(0, 1), (0, 2)] if a.degenerate else [(0, 5), (0, 6)]
    M = np.array([[a.coefficient(*kk), b.coefficient(*kk)] for kk in keys])
    return np.linalg.matrix_rank(M, tol=1e-10)


@pytest.mark.parametrize("k,N,a1,a2", [(0, 2, 0.0, 0.0), (1, 2, 0.0, 0.0), (1, 3, 0.2, 0.3)])
def test_independent_pair(k, N, a1, a2):
    assert _rank2(Potential.zero(), channel_params(k, N, a1, a2), PI ** 2) == 2


def _round_trip(q, ch, mu, m, nu):
    psi = build_compact_eigenfunction(q, ch, mu, nu).shifted(m)
    data = psi.edge_data()
    coeffs = expansion_coefficients(start_derivatives(data, psi.degenerate), ch, psi.phi)
    worst = 0.0
    for n in range(m - 2, m + 3):
        want = (1.0 if (n == m and nu == 1) else 0.0, 1.0 if (n == m and nu == 2) else 0.0)
        got = coeffs[n]
        worst = max(worst, abs(got[0] - want[0]), abs(got[1] - want[1]))
    return worst


@pytest.mark.parametrize("k,N,a1,a2", [(0, 2, 0.0, 0.0), (1, 2, 0.0, 0.0), (2, 3, 0.15, 0.1)])
@pytest.mark.parametrize("nu", [1, 2])
def test_round_trip(k, N, a1, a2, nu):
    q = Potential.fourier([0.7])
    ch = channel_params(k, N, a1, a2)
    for mu in dirichlet_eigenvalues(q, 7.0)[:2]:
        assert _round_trip(q, ch, mu, 3, nu) <= 1e-10


def test_expansion_zero_and_linear():
    ch = channel_params(1, 3, 0.2, 0.1)
    phi = -0.8
    assert expansion_coefficients({0: (0.0, 0.0)}, ch, phi)[0] == (0j, 0j)
    f = {0: (1.0 + 2j, -0.5), 1: (0.3, 0.1j)}
    g = {0: (0.2, 1.0), 1: (-1.0, 0.4)}
    al, be = 0.7 - 0.2j, 1.3
    mix = {n: (al * f[n][0] + be * g[n][0], al * f[n][1] + be * g[n][1]) for n in f}
    cf, cg, cm = (expansion_coefficients(x, ch, phi) for x in (f, g, mix))
    for n in f:
        for i in (0, 1):
            assert abs(cm[n][i] - (al * cf[n][i] + be * cg[n][i])) <= 1e-12


def test_wrong_branch():
    with pytest.raises(WrongBranch):
        expansion_coefficients({}, channel_params(0, 2, 0.0, 0.0), -1.0, degenerate=False)
    with pytest.raises(WrongBranch):
        expansion_coefficients({}, channel_params(1, 2, 0.0, 0.0), -1.0, degenerate=True)
