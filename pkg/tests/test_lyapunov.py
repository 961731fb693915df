import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from armchair.hill import fundamental_values
from armchair.lyapunov import (COMPLEX_PAIR, UNDEFINED, channel_params,
                               dminus_is_k_independent_check, lyapunov_values)
from armchair.potential import Potential


def test_channel_examples():
    c = channel_params(0, 3, 0.0, 0.0)
    assert (c.ck, c.sk) == (1.0, 0.0)
    c = channel_params(1, 2, 0.0, 0.0)
    assert (c.ck, c.sk) == (0.0, 1.0)
    assert channel_params(5, 3, 0.1, 0.0).k == 2


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 7), st.integers(1, 8), st.floats(-3, 3))
def test_shift_law(k, N, a):
    k = k % N
    lhs = channel_params(k, N, a + math.pi / N, 0.0)
    rhs = channel_params(k + 1, N, a, 0.0)
    # reducing k + 1 = N to 0 shifts the angle by pi, flipping both signs
    sign = 1.0 if k + 1 < N else -1.0
    assert lhs.ck == pytest.approx(sign * rhs.ck, abs=1e-14)
    assert lhs.sk == pytest.approx(sign * rhs.sk, abs=1e-14)
    assert lhs.ck ** 2 + lhs.sk ** 2 == pytest.approx(1.0, abs=1e-14)


def test_free_origin():
    lv = lyapunov_values(fundamental_values(Potential.zero(), 0.0), channel_params(0, 2, 0, 0))
    assert (lv.xi, lv.rho, lv.F1, lv.F2) == pytest.approx((4, 9, 7, 1), abs=1e-13)
    assert (lv.Dplus, lv.Dminus) == pytest.approx((0, 64), abs=1e-12)


def test_even_potential_values(q_cos):
    ch = channel_params(1, 3, 0.2, 0.1)
    lv = lyapunov_values(fundamental_values(q_cos, 7.0), ch)
    assert lv.h1 == pytest.approx(1.0, abs=1e-9) and lv.h2 == pytest.approx(1.0, abs=1e-9)
    assert lv.u == pytest.approx(-ch.s2, abs=1e-9)
    assert lv.v == pytest.approx(-ch.c2, abs=1e-9)


def test_c_zero(q_odd):
    ch = channel_params(1, 2, 0.0, 0.0)
    lv = lyapunov_values(fundamental_values(q_odd, 12.0), ch)
    assert lv.fk == UNDEFINED
    assert lv.rho == pytest.approx(lv.Fminus ** 2, rel=1e-12)
    assert lv.F1 - lv.F2 == pytest.approx(2 * abs(lv.Fminus), rel=1e-12)


def test_complex_marker():
    # F = 0 with s != 0 and F_- = 0 gives rho = -s^2 c^2 < 0
    lam = (math.pi / 2) ** 2
    lv = lyapunov_values(fundamental_values(Potential.zero(), lam), channel_params(0, 3, 0.4, 0.0))
    assert lv.rho < 0
    assert lv.F1 == COMPLEX_PAIR and lv.F2 == COMPLEX_PAIR
    assert lv.in_band() == (False, False)


lams = st.floats(-20, 400)
chans = st.tuples(st.integers(0, 5), st.integers(1, 6), st.floats(-2, 2), st.floats(-2, 2))


@settings(max_examples=60, deadline=None)
@given(lams, chans)
def test_invariants(lam, c):
    q = Potential.fourier([1.0, 0.5], [0.7, -0.4])
    hv = fundamental_values(q, lam)
    lv = lyapunov_values(hv, channel_params(*c))
    F9 = 9 * lv.F ** 2
    scale = max(1.0, F9 ** 2)
    assert lv.h1 <= lv.h2 and lv.g1 <= lv.g2
    assert abs((F9 - lv.g1) * (F9 - lv.g2) - lv.Dplus) <= 1e-8 * scale
    assert abs((F9 - lv.h1) * (F9 - lv.h2) - lv.Dminus) <= 1e-8 * scale
    if lv.rho >= 0:
        assert lv.F1 >= lv.F2
        assert ((lv.F1 - lv.F2) / 2) ** 2 == pytest.approx(lv.rho, abs=1e-9 * max(1, lv.rho))
        assert abs(lv.Dplus - 4 * (lv.F1 - 1) * (lv.F2 - 1)) <= 1e-9 * scale
        assert abs(lv.Dminus - 4 * (lv.F1 + 1) * (lv.F2 + 1)) <= 1e-9 * scale


@settings(max_examples=40, deadline=None)
@given(lams, st.integers(0, 5), st.integers(1, 6), st.floats(-2, 2))
def test_reflection_symmetry(lam, k, N, a):
    hv = fundamental_values(Potential.fourier([1.0], [0.3]), lam)
    A = lyapunov_values(hv, channel_params(k, N, a, 0.0))
    B = lyapunov_values(hv, channel_params(N - k, N, -a, 0.0))
    for name in ("xi", "rho", "g1", "g2", "u", "v", "Dplus", "Dminus"):
        assert getattr(A, name) == pytest.approx(getattr(B, name), abs=1e-12 * max(1, abs(getattr(A, name))))


def test_dminus_free_example():
    hv = fundamental_values(Potential.zero(), 2.0)
    assert dminus_is_k_independent_check(hv, 3, 0.4) <= 1e-10
    lv = lyapunov_values(hv, channel_params(1, 3, 0.4, 0.0))
    assert lv.Dminus == pytest.approx((9 * hv.F ** 2 - 1) ** 2, rel=1e-12)


def test_dminus_random_potential():
    rng = np.random.default_rng(3)
    q = Potential.samples(rng.normal(size=16))
    for lam in rng.uniform(-10, 300, size=100):
        hv = fundamental_values(q, lam)
        scale = max(1.0, (9 * hv.F ** 2) ** 2)
        assert dminus_is_k_independent_check(hv, 4, 0.37) <= 1e-9 * scale


def test_branch_monotone_in_band(q_cos):
    ch = channel_params(1, 3, 0.2, 0.0)
    d = 1e-5
    checked = 0
    for lam in np.linspace(0.5, 150, 300):
        lv = lyapunov_values(fundamental_values(q_cos, lam), ch)
        if lv.rho <= 1e-6 or abs(lv.F) < 1e-3:
            continue
        for nu in (1, 2):
            if abs(getattr(lv, f"F{nu}")) < 0.99:
                lo = lyapunov_values(fundamental_values(q_cos, lam - d), ch)
                hi = lyapunov_values(fundamental_values(q_cos, lam + d), ch)
                s1 = getattr(lv, f"F{nu}") - getattr(lo, f"F{nu}")
                s2 = getattr(hi, f"F{nu}") - getattr(lv, f"F{nu}")
                assert s1 * s2 > 0
                checked += 1
    assert checked > 50
