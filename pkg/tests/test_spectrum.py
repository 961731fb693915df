import math

import numpy as np
import pytest

from armchair import intervals as iv
from armchair.errors import CountMismatch, EvennessRequired
from armchair.hill import fundamental_values, hill_landmarks, solver_for
from armchair.lyapunov import channel_params, in_band_mask
from armchair.potential import Potential
from armchair.spectrum import (
    ANTIPERIODIC, DOUBLE_AT_ETA, EMPTY, P_MIX, PERIODIC, REAL, RESONANCE, RHO_ZERO,
    asymptotic_endpoints, bands_of, channel_spectrum, classify_gap, gaps_full,
    locate_labeled_eigenvalues, small_a_predictions, theta_tilde,
)

PI = math.pi
A6 = PI / 6
# cos(sqrt(lam)) = +-1/3 and +-1/6, solved in closed form
AP_LO, AP_HI = math.acos(1 / 3) ** 2, math.acos(-1 / 3) ** 2
RES_LO, RES_HI = math.acos(1 / 6) ** 2, math.acos(-1 / 6) ** 2


@pytest.fixture(scope="module")
def free_res():
    return channel_spectrum(Potential.zero(), channel_params(0, 2, A6, 0.0), 8.0)


def test_free_labels():
    lab = locate_labeled_eigenvalues(Potential.zero(), channel_params(0, 2, 0.0, 0.0), 8.0)
    assert lab.pair(1, 1) == pytest.approx((AP_LO, AP_HI), abs=1e-10)
    assert lab.kappa[0] == pytest.approx((AP_LO, AP_HI), abs=1e-10)
    assert lab.pair(2, 0)[1] == pytest.approx(0.0, abs=1e-12)
    assert lab.p_max == 2 * lab.n_max


def test_even_potential_antiperiodic_pairs_coincide(q_cos):
    lab = locate_labeled_eigenvalues(q_cos, channel_params(1, 3, 0.2, 0.0), 10.0)
    for p in range(1, lab.p_max, 2):
        assert lab.pair(1, p) == pytest.approx(lab.pair(2, p), rel=1e-9)


def test_ordering_chains(q_odd):
    for k, a in ((0, 0.0), (1, 0.3), (0, 0.45)):
        lab = locate_labeled_eigenvalues(q_odd, channel_params(k, 2, a, 0.0), 12.0)
        lm = hill_landmarks(q_odd, 12.0)
        for nu in (1, 2):
            seq = [v for p in range(lab.p_max + 1) for v in lab.pair(nu, p)][1:]
            assert all(b >= a_ - 1e-9 * max(1, abs(a_)) for a_, b in zip(seq, seq[1:]))
        for n, eta in enumerate(lab.eta, start=1):
            lo, hi = lab.pair(1, 2 * n - 1)
            assert lo <= eta <= hi
            assert lm.eta[n - 1] == pytest.approx(eta, rel=1e-10)


def test_too_small_range():
    with pytest.raises(CountMismatch):
        locate_labeled_eigenvalues(Potential.zero(), channel_params(0, 2, 0.0, 0.0), 1.0)


def test_free_resonances(free_res):
    r = free_res.resonances[0]
    assert r.marker == REAL
    assert r.pair == pytest.approx((RES_LO, RES_HI), abs=1e-10)
    E = free_res.endpoints[(1, 1)]
    assert (E[0].tag, E[1].tag) == (RESONANCE, RESONANCE)
    assert (E[0].value, E[1].value) == pytest.approx((RES_LO, RES_HI), abs=1e-10)


def test_markers(q_cos):
    bs = channel_spectrum(q_cos, channel_params(0, 2, 0.0, 0.0), 10.0)
    assert all(r.marker == DOUBLE_AT_ETA for r in bs.resonances)
    for r, eta in zip(bs.resonances, bs.labeled.eta):
        assert r.pair == (eta, eta)
    bs = channel_spectrum(q_cos, channel_params(1, 2, 0.0, 0.0), 10.0)
    assert all(r.marker == RHO_ZERO and r.pair is None for r in bs.resonances)


def test_even_resonances_solve_reduced_equation(q_cos):
    ch = channel_params(1, 3, 0.1, 0.0)
    bs = channel_spectrum(q_cos, ch, 10.0)
    found = [z for r in bs.resonances for z in r.zeros]
    assert found
    for z in found:
        F = fundamental_values(q_cos, z).F
        assert abs(9 * F * F - ch.s2) <= 1e-8
    for z in found:
        assert any(lo - 1e-9 <= z <= hi + 1e-9 for lo, hi in bs.labeled.kappa)


def test_odd_potential_resonances_even_count(q_odd):
    for k, a in ((0, 0.2), (1, 0.35)):
        bs = channel_spectrum(q_odd, channel_params(k, 2, a, 0.0), 12.0)
        for r in bs.resonances:
            assert len(r.zeros) % 2 == 0


def test_endpoint_cases(q_cos):
    bs = channel_spectrum(q_cos, channel_params(0, 2, 0.0, 0.0), 10.0)
    for n, eta in enumerate(bs.labeled.eta, start=1):
        lo, hi = bs.endpoints[(1, 2 * n - 1)]
        assert lo.value == hi.value == eta
        assert bs.gaps[4 * n - 2].empty
    bs = channel_spectrum(q_cos, channel_params(1, 2, 0.0, 0.0), 10.0)
    for n, kap in enumerate(bs.labeled.kappa, start=1):
        assert bs.gaps[4 * n - 2].interval == pytest.approx(kap, abs=1e-12)
        assert bs.gaps[4 * n - 2].cls == ANTIPERIODIC


def test_free_zero_field_gaps():
    bs = channel_spectrum(Potential.zero(), channel_params(0, 2, 0.0, 0.0), 12.0)
    assert bs.gaps[0].interval == (-math.inf, pytest.approx(0.0, abs=1e-12))
    assert all(g.empty for g in bs.gaps[1:])


def test_resonance_gap_and_class(free_res):
    g = free_res.gaps[2]
    assert g.interval == pytest.approx((RES_LO, RES_HI), abs=1e-9)
    assert g.cls == RESONANCE
    assert classify_gap(g, free_res.labeled, free_res.resonances) == RESONANCE


def test_periodic_class(q_cos):
    bs = channel_spectrum(q_cos, channel_params(1, 3, 0.2, 0.0), 10.0)
    for g in bs.gaps:
        if g.index % 4 == 0 and g.index and not g.empty:
            assert g.cls == PERIODIC
            assert classify_gap(g, bs.labeled, bs.resonances) == PERIODIC
        if g.index % 2 == 1 and not g.empty:
            assert g.cls == P_MIX
    assert classify_gap(bs.gaps[4], bs.labeled, bs.resonances) == PERIODIC


def test_channel_comparison(q_cos):
    # smaller s_k^2: even gaps G_{k,4n} shrink, odd gaps grow
    x = 10.0
    small = channel_spectrum(q_cos, channel_params(0, 3, 0.1, 0.0), x)
    large = channel_spectrum(q_cos, channel_params(1, 3, 0.1, 0.0), x)
    assert small.ch.s2 < large.ch.s2
    tol = 1e-9
    for gs, gl in zip(small.gaps, large.gaps):
        if gs.index % 4 == 0 and gs.index and not gs.empty:
            assert gl.lo.value <= gs.lo.value + tol and gs.hi.value <= gl.hi.value + tol
        if gs.index % 2 == 1 and not gl.empty:
            assert gs.lo.value <= gl.lo.value + tol and gl.hi.value <= gs.hi.value + tol


def test_zero_field_even_potential(q_cos):
    full = gaps_full(q_cos, 2, 0.0, 0.0, 12.0)
    lm = full.landmarks
    for g in full.gaps[1:]:
        if g.index % 4 == 0:
            lo, hi = lm.band_edges[g.index // 4 - 1]
            assert g.interval == pytest.approx((lo, hi), abs=1e-7 * max(1, hi))
        else:
            assert g.empty
    assert full.violations == ()


def test_spectrum_is_complement_of_gaps(q_cos):
    full = gaps_full(q_cos, 2, 0.3, 0.0, 10.0)
    ac = full.ac_spectrum()
    for g in full.nonempty_gaps():
        mid = g.hi.value - 1e-6 if g.lo.value == -math.inf else 0.5 * (g.lo.value + g.hi.value)
        assert not iv.contains(ac, mid)
    assert full.flat_bands == tuple(mu for mu in full.landmarks.dirichlet if mu <= full.top)


def test_odd_gaps_close_away_from_origin(q_odd):
    bs = channel_spectrum(q_odd, channel_params(0, 2, 0.3, 0.0), 20.0)
    odd = [g for g in bs.gaps if g.index % 2 == 1]
    assert all(g.empty for g in odd[len(odd) // 2:])


def test_gap_growth_free():
    full = gaps_full(Potential.zero(), 2, A6, 0.0, 10 * PI + 3)
    assert full.gap(40).length >= 2 * full.gap(10).length > 0


def test_multiplicity_even_zero_field(q_cos):
    bs = channel_spectrum(q_cos, channel_params(0, 2, 0.0, 0.0), 10.0)
    mm = bs.multiplicity
    for n, eta in enumerate(bs.labeled.eta, start=1):
        lo, hi = bs.labeled.pair(1, 2 * n - 1)
        assert mm.at(0.5 * (lo + eta)) == 4 and mm.at(0.5 * (eta + hi)) == 4
    assert mm.n_minus == mm.n_plus == tuple(range(1, bs.labeled.n_max + 1))


def test_multiplicity_c_zero(q_cos):
    bs = channel_spectrum(q_cos, channel_params(1, 2, 0.0, 0.0), 10.0)
    assert bs.multiplicity.unstable == ()
    assert {m for *_, m in bs.multiplicity.intervals} <= {2, 4}


@pytest.mark.parametrize("k,a", [(0, 0.0), (0, 0.3), (1, 0.2)])
def test_mg_relation(q_odd, k, a):
    bs = channel_spectrum(q_odd, channel_params(k, 2, a, 0.0), 12.0)
    assert bs.mg and all(row[-1] for row in bs.mg)


@pytest.mark.parametrize("q", [Potential.fourier([1.0]), Potential.fourier([1.0, 0.5], [0.7, -0.4])])
@pytest.mark.parametrize("k,a", [(0, 0.0), (0, 0.4), (1, 0.25)])
def test_band_union_matches_branch_membership(q, k, a):
    ch = channel_params(k, 2, a, 0.0)
    bs = channel_spectrum(q, ch, 12.0)
    p = bs.labeled.p_max
    top = min(bs.endpoints[(1, p)][0].value, bs.endpoints[(2, p)][0].value)
    bands = iv.normalize([(lo, hi) for _, _, lo, hi in bands_of(bs.endpoints, p)])
    ends = np.array([v for lo, hi in bands for v in (lo, hi)])
    lam = np.linspace(-1.0, top, 20001)
    F, Fm = solver_for(q, 13.0).FF(lam)
    b1, b2 = in_band_mask(F, Fm, ch)
    oracle = b1 | b2
    mine = np.array([iv.contains(bands, x) for x in lam])
    bad = lam[oracle != mine]
    assert 1 - bad.size / lam.size >= 0.999
    for x in bad:
        assert np.min(np.abs(ends - x)) <= 1e-6 * max(1.0, abs(x))


def test_theta_tilde():
    assert theta_tilde(0, 0.0) == 0.0
    assert theta_tilde(1, A6) == pytest.approx(math.asin(1 / 6), abs=1e-15)
    assert theta_tilde(1, A6) == pytest.approx(0.1674481, abs=1e-7)
    assert theta_tilde(0, A6) == pytest.approx(math.acos(math.sqrt(5 + 2 * math.sqrt(3)) / 3), abs=1e-15)
    assert asymptotic_endpoints(3, 0, 0.0, 0.5) == pytest.approx(((3 * PI) ** 2 + 0.5,) * 2)
    with pytest.raises(ValueError):
        asymptotic_endpoints(0, 0, 0.1)


def test_small_field_predictions(q_cos):
    lm = hill_landmarks(q_cos, 8.0)
    pred = small_a_predictions(q_cos, 1, 0.0, lm)
    assert pred["E4n"] == pytest.approx(lm.band_edges[0])
    assert pred["E4n_2"] == pytest.approx((lm.eta[0],) * 2)
    with pytest.raises(EvennessRequired):
        small_a_predictions(Potential.fourier([1.0], [0.2]), 1, 0.1, lm)


def test_small_field_free_closed_form():
    q = Potential.zero()
    lm = hill_landmarks(q, 8.0)
    a = 1e-3
    # F = cos x has F'' = 1/(4 pi^2 n^2) at (pi n)^2 up to sign
    for n in (1, 2):
        lo, hi = small_a_predictions(q, n, a, lm)["E4n"]
        d = math.sqrt(2) * a / (3 * math.sqrt(1 / (4 * (PI * n) ** 2)))
        assert (hi - lo) / 2 == pytest.approx(d, rel=1e-5)
