"""Band edges, gaps, multiplicities and gap classes of the fibre operators.

Zero sets are labelled region by region, where region ``r`` is the energy
interval between consecutive zeros ``eta_r < eta_{r+1}`` of F (region 0
lies below ``eta_1``).  Per branch index ``nu``:

* periodic points solve ``9 F^2 = g_nu``; region 0 holds ``lam_{nu,0}^+``
  and region ``n`` holds the pair ``lam_{nu,2n}^{-,+}``;
* antiperiodic points solve ``9 F^2 = h_nu`` and do not depend on the
  channel; the pair ``lam_{nu,2n-1}^{-,+}`` straddles ``eta_n``;
* resonances are zeros of ``rho`` in the closure of
  ``kappa_n = (lam_{1,2n-1}^-, lam_{1,2n-1}^+)``.

Both ``9 F^2 - g_nu`` and ``9 F^2 - h_nu`` are split into factors that are
smooth even where ``F_-`` changes sign, so every zero is found as a zero of
a smooth function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import intervals as iv
from .errors import (
    ClassificationFailure,
    CountMismatch,
    EvennessRequired,
    InternalInconsistency,
)
from .hill import (
    HillLandmarks,
    eta_zeros,
    f_derivative,
    hill_landmarks,
    refine,
    scan_grid,
    split_regions,
    zeros_of,
)
from .lyapunov import ChannelParams, channel_params
from .potential import Potential
from .roots import expand, x_from_lam

INF = math.inf
GAP_TOL = 1e-10
MATCH_TOL = 1e-8
TIE_FM = 1e-9
KAPPA_TOL_X = 1e-9
MG_TOL = 1e-9

PERIODIC = "periodic"
ANTIPERIODIC = "antiperiodic"
RESONANCE = "resonance"
P_MIX = "p-mix"
R_MIX = "r-mix"
EMPTY = "empty"

RHO_ZERO = "rho_zero"
DOUBLE_AT_ETA = "double_at_eta"
NONE = "none"
REAL = "real"


def containment_tol(lam):
    """Tolerance for order relations between independently located points."""
    return 1e-7 * max(1.0, abs(lam))


# -- zero sets -----------------------------------------------------------------


@lru_cache(maxsize=64)
def _eta(q, x_max, step):
    return tuple(eta_zeros(scan_grid(q, x_max, step)))


def _g_factor(c2, sgn, sigma):
    def comb(F, Fm, p, lam):
        g = 5.0 + Fm * Fm + sgn * 2.0 * np.sqrt(Fm * Fm + 4.0 * c2)
        return 3.0 * F - sigma * np.sqrt(np.maximum(g, 0.0))

    return comb


@lru_cache(maxsize=256)
def _periodic(q, x_max, step, c2):
    """``{nu: {p: (minus, plus)}}`` for even ``p``; ``p = 0`` has minus = -inf."""
    grid = scan_grid(q, x_max, step)
    eta_x = _eta(q, x_max, step)
    m = len(eta_x)
    out = {}
    for nu, sgn in ((1, -1.0), (2, 1.0)):
        bins = {}
        for sigma in (1.0, -1.0):
            zs, near = zeros_of(grid, _g_factor(c2, sgn, sigma))
            want = [1 if sigma > 0 else 0] + [
                2 if (r % 2 == 0) == (sigma > 0) else 0 for r in range(1, m)
            ]
            bins[sigma] = split_regions(zs, near, eta_x, want, f"periodic nu={nu}")
        pairs = {0: (-INF, bins[1.0][0][0].lam)}
        for r in range(1, m):
            b = bins[1.0 if r % 2 == 0 else -1.0][r]
            pairs[2 * r] = (b[0].lam, b[1].lam)
        out[nu] = pairs
    return out


def _h_factor(tau, t):
    def comb(F, Fm, p, lam):
        return 3.0 * F - tau - t * Fm

    return comb


@lru_cache(maxsize=64)
def _antiperiodic(q, x_max, step):
    """``{nu: {p: (minus, plus)}}`` for odd ``p``; the same for every channel.

    The four factors ``3F - tau - t F_-`` cover both ``9F^2 = h_1`` and
    ``9F^2 = h_2``.  A zero of the ``(tau, t)`` factor belongs to ``h_2``
    when ``tau t F_- > 0`` and to ``h_1`` when it is negative; where ``F_-``
    vanishes the two factors with equal ``tau`` coincide and one zero goes
    to each index.
    """
    grid = scan_grid(q, x_max, step)
    solver = grid.solver
    eta_x = _eta(q, x_max, step)
    m = len(eta_x)
    zs_nu = {1: [], 2: []}
    near_nu = {1: [], 2: []}
    for tau in (1.0, -1.0):
        for t in (1.0, -1.0):
            zs, near = zeros_of(grid, _h_factor(tau, t))
            for items, dest in ((zs, zs_nu), (near, near_nu)):
                for z in items:
                    fm = solver.FF([z.lam])[1][0]
                    if abs(fm) <= TIE_FM:
                        nu = 2 if t > 0 else 1
                    else:
                        nu = 2 if tau * t * fm > 0 else 1
                    dest[nu].append(z)
    out = {}
    for nu in (1, 2):
        zs = sorted(zs_nu[nu], key=lambda z: z.x)
        bins = split_regions(zs, near_nu[nu], eta_x, [1] + [2] * (m - 1), f"antiperiodic nu={nu}")
        out[nu] = {2 * n - 1: (bins[n - 1][-1].lam, bins[n][0].lam) for n in range(1, m)}
    return out


@lru_cache(maxsize=256)
def _rho_zeros(q, x_max, step, c2, s2):
    grid = scan_grid(q, x_max, step)
    zs, _ = zeros_of(grid, lambda F, Fm, p, lam: (9.0 * F * F - s2) * c2 + s2 * Fm * Fm)
    return tuple(expand(zs))


# -- labelled data ---------------------------------------------------------------


@dataclass(frozen=True)
class LabeledEigenvalues:
    """Periodic and antiperiodic points of one channel, labelled by ``(nu, p)``.

    ``n_max`` is the largest complete index: pairs exist for
    ``p = 0 .. 2 n_max``.  ``top`` is the energy of ``eta_{n_max + 1}``,
    the end of the labelled range.
    """

    ch: ChannelParams
    x_max: float
    step: float
    n_max: int
    eta: tuple
    top: float
    periodic: dict = field(repr=False)
    antiperiodic: dict = field(repr=False)

    def pair(self, nu, p):
        return (self.periodic if p % 2 == 0 else self.antiperiodic)[nu][p]

    @property
    def kappa(self):
        return tuple(self.antiperiodic[1][2 * n - 1] for n in range(1, self.n_max + 1))

    @property
    def p_max(self):
        return 2 * self.n_max


def _labeled(q, ch, x_max, step):
    eta_x = _eta(q, x_max, step)
    m = len(eta_x)
    if m < 2:
        raise CountMismatch(f"x_max={x_max} covers fewer than two zeros of F")
    return LabeledEigenvalues(
        ch=ch,
        x_max=float(x_max),
        step=step,
        n_max=m - 1,
        eta=tuple(float(np.sign(x) * x * x) for x in eta_x[: m - 1]),
        top=float(np.sign(eta_x[-1]) * eta_x[-1] ** 2),
        periodic=_periodic(q, x_max, step, ch.c2),
        antiperiodic=_antiperiodic(q, x_max, step),
    )


def locate_labeled_eigenvalues(q: Potential, ch: ChannelParams, x_max: float) -> LabeledEigenvalues:
    """Periodic and antiperiodic eigenvalues with ``sqrt(lam) <= x_max``."""
    return refine(lambda step: _labeled(q, ch, float(x_max), step))


@dataclass(frozen=True)
class Resonance:
    n: int
    marker: str
    pair: tuple | None
    zeros: tuple = ()


def locate_resonances(q: Potential, ch: ChannelParams, labeled: LabeledEigenvalues):
    """Real zeros of ``rho`` in each closed ``kappa_n``; ``r^-`` is the least, ``r^+`` the largest."""
    out = []
    if ch.c_zero:
        return tuple(Resonance(n, RHO_ZERO, None) for n in range(1, labeled.n_max + 1))
    if ch.s_zero:
        return tuple(Resonance(n, DOUBLE_AT_ETA, (e, e), (e, e))
                     for n, e in enumerate(labeled.eta, start=1))
    zeros = _rho_zeros(q, labeled.x_max, labeled.step, ch.c2, ch.s2)
    for n, (lo, hi) in enumerate(labeled.kappa, start=1):
        xlo, xhi = x_from_lam(lo) - KAPPA_TOL_X, x_from_lam(hi) + KAPPA_TOL_X
        inside = tuple(z.lam for z in zeros if xlo <= z.x <= xhi)
        if len(inside) % 2:
            raise CountMismatch(f"odd number ({len(inside)}) of resonances in kappa_{n}")
        if inside:
            out.append(Resonance(n, REAL, (inside[0], inside[-1]), inside))
        else:
            out.append(Resonance(n, NONE, None))
    return tuple(out)


# -- endpoints and gaps ------------------------------------------------------------


@dataclass(frozen=True)
class Endpoint:
    value: float
    tag: str
    k: int = 0


def v_evaluator(q: Potential, ch: ChannelParams, x_max: float):
    """``v_k(lam) = |F_-(lam)| - c_k^2`` on the solver shared with the scan."""
    solver = scan_grid(q, float(x_max)).solver

    def v(lam):
        return abs(solver.FF([lam])[1][0]) - ch.c2

    return v


def band_endpoints(labeled: LabeledEigenvalues, resonances, v) -> dict:
    """Endpoints ``E[(nu, p)] = (E^-, E^+)`` as :class:`Endpoint` pairs.

    ``E_{1,p}`` for odd ``p`` is the antiperiodic point when ``v >= 0``
    there and the resonance on the same side otherwise.
    """
    k = labeled.ch.k
    E = {}
    for nu in (1, 2):
        for p, (lo, hi) in labeled.periodic[nu].items():
            if p <= labeled.p_max:
                E[(nu, p)] = (Endpoint(lo, PERIODIC, k), Endpoint(hi, PERIODIC, k))
    for p, (lo, hi) in labeled.antiperiodic[2].items():
        E[(2, p)] = (Endpoint(lo, ANTIPERIODIC, k), Endpoint(hi, ANTIPERIODIC, k))
    for p, (lo, hi) in labeled.antiperiodic[1].items():
        res = resonances[(p + 1) // 2 - 1]
        ends = []
        for side, lam in ((0, lo), (1, hi)):
            if labeled.ch.c_zero or v(lam) >= 0.0:
                ends.append(Endpoint(lam, ANTIPERIODIC, k))
            elif res.pair is not None:
                ends.append(Endpoint(res.pair[side], RESONANCE, k))
            else:
                raise InternalInconsistency(
                    f"v < 0 at lam_(1,{p}) but no resonance in kappa_{(p + 1) // 2}"
                )
        E[(1, p)] = tuple(ends)
    return E


@dataclass(frozen=True)
class GapRecord:
    """Gap ``index`` with endpoints ``lo < hi`` (or collapsed when empty)."""

    index: int
    lo: Endpoint
    hi: Endpoint
    cls: str = ""

    @property
    def empty(self):
        return self.lo.value >= self.hi.value - GAP_TOL

    @property
    def interval(self):
        return (self.lo.value, self.hi.value)

    @property
    def length(self):
        return max(0.0, self.hi.value - self.lo.value)

    def contains(self, lam, tol=0.0):
        return self.lo.value - tol <= lam <= self.hi.value + tol


_NEG = Endpoint(-INF, PERIODIC)


def _nu_gap(E, nu, n):
    lo, hi = E[(nu, n)]
    return (_NEG if n == 0 else lo), hi


def _pairing(index):
    """Branch gap indices whose intersection gives channel gap ``index``.

    Returns ``(n1, n2, prefer_lo, prefer_hi)``; on ties the endpoint of the
    preferred branch is reported.
    """
    if index == 0:
        return 0, 0, 2, 2
    if index % 2 == 0:
        n = index // 2
        pref = 2 if n % 2 == 0 else 1
        return n, n, pref, pref
    if index % 4 == 1:
        n = (index + 3) // 4
        return 2 * n - 2, 2 * n - 1, 2, 1
    n = (index + 1) // 4
    return 2 * n, 2 * n - 1, 1, 2


def _pick(a, b, pref, larger):
    if a.value == b.value:
        return a if pref == 1 else b
    if larger:
        return a if a.value > b.value else b
    return a if a.value < b.value else b


def gaps_channel(E: dict, p_max: int) -> tuple:
    """Channel gaps ``G_{k,n}`` for ``n = 0 .. 2 p_max`` (empty ones included)."""
    out = []
    for index in range(0, 2 * p_max + 1):
        n1, n2, plo, phi = _pairing(index)
        lo1, hi1 = _nu_gap(E, 1, n1)
        lo2, hi2 = _nu_gap(E, 2, n2)
        g = GapRecord(index, _pick(lo1, lo2, plo, True), _pick(hi1, hi2, phi, False))
        out.append(GapRecord(index, g.lo, g.hi, _class_from_tags(g)))
    return tuple(out)


def _class_from_tags(g: GapRecord):
    if g.empty:
        return EMPTY
    tags = {g.hi.tag} if g.lo.value == -INF else {g.lo.tag, g.hi.tag}
    if len(tags) == 1:
        return tags.pop()
    if tags == {ANTIPERIODIC, PERIODIC}:
        return P_MIX
    if tags == {ANTIPERIODIC, RESONANCE}:
        return R_MIX
    raise ClassificationFailure(f"gap {g.index} joins a periodic point and a resonance")


def classify_gap(gap: GapRecord, labeled: LabeledEigenvalues, resonances, tol=MATCH_TOL):
    """Class of a gap from the zero sets its endpoints belong to.

    Each finite endpoint is matched against the periodic points, the
    antiperiodic points and the resonances of its channel; the endpoint's
    own provenance wins when several sets match.
    """
    if gap.empty:
        return EMPTY
    sets = {
        PERIODIC: [v for nu in (1, 2) for pr in labeled.periodic[nu].values() for v in pr],
        ANTIPERIODIC: [v for nu in (1, 2) for pr in labeled.antiperiodic[nu].values() for v in pr],
        RESONANCE: [z for r in resonances for z in r.zeros],
    }
    tags = []
    for e in (gap.lo, gap.hi):
        if e.value == -INF:
            continue
        scale = tol * max(1.0, abs(e.value))
        hits = [name for name, vals in sets.items() if any(abs(e.value - v) <= scale for v in vals)]
        if not hits:
            raise ClassificationFailure(f"gap {gap.index}: endpoint {e.value!r} matches no zero set")
        tags.append(e.tag if e.tag in hits else hits[0])
    probe = GapRecord(gap.index, Endpoint(gap.lo.value, tags[0] if gap.lo.value != -INF else PERIODIC),
                      Endpoint(gap.hi.value, tags[-1]))
    cls = _class_from_tags(probe)
    expected = _expected_classes(gap.index, labeled.ch)
    if expected is not None and cls not in expected:
        raise InternalInconsistency(f"gap {gap.index} classified {cls}, expected one of {expected}")
    return cls


def _expected_classes(index, ch):
    if index % 4 == 0:
        return {PERIODIC}
    if index % 2 == 1:
        return {P_MIX}
    if ch.c_zero:
        return {ANTIPERIODIC}
    if ch.s_zero:
        return {ANTIPERIODIC}
    return {ANTIPERIODIC, RESONANCE, R_MIX}


# -- multiplicity ----------------------------------------------------------------


@dataclass(frozen=True)
class MultiplicityMap:
    """Multiplicity of the a.c. spectrum of one channel.

    ``intervals`` lists ``(lo, hi, m)`` with ``m`` in {2, 4}, covering the
    a.c. spectrum below the labelled range.  The defining sets are kept for
    inspection: ``stable[nu]`` is ``{h_nu <= 9F^2 <= g_nu}`` and
    ``unstable`` is the union of the closed ``kappa^{-,+}`` pieces that
    carry both branches.
    """

    intervals: tuple
    stable: dict
    unstable: tuple
    kappa_pm: tuple
    n_minus: tuple
    n_plus: tuple

    def at(self, lam):
        for lo, hi, m in self.intervals:
            if lo <= lam <= hi:
                return m
        return 0


def _stable_set(labeled, nu):
    seq = []
    for p in range(0, labeled.p_max + 1):
        lo, hi = labeled.pair(nu, p)
        seq.append((lo, hi))
    return [(seq[j][1], seq[j + 1][0]) for j in range(len(seq) - 1)]


def bands_of(E, p_max):
    """Bands ``S_{nu,n} = [E_{nu,n-1}^+, E_{nu,n}^-]`` as ``(nu, n, lo, hi)``."""
    out = []
    for nu in (1, 2):
        for n in range(1, p_max + 1):
            out.append((nu, n, E[(nu, n - 1)][1].value, E[(nu, n)][0].value))
    return out


def multiplicity_map(labeled, resonances, E, v) -> MultiplicityMap:
    ch = labeled.ch
    S1 = iv.normalize(_stable_set(labeled, 1))
    S2 = iv.normalize(_stable_set(labeled, 2))
    kappa_pm = []
    n_minus, n_plus = [], []
    unstable = []
    if not ch.c_zero:
        for n, (lo, hi) in enumerate(labeled.kappa, start=1):
            res = resonances[n - 1]
            for side, lam, bucket in ((0, lo, n_minus), (1, hi, n_plus)):
                if v(lam) < 0.0 and res.pair is not None:
                    bucket.append(n)
                    piece = (lo, res.pair[0]) if side == 0 else (res.pair[1], hi)
                    kappa_pm.append((n, "-+"[side], *piece))
                    unstable.append(piece)
    sigma = iv.union([(lo, hi) for _, _, lo, hi in bands_of(E, labeled.p_max)], tol=0.0)
    four = iv.union(iv.intersect(S1, S2, tol=GAP_TOL), iv.normalize(unstable, tol=GAP_TOL))
    four = iv.intersect(four, sigma, tol=GAP_TOL)
    two = iv.subtract(sigma, four, tol=GAP_TOL)
    ivs = sorted([(a, b, 4) for a, b in four] + [(a, b, 2) for a, b in two])
    return MultiplicityMap(tuple(ivs), {1: tuple(S1), 2: tuple(S2)}, tuple(iv.normalize(unstable)),
                           tuple(kappa_pm), tuple(n_minus), tuple(n_plus))


def mg_checks(E, p_max, u):
    """Check ``E_{2,p}^- < E_{1,p-1}^+  <=>  u(E_{2,p}^-) > 0`` and its mirror image.

    Both sides are thresholded at MG_TOL (relative for the energy
    difference), so equal endpoints and ``u = 0`` count as "not strict".
    Returns ``(p, side, strict, u_positive, ok)`` rows.
    """
    rows = []
    for p in range(1, p_max, 2):
        for side in ("-", "+"):
            if side == "-":
                a, b = E[(2, p)][0].value, E[(1, p - 1)][1].value
                uval = u(a)
            else:
                a, b = E[(1, p + 1)][0].value, E[(2, p)][1].value
                uval = u(E[(2, p)][1].value)
            strict = b - a > MG_TOL * max(1.0, abs(a))
            upos = uval > MG_TOL
            rows.append((p, side, strict, upos, strict == upos))
    return rows


# -- channel and full operator ----------------------------------------------------


@dataclass(frozen=True)
class BandStructure:
    ch: ChannelParams
    labeled: LabeledEigenvalues
    resonances: tuple
    endpoints: dict = field(repr=False)
    bands: tuple = ()
    gaps: tuple = ()
    flat_bands: tuple = ()
    multiplicity: MultiplicityMap | None = None
    mg: tuple = ()
    violations: tuple = ()


def _hill_gap_violation(g: GapRecord, lm: HillLandmarks, label):
    """Message when an open Hill gap is not inside ``g`` (index ``4n``), else None."""
    lo, hi = lm.band_edges[g.index // 4 - 1]
    if hi - lo <= GAP_TOL:
        return None
    if g.lo.value <= lo + containment_tol(lo) and hi - containment_tol(hi) <= g.hi.value:
        return None
    return f"Hill gap {g.index // 4} ({lo!r}, {hi!r}) not inside {label} {g.interval!r}"


def _check_channel(bs: BandStructure, lm: HillLandmarks):
    """Raise on broken containments; return the Hill-gap ones as messages.

    The Hill-gap containment fails for potentials whose ``|F_-|`` is large
    (then ``g_2 > 9`` and periodic points sit inside the Hill gap), so it is
    reported instead of raised.
    """
    lab = bs.labeled
    found = []
    for g in bs.gaps:
        if g.index == 0:
            continue
        n = (g.index + 2) // 4
        if g.index % 4 == 0:
            msg = _hill_gap_violation(g, lm, f"G_(k={bs.ch.k},{g.index})")
            if msg:
                found.append(msg)
        elif g.empty:
            continue
        elif g.index % 4 == 2:
            klo, khi = lab.kappa[n - 1]
            if g.lo.value < klo - containment_tol(klo) or g.hi.value > khi + containment_tol(khi):
                raise InternalInconsistency(f"G_(k,{g.index}) not inside kappa_{n}")
    for n, eta in enumerate(lab.eta, start=1):
        lo, hi = bs.endpoints[(1, 2 * n - 1)]
        if not lo.value - containment_tol(eta) <= eta <= hi.value + containment_tol(eta):
            raise InternalInconsistency(f"eta_{n} outside [E_(1,{2 * n - 1})^-, E^+]")
    return tuple(found)


def _raise_if(strict, violations):
    if strict and violations:
        raise InternalInconsistency("; ".join(violations))


def channel_spectrum(q: Potential, ch: ChannelParams, x_max: float, check=True,
                     strict=False) -> BandStructure:
    """Everything about one fibre operator below ``x_max``.

    With ``check`` the structural containments are verified; Hill-gap
    containment failures land in ``violations`` unless ``strict`` is set.
    """
    x_max = float(x_max)
    labeled = locate_labeled_eigenvalues(q, ch, x_max)
    res = refine(lambda step: locate_resonances(q, ch, labeled))
    solver = scan_grid(q, x_max, labeled.step).solver

    def v(lam):
        return abs(solver.FF([lam])[1][0]) - ch.c2

    def u(lam):
        return abs(solver.FF([lam])[1][0]) - ch.s2

    E = band_endpoints(labeled, res, v)
    gaps = gaps_channel(E, labeled.p_max)
    mult = multiplicity_map(labeled, res, E, v)
    mus = tuple(mu for mu in hill_landmarks(q, x_max).dirichlet if mu <= labeled.top)
    bs = BandStructure(ch, labeled, res, E, tuple(bands_of(E, labeled.p_max)), gaps, mus, mult,
                       tuple(mg_checks(E, labeled.p_max, u)))
    if check:
        found = _check_channel(bs, hill_landmarks(q, x_max))
        _raise_if(strict, found)
        bs = replace(bs, violations=found)
    return bs


@dataclass(frozen=True)
class FullSpectrum:
    """Spectrum of the direct sum over channels.

    ``gaps[n]`` is the intersection over ``k`` of the channel gaps with the
    same index; ``flat_bands`` are the Dirichlet eigenvalues, each an
    eigenvalue of infinite multiplicity.
    """

    N: int
    a1: float
    a2: float
    x_max: float
    channels: tuple
    gaps: tuple
    flat_bands: tuple
    top: float
    landmarks: HillLandmarks
    violations: tuple = ()

    @property
    def a(self):
        return self.a1 + self.a2

    def nonempty_gaps(self):
        return [g for g in self.gaps if not g.empty]

    def ac_spectrum(self):
        """Closed intervals of a.c. spectrum below ``top``."""
        gaps = [g.interval for g in self.nonempty_gaps()]
        return tuple(iv.subtract([(-INF, self.top)], gaps))

    def gap(self, index):
        return self.gaps[index]


def merge_gaps(channel_gaps) -> tuple:
    """Index-wise intersection of the channel gap lists."""
    n = min(len(g) for g in channel_gaps)
    out = []
    for index in range(n):
        recs = [g[index] for g in channel_gaps]
        lo = max((r.lo for r in recs), key=lambda e: e.value)
        hi = min((r.hi for r in recs), key=lambda e: e.value)
        g = GapRecord(index, lo, hi)
        out.append(GapRecord(index, lo, hi, _class_from_tags(g)))
    return tuple(out)


def gaps_full(q: Potential, N: int, a1: float, a2: float, x_max: float, check=True,
              strict=False) -> FullSpectrum:
    """Gaps and spectrum of the full operator (all ``N`` channels)."""
    x_max = float(x_max)
    chans = tuple(channel_spectrum(q, channel_params(k, N, a1, a2), x_max, check, strict)
                  for k in range(N))
    gaps = merge_gaps([c.gaps for c in chans])
    lm = hill_landmarks(q, x_max)
    top = min(c.labeled.top for c in chans)
    full = FullSpectrum(int(N), float(a1), float(a2), x_max, chans, gaps,
                        tuple(mu for mu in lm.dirichlet if mu <= top), top, lm)
    if check:
        found = _check_full(full)
        _raise_if(strict, found)
        full = replace(full, violations=found)
    return full


def _check_full(full: FullSpectrum):
    lm = full.landmarks
    lab = full.channels[0].labeled
    found = []
    for g in full.gaps:
        if g.index == 0:
            continue
        if g.index % 4 == 0:
            msg = _hill_gap_violation(g, lm, f"G_{g.index}")
            if msg:
                found.append(msg)
        elif g.index % 4 == 2:
            n = (g.index + 2) // 4
            klo, khi = lab.kappa[n - 1]
            eta = lab.eta[n - 1]
            tol = containment_tol(eta)
            if not g.empty and (g.lo.value < klo - tol or g.hi.value > khi + tol):
                raise InternalInconsistency(f"G_{g.index} not inside kappa_{n}")
            if not min(g.lo.value, g.hi.value) - tol <= eta <= max(g.lo.value, g.hi.value) + tol:
                raise InternalInconsistency(f"eta_{n} outside the closure of G_{g.index}")
    return tuple(found)


# -- asymptotics -------------------------------------------------------------------


def theta_tilde(m: int, a: float) -> float:
    if m == 0:
        return math.acos(min(1.0, math.sqrt(5.0 + 4.0 * abs(math.cos(a))) / 3.0))
    if m == 1:
        return math.asin(math.sin(a) / 3.0)
    raise ValueError("m must be 0 or 1")


def asymptotic_endpoints(n: int, m: int, a: float, q0: float = 0.0):
    """Leading high-energy terms of ``E_{4n-2m}^{-,+}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    th = theta_tilde(m, a)
    base = math.pi * (n - 0.5 * m)
    return (base - th) ** 2 + q0, (base + th) ** 2 + q0


def small_a_predictions(q: Potential, n: int, a: float, landmarks: HillLandmarks):
    """Leading small-field terms for ``E_{4n}^{-,+}`` and ``E_{4n-2}^{-,+}``.

    Open Hill gaps move by ``a^2 / (9 M^{-,+})``; collapsed ones split as
    ``lt^+ -/+ sqrt(2) a / (3 sqrt|F''|)``; the gap around ``eta_n`` opens
    linearly with slope ``1 / (3 |F'(eta_n)|)``.
    """
    if not q.is_even():
        raise EvennessRequired("small-field expansions need an even potential")
    lo, hi = landmarks.band_edges[n - 1]
    solver = scan_grid(q, landmarks.x_max).solver
    mass = landmarks.mass(n)
    if mass is not None:
        e4 = (lo + a * a / (9.0 * mass[0]), hi + a * a / (9.0 * mass[1]))
    else:
        f2 = abs(f_derivative(q, hi, 2, solver))
        d = math.sqrt(2.0) * a / (3.0 * math.sqrt(f2))
        e4 = (hi - d, hi + d)
    eta = landmarks.eta[n - 1]
    d = a / (3.0 * abs(f_derivative(q, eta, 1, solver)))
    return {"E4n": e4, "E4n_2": (eta - d, eta + d)}
