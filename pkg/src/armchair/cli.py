"""Command line entry point.

Every table is CSV with ``#`` metadata lines in front: the command, the
full configuration and every numerical tolerance in effect.  Numbers are
written with 15 significant digits, so repeated runs give identical bytes.
Exit codes: 0 success, 1 numerical failure, 2 usage error.  Files written
by a failing command are removed.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, flatband, hill, lyapunov, oracle, potential, roots, spectrum
from .errors import ArmchairError
from .geometry import build_geometry, magnetic_phases, radii
from .hill import dirichlet_eigenvalues, hill_landmarks, scan_grid
from .lyapunov import COMPLEX_PAIR, channel_params, lyapunov_arrays
from .potential import Potential, load_potential

THREADS_ENV = "ARMCHAIR_THREADS"
DIGITS = 15

TOLERANCES = {
    "scan_step_x": hill.SCAN_STEP,
    "scan_refinements": hill.REFINEMENTS,
    "root_xtol": roots.XTOL,
    "double_zero_tol": roots.DOUBLE_TOL,
    "near_miss_tol": hill.NEAR_TOL,
    "gap_empty_tol": spectrum.GAP_TOL,
    "endpoint_match_tol": spectrum.MATCH_TOL,
    "fminus_tie_tol": spectrum.TIE_FM,
    "kappa_membership_tol_x": spectrum.KAPPA_TOL_X,
    "mg_indeterminate_tol": spectrum.MG_TOL,
    "containment_rel_tol": 1e-7,
    "channel_snap_tol": lyapunov.SNAP,
    "integrator_rel_tol": potential.STEP_TOL,
    "integrator_max_steps": potential.MAX_STEPS,
    "even_tol": potential.EVEN_TOL,
    "monodromy_cond_limit": oracle.COND_LIMIT,
    "fd_imag_tol": oracle.FD_IMAG_TOL,
    "dirichlet_tol": flatband.DIRICHLET_TOL,
    "degenerate_tol": flatband.DEGENERATE_TOL,
}

VERIFY_TOL = 1e-8
FD_BAND_TOL = 5e-3


class UsageError(Exception):
    pass


# -- formatting and output ---------------------------------------------------------


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if v == 0.0:
            return "0"
        return format(v, f".{DIGITS}g")
    return str(v)


class Output:
    """Collects files written by one command so a failure can delete them."""

    def __init__(self):
        self.written = []

    def table(self, path, meta, blocks):
        """Write ``blocks = [(name, header, rows), ...]`` atomically."""
        lines = [f"# {k}={fmt(v)}" for k, v in meta]
        for i, (name, header, rows) in enumerate(blocks):
            if i:
                lines.append("")
            if name:
                lines.append(f"# block={name}")
            lines.append(",".join(header))
            lines.extend(",".join(fmt(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
        try:
            with os.fdopen(fd, "w", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.remove(tmp)
            raise
        self.written.append(path)

    def rollback(self):
        for path in self.written:
            if os.path.exists(path):
                os.remove(path)
        self.written.clear()


def meta_for(args, extra=()):
    meta = [("command", args.command), ("version", __version__)]
    for key in sorted(vars(args)):
        if key in ("command", "func"):
            continue
        val = getattr(args, key)
        if val is not None:
            meta.append((f"config.{key}", val))
    meta.extend(extra)
    meta.extend((f"tol.{k}", v) for k, v in TOLERANCES.items())
    return meta


# -- argument helpers ----------------------------------------------------------------


def parse_range(text, kind=float, parts=(2, 3)):
    bits = text.split(":")
    if len(bits) not in parts:
        raise UsageError(f"bad range {text!r}")
    try:
        vals = [kind(b) for b in bits]
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}") from exc
    return vals


def frange(lo, hi, step):
    if step <= 0 or hi < lo:
        raise UsageError("range needs lo <= hi and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


def read_potential(path):
    if path is None:
        return Potential.zero()
    try:
        return load_potential(path)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read potential {path!r}: {exc}") from exc


def resolve_field(args):
    """``(a1, a2, B)`` from exactly one of ``--B`` or ``--a1/--a2``."""
    has_b = getattr(args, "B", None) is not None
    has_a = getattr(args, "a1", None) is not None or getattr(args, "a2", None) is not None
    if has_b == has_a:
        raise UsageError("give exactly one of --B or --a1/--a2")
    if has_b:
        if args.N < 2:
            raise UsageError("--B needs the nanotube geometry, so N >= 2")
        mp = magnetic_phases(args.B, args.N)
        return mp.a1, mp.a2, args.B
    if args.a1 is None or args.a2 is None:
        raise UsageError("abstract mode needs both --a1 and --a2")
    if args.N < 1:
        raise UsageError("N must be >= 1")
    return args.a1, args.a2, None


def workers():
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise UsageError(f"{THREADS_ENV} must be an integer") from exc


def pmap(fn, items):
    n = workers()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(n) as ex:
        return list(ex.map(fn, items))


# -- subcommands -----------------------------------------------------------------------


def cmd_geometry(args, out):
    lo, hi = parse_range(args.cells, int, (2,))
    if hi < lo:
        raise UsageError("--cells needs lo <= hi")
    if args.N < 2:
        raise UsageError("geometry needs N >= 2")
    g = build_geometry(args.N, range(lo, hi + 1))
    mp = magnetic_phases(args.B, args.N)
    R, R1, R2, h, *_ = radii(args.N)
    rows = []
    for key in g.edges():
        r0, r1 = g.endpoints(key)
        rows.append((*key, *r0, *r1))
    extra = [("R", R), ("R1", R1), ("R2", R2), ("h", h), ("a1", mp.a1), ("a2", mp.a2), ("a", mp.a)]
    out.table(args.out, meta_for(args, extra),
              [(None, ["n", "j", "k", "x1", "y1", "z1", "x2", "y2", "z2"], rows)])


def cmd_hill(args, out):
    q = read_potential(args.potential)
    grid = scan_grid(q, args.xmax)
    lm = hill_landmarks(q, args.xmax)
    rows = list(zip(grid.x, grid.lam, grid.F, grid.Fminus))
    blocks = [
        ("scan", ["x", "lambda", "F", "F_minus"], rows),
        ("dirichlet", ["n", "mu"], list(enumerate(lm.dirichlet, start=1))),
        ("eta", ["n", "eta"], list(enumerate(lm.eta, start=1))),
        ("band_edges", ["n", "lower", "upper"],
         [(n, lo, hi) for n, (lo, hi) in enumerate(lm.band_edges, start=1)]),
        ("masses", ["n", "M_minus", "M_plus"], list(lm.masses)),
    ]
    out.table(args.out, meta_for(args, [("lambda0_plus", lm.lambda0_plus)]), blocks)


def cmd_lyapunov(args, out):
    q = read_potential(args.potential)
    lo, hi, step = parse_range(args.xrange, float, (3,))
    xs = np.array(frange(lo, hi, step))
    lams = np.sign(xs) * xs * xs
    solver = hill.solver_for(q, max(abs(lo), abs(hi), 1.0))
    F, Fm = solver.FF(lams)
    ch = channel_params(args.k, args.N, args.a, 0.0)
    d = lyapunov_arrays(F, Fm, ch)
    rows = []
    for i in range(len(xs)):
        real = d["rho"][i] >= 0.0
        f1 = d["F1"][i] if real else COMPLEX_PAIR
        f2 = d["F2"][i] if real else COMPLEX_PAIR
        rows.append((xs[i], lams[i], F[i], Fm[i], d["xi"][i], d["rho"][i], f1, f2,
                     real and abs(d["F1"][i]) <= 1.0, real and abs(d["F2"][i]) <= 1.0))
    header = ["x", "lambda", "F", "F_minus", "xi", "rho", "F1", "F2", "F1_in_band", "F2_in_band"]
    out.table(args.out, meta_for(args, [("c_k", ch.ck), ("s_k", ch.sk)]), [(None, header, rows)])


def _field_meta(a1, a2, B):
    return [("a1", a1), ("a2", a2), ("a", a1 + a2)] + ([("B", B)] if B is not None else [])


def _gap_rows(gaps):
    return [(g.index, g.lo.value, g.hi.value, g.cls) for g in gaps]


def cmd_bands(args, out):
    q = read_potential(args.potential)
    a1, a2, B = resolve_field(args)
    full = spectrum.gaps_full(q, args.N, a1, a2, args.xmax)
    meta = meta_for(args, _field_meta(a1, a2, B) + [("top", full.top)])
    os.makedirs(args.out, exist_ok=True)
    grid = scan_grid(q, args.xmax)
    keep = grid.lam <= full.top
    for bs in full.channels:
        ch = bs.ch
        d = lyapunov_arrays(grid.F[keep], grid.Fminus[keep], ch)
        real = d["rho"] >= 0.0
        rows = [(x, lam, f1 if r else COMPLEX_PAIR, f2 if r else COMPLEX_PAIR,
                 r and abs(f1) <= 1.0, r and abs(f2) <= 1.0)
                for x, lam, f1, f2, r in zip(grid.x[keep], grid.lam[keep], d["F1"], d["F2"], real)]
        out.table(os.path.join(args.out, f"channel_{ch.k}_grid.csv"), meta + [("k", ch.k)],
                  [(None, ["x", "lambda", "F1", "F2", "F1_in_band", "F2_in_band"], rows)])
        ends = []
        for (nu, p), pair in sorted(bs.endpoints.items()):
            for side, e in zip(("-", "+"), pair):
                if p == 0 and side == "-":
                    continue
                ends.append((nu, p, side, e.value, e.tag))
        out.table(os.path.join(args.out, f"channel_{ch.k}_endpoints.csv"), meta + [("k", ch.k)],
                  [(None, ["nu", "p", "side", "value", "provenance"], ends)])
        out.table(os.path.join(args.out, f"channel_{ch.k}_gaps.csv"), meta + [("k", ch.k)],
                  [(None, ["n", "lo", "hi", "class"], _gap_rows(bs.gaps)),
                   ("multiplicity", ["lo", "hi", "multiplicity"], list(bs.multiplicity.intervals))])
    out.table(os.path.join(args.out, "gaps.csv"), meta,
              [(None, ["n", "lo", "hi", "class"], _gap_rows(full.gaps)),
               ("flat_bands", ["n", "mu"], list(enumerate(full.flat_bands, start=1)))])


def cmd_gaps(args, out):
    q = read_potential(args.potential)
    a1, a2, B = resolve_field(args)
    full = spectrum.gaps_full(q, args.N, a1, a2, args.xmax)
    out.table(args.out, meta_for(args, _field_meta(a1, a2, B) + [("top", full.top)]),
              [(None, ["n", "lo", "hi", "class"], _gap_rows(full.gaps)),
               ("flat_bands", ["n", "mu"], list(enumerate(full.flat_bands, start=1)))])


def cmd_sweep(args, out):
    q = read_potential(args.potential)
    if args.N < 2:
        raise UsageError("--B needs the nanotube geometry, so N >= 2")
    lo, hi, step = parse_range(args.B, float, (3,))
    fields = frange(lo, hi, step)

    def run(B):
        mp = magnetic_phases(B, args.N)
        return B, mp, spectrum.gaps_full(q, args.N, mp.a1, mp.a2, args.xmax)

    rows = []
    for B, mp, full in pmap(run, fields):
        for g in full.gaps:
            rows.append((B, mp.a, g.index, g.lo.value, g.hi.value, g.cls))
    out.table(args.out, meta_for(args), [(None, ["B", "a", "n", "lo", "hi", "class"], rows)])


def cmd_flatband(args, out):
    q = read_potential(args.potential)
    a1, a2, B = resolve_field(args)
    if args.n_dirichlet < 1:
        raise UsageError("--n-dirichlet must be >= 1")
    mus = dirichlet_eigenvalues(q, math.pi * (args.n_dirichlet + 1.5))
    if len(mus) < args.n_dirichlet:
        raise ArmchairError(f"only {len(mus)} Dirichlet eigenvalues located")
    mu = mus[args.n_dirichlet - 1]
    ch = channel_params(args.k, args.N, a1, a2)
    ef = flatband.build_compact_eigenfunction(q, ch, mu, args.nu)
    res = flatband.kirchhoff_residual(ef.edge_data(), ch)
    rows = [(n, j, c.real, c.imag) for (n, j), c in sorted(ef.coeffs.items())]
    extra = _field_meta(a1, a2, B) + [
        ("mu", mu), ("phi", ef.phi), ("kappa1t_re", ef.kappa1t.real), ("kappa1t_im", ef.kappa1t.imag),
        ("kappa2t_re", ef.kappa2t.real), ("kappa2t_im", ef.kappa2t.imag),
        ("degenerate", ef.degenerate), ("kirchhoff_residual", res)]
    out.table(args.out, meta_for(args, extra), [(None, ["n", "j", "re_C", "im_C"], rows)])


def _verify_grid(q, x_max, count=50):
    lm = hill_landmarks(q, x_max)
    lams = np.linspace(lm.lambda0_plus - 2.0, x_max * x_max, count)
    mus = np.array(lm.dirichlet)
    if mus.size:
        lams = [lam for lam in lams if np.min(np.abs(mus - lam)) > 1e-3]
    return list(lams)


def _suite_monodromy(q, chans, x_max, keys):
    lams = _verify_grid(q, x_max)
    rows = []
    for ch in chans:
        res = oracle.monodromy_identity_residuals(q, ch, lams)
        rows += [(key, ch.k, res[key], VERIFY_TOL, res[key] <= VERIFY_TOL) for key in keys]
    return rows


def _suite_floquet(q, chans, x_max, m, n_theta, lam_cap):
    rows = []
    thetas = [2.0 * math.pi * i / n_theta for i in range(n_theta)]
    for ch in chans:
        bs = spectrum.channel_spectrum(q, ch, x_max)
        p_max = bs.labeled.p_max
        lam_max = min(lam_cap, bs.endpoints[(1, p_max)][1].value, bs.endpoints[(2, p_max)][1].value)
        bands = [(lo, hi) for _, _, lo, hi in bs.bands if lo <= hi]
        flats = list(hill_landmarks(q, x_max).dirichlet)
        worst = 0.0
        for ev in pmap(lambda th: oracle.floquet_fd_spectrum(q, ch, m, [th], lam_max)[0], thetas):
            for lam in ev:
                d = min([max(lo - lam, lam - hi, 0.0) for lo, hi in bands]
                        + [abs(lam - mu) for mu in flats] + [math.inf])
                worst = max(worst, d)
        rows.append(("fd_band_distance", ch.k, worst, FD_BAND_TOL, worst <= FD_BAND_TOL))
    return rows


def cmd_verify(args, out):
    q = read_potential(args.potential)
    if args.N < 2:
        raise UsageError("--B needs the nanotube geometry, so N >= 2")
    mp = magnetic_phases(args.B, args.N)
    chans = lyapunov.channels(args.N, mp.a1, mp.a2)
    rows = []
    if args.suite in ("monodromy", "all"):
        rows += [("monodromy",) + r for r in _suite_monodromy(q, chans, args.xmax, ("det", "symplectic"))]
    if args.suite in ("traces", "all"):
        keys = ("trace0", "trace", "trace0_sq", "trace_sq", "charpoly", "dplus")
        rows += [("traces",) + r for r in _suite_monodromy(q, chans, args.xmax, keys)]
    if args.suite in ("floquet", "all"):
        rows += [("floquet",) + r for r in _suite_floquet(q, chans, args.xmax, args.m, args.thetas, args.fd_lam_max)]
    extra = _field_meta(mp.a1, mp.a2, args.B) + [("tol.verify_identity", VERIFY_TOL),
                                                 ("tol.fd_band", FD_BAND_TOL)]
    out.table(args.out, meta_for(args, extra),
              [(None, ["suite", "invariant", "k", "residual", "tolerance", "pass"], rows)])
    return 0 if all(r[-1] for r in rows) else 1


# -- parser ----------------------------------------------------------------------------


def _field_args(p):
    p.add_argument("--B", type=float)
    p.add_argument("--a1", type=float)
    p.add_argument("--a2", type=float)


def build_parser():
    parser = argparse.ArgumentParser(prog="armchair", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("geometry", help="edge endpoints of the embedded tube")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--B", type=float, default=0.0)
    p.add_argument("--cells", default="0:0", help="inclusive cell range lo:hi")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("hill", help="Hill discriminants and landmarks")
    p.add_argument("--potential")
    p.add_argument("--xmax", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_hill)

    p = sub.add_parser("lyapunov", help="Lyapunov branches of one channel")
    p.add_argument("--potential")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--xrange", required=True, help="lo:hi:step in sqrt-energy")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lyapunov)

    for name, func, help_ in (("bands", cmd_bands, "per-channel bands, endpoints and gaps"),
                              ("gaps", cmd_gaps, "gap table of the full operator")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--potential")
        p.add_argument("--N", type=int, required=True)
        _field_args(p)
        p.add_argument("--xmax", type=float, required=True)
        p.add_argument("--out", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("sweep", help="gap edges against field strength")
    p.add_argument("--potential")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--B", required=True, help="lo:hi:step")
    p.add_argument("--xmax", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("flatband", help="compact eigenfunction at a Dirichlet energy")
    p.add_argument("--potential")
    p.add_argument("--N", type=int, required=True)
    _field_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n-dirichlet", type=int, required=True)
    p.add_argument("--nu", type=int, choices=(1, 2), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_flatband)

    p = sub.add_parser("verify", help="residuals of the independent checks")
    p.add_argument("--suite", choices=("monodromy", "traces", "floquet", "all"), default="all")
    p.add_argument("--potential")
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--B", type=float, default=0.0)
    p.add_argument("--xmax", type=float, default=8.0)
    p.add_argument("--m", type=int, default=100, help="grid points per edge")
    p.add_argument("--thetas", type=int, default=8, help="number of quasi-momenta")
    p.add_argument("--fd-lam-max", type=float, default=20.0, help="largest FD eigenvalue checked")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Output()
    try:
        status = args.func(args, out)
    except UsageError as exc:
        out.rollback()
        print(f"armchair: error: {exc}", file=sys.stderr)
        return 2
    except (ArmchairError, ArithmeticError, np.linalg.LinAlgError) as exc:
        out.rollback()
        print(f"armchair: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except BaseException:
        out.rollback()
        raise
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
