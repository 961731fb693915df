"""One-periodic edge potentials and their file format.

Four representations are supported:

``samples``
    values at ``t_i = i/G`` joined by periodic linear interpolation;
``piecewise``
    constant values between breakpoints in (0, 1);
``fourier``
    ``sum_m c_m cos(2 pi m t) + s_m sin(2 pi m t)`` for ``m >= 1``;
``delta``
    point masses ``sum_i sigma_i delta(t - c_i)`` with ``0 < c_i < 1``.

Every variant accepts a constant ``mean_shift`` added on top.

Potential files are JSON objects, e.g.::

    {"type": "fourier", "cos": [1.0], "sin": [], "mean_shift": 0.0}
    {"type": "delta", "terms": [[0.52, 100.0]]}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import IntegrationFailure

EVEN_TOL = 1e-10
STEP_TOL = 1e-10
MAX_STEPS = 1 << 17

_GAUSS = (0.5 - math.sqrt(3.0) / 6.0, 0.5 + math.sqrt(3.0) / 6.0)

VARIANTS = ("samples", "piecewise", "fourier", "delta")


@dataclass(frozen=True)
class Potential:
    """A 1-periodic potential on the unit edge.

    Use the ``zero``/``fourier``/``samples``/``piecewise``/``delta``
    constructors rather than filling the fields by hand.
    """

    variant: str
    values: tuple = ()
    breakpoints: tuple = ()
    cos: tuple = ()
    sin: tuple = ()
    terms: tuple = ()
    mean_shift: float = 0.0
    _steps: dict = field(default_factory=dict, compare=False, repr=False, hash=False)
    _samples: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown potential type {self.variant!r}")
        if self.variant == "samples":
            if len(self.values) < 1:
                raise ValueError("samples potential needs at least one value")
        elif self.variant == "piecewise":
            b = np.asarray(self.breakpoints, dtype=float)
            if len(self.values) != len(b) + 1:
                raise ValueError("piecewise potential needs len(values) == len(breakpoints) + 1")
            if b.size and (b[0] <= 0.0 or b[-1] >= 1.0 or np.any(np.diff(b) <= 0.0)):
                raise ValueError("breakpoints must be strictly increasing inside (0, 1)")
        elif self.variant == "delta":
            pos = np.array([c for c, _ in self.terms], dtype=float)
            if pos.size and (pos[0] <= 0.0 or pos[-1] >= 1.0 or np.any(np.diff(pos) <= 0.0)):
                raise ValueError("delta positions must be strictly increasing inside (0, 1)")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls("piecewise", values=(0.0,))

    @classmethod
    def fourier(cls, cos=(), sin=(), mean_shift=0.0):
        return cls("fourier", cos=tuple(float(c) for c in cos), sin=tuple(float(s) for s in sin),
                   mean_shift=float(mean_shift))

    @classmethod
    def samples(cls, values, mean_shift=0.0):
        return cls("samples", values=tuple(float(v) for v in values), mean_shift=float(mean_shift))

    @classmethod
    def piecewise(cls, breakpoints, values, mean_shift=0.0):
        return cls("piecewise", breakpoints=tuple(float(b) for b in breakpoints),
                   values=tuple(float(v) for v in values), mean_shift=float(mean_shift))

    @classmethod
    def delta(cls, terms, mean_shift=0.0):
        terms = tuple(sorted((float(c), float(s)) for c, s in terms))
        return cls("delta", terms=terms, mean_shift=float(mean_shift))

    @classmethod
    def delta_pair_shift(cls, eps):
        """``q_eps = (1/eps) delta(t - 1/2 - 2 eps)``, whose F_- is sin(4 eps x)/(2 eps x)."""
        return cls.delta([(0.5 + 2.0 * eps, 1.0 / eps)])

    # -- basic properties ---------------------------------------------------

    @property
    def q0(self):
        """Mean value over one period."""
        if self.variant == "samples":
            base = float(np.mean(self.values))
        elif self.variant == "piecewise":
            base = float(np.dot(self._lengths(), self.values))
        elif self.variant == "fourier":
            base = 0.0
        else:
            base = float(sum(s for _, s in self.terms))
        return base + self.mean_shift

    def is_even(self, tol=EVEN_TOL):
        """True when q(1 - t) = q(t)."""
        if self.variant == "fourier":
            return all(abs(s) <= tol for s in self.sin)
        if self.variant == "samples":
            v = np.asarray(self.values)
            return bool(np.all(np.abs(v - np.roll(v[::-1], 1)) <= tol))
        if self.variant == "piecewise":
            L = self._lengths()
            v = np.asarray(self.values)
            return bool(np.all(np.abs(L - L[::-1]) <= tol) and np.all(np.abs(v - v[::-1]) <= tol))
        pos = np.array([c for c, _ in self.terms])
        st = np.array([s for _, s in self.terms])
        return bool(np.all(np.abs(pos + pos[::-1] - 1.0) <= tol) and np.all(np.abs(st - st[::-1]) <= tol))

    @property
    def is_exact(self):
        """Piecewise-constant and delta potentials propagate without discretisation error."""
        return self.variant in ("piecewise", "delta")

    def __call__(self, t):
        """Pointwise value (the delta variant returns its smooth background only)."""
        t = np.mod(np.asarray(t, dtype=float), 1.0)
        if self.variant == "fourier":
            out = np.zeros_like(t)
            for m, c in enumerate(self.cos, start=1):
                out += c * np.cos(2.0 * np.pi * m * t)
            for m, s in enumerate(self.sin, start=1):
                out += s * np.sin(2.0 * np.pi * m * t)
        elif self.variant == "samples":
            v = np.asarray(self.values)
            G = v.size
            u = t * G
            i = np.floor(u).astype(int) % G
            r = u - np.floor(u)
            out = (1.0 - r) * v[i] + r * v[(i + 1) % G]
        elif self.variant == "piecewise":
            idx = np.searchsorted(np.asarray(self.breakpoints), t, side="right")
            out = np.asarray(self.values)[idx]
        else:
            out = np.zeros_like(t)
        return out + self.mean_shift

    def l2_norm(self):
        if self.variant == "fourier":
            c = np.asarray(self.cos)
            s = np.asarray(self.sin)
            return math.sqrt(self.mean_shift ** 2 + 0.5 * (np.sum(c * c) + np.sum(s * s)))
        if self.variant == "delta":
            return math.inf
        t = (np.arange(4096) + 0.5) / 4096
        return float(np.sqrt(np.mean(self(t) ** 2)))

    def lower_bound(self):
        """A number below the spectrum of every operator built from this potential."""
        if self.variant == "fourier":
            low = self.mean_shift - sum(abs(c) for c in self.cos) - sum(abs(s) for s in self.sin)
        elif self.variant == "delta":
            neg = sum(-s for _, s in self.terms if s < 0.0)
            low = self.mean_shift - neg * neg - 2.0 * neg
        else:
            low = min(self.values) + self.mean_shift
        return low - 1.0

    def _lengths(self):
        b = np.concatenate([[0.0], np.asarray(self.breakpoints, dtype=float), [1.0]])
        return np.diff(b)

    # -- propagation --------------------------------------------------------

    def _exact_plan(self):
        if self.variant == "piecewise":
            lengths = self._lengths()
            values = np.asarray(self.values, dtype=float) + self.mean_shift
            jumps = np.zeros_like(lengths)
        else:
            pos = [c for c, _ in self.terms]
            b = np.concatenate([[0.0], pos, [1.0]])
            lengths = np.diff(b)
            values = np.full(lengths.size, self.mean_shift)
            jumps = np.array([s for _, s in self.terms] + [0.0])
        return lengths, values, jumps

    def _gauss_samples(self, steps):
        if steps not in self._samples:
            h = 1.0 / steps
            t = np.arange(steps) * h
            self._samples[steps] = (self(t + _GAUSS[0] * h), self(t + _GAUSS[1] * h), h)
        return self._samples[steps]

    def propagate(self, lams, steps):
        """Period-map entries with a fixed number of Magnus steps."""
        if self.is_exact:
            return _kernels.propagate_piecewise(lams, *self._exact_plan())
        return _kernels.propagate_smooth(lams, *self._gauss_samples(steps))

    def steps_for(self, lam_max):
        """Number of Magnus steps meeting the step-halving tolerance up to ``lam_max``.

        Two runs with M and 2M steps must agree to ``STEP_TOL`` (relative, per
        entry scaled by the free-solution size) on probe energies.
        """
        if self.is_exact:
            return 0
        key = max(100, int(math.ceil(lam_max / 100.0)) * 100)
        if key in self._steps:
            return self._steps[key]
        probes = np.array([self.lower_bound(), 0.0, 1.0, 0.25 * key, 0.5 * key, float(key)])
        scale = np.sqrt(np.maximum(1.0, np.abs(probes)))
        mult = len(self.values) if self.variant == "samples" else 1
        steps = max(64, mult)
        steps = ((steps + mult - 1) // mult) * mult
        prev = self.propagate(probes, steps)
        residual = math.inf
        while steps < MAX_STEPS:
            steps *= 2
            cur = self.propagate(probes, steps)
            diff = np.abs(cur - prev)
            diff[:, 1] /= scale
            diff[:, 2] *= scale
            ref = np.abs(cur).copy()
            ref[:, 1] /= scale
            ref[:, 2] *= scale
            residual = float(np.max(diff / np.maximum(1.0, ref)))
            if residual <= STEP_TOL:
                self._steps[key] = steps
                return steps
            prev = cur
        raise IntegrationFailure(
            f"step halving did not converge below {STEP_TOL:g} (achieved {residual:.3g})", residual
        )

    def transfer(self, lams, lam_max=None):
        """Period-map entries ``(theta1, theta1', phi1, phi1')`` for each energy."""
        lams = np.atleast_1d(np.asarray(lams, dtype=float))
        if self.is_exact:
            return self.propagate(lams, 0)
        if lam_max is None:
            lam_max = float(np.max(np.abs(lams))) if lams.size else 0.0
        return self.propagate(lams, self.steps_for(lam_max))

    # -- serialisation ------------------------------------------------------

    def to_dict(self):
        d = {"type": self.variant}
        if self.variant == "samples":
            d["values"] = list(self.values)
        elif self.variant == "piecewise":
            d["breakpoints"] = list(self.breakpoints)
            d["values"] = list(self.values)
        elif self.variant == "fourier":
            d["cos"] = list(self.cos)
            d["sin"] = list(self.sin)
        else:
            d["terms"] = [list(t) for t in self.terms]
        if self.mean_shift:
            d["mean_shift"] = self.mean_shift
        return d

    @classmethod
    def from_dict(cls, d):
        kind = d.get("type")
        shift = float(d.get("mean_shift", 0.0))
        if kind == "samples":
            return cls.samples(d["values"], shift)
        if kind == "piecewise":
            return cls.piecewise(d.get("breakpoints", []), d["values"], shift)
        if kind == "fourier":
            return cls.fourier(d.get("cos", []), d.get("sin", []), shift)
        if kind == "delta":
            return cls.delta(d.get("terms", []), shift)
        if kind == "zero":
            return cls.piecewise([], [shift])
        raise ValueError(f"unknown potential type {kind!r}")


def load_potential(path):
    """Read a potential file (JSON, see module docstring)."""
    with open(Path(path), encoding="utf-8") as fh:
        return Potential.from_dict(json.load(fh))


def save_potential(q, path):
    Path(path).write_text(json.dumps(q.to_dict(), indent=2) + "\n", encoding="utf-8")
