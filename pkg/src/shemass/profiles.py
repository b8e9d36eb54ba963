"""Nonnegative initial data sampled on a uniform grid.

A profile stores cell averages: ``samples[j]`` is the mean of the underlying
function over ``[x_j - dx/2, x_j + dx/2]``.  With that convention the total
mass ``dx * sum(samples)`` is exact for indicators, and an indicator edge that
falls on a node gets the value 1/2 there.
"""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "SampleGrid",
    "Profile",
    "SpectrumSupport",
    "make_profile",
    "profile_from_descriptor",
    "rebuild_on",
    "support_separation",
    "spectrum",
    "spectrum_support",
    "fourier_overlap_measure",
    "default_epsilon",
    "write_profile_csv",
    "read_profile_csv",
    "write_descriptor_json",
    "read_descriptor_json",
]

KINDS = ("indicator", "gaussian_bump", "constant", "custom")


@dataclass(frozen=True)
class SampleGrid:
    """Nodes ``origin + j * dx`` for ``j = 0 .. n-1``."""

    origin: float
    dx: float
    n: int

    def __post_init__(self):
        if not (self.dx > 0 and math.isfinite(self.dx)):
            raise DomainError(f"grid spacing must be positive and finite, got {self.dx}")
        if self.n < 1:
            raise DomainError("empty grid")

    @property
    def x(self):
        return self.origin + self.dx * np.arange(self.n)

    @property
    def end(self):
        return self.origin + self.dx * (self.n - 1)

    def refined(self):
        return SampleGrid(self.origin, self.dx / 2, 2 * self.n - 1)

    def same_as(self, other, rtol=1e-12):
        return (self.n == other.n
                and math.isclose(self.dx, other.dx, rel_tol=rtol)
                and abs(self.origin - other.origin) <= rtol * max(1.0, abs(self.origin)))


@dataclass(frozen=True, eq=False)
class Profile:
    grid_origin: float
    dx: float
    samples: np.ndarray
    descriptor: dict | None = None
    l1_norm: float = field(init=False)
    linf_norm: float = field(init=False)

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim != 1 or s.size == 0:
            raise DomainError("profile samples must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(s)):
            raise DomainError("profile samples must be finite")
        if np.any(s < 0):
            raise DomainError(f"profile samples must be nonnegative (min {s.min():.3g})")
        if not (self.dx > 0):
            raise DomainError("profile dx must be positive")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "l1_norm", float(self.dx * s.sum()))
        object.__setattr__(self, "linf_norm", float(s.max()))

    @property
    def grid(self):
        return SampleGrid(self.grid_origin, self.dx, self.samples.size)

    @property
    def x(self):
        return self.grid.x

    @property
    def n(self):
        return self.samples.size

    def is_zero(self):
        return not np.any(self.samples > 0)

    def support_points(self):
        return self.x[self.samples > 0]


def _as_grid(grid):
    if isinstance(grid, SampleGrid):
        return grid
    if hasattr(grid, "sample_grid"):
        return grid.sample_grid()
    origin, dx, n = grid
    return SampleGrid(float(origin), float(dx), int(n))


def _cell_fraction(x, dx, a, b):
    """Fraction of each cell [x - dx/2, x + dx/2] covered by [a, b]."""
    lo = np.maximum(x - dx / 2, a)
    hi = np.minimum(x + dx / 2, b)
    frac = np.clip(hi - lo, 0.0, None) / dx
    # snap round-off so node-aligned edges give exactly 1/2 and interiors exactly 1
    frac = np.where(np.abs(frac - 1.0) < 1e-9, 1.0, frac)
    frac = np.where(np.abs(frac - 0.5) < 1e-9, 0.5, frac)
    return np.where(frac < 1e-12, 0.0, frac)


def make_profile(kind, grid, **params):
    """Build a profile of a built-in kind on ``grid``.

    kinds and their parameters:

    * ``indicator``: ``a``, ``b`` (and optional ``value``, default 1)
    * ``gaussian_bump``: ``center``, ``width``, ``mass``, optional ``cutoff``
      (in widths, default 8; samples beyond it are exactly zero)
    * ``constant``: ``value``, optional ``half_width`` N for value * 1[-N, N];
      without it the whole grid is filled
    * ``custom``: ``samples`` (array of nonnegative values)
    """
    g = _as_grid(grid)
    x = g.x
    if kind == "indicator":
        a, b = float(params["a"]), float(params["b"])
        value = float(params.get("value", 1.0))
        if not a < b:
            raise DomainError(f"indicator needs a < b, got [{a}, {b}]")
        if a < g.origin - g.dx / 2 or b > g.end + g.dx / 2:
            raise DomainError(f"indicator [{a}, {b}] does not fit the grid [{g.origin}, {g.end}]")
        samples = value * _cell_fraction(x, g.dx, a, b)
        desc = {"kind": kind, "a": a, "b": b, "value": value}
    elif kind == "gaussian_bump":
        c, w, m = float(params["center"]), float(params["width"]), float(params["mass"])
        cutoff = float(params.get("cutoff", 8.0))
        if w <= 0 or m < 0:
            raise DomainError("gaussian_bump needs width > 0 and mass >= 0")
        if c - cutoff * w < g.origin or c + cutoff * w > g.end:
            raise DomainError("gaussian_bump support does not fit the grid")
        z = (x - c) / w
        samples = m * np.exp(-0.5 * z * z) / (w * math.sqrt(2 * math.pi))
        samples[np.abs(z) > cutoff] = 0.0
        desc = {"kind": kind, "center": c, "width": w, "mass": m, "cutoff": cutoff}
    elif kind == "constant":
        value = float(params.get("value", 1.0))
        half_width = params.get("half_width")
        if half_width is None:
            samples = np.full(g.n, value)
            desc = {"kind": kind, "value": value}
        else:
            n_half = float(half_width)
            if -n_half < g.origin - g.dx / 2 or n_half > g.end + g.dx / 2:
                raise DomainError(f"truncation [-{n_half}, {n_half}] does not fit the grid")
            samples = value * _cell_fraction(x, g.dx, -n_half, n_half)
            desc = {"kind": kind, "value": value, "half_width": n_half}
    elif kind == "custom":
        samples = np.asarray(params["samples"], dtype=float)
        if samples.shape != (g.n,):
            raise DomainError(f"custom samples need length {g.n}, got {samples.shape}")
        if np.any(samples < 0):
            raise DomainError("custom samples must be nonnegative")
        desc = None
    else:
        raise DomainError(f"unknown profile kind {kind!r}; expected one of {KINDS}")
    return Profile(g.origin, g.dx, samples, desc)


def profile_from_descriptor(descriptor, grid):
    params = dict(descriptor)
    kind = params.pop("kind")
    if kind == "custom":
        raise DomainError("custom profiles have no descriptor; load them from CSV")
    return make_profile(kind, grid, **params)


def rebuild_on(profile, grid):
    """Re-sample a built-in profile on another grid; None for custom data."""
    if profile.descriptor is None:
        return None
    return profile_from_descriptor(profile.descriptor, grid)


def support_separation(u0, v0):
    """Smallest distance between support points of two profiles.

    Support means nodes with a strictly positive sample.
    """
    if u0.is_zero() or v0.is_zero():
        raise DomainError("support separation needs two profiles with positive mass")
    a = np.sort(u0.support_points())
    b = np.sort(v0.support_points())
    idx = np.searchsorted(b, a)
    left = np.abs(a - b[np.clip(idx - 1, 0, b.size - 1)])
    right = np.abs(b[np.clip(idx, 0, b.size - 1)] - a)
    d = float(min(left.min(), right.min()))
    # nodes sit on a lattice; strip round-off from the subtraction
    step = min(u0.dx, v0.dx)
    k = round(d / step)
    return k * step if abs(d - k * step) < 1e-9 * max(1.0, d) else d


def spectrum(profile, pad=1):
    """Approximate continuous Fourier transform on the DFT frequency grid.

    Returns ``(z, fhat)`` in increasing frequency order with
    ``fhat(z) = dx * sum_j f_j exp(-i z x_j)`` and ``z_k = 2 pi k / (n_pad dx)``.
    """
    pad = int(pad)
    if pad < 1:
        raise DomainError("pad factor must be >= 1")
    n_pad = pad * profile.n
    z = 2 * np.pi * np.fft.fftshift(np.fft.fftfreq(n_pad, d=profile.dx))
    raw = np.fft.fftshift(np.fft.fft(profile.samples, n=n_pad))
    fhat = profile.dx * np.exp(-1j * z * profile.grid_origin) * raw
    return z, fhat


@dataclass(frozen=True, eq=False)
class SpectrumSupport:
    threshold_epsilon: float
    z_min: float
    dz: float
    mask: np.ndarray

    def __post_init__(self):
        if not self.threshold_epsilon > 0:
            raise DomainError("threshold must be positive")

    @property
    def n_frequencies(self):
        return self.mask.size

    @property
    def frequencies(self):
        return self.z_min + self.dz * np.arange(self.mask.size)

    @property
    def measure(self):
        return float(self.dz * np.count_nonzero(self.mask))


def spectrum_support(profile, epsilon, pad=1):
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    z, fhat = spectrum(profile, pad)
    mask = np.abs(fhat) > epsilon
    mask.setflags(write=False)
    return SpectrumSupport(float(epsilon), float(z[0]), float(z[1] - z[0]) if z.size > 1 else 2 * np.pi / profile.dx, mask)


def default_epsilon(u0, v0, rel=1e-6, pad=1):
    """``rel`` times the largest spectral modulus of the pair."""
    peak = max(np.abs(spectrum(u0, pad)[1]).max(), np.abs(spectrum(v0, pad)[1]).max())
    return rel * float(peak)


def fourier_overlap_measure(u0, v0, epsilon, pad=1):
    """Measure of frequencies where both ``|u0^|`` and ``|v0^|`` exceed epsilon."""
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if not u0.grid.same_as(v0.grid):
        raise DomainError("overlap measure needs both profiles on one grid")
    su = spectrum_support(u0, epsilon, pad)
    sv = spectrum_support(v0, epsilon, pad)
    return float(su.dz * np.count_nonzero(su.mask & sv.mask))


def write_profile_csv(profile, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "value"])
        for xi, si in zip(profile.x, profile.samples):
            w.writerow([repr(float(xi)), repr(float(si))])


def read_profile_csv(path):
    xs, vals = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"x", "value"} <= set(reader.fieldnames):
            raise DomainError(f"{path}: expected columns x,value")
        for row in reader:
            xs.append(float(row["x"]))
            vals.append(float(row["value"]))
    if len(xs) < 2:
        raise DomainError(f"{path}: need at least two rows")
    xs = np.asarray(xs)
    steps = np.diff(xs)
    dx = float(steps.mean())
    if dx <= 0 or np.max(np.abs(steps - dx)) > 1e-9 * max(1.0, abs(dx)):
        raise DomainError(f"{path}: x column is not a uniform increasing grid")
    return make_profile("custom", SampleGrid(float(xs[0]), dx, xs.size), samples=vals)


def write_descriptor_json(profile, path):
    if profile.descriptor is None:
        raise DomainError("custom profiles have no descriptor; use CSV export")
    with open(path, "w") as fh:
        json.dump(profile.descriptor, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_descriptor_json(path, grid):
    with open(path) as fh:
        return profile_from_descriptor(json.load(fh), grid)
