"""Explicit finite-difference Monte Carlo for the stochastic heat equation.

One step of the scheme on nodes ``x_j = -L + j dx``::

    u_j <- u_j + (theta dt / (2 dx^2)) (u_{j+1} - 2 u_j + u_{j-1})
               + sigma(max(u_j, 0)) sqrt(dt / dx) N_{n,j}

Two fields ``u`` and ``v`` can be advanced together; they always see the same
normals ``N_{n,j}``.  Along the way each path accumulates
``dt dx sum_j sigma1(u_j) sigma2(v_j)``, whose mean over paths estimates the
covariance of the two total masses.
"""

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba as nb
import numpy as np

from . import rng
from .errors import ConfigError, DomainError, NumericalBlowup
from .profiles import SampleGrid
from .stats import cov_minus_mean_with_se, cov_with_se, mean_and_se

__all__ = [
    "BOUNDARIES",
    "GridSpec",
    "NonlinearitySpec",
    "PathResult",
    "EnsembleStats",
    "step_noise",
    "simulate_pair",
    "run_ensemble",
    "write_stats_csv",
    "STATS_COLUMNS",
]

BOUNDARIES = ("dirichlet_zero", "neumann_zero")
_SNAP_TOL = 1e-9


def _is_multiple(a, b):
    k = a / b
    return abs(k - round(k)) < _SNAP_TOL * max(1.0, abs(k))


@dataclass(frozen=True)
class GridSpec:
    """Truncated domain [-L, L] and time stepping.

    Construction snaps ``half_length`` up to a multiple of ``dx`` (so x = 0 is a
    node) and ``dt`` down so that ``time_quantum / dt`` is an integer; every
    multiple of ``time_quantum`` up to ``t_end`` is then reachable exactly.
    ``dt`` defaults to ``dx^2 / (2 theta)``, half the explicit stability limit.
    """

    half_length: float
    dx: float
    t_end: float
    theta: float = 1.0
    dt: float | None = None
    boundary: str = "dirichlet_zero"
    time_quantum: float | None = None

    def __post_init__(self):
        for name in ("half_length", "dx", "t_end", "theta"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
                raise ConfigError(f"grid.{name} must be positive and finite, got {val!r}")
        if self.boundary not in BOUNDARIES:
            raise ConfigError(f"grid.boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        cells = math.ceil(self.half_length / self.dx - _SNAP_TOL)
        object.__setattr__(self, "half_length", cells * self.dx)
        quantum = self.t_end if self.time_quantum is None else float(self.time_quantum)
        if not quantum > 0 or not _is_multiple(self.t_end, quantum):
            raise ConfigError(f"t_end={self.t_end} is not a multiple of time_quantum={quantum}")
        target = self.dx ** 2 / (2 * self.theta) if self.dt is None else float(self.dt)
        if not target > 0:
            raise ConfigError("grid.dt must be positive")
        per_quantum = math.ceil(quantum / target - _SNAP_TOL)
        object.__setattr__(self, "dt", quantum / per_quantum)
        object.__setattr__(self, "time_quantum", quantum)
        if self.cfl_ratio > 0.5 + 1e-12:
            raise ConfigError(
                f"explicit scheme unstable: theta dt / (2 dx^2) = {self.cfl_ratio:.4g} > 1/2")

    @property
    def cfl_ratio(self):
        return self.theta * self.dt / (2 * self.dx ** 2)

    @property
    def n_intervals(self):
        return round(2 * self.half_length / self.dx)

    @property
    def n_nodes(self):
        return self.n_intervals + 1

    @property
    def n_steps(self):
        return round(self.t_end / self.dt)

    @property
    def x(self):
        return -self.half_length + self.dx * np.arange(self.n_nodes)

    def sample_grid(self):
        return SampleGrid(-self.half_length, self.dx, self.n_nodes)

    @property
    def first_active(self):
        return 1 if self.boundary == "dirichlet_zero" else 0

    @property
    def n_cells(self):
        """Number of nodes that receive noise."""
        return self.n_nodes - 2 if self.boundary == "dirichlet_zero" else self.n_nodes

    @property
    def noise_scale(self):
        return math.sqrt(self.dt / self.dx)

    def step_of(self, t):
        if t < 0 or t > self.t_end * (1 + _SNAP_TOL):
            raise ConfigError(f"time {t} outside [0, {self.t_end}]")
        k = t / self.dt
        if abs(k - round(k)) > 1e-6:
            raise ConfigError(f"time {t} is not on the time grid (dt={self.dt})")
        return round(k)

    def to_dict(self):
        return {
            "half_length": self.half_length, "dx": self.dx, "t_end": self.t_end,
            "theta": self.theta, "dt": self.dt, "boundary": self.boundary,
            "time_quantum": self.time_quantum, "n_nodes": self.n_nodes,
            "n_steps": self.n_steps,
        }


_KIND_CODES = {"zero": 0, "linear": 1, "custom": 2}


@dataclass(frozen=True, eq=False)
class NonlinearitySpec:
    """Diffusion coefficient sigma, evaluated at ``max(u, 0)``.

    ``zero``: sigma = 0.  ``linear``: sigma(u) = lam u.  ``custom``: the
    piecewise-linear interpolant of ``(knots, values)`` with knots starting at
    0 and value 0 there, held constant beyond the last knot.
    """

    kind: str
    lam: float = 0.0
    knots: tuple = ()
    values: tuple = ()
    lip_constant: float = field(default=None)

    def __post_init__(self):
        if self.kind not in _KIND_CODES:
            raise DomainError(f"sigma kind must be one of {tuple(_KIND_CODES)}, got {self.kind!r}")
        if self.kind == "linear":
            if not (math.isfinite(self.lam) and self.lam >= 0):
                raise DomainError("linear sigma needs lam >= 0 so that sigma >= 0")
            lip = abs(self.lam)
        elif self.kind == "custom":
            kx = np.asarray(self.knots, dtype=float)
            ky = np.asarray(self.values, dtype=float)
            if kx.ndim != 1 or kx.size < 2 or kx.shape != ky.shape:
                raise DomainError("custom sigma needs matching knots/values of length >= 2")
            if kx[0] != 0.0 or ky[0] != 0.0:
                raise DomainError("custom sigma must start at knot 0 with value 0")
            if np.any(np.diff(kx) <= 0):
                raise DomainError("custom sigma knots must increase strictly")
            if np.any(ky < 0):
                raise DomainError("custom sigma values must be nonnegative")
            object.__setattr__(self, "knots", tuple(float(k) for k in kx))
            object.__setattr__(self, "values", tuple(float(v) for v in ky))
            lip = float(np.max(np.abs(np.diff(ky) / np.diff(kx))))
        else:
            lip = 0.0
        if self.lip_constant is None:
            object.__setattr__(self, "lip_constant", lip)
        elif self.lip_constant < lip * (1 - 1e-12):
            raise DomainError(f"declared Lipschitz constant {self.lip_constant} < actual {lip}")
        self.validate()

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def linear(cls, lam):
        return cls("linear", lam=float(lam))

    @classmethod
    def custom(cls, knots, values, lip_constant=None):
        return cls("custom", knots=tuple(knots), values=tuple(values), lip_constant=lip_constant)

    @classmethod
    def from_callable(cls, fn, x_max, n=1025):
        """Tabulate ``fn`` on ``[0, x_max]``; the table is what gets simulated."""
        knots = np.linspace(0.0, float(x_max), int(n))
        return cls.custom(knots, np.asarray(fn(knots), dtype=float))

    def __call__(self, u):
        a = np.maximum(np.asarray(u, dtype=float), 0.0)
        if self.kind == "zero":
            return np.zeros_like(a)
        if self.kind == "linear":
            return self.lam * a
        return np.interp(a, self.knots, self.values)

    def validate(self, n=10001):
        """Check sigma(0) = 0, sigma >= 0 and the Lipschitz bound on a dense sample."""
        top = 2.0 * (self.knots[-1] if self.kind == "custom" else 1.0)
        xs = np.linspace(-top, top, n)
        ys = self(xs)
        if self(0.0) != 0.0:
            raise DomainError("sigma(0) must be 0")
        if np.any(ys < 0):
            raise DomainError("sigma must be nonnegative")
        slopes = np.abs(np.diff(ys) / np.diff(xs))
        if slopes.size and slopes.max() > self.lip_constant * (1 + 1e-9) + 1e-12:
            raise DomainError("sigma violates its Lipschitz constant")

    def kernel_args(self):
        kx = np.asarray(self.knots if self.kind == "custom" else (0.0, 1.0), dtype=float)
        ky = np.asarray(self.values if self.kind == "custom" else (0.0, 0.0), dtype=float)
        return _KIND_CODES[self.kind], float(self.lam), kx, ky

    def to_dict(self):
        d = {"kind": self.kind, "lip_constant": self.lip_constant}
        if self.kind == "linear":
            d["lam"] = self.lam
        if self.kind == "custom":
            d["knots"] = list(self.knots)
            d["values"] = list(self.values)
        return d


@dataclass(eq=False)
class PathResult:
    times: np.ndarray
    mass_u: np.ndarray
    mass_v: np.ndarray | None
    # increment of dt dx sum sigma1 sigma2 over each saved interval; entry 0 is 0
    cov_rhs_increments: np.ndarray
    negative_counts: np.ndarray
    samples_per_interval: int
    min_value_seen: float
    seed: int
    path_index: int
    final_u: np.ndarray | None = None
    final_v: np.ndarray | None = None


@nb.njit(inline="always")
def _sigma(kind, lam, kx, ky, a):
    if kind == 0:
        return 0.0
    if kind == 1:
        return lam * a
    m = kx.shape[0]
    if a >= kx[m - 1]:
        return ky[m - 1]
    lo = 0
    hi = m - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if kx[mid] <= a:
            lo = mid
        else:
            hi = mid
    return ky[lo] + (ky[hi] - ky[lo]) * (a - kx[lo]) / (kx[hi] - kx[lo])


@nb.njit(nogil=True, cache=True)
def _simulate_block(u0, v0, two, k1, lam1, kx1, ky1, k2, lam2, kx2, ky2,
                    c, s_in, s_end, neumann, dx, dt, seed, path_ids, n_steps, stride,
                    kn, wn, fn, mass_u, mass_v, rhs, neg_u, neg_v, min_out, fail_step,
                    final_u, final_v):
    n = u0.shape[0]
    first = 0 if neumann else 1
    last = n - 1 if neumann else n - 2
    for p in range(path_ids.shape[0]):
        pkey = rng._key_for_path(seed, np.uint64(path_ids[p]))
        u = u0.copy()
        un = np.zeros(n)
        v = v0.copy()
        vn = np.zeros(n)
        mn = min(u.min(), v.min()) if two else u.min()
        m_u = 0.0
        m_v = 0.0
        for j in range(first, last + 1):
            w = 0.5 if (neumann and (j == 0 or j == n - 1)) else 1.0
            m_u += w * u[j]
            m_v += w * v[j]
        mass_u[p, 0] = dx * m_u
        mass_v[p, 0] = dx * m_v if two else 0.0
        rhs_acc = 0.0
        nu = 0
        nv = 0
        slot = 1
        fail_step[p] = -1
        for k in range(n_steps):
            skey = rng._key_for_step(pkey, np.uint64(k))
            m_u = 0.0
            m_v = 0.0
            cross = 0.0
            for j in range(first, last + 1):
                z = rng._znorm(rng._cell_hash(skey, np.uint64(j - first)), kn, wn, fn)
                if neumann and j == 0:
                    w = 0.5
                    s = s_end
                    ul = u[1]
                    ur = u[1]
                elif neumann and j == n - 1:
                    w = 0.5
                    s = s_end
                    ul = u[n - 2]
                    ur = u[n - 2]
                else:
                    w = 1.0
                    s = s_in
                    ul = u[j - 1]
                    ur = u[j + 1]
                uj = u[j]
                su = _sigma(k1, lam1, kx1, ky1, max(uj, 0.0))
                nu_j = uj + c * (ul - 2.0 * uj + ur) + su * s * z
                un[j] = nu_j
                m_u += w * nu_j
                if nu_j < 0.0:
                    nu += 1
                    if nu_j < mn:
                        mn = nu_j
                if two:
                    if neumann and j == 0:
                        vl = v[1]
                        vr = v[1]
                    elif neumann and j == n - 1:
                        vl = v[n - 2]
                        vr = v[n - 2]
                    else:
                        vl = v[j - 1]
                        vr = v[j + 1]
                    vj = v[j]
                    sv = _sigma(k2, lam2, kx2, ky2, max(vj, 0.0))
                    nv_j = vj + c * (vl - 2.0 * vj + vr) + sv * s * z
                    vn[j] = nv_j
                    m_v += w * nv_j
                    cross += w * su * sv
                    if nv_j < 0.0:
                        nv += 1
                        if nv_j < mn:
                            mn = nv_j
            u, un = un, u
            if two:
                v, vn = vn, v
            rhs_acc += dt * dx * cross
            if not (math.isfinite(m_u) and math.isfinite(m_v)):
                fail_step[p] = k + 1
                break
            if (k + 1) % stride == 0:
                mass_u[p, slot] = dx * m_u
                mass_v[p, slot] = dx * m_v if two else 0.0
                rhs[p, slot] = rhs_acc
                neg_u[p, slot] = nu
                neg_v[p, slot] = nv
                rhs_acc = 0.0
                nu = 0
                nv = 0
                slot += 1
        min_out[p] = mn
        if final_u.shape[0] > p:
            final_u[p, :] = u
            final_v[p, :] = v


def _check_profile(profile, grid, name):
    if not profile.grid.same_as(grid.sample_grid()):
        raise DomainError(
            f"{name} must be sampled on the simulation nodes "
            f"(origin {-grid.half_length}, dx {grid.dx}, n {grid.n_nodes})")
    if grid.boundary == "dirichlet_zero" and (profile.samples[0] != 0 or profile.samples[-1] != 0):
        raise DomainError(f"{name} must vanish on the Dirichlet boundary nodes")


def _saved_times(grid, save_stride):
    if save_stride < 1 or grid.n_steps % save_stride:
        raise ConfigError(f"save_stride={save_stride} must divide n_steps={grid.n_steps}")
    # integer numerator first so that multiples of the quantum come out as clean decimals
    return grid.t_end * (save_stride * np.arange(grid.n_steps // save_stride + 1)) / grid.n_steps


@dataclass
class _BlockOutput:
    mass_u: np.ndarray
    mass_v: np.ndarray
    rhs: np.ndarray
    neg_u: np.ndarray
    neg_v: np.ndarray
    min_value: np.ndarray
    fail_step: np.ndarray
    final_u: np.ndarray
    final_v: np.ndarray


def _run_block(grid, u0, v0, sigma1, sigma2, seed, path_ids, save_stride, keep_final=False):
    n_saved = grid.n_steps // save_stride + 1
    m = len(path_ids)
    two = v0 is not None
    out = _BlockOutput(
        mass_u=np.zeros((m, n_saved)), mass_v=np.zeros((m, n_saved)),
        rhs=np.zeros((m, n_saved)), neg_u=np.zeros((m, n_saved), dtype=np.int64),
        neg_v=np.zeros((m, n_saved), dtype=np.int64), min_value=np.zeros(m),
        fail_step=np.zeros(m, dtype=np.int64),
        final_u=np.zeros((m if keep_final else 0, grid.n_nodes)),
        final_v=np.zeros((m if keep_final else 0, grid.n_nodes)))
    ua = np.ascontiguousarray(u0.samples, dtype=float)
    va = np.ascontiguousarray(v0.samples if two else u0.samples, dtype=float)
    sig2 = sigma2 if (two and sigma2 is not None) else NonlinearitySpec.zero()
    neumann = grid.boundary == "neumann_zero"
    _simulate_block(
        ua, va, two, *sigma1.kernel_args(), *sig2.kernel_args(),
        grid.cfl_ratio, grid.noise_scale, math.sqrt(2.0) * grid.noise_scale, neumann,
        grid.dx, grid.dt, np.uint64(seed), np.asarray(path_ids, dtype=np.uint64),
        grid.n_steps, save_stride, rng.ZIG_K, rng.ZIG_W, rng.ZIG_F,
        out.mass_u, out.mass_v, out.rhs, out.neg_u, out.neg_v, out.min_value, out.fail_step,
        out.final_u, out.final_v)
    bad = np.nonzero(out.fail_step >= 0)[0]
    if bad.size:
        i = int(bad[0])
        raise NumericalBlowup(
            f"non-finite field value at step {int(out.fail_step[i])} "
            f"(t={out.fail_step[i] * grid.dt:.6g}) on path {int(path_ids[i])}",
            step=int(out.fail_step[i]), path_index=int(path_ids[i]))
    return out


def step_noise(grid, seed, path_index, step):
    """The standard normals the simulator uses at ``step`` of path ``path_index``.

    Entry ``c`` belongs to node ``grid.first_active + c``.
    """
    return rng.normal_cells(seed, path_index, step, grid.n_cells)


def simulate_pair(grid, u0, v0, sigma1, sigma2, seed, path_index, save_stride=1):
    """Advance one path of ``u`` (and ``v``, if given) to ``grid.t_end``."""
    _check_profile(u0, grid, "u0")
    if v0 is not None:
        _check_profile(v0, grid, "v0")
    times = _saved_times(grid, save_stride)
    out = _run_block(grid, u0, v0, sigma1, sigma2, seed, [path_index], save_stride,
                     keep_final=True)
    return PathResult(
        times=times,
        mass_u=out.mass_u[0],
        mass_v=out.mass_v[0] if v0 is not None else None,
        cov_rhs_increments=out.rhs[0],
        negative_counts=out.neg_u[0] + out.neg_v[0],
        samples_per_interval=save_stride * grid.n_cells * (2 if v0 is not None else 1),
        min_value_seen=float(out.min_value[0]),
        seed=int(seed),
        path_index=int(path_index),
        final_u=out.final_u[0],
        final_v=out.final_v[0] if v0 is not None else None,
    )


STATS_COLUMNS = ("t", "mean_mass_u", "se_mass_u", "mean_mass_v", "se_mass_v", "cov_uv",
                 "se_cov", "cov_rhs", "se_cov_rhs", "min_value_frac_negative")


@dataclass(eq=False)
class EnsembleStats:
    """Per-saved-time aggregates over an ensemble, plus the per-path tables.

    ``frac_negative`` is cumulative: the share of raw field samples produced up
    to each saved time that were negative.
    """

    times: np.ndarray
    n_paths: int
    seed: int
    mass_u: np.ndarray
    mass_v: np.ndarray | None
    cov_rhs_paths: np.ndarray
    mean_mass_u: np.ndarray
    se_mass_u: np.ndarray
    var_mass_u: np.ndarray
    se_var_mass_u: np.ndarray
    mean_mass_v: np.ndarray | None
    se_mass_v: np.ndarray | None
    cov_uv: np.ndarray | None
    se_cov: np.ndarray | None
    cov_rhs: np.ndarray | None
    se_cov_rhs: np.ndarray | None
    cov_minus_rhs: np.ndarray | None
    se_cov_minus_rhs: np.ndarray | None
    frac_negative: np.ndarray
    frac_negative_u: np.ndarray
    min_value_seen: float
    wall_time_s: float = 0.0

    @property
    def two_fields(self):
        return self.mass_v is not None

    def index_of(self, t):
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9 * max(1.0, t):
            raise ConfigError(f"time {t} was not saved (saved: {self.times.tolist()})")
        return i

    def rows(self):
        for i, t in enumerate(self.times):
            row = {"t": t, "mean_mass_u": self.mean_mass_u[i], "se_mass_u": self.se_mass_u[i]}
            if self.two_fields:
                row.update(mean_mass_v=self.mean_mass_v[i], se_mass_v=self.se_mass_v[i],
                           cov_uv=self.cov_uv[i], se_cov=self.se_cov[i],
                           cov_rhs=self.cov_rhs[i], se_cov_rhs=self.se_cov_rhs[i])
            else:
                row.update(mean_mass_v=None, se_mass_v=None, cov_uv=None, se_cov=None,
                           cov_rhs=None, se_cov_rhs=None)
            row["min_value_frac_negative"] = self.frac_negative[i]
            yield row


def _aggregate(times, seed, n_paths, blocks, two, grid, save_stride):
    mu = np.concatenate([b.mass_u for b in blocks])
    mv = np.concatenate([b.mass_v for b in blocks]) if two else None
    rhs = np.cumsum(np.concatenate([b.rhs for b in blocks]), axis=1)
    neg_u = np.cumsum(np.concatenate([b.neg_u for b in blocks]), axis=1).sum(axis=0)
    neg_v = np.cumsum(np.concatenate([b.neg_v for b in blocks]), axis=1).sum(axis=0)
    n_fields = 2 if two else 1
    per_field = save_stride * grid.n_cells * np.arange(times.size) * n_paths
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(per_field > 0, (neg_u + neg_v) / (n_fields * per_field), 0.0)
        frac_u = np.where(per_field > 0, neg_u / per_field, 0.0)
    mean_u, se_u = mean_and_se(mu)
    var_u, se_var_u = cov_with_se(mu, mu)
    kw = dict(mean_mass_v=None, se_mass_v=None, cov_uv=None, se_cov=None, cov_rhs=None,
              se_cov_rhs=None, cov_minus_rhs=None, se_cov_minus_rhs=None)
    if two:
        mean_v, se_v = mean_and_se(mv)
        cov, se_cov = cov_with_se(mu, mv)
        rhs_mean, rhs_se = mean_and_se(rhs)
        diff, se_diff = cov_minus_mean_with_se(mu, mv, rhs)
        kw = dict(mean_mass_v=mean_v, se_mass_v=se_v, cov_uv=cov, se_cov=se_cov,
                  cov_rhs=rhs_mean, se_cov_rhs=rhs_se, cov_minus_rhs=diff,
                  se_cov_minus_rhs=se_diff)
    return EnsembleStats(
        times=times, n_paths=n_paths, seed=int(seed), mass_u=mu, mass_v=mv,
        cov_rhs_paths=rhs, mean_mass_u=mean_u, se_mass_u=se_u, var_mass_u=var_u,
        se_var_mass_u=se_var_u, frac_negative=frac, frac_negative_u=frac_u,
        min_value_seen=float(min(b.min_value.min() for b in blocks)), **kw)


def run_ensemble(grid, u0, v0, sigma1, sigma2, seed, n_paths, save_stride=1,
                 workers=1, block_size=64, path_indices=None):
    """Simulate ``n_paths`` independent paths and aggregate them.

    Path ``i`` uses path index ``i`` unless ``path_indices`` overrides the
    list.  Blocks of paths may run on ``workers`` threads; results are gathered
    in path order, so the statistics do not depend on ``workers`` or
    ``block_size``.
    """
    if path_indices is None:
        if n_paths < 2:
            raise DomainError(f"an ensemble needs n_paths >= 2, got {n_paths}")
        path_indices = np.arange(n_paths, dtype=np.uint64)
    else:
        path_indices = np.asarray(path_indices, dtype=np.uint64)
        n_paths = path_indices.size
        if n_paths < 2:
            raise DomainError(f"an ensemble needs n_paths >= 2, got {n_paths}")
    _check_profile(u0, grid, "u0")
    if v0 is not None:
        _check_profile(v0, grid, "v0")
    times = _saved_times(grid, save_stride)
    chunks = [path_indices[i:i + block_size] for i in range(0, n_paths, block_size)]
    t0 = time.perf_counter()
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(
                lambda ids: _run_block(grid, u0, v0, sigma1, sigma2, seed, ids, save_stride),
                chunks))
    else:
        blocks = [_run_block(grid, u0, v0, sigma1, sigma2, seed, ids, save_stride)
                  for ids in chunks]
    stats = _aggregate(times, seed, n_paths, blocks, v0 is not None, grid, save_stride)
    stats.wall_time_s = time.perf_counter() - t0
    return stats


def _fmt(x):
    if x is None:
        return ""
    x = float(x)
    return repr(x) if math.isfinite(x) else "nan"


def write_stats_csv(stats, fh):
    """Write the per-time table to an open text stream."""
    fh.write(",".join(STATS_COLUMNS) + "\n")
    for row in stats.rows():
        fh.write(",".join(_fmt(row[c]) for c in STATS_COLUMNS) + "\n")


def run_manifest(grid, sigma1, sigma2, seed, n_paths, stats=None, extra=None):
    m = {
        "grid": grid.to_dict(),
        "sigma1": sigma1.to_dict(),
        "sigma2": sigma2.to_dict() if sigma2 is not None else None,
        "seed": int(seed),
        "n_paths": int(n_paths),
    }
    if stats is not None:
        m["wall_time_s"] = stats.wall_time_s
        m["min_value_seen"] = stats.min_value_seen
    if extra:
        m.update(extra)
    return m


def manifest_json(manifest):
    return json.dumps(manifest, indent=2, sort_keys=True) + "\n"
