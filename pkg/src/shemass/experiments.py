"""Configured verification campaigns.

A campaign is a pure function of its config: it builds the grid, profiles and
nonlinearities, runs (or reuses) one Monte Carlo ensemble, compares it with the
analytic quantities from ``kernels`` and ``bounds``, and returns a ``Report``.
Reports are written as one CSV table plus one JSON manifest.  Neither contains
timings or execution-only settings, so reruns produce identical files.

Configs are INI files.  ``SCHEMA`` lists every accepted key; it also generates
the CLI help, so the two cannot drift apart.
"""

import configparser
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import __version__
from .bounds import (
    corollary1_bound,
    corollary1_exponent,
    corollary2_energy_bound,
    default_delta_param,
    pam_variance_budget,
    theorem_bound,
    theorem_threshold,
)
from .errors import ConfigError, DomainError
from .kernels import ROUTES, DiffusionParams, mutual_energy
from .profiles import (
    default_epsilon,
    fourier_overlap_measure,
    make_profile,
    read_profile_csv,
    support_separation,
)
from .simulator import BOUNDARIES, GridSpec, NonlinearitySpec, run_ensemble
from .stats import Z_ONE_SIDED_95, Z_TWO_SIDED_95

__all__ = [
    "CAMPAIGNS",
    "SCHEMA",
    "ExperimentConfig",
    "Report",
    "load_config",
    "default_config_text",
    "ensemble_for",
    "run_campaign",
    "run_martingale",
    "run_cov_identity",
    "run_theorem_sweep",
    "run_corollary1",
    "run_corollary2",
    "run_pam_truncation",
    "write_report",
    "atomic_write",
    "output_dir_for",
    "report_csv_text",
    "report_json_text",
    "schema_help",
]

CAMPAIGNS = ("martingale", "cov_identity", "theorem_sweep", "corollary1", "corollary2",
             "pam_truncation")


@dataclass(frozen=True)
class Key:
    section: str
    name: str
    kind: str  # float, int, str, floats, bool
    default: object
    help: str
    choices: tuple = ()
    # execution-only keys stay out of reports so output does not depend on them
    provenance: bool = True


def _profile_keys(section):
    return [
        Key(section, "kind", "str", None, "profile kind; leave the section out for no second field",
            ("indicator", "gaussian_bump", "constant", "custom")),
        Key(section, "a", "float", None, "indicator: left end"),
        Key(section, "b", "float", None, "indicator: right end"),
        Key(section, "value", "float", None, "indicator/constant: height (default 1)"),
        Key(section, "center", "float", None, "gaussian_bump: center"),
        Key(section, "width", "float", None, "gaussian_bump: standard deviation"),
        Key(section, "mass", "float", None, "gaussian_bump: total mass"),
        Key(section, "cutoff", "float", None, "gaussian_bump: support radius in widths (default 8)"),
        Key(section, "half_width", "float", None, "constant: truncate to [-half_width, half_width]"),
        Key(section, "csv", "str", None, "custom: CSV file with columns x,value on the grid nodes"),
    ]


def _sigma_keys(section):
    return [
        Key(section, "kind", "str", "zero", "nonlinearity kind", ("zero", "linear", "custom")),
        Key(section, "lam", "float", 0.0, "linear: slope lambda >= 0"),
        Key(section, "knots", "floats", None, "custom: increasing knots starting at 0"),
        Key(section, "values", "floats", None, "custom: nonnegative values, first one 0"),
        Key(section, "lip", "float", None, "declared Lipschitz constant (default: computed)"),
    ]


SCHEMA = tuple([
    Key("experiment", "name", "str", None, "campaign to run", CAMPAIGNS),
    Key("experiment", "seed", "int", 0, "global seed for the counter-based noise"),
    Key("experiment", "n_paths", "int", 1024,
        "Monte Carlo paths (0 = analytic only, corollary campaigns)"),
    Key("experiment", "output_dir", "str", None,
        "directory for CSV/JSON output (default: $SHEMASS_OUTPUT_DIR or the current directory)",
        provenance=False),
    Key("experiment", "workers", "int", 1, "threads running path blocks", provenance=False),
    Key("experiment", "block_size", "int", 64, "paths per block", provenance=False),
    Key("grid", "half_length", "float", 16.0, "domain is [-L, L]; snapped up to a multiple of dx"),
    Key("grid", "dx", "float", 1 / 32, "mesh width"),
    Key("grid", "t_end", "float", 0.5, "final time"),
    Key("grid", "theta", "float", 1.0, "diffusion parameter theta"),
    Key("grid", "dt", "float", None, "time step target (default dx^2 / (2 theta))"),
    Key("grid", "boundary", "str", "dirichlet_zero", "boundary condition", BOUNDARIES),
    Key("grid", "time_quantum", "float", 0.05,
        "masses are saved every time_quantum; dt is snapped to divide it"),
    *_profile_keys("profile.u0"),
    *_profile_keys("profile.v0"),
    *_sigma_keys("sigma.1"),
    *_sigma_keys("sigma.2"),
    Key("bounds", "beta_grid", "floats", (1.0, 2.0, 4.0), "beta values for energies and bounds"),
    Key("bounds", "times", "floats", (0.1, 0.25, 0.5),
        "report times; multiples of time_quantum, at most t_end"),
    Key("bounds", "delta_param", "float", None,
        "corollary1: beta = delta_param (separation / t)^2 (default 1 / (4 theta))"),
    Key("bounds", "epsilon_rel", "float", 1e-6,
        "corollary2: spectral threshold relative to the largest |f^|"),
    Key("bounds", "route", "str", "real-space", "energy route used for verdicts", ROUTES),
    Key("tolerances", "n_se", "float", 4.0, "allowed deviation in standard errors"),
    Key("tolerances", "bias_frac", "float", 0.02,
        "extra mean-mass allowance as a fraction of the initial mass"),
    Key("tolerances", "negative_frac_max", "float", 0.05,
        "largest accepted fraction of negative raw field samples"),
    Key("tolerances", "positive_corr_n_se", "float", 2.0,
        "covariance point estimate must be >= -this * SE"),
    Key("tolerances", "z_two_sided", "float", Z_TWO_SIDED_95,
        "z for two-sided confidence limits (95%)"),
    Key("tolerances", "z_one_sided", "float", Z_ONE_SIDED_95,
        "z for one-sided confidence limits (95%)"),
    Key("tolerances", "energy_slack", "float", 1e-6,
        "corollary2: absolute slack in bound >= energy"),
    Key("tolerances", "gibbs_rel", "float", 1e-3,
        "corollary2: relative slack added when a profile is discontinuous"),
    Key("tolerances", "corollary1_max", "float", 1e-6,
        "corollary1: the bound must stay below this value"),
    Key("pam", "truncations", "floats", (2.0, 4.0, 8.0), "truncation radii N of u0 = value * 1[-N, N]"),
    Key("pam", "value", "float", 1.0, "height of the constant initial profile"),
    Key("pam", "beta", "float", 1.0, "beta in the variance budget"),
])

_BY_SECTION = {}
for _k in SCHEMA:
    _BY_SECTION.setdefault(_k.section, {})[_k.name] = _k


def schema_help():
    """Plain-text listing of all sections and keys."""
    lines = []
    for section, keys in _BY_SECTION.items():
        lines.append(f"[{section}]")
        for k in keys.values():
            default = "" if k.default is None else f" (default {_format_value(k.default)})"
            choices = f" one of {', '.join(k.choices)};" if k.choices else ""
            lines.append(f"  {k.name}: {k.kind};{choices} {k.help}{default}")
    return "\n".join(lines)


def _format_value(v):
    if isinstance(v, (tuple, list)):
        return ", ".join(_format_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_value(key, raw):
    raw = raw.strip()
    if raw == "":
        return None
    try:
        if key.kind == "float":
            value = float(raw)
        elif key.kind == "int":
            value = int(raw)
        elif key.kind == "bool":
            value = {"true": True, "false": False, "1": True, "0": False}[raw.lower()]
        elif key.kind == "floats":
            value = tuple(float(x) for x in raw.replace(",", " ").split())
        else:
            value = raw
    except (ValueError, KeyError):
        raise ConfigError(f"[{key.section}] {key.name}: cannot read {raw!r} as {key.kind}") from None
    if key.choices and value not in key.choices:
        raise ConfigError(f"[{key.section}] {key.name} must be one of {key.choices}, got {value!r}")
    return value


@dataclass
class ExperimentConfig:
    """Typed values for every schema key, plus which optional sections are present."""

    values: dict
    present: frozenset = field(default_factory=frozenset)

    def get(self, section, name):
        return self.values[section][name]

    def has(self, section):
        return section in self.present

    @property
    def name(self):
        return self.get("experiment", "name")

    @property
    def seed(self):
        return self.get("experiment", "seed")

    @property
    def n_paths(self):
        return self.get("experiment", "n_paths")

    @property
    def theta(self):
        return self.get("grid", "theta")

    def grid(self):
        g = self.values["grid"]
        return GridSpec(g["half_length"], g["dx"], g["t_end"], theta=g["theta"], dt=g["dt"],
                        boundary=g["boundary"], time_quantum=g["time_quantum"])

    def profile(self, which, grid=None):
        section = f"profile.{which}"
        if not self.has(section):
            if which == "u0":
                raise ConfigError(f"campaign {self.name} needs [{section}]")
            return None
        grid = grid or self.grid()
        p = {k: v for k, v in self.values[section].items() if v is not None}
        kind = p.pop("kind", None)
        if kind is None:
            raise ConfigError(f"[{section}] needs a kind")
        if kind == "custom":
            if "csv" not in p:
                raise ConfigError(f"[{section}] custom profiles need csv")
            prof = read_profile_csv(p["csv"])
            if not prof.grid.same_as(grid.sample_grid()):
                raise ConfigError(f"[{section}] {p['csv']} is not sampled on the simulation grid")
            return prof
        p.pop("csv", None)
        try:
            return make_profile(kind, grid, **p)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"[{section}] missing or unexpected parameter for {kind}: {exc}") from None

    def sigma(self, which):
        s = self.values[f"sigma.{which}"]
        kind = s["kind"]
        if kind == "zero":
            return NonlinearitySpec.zero()
        if kind == "linear":
            spec = NonlinearitySpec.linear(s["lam"] or 0.0)
            if s["lip"] is not None:
                spec = NonlinearitySpec("linear", lam=spec.lam, lip_constant=s["lip"])
            return spec
        if s["knots"] is None or s["values"] is None:
            raise ConfigError(f"[sigma.{which}] custom sigma needs knots and values")
        return NonlinearitySpec.custom(s["knots"], s["values"], lip_constant=s["lip"])

    def save_stride(self, grid):
        return round(grid.time_quantum / grid.dt)

    def times(self, grid):
        ts = self.get("bounds", "times")
        for t in ts:
            if t > grid.t_end * (1 + 1e-12) or t < 0:
                raise ConfigError(f"report time {t} outside [0, t_end={grid.t_end}]")
            if abs(t / grid.time_quantum - round(t / grid.time_quantum)) > 1e-9:
                raise ConfigError(f"report time {t} is not a multiple of time_quantum")
        return ts

    def to_dict(self, provenance_only=True):
        out = {}
        for section, keys in _BY_SECTION.items():
            if section.startswith("profile.") and not self.has(section):
                continue
            out[section] = {
                name: (list(v) if isinstance(v, tuple) else v)
                for name, v in self.values[section].items()
                if not provenance_only or keys[name].provenance
            }
        return out

    def to_ini(self):
        cp = configparser.ConfigParser(interpolation=None)
        for section, entries in self.to_dict(provenance_only=False).items():
            cp[section] = {k: "" if v is None else _format_value(v) for k, v in entries.items()}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def default_config_text(name):
    """Text of the packaged default config for campaign ``name``."""
    if name not in CAMPAIGNS:
        raise ConfigError(f"unknown campaign {name!r}; expected one of {CAMPAIGNS}")
    return resources.files("shemass").joinpath("configs", f"{name}.cfg").read_text()


def _read_into(cp, text, origin):
    try:
        cp.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError(f"{origin}: {exc}") from None


def load_config(path=None, name=None, overrides=(), seed=None):
    """Build a config from defaults, the packaged config of ``name``, a file, and overrides.

    Later sources win.  ``overrides`` are ``section.key=value`` strings;
    ``profile.u0.kind=...`` style names use the last dot as the separator.
    """
    cp = configparser.ConfigParser(interpolation=None)
    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        probe = configparser.ConfigParser(interpolation=None)
        _read_into(probe, text, str(path))
        file_name = probe.get("experiment", "name", fallback=None)
        base = name or file_name
        if base in CAMPAIGNS:
            _read_into(cp, default_config_text(base), f"<default {base}>")
        _read_into(cp, text, str(path))
    elif name is not None:
        _read_into(cp, default_config_text(name), f"<default {name}>")
    if name is not None:
        if not cp.has_section("experiment"):
            cp.add_section("experiment")
        cp.set("experiment", "name", name)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not section.key=value")
        lhs, value = item.split("=", 1)
        if "." not in lhs:
            raise ConfigError(f"override {item!r} is not section.key=value")
        section, key = lhs.strip().rsplit(".", 1)
        if section not in _BY_SECTION or key not in _BY_SECTION[section]:
            raise ConfigError(f"unknown config key {lhs!r}")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key, value)
    if seed is not None:
        if not cp.has_section("experiment"):
            cp.add_section("experiment")
        cp.set("experiment", "seed", str(int(seed)))
    return _from_parser(cp)


def _from_parser(cp):
    for section in cp.sections():
        if section not in _BY_SECTION:
            raise ConfigError(f"unknown config section [{section}]")
        for key in cp[section]:
            if key not in _BY_SECTION[section]:
                raise ConfigError(f"unknown config key [{section}] {key}")
    values = {}
    for section, keys in _BY_SECTION.items():
        values[section] = {}
        for name, key in keys.items():
            raw = cp.get(section, name, fallback=None) if cp.has_section(section) else None
            value = key.default if raw is None else _parse_value(key, raw)
            if value is None and raw is not None:
                value = key.default
            values[section][name] = value
    cfg = ExperimentConfig(values, frozenset(cp.sections()))
    if cfg.name is None:
        raise ConfigError("[experiment] name is required")
    if cfg.name not in CAMPAIGNS:
        raise ConfigError(f"unknown campaign {cfg.name!r}")
    if cfg.n_paths < 0 or cfg.seed < 0:
        raise ConfigError("n_paths and seed must be nonnegative")
    if cfg.get("experiment", "workers") < 1 or cfg.get("experiment", "block_size") < 1:
        raise ConfigError("workers and block_size must be >= 1")
    return cfg


@dataclass
class Report:
    campaign: str
    config: dict
    table: list
    columns: tuple
    checks: dict
    summary: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(self.checks.values())

    @property
    def verdict(self):
        return "PASS" if self.passed else "FAIL"

    def column(self, name):
        return np.array([np.nan if r[name] is None else r[name] for r in self.table], dtype=float)

    def to_dict(self):
        return {
            "campaign": self.campaign,
            "version": __version__,
            "verdict": self.verdict,
            "checks": self.checks,
            "summary": self.summary,
            "notes": self.notes,
            "config": self.config,
            "table": self.table,
        }


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        x = float(v)
        return repr(x) if math.isfinite(x) else "nan"
    return str(v)


def report_csv_text(report):
    lines = [",".join(report.columns)]
    for row in report.table:
        lines.append(",".join(_csv_cell(row[c]) for c in report.columns))
    return "\n".join(lines) + "\n"


def report_json_text(report):
    return json.dumps(_clean(report.to_dict()), indent=2, sort_keys=True, allow_nan=False) + "\n"


def atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def output_dir_for(config, out=None):
    d = out or config.get("experiment", "output_dir") or os.environ.get("SHEMASS_OUTPUT_DIR") or "."
    os.makedirs(d, exist_ok=True)
    return d


def write_report(report, directory, stem=None):
    """Write ``<stem>.csv`` and ``<stem>.json``; both texts are built before either file is touched."""
    stem = stem or report.campaign
    csv_text = report_csv_text(report)
    json_text = report_json_text(report)
    csv_path = os.path.join(directory, f"{stem}.csv")
    json_path = os.path.join(directory, f"{stem}.json")
    atomic_write(csv_path, csv_text)
    atomic_write(json_path, json_text)
    return csv_path, json_path


def ensemble_for(config, u0=None, v0=None, sigma1=None, sigma2=None, grid=None):
    """Run the ensemble a config describes; the pieces may be overridden."""
    grid = grid or config.grid()
    u0 = u0 if u0 is not None else config.profile("u0", grid)
    if v0 is None and config.has("profile.v0"):
        v0 = config.profile("v0", grid)
    sigma1 = sigma1 or config.sigma("1")
    if sigma2 is None and v0 is not None:
        sigma2 = config.sigma("2")
    return run_ensemble(grid, u0, v0, sigma1, sigma2, config.seed, config.n_paths,
                        save_stride=config.save_stride(grid),
                        workers=config.get("experiment", "workers"),
                        block_size=config.get("experiment", "block_size"))


def _check_ensemble(ensemble, config, grid, need_pair):
    if ensemble.n_paths != config.n_paths or ensemble.seed != config.seed:
        raise ConfigError("the supplied ensemble was not produced with this config's seed/n_paths")
    expected = grid.t_end * config.save_stride(grid) * np.arange(ensemble.times.size) / grid.n_steps
    if ensemble.times.size != grid.n_steps // config.save_stride(grid) + 1 or not np.allclose(
            ensemble.times, expected):
        raise ConfigError("the supplied ensemble has different saved times")
    if need_pair and not ensemble.two_fields:
        raise ConfigError("this campaign needs an ensemble of two fields")


def _need_paths(config):
    if config.n_paths < 2:
        raise ConfigError(f"campaign {config.name} needs n_paths >= 2")


def run_martingale(config, ensemble=None):
    """Mean total mass of ``u`` against its initial value at every saved time."""
    _need_paths(config)
    grid = config.grid()
    u0 = config.profile("u0", grid)
    sigma1 = config.sigma("1")
    if ensemble is None:
        ensemble = run_ensemble(grid, u0, None, sigma1, None, config.seed, config.n_paths,
                                save_stride=config.save_stride(grid),
                                workers=config.get("experiment", "workers"),
                                block_size=config.get("experiment", "block_size"))
    _check_ensemble(ensemble, config, grid, need_pair=False)
    n_se = config.get("tolerances", "n_se")
    bias = config.get("tolerances", "bias_frac") * u0.l1_norm
    neg_max = config.get("tolerances", "negative_frac_max")
    rows = []
    for i, t in enumerate(ensemble.times):
        dev = ensemble.mean_mass_u[i] - u0.l1_norm
        allowed = n_se * ensemble.se_mass_u[i] + bias
        rows.append({
            "t": t, "mean_mass": ensemble.mean_mass_u[i], "se_mass": ensemble.se_mass_u[i],
            "initial_mass": u0.l1_norm, "deviation": dev, "allowed": allowed,
            "frac_negative": ensemble.frac_negative_u[i], "flat": bool(abs(dev) <= allowed),
        })
    checks = {
        "mean_mass_flat": all(r["flat"] for r in rows),
        "negative_fraction_small": bool(ensemble.frac_negative_u[-1] < neg_max),
    }
    summary = {
        "initial_mass": u0.l1_norm,
        "max_abs_deviation": max(abs(r["deviation"]) for r in rows),
        "frac_negative": ensemble.frac_negative_u[-1],
        "min_value_seen": ensemble.min_value_seen,
    }
    cols = ("t", "mean_mass", "se_mass", "initial_mass", "deviation", "allowed",
            "frac_negative", "flat")
    return Report("martingale", config.to_dict(), rows, cols, checks, summary)


def run_cov_identity(config, ensemble=None):
    """Covariance of the two total masses against the accumulated integrand mean."""
    _need_paths(config)
    grid = config.grid()
    if not config.has("profile.v0"):
        raise ConfigError("cov_identity needs [profile.v0]")
    if ensemble is None:
        ensemble = ensemble_for(config, grid=grid)
    _check_ensemble(ensemble, config, grid, need_pair=True)
    n_se = config.get("tolerances", "n_se")
    pos_se = config.get("tolerances", "positive_corr_n_se")
    z = config.get("tolerances", "z_two_sided")
    rows = []
    for i, t in enumerate(ensemble.times):
        cov, se = ensemble.cov_uv[i], ensemble.se_cov[i]
        diff, se_diff = ensemble.cov_minus_rhs[i], ensemble.se_cov_minus_rhs[i]
        rows.append({
            "t": t, "cov_uv": cov, "se_cov": se, "cov_rhs": ensemble.cov_rhs[i],
            "se_cov_rhs": ensemble.se_cov_rhs[i], "difference": diff, "se_difference": se_diff,
            "identity_holds": bool(abs(diff) <= n_se * se_diff),
            "upper_ci": cov + z * se,
            "positive_correlation": bool(cov >= -pos_se * se and cov + z * se >= 0),
        })
    checks = {
        "identity_holds": all(r["identity_holds"] for r in rows),
        "positive_correlation": all(r["positive_correlation"] for r in rows),
    }
    summary = {
        "max_abs_difference_in_se": max(
            (abs(r["difference"]) / r["se_difference"] if r["se_difference"] > 0 else 0.0)
            for r in rows),
        "min_value_seen": ensemble.min_value_seen,
        "frac_negative": ensemble.frac_negative[-1],
    }
    cols = ("t", "cov_uv", "se_cov", "cov_rhs", "se_cov_rhs", "difference", "se_difference",
            "identity_holds", "upper_ci", "positive_correlation")
    return Report("cov_identity", config.to_dict(), rows, cols, checks, summary)


def _energies(config, u0, v0, betas):
    params = DiffusionParams(config.theta)
    out = {}
    for b in betas:
        out[b] = {route: mutual_energy(u0, v0, b, params, route=route) for route in ROUTES}
    return out


def run_theorem_sweep(config, ensemble=None):
    """Covariance upper confidence limits against the theorem bound over (beta, t)."""
    _need_paths(config)
    grid = config.grid()
    if not config.has("profile.v0"):
        raise ConfigError("theorem_sweep needs [profile.v0]")
    u0, v0 = config.profile("u0", grid), config.profile("v0", grid)
    s1, s2 = config.sigma("1"), config.sigma("2")
    lip1, lip2, theta = s1.lip_constant, s2.lip_constant, config.theta
    betas = config.get("bounds", "beta_grid")
    threshold = theorem_threshold(lip1, lip2, theta)
    bad = [b for b in betas if not b > threshold]
    if bad:
        raise DomainError(f"beta grid has inadmissible values {bad}; need beta > {threshold:.6g}")
    times = config.times(grid)
    if ensemble is None:
        ensemble = ensemble_for(config, grid=grid)
    _check_ensemble(ensemble, config, grid, need_pair=True)
    z = config.get("tolerances", "z_two_sided")
    route = config.get("bounds", "route")
    energies = _energies(config, u0, v0, betas)
    rows = []
    margins = {}
    for t in times:
        i = ensemble.index_of(t)
        cov, se = ensemble.cov_uv[i], ensemble.se_cov[i]
        upper = cov + z * se
        best = None
        for b in betas:
            rep = theorem_bound(b, t, lip1, lip2, theta, energies[b][route].value,
                                energies[b][route].quadrature_error_estimate)
            alt = "fourier" if route == "real-space" else "real-space"
            rep_alt = theorem_bound(b, t, lip1, lip2, theta, energies[b][alt].value)
            row = {
                "beta": b, "t": t, "cov_uv": cov, "se_cov": se, "upper_ci": upper,
                "energy_real_space": energies[b]["real-space"].value,
                "energy_fourier": energies[b]["fourier"].value,
                "energy_error": energies[b][route].quadrature_error_estimate,
                "bound": rep.bound_value, "bound_other_route": rep_alt.bound_value,
                "dominated": bool(upper <= rep.bound_value),
                "dominated_other_route": bool(upper <= rep_alt.bound_value),
            }
            rows.append(row)
            if best is None or rep.bound_value < best["bound"]:
                best = row
        margins[t] = {"best_beta": best["beta"], "bound": best["bound"],
                      "margin": best["bound"] - upper}
    checks = {
        "all_dominated": all(r["dominated"] for r in rows),
        "routes_agree": all(r["dominated"] == r["dominated_other_route"] for r in rows),
        "positive_margin_at_best_beta": all(
            m["margin"] > 0 for t, m in margins.items() if t > 0),
    }
    summary = {
        "threshold": threshold,
        "best_beta_by_time": [{"t": t, **m} for t, m in margins.items()],
    }
    cols = ("beta", "t", "cov_uv", "se_cov", "upper_ci", "energy_real_space", "energy_fourier",
            "energy_error", "bound", "bound_other_route", "dominated", "dominated_other_route")
    return Report("theorem_sweep", config.to_dict(), rows, cols, checks, summary)


def corollary1_window(separation, lip1, lip2, theta, delta_param):
    """Largest t for which ``beta = delta_param (separation/t)^2`` is admissible."""
    if separation <= 0:
        return 0.0
    if lip1 * lip2 == 0:
        return math.inf
    return separation * math.sqrt(4 * theta * delta_param) / (lip1 * lip2)


def run_corollary1(config, ensemble=None):
    """Covariance of masses started from separated supports against the separation bound."""
    grid = config.grid()
    if not config.has("profile.v0"):
        raise ConfigError("corollary1 needs [profile.v0]")
    u0, v0 = config.profile("u0", grid), config.profile("v0", grid)
    s1, s2 = config.sigma("1"), config.sigma("2")
    lip1, lip2, theta = s1.lip_constant, s2.lip_constant, config.theta
    separation = support_separation(u0, v0)
    delta = config.get("bounds", "delta_param")
    if delta is None:
        delta = default_delta_param(theta)
    times = [t for t in config.times(grid) if t > 0]
    window = corollary1_window(separation, lip1, lip2, theta, delta)
    if config.n_paths > 0 and ensemble is None:
        _need_paths(config)
        ensemble = ensemble_for(config, u0=u0, v0=v0, grid=grid)
    if ensemble is not None:
        _check_ensemble(ensemble, config, grid, need_pair=True)
    n_se = config.get("tolerances", "n_se")
    cap = config.get("tolerances", "corollary1_max")
    rows = []
    notes = []
    if separation == 0:
        notes.append("supports touch or overlap: separation 0, the horizon window is empty")
    for t in times:
        row = {"t": t, "separation": separation, "delta_param": delta, "in_window": t < window,
               "beta": None, "exponent": None, "bound": None, "below_cap": None,
               "cov_uv": None, "se_cov": None, "cov_is_zero": None}
        if t < window:
            row["beta"] = delta * (separation / t) ** 2
            row["exponent"] = corollary1_exponent(t, separation, theta, delta)
            row["bound"] = corollary1_bound(t, separation, lip1, lip2, theta,
                                            u0.l1_norm, v0.l1_norm, delta)
            row["below_cap"] = bool(row["bound"] < cap)
        if ensemble is not None:
            i = ensemble.index_of(t)
            row["cov_uv"], row["se_cov"] = ensemble.cov_uv[i], ensemble.se_cov[i]
            row["cov_is_zero"] = bool(abs(row["cov_uv"]) <= n_se * row["se_cov"])
        rows.append(row)
    in_window = [r for r in rows if r["in_window"]]
    checks = {
        "window_nonempty": bool(in_window),
        "bound_below_cap": bool(in_window) and all(r["below_cap"] for r in in_window),
    }
    if ensemble is not None:
        checks["covariance_statistically_zero"] = all(r["cov_is_zero"] for r in rows)
    summary = {"separation": separation, "delta_param": delta, "window_t_max": window,
               "l1_u0": u0.l1_norm, "l1_v0": v0.l1_norm, "lip1": lip1, "lip2": lip2}
    cols = ("t", "separation", "delta_param", "in_window", "beta", "exponent", "bound",
            "below_cap", "cov_uv", "se_cov", "cov_is_zero")
    return Report("corollary1", config.to_dict(), rows, cols, checks, summary, notes)


def _discontinuous(profile):
    d = profile.descriptor
    return d is None or d["kind"] in ("indicator", "constant")


def run_corollary2(config, ensemble=None):
    """Spectral-overlap energy bound against the computed energies, and the covariance bound it implies."""
    grid = config.grid()
    if not config.has("profile.v0"):
        raise ConfigError("corollary2 needs [profile.v0]")
    u0, v0 = config.profile("u0", grid), config.profile("v0", grid)
    if u0.is_zero() or v0.is_zero():
        raise DomainError("corollary2 needs two profiles with positive mass")
    s1, s2 = config.sigma("1"), config.sigma("2")
    lip1, lip2, theta = s1.lip_constant, s2.lip_constant, config.theta
    betas = config.get("bounds", "beta_grid")
    epsilon = default_epsilon(u0, v0, rel=config.get("bounds", "epsilon_rel"))
    overlap = fourier_overlap_measure(u0, v0, epsilon)
    slack_abs = config.get("tolerances", "energy_slack")
    gibbs = config.get("tolerances", "gibbs_rel") if (
        _discontinuous(u0) or _discontinuous(v0)) else 0.0
    times = config.times(grid)
    if config.n_paths > 0 and ensemble is None:
        _need_paths(config)
        ensemble = ensemble_for(config, u0=u0, v0=v0, grid=grid)
    if ensemble is not None:
        _check_ensemble(ensemble, config, grid, need_pair=True)
    z = config.get("tolerances", "z_two_sided")
    threshold = theorem_threshold(lip1, lip2, theta)
    energies = _energies(config, u0, v0, betas)
    rows = []
    for b in betas:
        ebound = corollary2_energy_bound(b, u0.l1_norm, v0.l1_norm, overlap)
        e_real = energies[b]["real-space"].value
        e_four = energies[b]["fourier"].value
        allowance = slack_abs + gibbs * max(e_real, e_four)
        for t in times:
            row = {"beta": b, "t": t, "overlap_measure": overlap, "energy_bound": ebound,
                   "energy_real_space": e_real, "energy_fourier": e_four,
                   "energy_dominated": bool(ebound + allowance >= max(e_real, e_four)),
                   "cov_bound": None, "cov_uv": None, "upper_ci": None, "cov_dominated": None}
            if b > threshold:
                row["cov_bound"] = theorem_bound(b, t, lip1, lip2, theta, ebound).bound_value
            if ensemble is not None:
                i = ensemble.index_of(t)
                row["cov_uv"] = ensemble.cov_uv[i]
                row["upper_ci"] = ensemble.cov_uv[i] + z * ensemble.se_cov[i]
                if row["cov_bound"] is not None:
                    row["cov_dominated"] = bool(row["upper_ci"] <= row["cov_bound"])
            rows.append(row)
    checks = {"energy_dominated": all(r["energy_dominated"] for r in rows)}
    if ensemble is not None:
        checks["covariance_dominated"] = all(
            r["cov_dominated"] for r in rows if r["cov_dominated"] is not None)
    summary = {"epsilon": epsilon, "overlap_measure": overlap,
               "max_overlap_measure": 2 * math.pi / grid.dx, "gibbs_rel": gibbs}
    notes = []
    if overlap >= 0.5 * summary["max_overlap_measure"]:
        notes.append("the thresholded spectra overlap on most of the resolvable band; "
                     "the spectral horizon is vacuous at this resolution")
    cols = ("beta", "t", "overlap_measure", "energy_bound", "energy_real_space", "energy_fourier",
            "energy_dominated", "cov_bound", "cov_uv", "upper_ci", "cov_dominated")
    return Report("corollary2", config.to_dict(), rows, cols, checks, summary, notes)


def run_pam_truncation(config, ensembles=None):
    """Mean and variance of the total mass from truncated constant data ``value * 1[-N, N]``.

    ``ensembles`` may map each N to a precomputed single-field ensemble.
    """
    _need_paths(config)
    grid = config.grid()
    sigma = config.sigma("1")
    theta = config.theta
    value = config.get("pam", "value")
    beta = config.get("pam", "beta")
    truncations = config.get("pam", "truncations")
    if list(truncations) != sorted(truncations) or len(set(truncations)) != len(truncations):
        raise ConfigError("pam truncations must increase strictly")
    reach = truncations[-1] + 6 * math.sqrt(theta * grid.t_end)
    if reach > grid.half_length:
        raise ConfigError(
            f"grid half_length {grid.half_length} < N + 6 sqrt(theta t_end) = {reach:.4g} "
            f"for N = {truncations[-1]}")
    t = grid.t_end
    n_se = config.get("tolerances", "n_se")
    bias_frac = config.get("tolerances", "bias_frac")
    z1 = config.get("tolerances", "z_one_sided")
    rows = []
    means = {}
    for n_trunc in truncations:
        u0 = make_profile("constant", grid, value=value, half_width=n_trunc)
        ens = (ensembles or {}).get(n_trunc)
        if ens is None:
            ens = run_ensemble(grid, u0, None, sigma, None, config.seed, config.n_paths,
                               save_stride=config.save_stride(grid),
                               workers=config.get("experiment", "workers"),
                               block_size=config.get("experiment", "block_size"))
        _check_ensemble(ens, config, grid, need_pair=False)
        budget = pam_variance_budget(beta, t, sigma.lip_constant, theta, u0.linf_norm, u0.l1_norm)
        i0, i1 = 0, ens.index_of(t)
        mean, se = ens.mean_mass_u[i1], ens.se_mass_u[i1]
        var, se_var = ens.var_mass_u[i1], ens.se_var_mass_u[i1]
        allowed = n_se * se + bias_frac * u0.l1_norm
        means[n_trunc] = (mean, se)
        rows.append({
            "N": n_trunc, "t": t, "initial_mass": u0.l1_norm,
            "mean_mass_t0": ens.mean_mass_u[i0], "var_mass_t0": ens.var_mass_u[i0],
            "mean_mass": mean, "se_mass": se, "mean_conserved": bool(abs(mean - u0.l1_norm) <= allowed),
            "var_mass": var, "se_var": se_var, "var_lower": var - z1 * se_var,
            "var_upper": var + z1 * se_var, "budget": budget,
            "budget_holds": bool(var - z1 * se_var <= budget),
            "var_over_mean": var / mean, "budget_over_mean": budget / u0.l1_norm,
            "frac_negative": ens.frac_negative_u[i1],
        })
    doubling = []
    for a, b in zip(truncations[:-1], truncations[1:]):
        if abs(b - 2 * a) < 1e-12:
            (ma, sa), (mb, sb) = means[a], means[b]
            doubling.append({"N": a, "ratio": mb / ma,
                             "ok": bool(abs(mb - 2 * ma) <= n_se * math.hypot(sb, 2 * sa)
                                        + bias_frac * 2 * a * 2)})
    checks = {
        "initial_mass_exact": all(r["mean_mass_t0"] == r["initial_mass"] and r["var_mass_t0"] == 0
                                  for r in rows),
        "mean_conserved": all(r["mean_conserved"] for r in rows),
        "variance_within_budget": all(r["budget_holds"] for r in rows),
        "mean_doubles_with_N": all(d["ok"] for d in doubling),
    }
    summary = {"beta": beta, "doubling": doubling,
               "interpretation": "a finite ensemble exhibits the mechanism (mean mass grows like "
                                 "2N while Var/E stays bounded in N); it cannot show the almost "
                                 "sure statement for the untruncated data"}
    cols = ("N", "t", "initial_mass", "mean_mass_t0", "var_mass_t0", "mean_mass", "se_mass",
            "mean_conserved", "var_mass", "se_var", "var_lower", "var_upper", "budget",
            "budget_holds", "var_over_mean", "budget_over_mean", "frac_negative")
    return Report("pam_truncation", config.to_dict(), rows, cols, checks, summary)


_RUNNERS = {
    "martingale": run_martingale,
    "cov_identity": run_cov_identity,
    "theorem_sweep": run_theorem_sweep,
    "corollary1": run_corollary1,
    "corollary2": run_corollary2,
    "pam_truncation": run_pam_truncation,
}


def run_campaign(config):
    return _RUNNERS[config.name](config)
