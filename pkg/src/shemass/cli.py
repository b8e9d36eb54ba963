"""``shemass`` command line.

Exit status: 0 on success, 1 on domain, config or usage errors, 2 when the
simulation blows up.  Tables go to files; scalars go to stdout.
"""

import argparse
import io
import json
import math
import os
import sys
import time

from . import __version__
from .bounds import (
    corollary1_bound,
    corollary2_energy_bound,
    optimize_beta,
    pam_variance_budget,
    theorem_bound,
)
from .errors import ConfigError, DomainError, NumericalBlowup
from .experiments import (
    CAMPAIGNS,
    atomic_write,
    ensemble_for,
    load_config,
    output_dir_for,
    run_campaign,
    schema_help,
    write_report,
)
from .kernels import (
    ROUTES,
    DiffusionParams,
    heat_kernel,
    mutual_energy,
    resolvent_kernel,
    resolvent_kernel_laplace,
)
from .profiles import SampleGrid, make_profile, read_profile_csv
from .simulator import manifest_json, run_manifest, write_stats_csv

OUTPUT_ENV = "SHEMASS_OUTPUT_DIR"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x):
    return repr(float(x))


def parse_profile_spec(spec, grid):
    """``kind:key=value,...`` (or ``zero``, or ``csv:PATH``) to a profile on ``grid``."""
    spec = spec.strip()
    if spec == "zero":
        return make_profile("constant", grid, value=0.0)
    kind, _, rest = spec.partition(":")
    if kind == "csv":
        prof = read_profile_csv(rest)
        if not prof.grid.same_as(grid):
            raise ConfigError(f"{rest} is not sampled on the requested grid")
        return prof
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise ConfigError(f"profile parameter {item!r} is not key=value")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"profile parameter {item!r} is not numeric") from None
    try:
        return make_profile(kind, grid, **params)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"profile {spec!r}: missing or unexpected parameter {exc}") from None


def _grid_from_args(args):
    n = round(2 * args.half_length / args.dx) + 1
    return SampleGrid(-round(args.half_length / args.dx) * args.dx, args.dx, n)


def _add_grid_args(p):
    p.add_argument("--half-length", type=float, default=16.0, help="profiles live on [-L, L] (default 16)")
    p.add_argument("--dx", type=float, default=1 / 32, help="mesh width (default 1/32)")


def _cmd_kernel(args):
    params = DiffusionParams(args.theta)
    for x in args.x:
        if args.kind == "heat":
            value = heat_kernel(args.time, x, params)
        elif args.laplace:
            value = resolvent_kernel_laplace(args.beta, x, params)
        else:
            value = resolvent_kernel(args.beta, x, params)
        print(_fmt(value) if len(args.x) == 1 else f"{_fmt(x)} {_fmt(value)}")
    return 0


def _cmd_energy(args):
    grid = _grid_from_args(args)
    u0 = parse_profile_spec(args.u0, grid)
    v0 = parse_profile_spec(args.v0, grid)
    routes = ROUTES if args.route == "both" else (args.route,)
    params = DiffusionParams(args.theta)
    for route in routes:
        rep = mutual_energy(u0, v0, args.beta, params, route=route)
        print(f"{route} {_fmt(rep.value)} {_fmt(rep.quadrature_error_estimate)}")
    return 0


def _cmd_bound(args):
    if args.kind == "theorem":
        energy = args.energy
        if energy is None:
            if args.u0 is None or args.v0 is None:
                raise ConfigError("theorem bound needs --energy or both --u0 and --v0")
            grid = _grid_from_args(args)
            energy = mutual_energy(parse_profile_spec(args.u0, grid), parse_profile_spec(args.v0, grid),
                                   args.beta, DiffusionParams(args.theta)).value
        out = theorem_bound(args.beta, args.t, args.lip1, args.lip2, args.theta, energy).to_dict()
    elif args.kind == "optimize":
        grid = _grid_from_args(args)
        out = optimize_beta(args.t, args.lip1, args.lip2, args.theta,
                            parse_profile_spec(args.u0, grid), parse_profile_spec(args.v0, grid),
                            args.beta_grid).to_dict()
    elif args.kind == "corollary1":
        out = {"bound": corollary1_bound(args.t, args.separation, args.lip1, args.lip2, args.theta,
                                         args.l1_u0, args.l1_v0, args.delta_param)}
    elif args.kind == "corollary2":
        out = {"energy_bound": corollary2_energy_bound(args.beta, args.l1_u0, args.l1_v0, args.overlap)}
    else:
        out = {"variance_budget": pam_variance_budget(args.beta, args.t, args.lip, args.theta,
                                                      args.linf_u0, args.mean_mass)}
    print(json.dumps({k: (v if not isinstance(v, float) or math.isfinite(v) else None)
                      for k, v in out.items()}, sort_keys=True))
    return 0


def _config_from_args(args, name=None):
    return load_config(path=args.config, name=name, overrides=args.set or (), seed=args.seed)


def _cmd_simulate(args):
    cfg = _config_from_args(args, name=None if args.config else "cov_identity")
    if args.workers:
        cfg.values["experiment"]["workers"] = args.workers
    grid = cfg.grid()
    start = time.perf_counter()
    stats = ensemble_for(cfg, grid=grid)
    out_dir = output_dir_for(cfg, args.out)
    stem = args.stem or "ensemble"
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    json_path = os.path.join(out_dir, f"{stem}.json")
    manifest = run_manifest(grid, cfg.sigma("1"), cfg.sigma("2") if stats.two_fields else None,
                            cfg.seed, cfg.n_paths, stats,
                            extra={"version": __version__, "config": cfg.to_dict(),
                                   "total_wall_time_s": time.perf_counter() - start})
    buf = io.StringIO()
    write_stats_csv(stats, buf)
    atomic_write(csv_path, buf.getvalue())
    atomic_write(json_path, manifest_json(_finite(manifest)))
    print(csv_path)
    print(json_path)
    return 0


def _finite(obj):
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _cmd_experiment(args):
    if args.print_config:
        cfg = _config_from_args(args, name=args.name)
        sys.stdout.write(cfg.to_ini())
        return 0
    if args.name is None and args.config is None:
        raise ConfigError("experiment needs --name or --config")
    cfg = _config_from_args(args, name=args.name)
    if args.workers:
        cfg.values["experiment"]["workers"] = args.workers
    report = run_campaign(cfg)
    out_dir = output_dir_for(cfg, args.out)
    csv_path, json_path = write_report(report, out_dir, stem=args.stem)
    print(f"{report.campaign} {report.verdict}")
    for check, ok in report.checks.items():
        print(f"  {check}: {'PASS' if ok else 'FAIL'}")
    print(csv_path)
    print(json_path)
    return 0


def build_parser():
    p = _Parser(prog="shemass", description="Total-mass covariance of coupled stochastic heat equations.")
    p.add_argument("--version", action="version", version=f"shemass {__version__}")
    sub = p.add_subparsers(dest="command", metavar="{kernel,energy,simulate,bound,experiment}",
                           parser_class=_Parser)
    sub.required = True

    k = sub.add_parser("kernel", help="evaluate the resolvent or heat kernel")
    k.add_argument("--kind", choices=("resolvent", "heat"), default="resolvent")
    k.add_argument("--beta", type=float, default=1.0)
    k.add_argument("--time", type=float, default=1.0, help="heat kernel time r")
    k.add_argument("--theta", type=float, default=1.0)
    k.add_argument("--x", type=float, nargs="+", default=[0.0])
    k.add_argument("--laplace", action="store_true", help="resolvent by quadrature of the heat kernel")
    k.set_defaults(func=_cmd_kernel)

    profile_help = ("profile spec: zero | indicator:a=..,b=..[,value=..] | "
                    "gaussian_bump:center=..,width=..,mass=.. | constant:value=..[,half_width=..] | "
                    "csv:PATH")
    e = sub.add_parser("energy", help="mutual beta-energy of two profiles",
                       epilog=profile_help)
    e.add_argument("--u0", required=True)
    e.add_argument("--v0", required=True)
    e.add_argument("--beta", type=float, required=True)
    e.add_argument("--theta", type=float, default=1.0)
    e.add_argument("--route", choices=(*ROUTES, "both"), default="both")
    _add_grid_args(e)
    e.set_defaults(func=_cmd_energy)

    b = sub.add_parser("bound", help="analytic covariance bounds")
    bsub = b.add_subparsers(dest="kind", parser_class=_Parser)
    bsub.required = True
    bt = bsub.add_parser("theorem", help="covariance bound from the mutual energy", epilog=profile_help)
    bo = bsub.add_parser("optimize", help="best theorem bound over a beta grid", epilog=profile_help)
    for q in (bt, bo):
        q.add_argument("--t", type=float, required=True)
        q.add_argument("--lip1", type=float, required=True)
        q.add_argument("--lip2", type=float, required=True)
        q.add_argument("--theta", type=float, default=1.0)
        q.add_argument("--u0")
        q.add_argument("--v0")
        _add_grid_args(q)
    bt.add_argument("--beta", type=float, required=True)
    bt.add_argument("--energy", type=float, help="use this energy instead of computing it")
    bo.add_argument("--beta-grid", type=float, nargs="+", required=True)
    b1 = bsub.add_parser("corollary1", help="bound for data with separated supports")
    b1.add_argument("--t", type=float, required=True)
    b1.add_argument("--separation", type=float, required=True)
    b1.add_argument("--lip1", type=float, required=True)
    b1.add_argument("--lip2", type=float, required=True)
    b1.add_argument("--theta", type=float, default=1.0)
    b1.add_argument("--l1-u0", type=float, required=True)
    b1.add_argument("--l1-v0", type=float, required=True)
    b1.add_argument("--delta-param", type=float, help="default 1 / (4 theta)")
    b2 = bsub.add_parser("corollary2", help="energy bound from the spectral overlap measure")
    b2.add_argument("--beta", type=float, required=True)
    b2.add_argument("--l1-u0", type=float, required=True)
    b2.add_argument("--l1-v0", type=float, required=True)
    b2.add_argument("--overlap", type=float, required=True)
    bp = bsub.add_parser("pam", help="variance budget for truncated constant data")
    bp.add_argument("--beta", type=float, required=True)
    bp.add_argument("--t", type=float, required=True)
    bp.add_argument("--lip", type=float, required=True)
    bp.add_argument("--theta", type=float, default=1.0)
    bp.add_argument("--linf-u0", type=float, required=True)
    bp.add_argument("--mean-mass", type=float, required=True)
    b.set_defaults(func=_cmd_bound)

    keys_epilog = "config keys (override with --set section.key=value):\n" + schema_help()
    for name, func, helptext in (
            ("simulate", _cmd_simulate, "run one ensemble and write its per-time table"),
            ("experiment", _cmd_experiment, "run a verification campaign")):
        q = sub.add_parser(name, help=helptext, epilog=keys_epilog,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        q.add_argument("--config", help="INI config file")
        q.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                       help="override one config key (repeatable)")
        q.add_argument("--seed", type=int)
        q.add_argument("--out", help=f"output directory (default: ${OUTPUT_ENV} or .)")
        q.add_argument("--stem", help="output file name without extension")
        q.add_argument("--workers", type=int, help="threads for path blocks")
        q.set_defaults(func=func)
        if name == "experiment":
            q.add_argument("--name", choices=CAMPAIGNS)
            q.add_argument("--print-config", action="store_true",
                           help="print the merged config and exit")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalBlowup as exc:
        print(f"shemass: numerical blowup: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ConfigError) as exc:
        print(f"shemass: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
