"""Run every campaign with its packaged config and write CSV/JSON reports.

The martingale, covariance-identity and theorem-sweep campaigns share one pair
ensemble, simulated once.

    python3 scripts/run_all_campaigns.py --out results/ [--workers 1] [--paths N]
"""

import argparse
import os
import sys
import time

from shemass.experiments import (
    CAMPAIGNS,
    ensemble_for,
    load_config,
    run_campaign,
    run_cov_identity,
    run_martingale,
    run_theorem_sweep,
    write_report,
)

SHARED = {"martingale": run_martingale, "cov_identity": run_cov_identity,
          "theorem_sweep": run_theorem_sweep}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--paths", type=int, help="override n_paths for the Monte Carlo campaigns")
    ap.add_argument("--only", nargs="+", choices=CAMPAIGNS, default=list(CAMPAIGNS))
    args = ap.parse_args(argv)
    os.makedirs(args.out, exist_ok=True)

    def config(name):
        sets = [f"experiment.workers={args.workers}"]
        if args.paths is not None and name != "corollary2":
            sets.append(f"experiment.n_paths={args.paths}")
        return load_config(name=name, overrides=sets)

    shared = None
    failed = []
    for name in args.only:
        start = time.perf_counter()
        cfg = config(name)
        if name in SHARED:
            if shared is None:
                shared = ensemble_for(config("cov_identity"))
            report = SHARED[name](cfg, ensemble=shared)
        else:
            report = run_campaign(cfg)
        write_report(report, args.out)
        print(f"{name:15s} {report.verdict}  ({time.perf_counter() - start:.1f} s)")
        for check, ok in report.checks.items():
            if not ok:
                print(f"    failed check: {check}")
        if not report.passed:
            failed.append(name)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
