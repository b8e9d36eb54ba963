"""Separated-support bound for two delta_param schedules.

Prints the bound at delta_param = theta (exponent identically zero) next to the
default delta_param = 1 / (4 theta) for unit masses, theta = L1 = L2 = 1.

    python3 scripts/corollary1_schedule_table.py [--separation 7] [--t 0.1 0.25 0.5]
"""

import argparse

from shemass.bounds import corollary1_bound, corollary1_exponent, default_delta_param


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--separation", type=float, default=7.0)
    ap.add_argument("--theta", type=float, default=1.0)
    ap.add_argument("--t", type=float, nargs="+", default=[0.1, 0.25, 0.5])
    args = ap.parse_args(argv)
    default = default_delta_param(args.theta)
    print(f"{'t':>6} {'exp(delta=theta)':>17} {'bound(delta=theta)':>19} "
          f"{'exp(default)':>13} {'bound(default)':>15}")
    for t in args.t:
        e1 = corollary1_exponent(t, args.separation, args.theta, args.theta)
        b1 = corollary1_bound(t, args.separation, 1, 1, args.theta, 1, 1, delta_param=args.theta)
        e2 = corollary1_exponent(t, args.separation, args.theta, default)
        b2 = corollary1_bound(t, args.separation, 1, 1, args.theta, 1, 1)
        print(f"{t:6.3g} {e1:17.4g} {b1:19.4g} {e2:13.4g} {b2:15.4g}")


if __name__ == "__main__":
    main()
