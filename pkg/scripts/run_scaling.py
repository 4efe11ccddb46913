"""Median discovery runtime per node count, full procedure vs. max_c = 2."""
import argparse
import sys

from satdisco.experiments import format_table, run_scaling


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, nargs="+", default=[5, 6, 7, 8])
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--max-c", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timeout-sec", type=float, default=600)
    p.add_argument("--backend", default=None)
    args = p.parse_args()
    rows = run_scaling(args.n, args.instances, args.max_c, args.seed, args.timeout_sec, args.backend)
    sys.stdout.write(format_table(rows))


if __name__ == "__main__":
    main()
