"""Identified proportions per ground-truth class under each compatible assumption set."""
import argparse
import sys

from satdisco.experiments import format_table, run_assumption_comparison


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", default=None)
    args = p.parse_args()
    rows = run_assumption_comparison(args.n, args.instances, args.seed, backend=args.backend)
    sys.stdout.write(format_table(rows))


if __name__ == "__main__":
    main()
