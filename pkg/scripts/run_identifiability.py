"""Mean identified proportions per category as the conditioning cap grows."""
import argparse
import sys

from satdisco.experiments import format_table, run_identifiability


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--instances", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", default=None)
    args = p.parse_args()
    rows, _ = run_identifiability(args.n, args.instances, args.seed, backend=args.backend)
    sys.stdout.write(format_table(rows))


if __name__ == "__main__":
    main()
