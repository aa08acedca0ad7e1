"""Resolution probabilities and expected distances over uniform tree space.

Prints, for each n, the exact probability that a fixed triplet (rooted) or
quartet (unrooted) is resolved, the expected parametric distance at the
given p, and the asymptotic unresolved probability for comparison.

Usage: python scripts/expected_table.py [--max-n 7] [--p 1/2] [--unrooted]
"""

import argparse
from fractions import Fraction

from polydist.expected import (
    asymptotic_unresolved,
    exact_resolution_probability,
    expected_distance_formula,
)
from polydist.trees import Kind


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=7)
    ap.add_argument("--p", default="1/2")
    ap.add_argument("--unrooted", action="store_true")
    args = ap.parse_args()
    p = Fraction(args.p)
    kind = Kind.UNROOTED if args.unrooted else Kind.ROOTED
    start = 3 if kind is Kind.ROOTED else 4
    print(f"{'n':>3} {'trees':>8} {'r (exact)':>14} {'E[d^p]':>16} {'u_asymptotic':>13}")
    for n in range(start, args.max_n + 1):
        stats = exact_resolution_probability(n, kind, cap=args.max_n)
        exp = expected_distance_formula(n, p, kind, cap=args.max_n)
        print(f"{n:>3} {stats.trees_total:>8} {str(stats.r):>14} "
              f"{str(exp):>16} {asymptotic_unresolved(n):>13.4f}")


if __name__ == "__main__":
    main()
