"""Wall-time scaling of the O(n^2) triplet-distance kernel.

Usage: python scripts/bench_triplet.py [--sizes 100,200,400,800] [--runs 5]
"""

import argparse
import random
import time

from polydist.randgen import random_partial
from polydist.trees import Kind
from polydist.triplet import parametric_triplet_distance


def median_time(n: int, runs: int, seed: int) -> float:
    rng = random.Random(seed)
    a = random_partial(n, Kind.ROOTED, rng)
    b = random_partial(n, Kind.ROOTED, rng, taxa=a.taxa)
    samples = []
    for _ in range(runs):
        t0 = time.perf_counter()
        parametric_triplet_distance(a, b)
        samples.append(time.perf_counter() - t0)
    return sorted(samples)[len(samples) // 2]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="100,200,400,800")
    ap.add_argument("--runs", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    print(f"{'n':>6} {'median_s':>10} {'ratio':>7}")
    prev = None
    for n in sizes:
        t = median_time(n, args.runs, args.seed)
        ratio = "" if prev is None else f"{t / prev:7.2f}"
        print(f"{n:>6} {t:>10.4f} {ratio:>7}")
        prev = t


if __name__ == "__main__":
    main()
