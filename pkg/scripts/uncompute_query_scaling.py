#!/usr/bin/env python3
"""Query count of the single-ancilla pipeline vs target accuracy.

Prints one row per eps with the oracle-query count and measured error,
confirming the O(log(1/eps)) growth at fixed delta.

Usage: python scripts/uncompute_query_scaling.py [delta]
"""

import sys

import numpy as np

from bechain import uncompute_hermitian
from bechain.encoding import hermitian_test_encoding
from bechain.linalg import random_hermitian


def main() -> int:
    delta = float(sys.argv[1]) if len(sys.argv) > 1 else 0.25
    rng = np.random.default_rng(0)
    h = random_hermitian(2, (1.0 - delta) * 0.9, rng)
    vh = hermitian_test_encoding(h, 2, 17)
    print(f"{'eps':>8} {'queries':>8} {'degree':>7} {'measured':>12}")
    for eps in (1e-1, 1e-2, 1e-3, 1e-4):
        _, rep = uncompute_hermitian(vh, delta, eps)
        print(f"{eps:>8.0e} {rep.queries_vh:>8d} {rep.qsvt_degree:>7d} "
              f"{rep.eps_measured:>12.4e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
