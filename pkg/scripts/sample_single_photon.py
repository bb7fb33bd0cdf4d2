"""Draw outcomes for a single photon and compare the radial law with Gamma(2).

Under any measurement with identity metric the outcome density of |1> is
(r^2/2) exp(-r^2/2) / (2 pi), so r^2/2 follows a Gamma(2) law.
"""

import argparse

import numpy as np
from scipy import stats

from retrohusimi import FockDensity, Sl2Matrix, sample_fock


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    batch = sample_fock(FockDensity.number(1), Sl2Matrix.identity(), args.n, args.seed)
    u = (batch.samples**2).sum(axis=1) / 2
    edges = np.linspace(0, 6, 13)
    hist, _ = np.histogram(u, edges)
    expected = np.diff(stats.gamma(2).cdf(edges)) * args.n
    print(" bin        observed  expected")
    for lo, hi, o, e in zip(edges[:-1], edges[1:], hist, expected):
        print(f"[{lo:.1f},{hi:.1f})  {o:8d}  {e:8.1f}")
    print(f"KS p-value: {stats.kstest(u, stats.gamma(2).cdf).pvalue:.3f}")


if __name__ == "__main__":
    main()
