"""Oblique vs orthogonal quadrature measurement at theta=0, phi=40 deg, lambda=1.

Prints the canonical representative, the four accuracy figures, and checks
that both matrices give the same outcome distribution for a few states.
"""

import argparse
import math

import numpy as np

from retrohusimi import (
    CanonicalParams,
    accuracies,
    are_equivalent,
    husimi_gaussian_closed,
    matrix_from_params,
    metric_of,
    orthogonal_matrix,
    squeezed_gaussian,
    vacuum,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta", type=float, default=0.0, help="degrees")
    ap.add_argument("--phi", type=float, default=40.0, help="degrees")
    ap.add_argument("--lam", type=float, default=1.0)
    args = ap.parse_args()

    p = CanonicalParams.from_degrees(args.theta, args.phi, args.lam)
    acc = accuracies(p)
    m = matrix_from_params(p)
    m0 = orthogonal_matrix(acc["theta0"], acc["lambda0"])
    print(f"M  = {np.array2string(m.array, precision=4)}")
    print(f"M0 = {np.array2string(m0.array, precision=4)}")
    print(f"theta0 = {math.degrees(acc['theta0']):.4f} deg  lambda0 = {acc['lambda0']:.6f}")
    print(f"oblique accuracy     x: {acc['oblique_x']:.4f}  p: {acc['oblique_p']:.4f}")
    print(f"orthogonal accuracy  x: {acc['orthogonal_x']:.4f}  p: {acc['orthogonal_p']:.4f}")
    print(f"equivalent: {are_equivalent(m, m0)}")

    states = [vacuum(), squeezed_gaussian(matrix_from_params(CanonicalParams(0.5, 0.1, 1.5)), 1.0, -0.5)]
    for s in states:
        a = husimi_gaussian_closed(s, metric_of(m)).cov
        b = husimi_gaussian_closed(s, metric_of(m0)).cov
        print(f"outcome covariance difference: {np.abs(a - b).max():.2e}")


if __name__ == "__main__":
    main()
