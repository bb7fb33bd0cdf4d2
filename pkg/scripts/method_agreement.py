"""Sup-norm agreement of convolution and overlap with the Gaussian closed form.

Sweeps random squeezed states and measurement metrics and prints one row
per pair. Useful for picking grid sizes and truncations.
"""

import argparse

import numpy as np

from retrohusimi import (
    PhaseSpaceGrid,
    gaussian_to_fock,
    husimi_closed_grid,
    husimi_convolution,
    husimi_gaussian_closed,
    husimi_overlap,
    matrix_from_params,
    metric_of,
    squeezed_gaussian,
    wigner_gaussian,
)
from retrohusimi.checks import random_params


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=6)
    ap.add_argument("--half-width", type=float, default=10.0)
    ap.add_argument("--n", type=int, default=401, help="grid points per axis")
    ap.add_argument("--dim", type=int, default=128)
    ap.add_argument("--lam-max", type=float, default=1.4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    grid = PhaseSpaceGrid.square(args.half_width, args.n)
    probes = rng.uniform(-2, 2, (25, 2))
    print("pair  conv_sup   overlap_sup  conv_integral")
    for k in range(args.pairs):
        s = squeezed_gaussian(matrix_from_params(random_params(rng, args.lam_max, 0.2)), *rng.uniform(-1, 1, 2))
        g = metric_of(matrix_from_params(random_params(rng, args.lam_max, 0.3)))
        q = husimi_convolution(wigner_gaussian(s, grid), g)
        ref = husimi_closed_grid(s, g, grid)
        ov = husimi_overlap(gaussian_to_fock(s, args.dim), g, probes, args.dim, engine="recurrence")
        exact = husimi_gaussian_closed(s, g).pdf(probes[:, 0], probes[:, 1])
        print(
            f"{k:4d}  {np.abs(q.values - ref.values).max():.2e}   "
            f"{np.abs(ov - exact).max():.2e}     {q.integral:.8f}"
        )


if __name__ == "__main__":
    main()
