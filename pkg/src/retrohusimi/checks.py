"""Cross-oracle verification suite shared by ``retrohusimi verify`` and the tests.

Each check returns ``(passed, detail)``. Tolerances are fixed constants;
``quick`` only shrinks sample counts and grids.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .husimi import (
    husimi_closed_grid,
    husimi_convolution,
    husimi_gaussian_closed,
    husimi_overlap,
    husimi_overlap_grid,
    outcome_covariance_m,
)
from .sampler import outcome_stats, sample_gaussian
from .sl2r import (
    CanonicalParams,
    MetricTensor,
    accuracies,
    are_equivalent,
    canonical_orthogonal,
    is_rotation,
    matrix_from_params,
    metric_of,
    obliquity,
    orthogonal_matrix,
    pointer_transform,
    resolution,
    rotation,
)
from .states import (
    FockDensity,
    PhaseSpaceGrid,
    eigen_residual,
    gaussian_to_fock,
    squeezed_gaussian,
    squeezed_state,
    vacuum,
    wigner_fock,
    wigner_gaussian,
)

OBLIQUE40 = CanonicalParams.from_degrees(0.0, 40.0, 1.0)
OBLIQUE40_ACCURACY = {"oblique_x": 0.29, "orthogonal_x": 2.39, "orthogonal_p": 0.21}


def random_params(rng: np.random.Generator, lam_max: float = 4.0, phi_max: float = math.pi / 4) -> CanonicalParams:
    """Uniform rotation and obliquity, log-uniform resolution in [1/lam_max, lam_max]."""
    theta = rng.uniform(-math.pi, math.pi)
    phi = rng.uniform(-phi_max, phi_max)
    lam = math.exp(rng.uniform(-math.log(lam_max), math.log(lam_max)))
    return CanonicalParams(theta, phi, lam)


def oblique40_accuracies() -> tuple[bool, str]:
    acc = accuracies(OBLIQUE40)
    g = metric_of(matrix_from_params(OBLIQUE40))
    m0 = orthogonal_matrix(-math.pi / 4, acc["lambda0"])
    theta_ok = abs(acc["theta0"] + math.pi / 4) < 1e-12 and metric_of(m0).max_abs_diff(g) < 1e-10
    lam_ok = abs(acc["lambda0"] - math.sqrt(1 / math.cos(math.radians(80)) + math.tan(math.radians(80)))) < 1e-12
    vals_ok = all(abs(acc[k] - v) <= 0.005 for k, v in OBLIQUE40_ACCURACY.items())
    detail = (
        f"theta0_deg={math.degrees(acc['theta0']):.6f} oblique={acc['oblique_x']:.4f} "
        f"orth_x={acc['orthogonal_x']:.4f} orth_p={acc['orthogonal_p']:.4f}"
    )
    return theta_ok and lam_ok and vals_ok, detail


def canonicalization_soundness(n: int = 1000, seed: int = 1) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        m = matrix_from_params(random_params(rng))
        c = canonical_orthogonal(metric_of(m))
        m0 = matrix_from_params(c).array
        worst = max(worst, float(np.abs(m0.T @ m0 - m.array.T @ m.array).max()))
        if c.phi != 0.0:
            return False, "nonzero obliquity in representative"
    return worst <= 1e-10, f"n={n} max_entry_err={worst:.3g}"


def equivalence_theorem(n: int = 500, seed: int = 2, tol: float = 1e-9) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    mismatches = wrong = 0
    for k in range(n):
        m = matrix_from_params(random_params(rng))
        psi = rng.uniform(-math.pi, math.pi)
        m2 = rotation(psi) @ m
        equivalent = k % 2 == 0
        if not equivalent:
            lam = math.exp(rng.choice([-1, 1]) * rng.uniform(0.05, 1.0))
            eta = rng.uniform(-0.6, 0.6)
            m2 = m2 @ resolution(lam) @ obliquity(eta)
        eq = are_equivalent(m, m2, tol)
        rot = is_rotation(pointer_transform(m, m2), tol)
        mismatches += eq != rot
        wrong += eq != equivalent
    return mismatches == 0 and wrong == 0, f"pairs={n} mismatches={mismatches} misclassified={wrong}"


def _universality_cases(seed: int):
    rng = np.random.default_rng(seed)
    states = [vacuum()]
    for _ in range(3):
        p = random_params(rng, lam_max=1.4, phi_max=0.2)
        states.append(squeezed_gaussian(matrix_from_params(p), *rng.uniform(-1, 1, 2)))
    metrics = [metric_of(matrix_from_params(random_params(rng, lam_max=1.4, phi_max=0.3))) for _ in range(3)]
    probes = rng.uniform(-2, 2, (25, 2))
    return states, metrics, probes


def universality(quick: bool = False, seed: int = 3) -> tuple[bool, str, list[float]]:
    """Convolution and overlap against the closed form; also returns all grid integrals."""
    states, metrics, probes = _universality_cases(seed)
    grid = PhaseSpaceGrid.square(10.0, 201 if quick else 401)
    dim = 128
    conv_err = ovl_err = 0.0
    integrals = []
    for s in states:
        w = wigner_gaussian(s, grid)
        rho = gaussian_to_fock(s, dim)
        for g in metrics:
            q = husimi_convolution(w, g)
            ref = husimi_closed_grid(s, g, grid)
            conv_err = max(conv_err, float(np.abs(q.values - ref.values).max()))
            integrals += [q.integral, ref.integral]
            pts = probes[:5] if quick else probes
            ov = husimi_overlap(rho, g, pts, dim)
            exact = husimi_gaussian_closed(s, g).pdf(pts[:, 0], pts[:, 1])
            ovl_err = max(ovl_err, float(np.abs(ov - exact).max()))
    ok = conv_err <= 1e-6 and ovl_err <= 1e-3
    return ok, f"conv_sup={conv_err:.3g} overlap_sup={ovl_err:.3g}", integrals


def closed_form_invariance(n: int = 10, seed: int = 4) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    s = squeezed_gaussian(matrix_from_params(random_params(rng, lam_max=2.0)), 0.4, -0.3, nbar=0.3)
    m = matrix_from_params(random_params(rng))
    base = husimi_gaussian_closed(s, metric_of(m))
    grid = PhaseSpaceGrid.square(6.0, 61)
    base_grid = husimi_closed_grid(s, metric_of(m), grid).values
    worst = 0.0
    for _ in range(n):
        g2 = metric_of(rotation(rng.uniform(-math.pi, math.pi)) @ m)
        other = husimi_gaussian_closed(s, g2)
        worst = max(worst, float(np.abs(other.cov - base.cov).max()), float(np.abs(other.mean - base.mean).max()))
        worst = max(worst, float(np.abs(husimi_closed_grid(s, g2, grid).values - base_grid).max()))
    return worst <= 1e-10, f"rotations={n} max_diff={worst:.3g}"


def normalization(integrals: list[float], quick: bool = False) -> tuple[bool, str]:
    grid = PhaseSpaceGrid.square(10.0, 201 if quick else 401)
    one = FockDensity.number(1)
    w = wigner_fock(one, grid)
    g_id = MetricTensor.identity()
    q = husimi_convolution(w, g_id)
    rng = np.random.default_rng(5)
    g_sq = metric_of(matrix_from_params(random_params(rng, lam_max=1.4, phi_max=0.3)))
    q_sq = husimi_convolution(w, g_sq)
    ov = husimi_overlap_grid(one, g_id, PhaseSpaceGrid.square(4.0, 25), dim=128)
    all_ints = list(integrals) + [q.integral, q_sq.integral]
    worst_int = max(abs(v - 1.0) for v in all_ints)
    min_q = min(q.min_value, q_sq.min_value, ov.min_value)
    ok = worst_int <= 1e-3 and min_q >= -1e-9 and w.values.min() < 0
    return ok, f"grids={len(all_ints)} max_norm_err={worst_int:.3g} min_W={w.values.min():.3g} min_Q={min_q:.3g}"


def marginal_variance(n: int = 100, seed: int = 6) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        s = squeezed_gaussian(
            matrix_from_params(random_params(rng, lam_max=3.0)), *rng.uniform(-2, 2, 2), nbar=rng.uniform(0, 2)
        )
        m = matrix_from_params(random_params(rng, lam_max=3.0))
        diff = outcome_covariance_m(s, m) - s.transformed(m).cov
        worst = max(worst, float(np.abs(diff - 0.5 * np.eye(2)).max()))
    return worst <= 1e-9, f"cases={n} max_dev={worst:.3g}"


RESIDUAL_PROBES = [(0.0, 0.0), (0.5, -0.5), (1.0, 0.0), (0.0, 1.0), (-0.7, 0.4)]


def eigen_residuals(dim: int = 256) -> tuple[bool, str]:
    m = matrix_from_params(OBLIQUE40)
    res = [eigen_residual(m, x, p, squeezed_state(m, x, p, dim)) for x, p in RESIDUAL_PROBES]
    return max(res) < 1e-5, f"dim={dim} max_residual={max(res):.3g}"


def sampler_statistics(n: int = 100_000, seed: int = 7) -> tuple[bool, str]:
    g = MetricTensor.identity()
    batch = sample_gaussian(vacuum(), g, n, seed)
    _, cov = outcome_stats(batch)
    # standard errors of sample (co)variances for a unit-covariance Gaussian
    se = np.array([[math.sqrt(2.0 / (n - 1)), math.sqrt(1.0 / (n - 1))],
                   [math.sqrt(1.0 / (n - 1)), math.sqrt(2.0 / (n - 1))]])
    z = np.abs(cov - np.eye(2)) / se
    same = sample_gaussian(vacuum(), g, n, seed).to_csv() == batch.to_csv()
    return bool(z.max() <= 3.0) and same, f"n={n} max_z={z.max():.3g} reproducible={same}"


def run_all(quick: bool = True):
    """Yield ``(name, passed, detail)`` for every check."""

    def timed(fn, *a, **kw):
        t = time.perf_counter()
        r = fn(*a, **kw)
        return r, time.perf_counter() - t

    (ok, d), t = timed(oblique40_accuracies)
    yield "oblique40_accuracies", ok, f"{d} t={t:.2f}s"
    (ok, d), t = timed(canonicalization_soundness, 200 if quick else 1000)
    yield "canonicalization_soundness", ok, f"{d} t={t:.2f}s"
    (ok, d), t = timed(equivalence_theorem, 100 if quick else 500)
    yield "equivalence_theorem", ok, f"{d} t={t:.2f}s"
    (ok, d, integrals), t = timed(universality, quick)
    yield "universality", ok, f"{d} t={t:.2f}s"
    (ok, d), t = timed(closed_form_invariance)
    yield "closed_form_invariance", ok, f"{d} t={t:.2f}s"
    (ok, d), t = timed(normalization, integrals, quick)
    yield "normalization", ok, f"{d} t={t:.2f}s"
    (ok, d), t = timed(marginal_variance)
    yield "marginal_variance", ok, f"{d} t={t:.2f}s"
    (ok, d), t = timed(eigen_residuals)
    yield "eigen_residual", ok, f"{d} t={t:.2f}s"
    (ok, d), t = timed(sampler_statistics, 20_000 if quick else 100_000)
    yield "sampler_statistics", ok, f"{d} t={t:.2f}s"
