"""Synthetic measurement outcomes drawn from the outcome distribution.

Generators are ``numpy.random.default_rng(seed)``; identical inputs and seed
give identical batches.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .husimi import husimi_gaussian_closed, husimi_overlap
from .sl2r import MetricTensor, Sl2Matrix, metric_of
from .states import FockDensity, GaussianState, fock_moments

PROPOSAL_INFLATION = 1.5
MIN_ACCEPTANCE = 1e-3
MAX_AUTO_DIM = 2048


@dataclass(frozen=True)
class OutcomeBatch:
    samples: np.ndarray
    metric: MetricTensor
    seed: int

    def __post_init__(self):
        s = np.array(self.samples, dtype=float).reshape(-1, 2)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def count(self) -> int:
        return len(self.samples)

    def to_csv(self) -> str:
        g = self.metric
        buf = io.StringIO()
        buf.write(f"# {self.seed} {self.count} metric {g.a!r} {g.b!r} {g.c!r}\n")
        for x, p in self.samples:
            buf.write(f"{float(x)!r} {float(p)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> OutcomeBatch:
        lines = text.strip().splitlines()
        head = lines[0].lstrip("#").split()
        if len(head) != 6 or head[2] != "metric":
            raise ValueError("batch CSV header must be '# seed n metric a b c'")
        seed, n = int(head[0]), int(head[1])
        g = MetricTensor(float(head[3]), float(head[4]), float(head[5]))
        samples = np.array([[float(v) for v in line.split()] for line in lines[1:]]).reshape(-1, 2)
        if len(samples) != n:
            raise ValueError(f"header announces {n} samples, found {len(samples)}")
        return cls(samples, g, seed)


def _metric(m) -> MetricTensor:
    return m if isinstance(m, MetricTensor) else metric_of(m)


def sample_gaussian(state: GaussianState, g: MetricTensor | Sl2Matrix, n: int, seed: int) -> OutcomeBatch:
    if n < 1:
        raise ValueError("need at least one sample")
    g = _metric(g)
    target = husimi_gaussian_closed(state, g)
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(target.cov)
    z = rng.standard_normal((n, 2))
    return OutcomeBatch(target.mean + z @ chol.T, g, seed)


def _gauss_pdf(pts: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    d = pts - mean
    inv = np.linalg.inv(cov)
    q = np.einsum("ni,ij,nj->n", d, inv, d)
    return np.exp(-0.5 * q) / (2 * math.pi * math.sqrt(np.linalg.det(cov)))


def sample_fock(
    rho: FockDensity,
    m: Sl2Matrix | MetricTensor,
    n: int,
    seed: int,
    dim: int | None = None,
    pilot: int = 2000,
) -> OutcomeBatch:
    """Rejection-sample outcomes for a state given as a truncated density matrix.

    The proposal is the closed-form outcome Gaussian of the moment-matched
    Gaussian state with covariance inflated by 1.5. The envelope constant is
    1.2 times the largest target/proposal ratio seen on a pilot draw, so it is
    empirical; a warning is issued if a later candidate exceeds it.

    With ``dim=None`` the reference-state truncation starts at
    ``max(64, 2 * rho.dim)`` and doubles whenever a candidate needs more
    levels. An explicit ``dim`` is used as given and errors propagate.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    g = _metric(m)
    matched = husimi_gaussian_closed(fock_moments(rho), g)
    mean, cov = matched.mean, PROPOSAL_INFLATION * matched.cov
    chol = np.linalg.cholesky(cov)
    rng = np.random.default_rng(seed)

    def propose(k):
        return mean + rng.standard_normal((k, 2)) @ chol.T

    trunc = [max(64, 2 * rho.dim) if dim is None else dim]

    def target(pts):
        while True:
            try:
                return husimi_overlap(rho, g, pts, trunc[0], engine="recurrence")
            except ValueError:
                # far candidates need more levels; only grow when the caller left dim open
                if dim is not None or trunc[0] >= MAX_AUTO_DIM:
                    raise
                trunc[0] *= 2

    def ratio(pts):
        return target(pts) / _gauss_pdf(pts, mean, cov)

    pilot_pts = np.vstack([mean, propose(pilot)])
    envelope = 1.2 * ratio(pilot_pts).max()
    if not envelope > 0:
        raise RuntimeError("target density vanishes on the pilot draw")

    accepted: list[np.ndarray] = []
    total = proposed = 0
    overshoot = 0.0
    batch = max(64, 2 * n)
    while total < n:
        cand = propose(batch)
        r = ratio(cand) / envelope
        overshoot = max(overshoot, float(r.max()))
        keep = cand[rng.uniform(size=batch) < r]
        accepted.append(keep)
        total += len(keep)
        proposed += batch
        if proposed >= 1000 and total / proposed < MIN_ACCEPTANCE:
            raise RuntimeError(f"acceptance rate {total / proposed:.2g} below {MIN_ACCEPTANCE:g}; proposal mismatch")
    if overshoot > 1.0:
        warnings.warn(f"rejection envelope exceeded by factor {overshoot:.3g}", stacklevel=2)
    return OutcomeBatch(np.vstack(accepted)[:n], g, seed)


def outcome_stats(batch: OutcomeBatch) -> tuple[np.ndarray, np.ndarray]:
    """Unbiased sample mean and covariance."""
    if batch.count < 2:
        raise ValueError("need at least two samples for a covariance")
    s = batch.samples
    return s.mean(axis=0), np.cov(s, rowvar=False, ddof=1)
