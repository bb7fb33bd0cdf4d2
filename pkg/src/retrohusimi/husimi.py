"""Outcome distributions of joint quadrature measurements with minimal error.

The outcome density over ``(x, p)`` is the Wigner function smoothed by the
unit-determinant Gaussian kernel ``(1/pi) exp(-(a dx^2 + 2c dx dp + b dp^2))``.
Three independent routes compute it:

* ``husimi_convolution``: discrete convolution of a sampled Wigner function;
* ``husimi_overlap``: ``(1/2pi) <s|rho|s>`` with ``|s>`` a displaced squeezed
  vacuum in a truncated number basis;
* ``husimi_gaussian_closed``: for Gaussian states the kernel adds covariance
  ``G^-1 / 2`` to the state covariance.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.signal import fftconvolve

from .sl2r import MetricTensor, Sl2Matrix, canonical_orthogonal, metric_of
from .states import FockDensity, GaussianState, PhaseSpaceGrid, squeezed_coefficients, squeezed_state

NEG_TOL = 1e-9
KERNEL_SDS = 6.0
LEAK_TOL = 1e-3


class Method(str, enum.Enum):
    CONVOLUTION = "convolution"
    OVERLAP = "overlap"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class HusimiResult:
    grid: PhaseSpaceGrid
    metric: MetricTensor
    method: Method

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        lo = float(self.grid.values.min())
        if lo < -NEG_TOL:
            raise ArithmeticError(f"outcome density has a negative value {lo:.3g}; kernel or input is invalid")

    @property
    def values(self) -> np.ndarray:
        return self.grid.values

    @property
    def integral(self) -> float:
        return self.grid.integral()

    @property
    def min_value(self) -> float:
        return float(self.grid.values.min())

    def clamped(self) -> np.ndarray:
        return np.maximum(self.grid.values, 0.0)

    def sidecar(self) -> dict:
        return {
            "metric": self.metric.to_dict(),
            "method": self.method.value,
            "integral": self.integral,
            "min_value": self.min_value,
        }


def kernel_covariance(g: MetricTensor) -> np.ndarray:
    """Covariance ``G^-1 / 2`` of the smoothing kernel."""
    return 0.5 * g.inverse_array


def kernel_widths(g: MetricTensor) -> np.ndarray:
    """Kernel 1/e half-widths ``mu^-1/2`` along the metric eigen-directions."""
    return np.linalg.eigvalsh(g.array) ** -0.5


def smoothing_scales(g: MetricTensor) -> tuple[float, float, float, float]:
    """Canonical axis angle and smoothing lengths along ``x_theta0`` and ``p_theta0``."""
    c = canonical_orthogonal(g)
    return c.theta, c.lam, c.lam, 1.0 / c.lam


def _kernel(g: MetricTensor, dx: float, dp: float, kx: int, kp: int) -> np.ndarray:
    u = np.arange(-kx, kx + 1) * dx
    v = np.arange(-kp, kp + 1) * dp
    U, V = np.meshgrid(u, v, indexing="ij")
    return np.exp(-g.quadratic_form(U, V)) / math.pi * dx * dp


def husimi_convolution(w: PhaseSpaceGrid, g: MetricTensor, method: str = "fft") -> HusimiResult:
    """Smooth a sampled Wigner function with the metric kernel.

    The kernel is truncated at six standard deviations and applied as a
    zero-padded linear convolution, so nothing wraps around the grid edges.
    ``method="direct"`` sums shifted copies instead of using an FFT; it is
    slow and meant as a reference.

    The Wigner grid must extend well beyond the region where the result is
    read (about five combined standard deviations). A warning is issued when
    the smoothed mass differs from the input mass by more than 1e-3.
    """
    h = max(w.dx, w.dp)
    if h > 0.5 * kernel_widths(g).min():
        raise ValueError(
            f"grid spacing {h:.3g} undersamples the kernel (narrowest width {kernel_widths(g).min():.3g})"
        )
    cov = kernel_covariance(g)
    kx = min(int(math.ceil(KERNEL_SDS * math.sqrt(cov[0, 0]) / w.dx)), w.nx - 1)
    kp = min(int(math.ceil(KERNEL_SDS * math.sqrt(cov[1, 1]) / w.dp)), w.n_p - 1)
    k = _kernel(g, w.dx, w.dp, kx, kp)
    W = w.values
    if method == "fft":
        Q = fftconvolve(W, k, mode="same")
    elif method == "direct":
        Q = np.zeros_like(W)
        nx, n_p = W.shape
        for i in range(-kx, kx + 1):
            xs_out = slice(max(0, i), nx + min(0, i))
            xs_in = slice(max(0, -i), nx + min(0, -i))
            for j in range(-kp, kp + 1):
                ps_out = slice(max(0, j), n_p + min(0, j))
                ps_in = slice(max(0, -j), n_p + min(0, -j))
                Q[xs_out, ps_out] += k[i + kx, j + kp] * W[xs_in, ps_in]
    else:
        raise ValueError(f"unknown convolution method {method!r}")
    # round-off below the clamp threshold is not physical
    Q = np.where((Q < 0) & (Q > -NEG_TOL), 0.0, Q)
    out = w.with_values(Q)
    leak = abs(out.integral() - w.integral())
    if leak > LEAK_TOL:
        warnings.warn(f"smoothed mass differs from input by {leak:.3g}; pad the Wigner grid", stacklevel=2)
    return HusimiResult(out, g, Method.CONVOLUTION)


def husimi_overlap(
    state: FockDensity,
    m: Sl2Matrix | MetricTensor,
    points,
    dim: int | None = None,
    engine: str = "operator",
) -> np.ndarray:
    """``(1/2pi) <(x,p)_M| rho |(x,p)_M>`` at each ``(x, p)`` in ``points``.

    ``dim`` is the truncation used for the reference states; it defaults to
    ``max(64, 2 * state.dim)``. ``engine="operator"`` builds each reference
    state with :func:`squeezed_state`; ``engine="recurrence"`` uses the
    vectorized :func:`squeezed_coefficients`, which is much faster for many
    points. Raises ValueError when a reference state does not fit in the
    truncation.
    """
    g = m if isinstance(m, MetricTensor) else metric_of(m)
    dim = max(64, 2 * state.dim) if dim is None else dim
    if dim < state.dim:
        raise ValueError("reference truncation smaller than the density matrix")
    rho = state.matrix
    n = state.dim
    pts = np.atleast_2d(np.asarray(points, float))
    if engine == "operator":
        V = np.array([squeezed_state(g, float(x), float(p), dim).coeffs[:n] for x, p in pts])
    elif engine == "recurrence":
        V = squeezed_coefficients(g, pts, dim)[:, :n]
    else:
        raise ValueError(f"unknown overlap engine {engine!r}")
    vals = np.einsum("ki,ij,kj->k", V.conj(), rho, V)
    if len(vals) and np.abs(vals.imag).max() > 1e-10:
        raise ArithmeticError(f"overlap has imaginary part {np.abs(vals.imag).max():.3g}")
    return vals.real / (2 * math.pi)


def husimi_overlap_grid(
    state: FockDensity, m, grid: PhaseSpaceGrid, dim: int | None = None, engine: str = "recurrence"
) -> HusimiResult:
    g = m if isinstance(m, MetricTensor) else metric_of(m)
    X, P = grid.mesh()
    vals = husimi_overlap(state, g, np.column_stack([X.ravel(), P.ravel()]), dim, engine)
    vals = np.where((vals < 0) & (vals > -NEG_TOL), 0.0, vals)
    return HusimiResult(grid.with_values(vals.reshape(X.shape)), g, Method.OVERLAP)


def husimi_gaussian_closed(state: GaussianState, g: MetricTensor) -> GaussianState:
    return GaussianState(state.mean, state.cov + kernel_covariance(g))


def husimi_closed_grid(state: GaussianState, g: MetricTensor, grid: PhaseSpaceGrid) -> HusimiResult:
    out = husimi_gaussian_closed(state, g)
    X, P = grid.mesh()
    return HusimiResult(grid.with_values(out.pdf(X, P)), g, Method.CLOSED_FORM)


def outcome_covariance_m(state: GaussianState, m: Sl2Matrix) -> np.ndarray:
    """Covariance of the outcome distribution expressed in ``M``-coordinates."""
    a = m.array
    return a @ husimi_gaussian_closed(state, metric_of(m)).cov @ a.T


def rho_m_view(q: HusimiResult, m: Sl2Matrix, x_m: float, p_m: float) -> float:
    """Outcome density in ``M``-coordinates, bilinearly interpolated from ``q``."""
    x, p = m.inverse().apply(x_m, p_m)
    g = q.grid
    if not (g.x_min <= x <= g.x_max and g.p_min <= p <= g.p_max):
        raise ValueError(f"point ({x:.6g}, {p:.6g}) lies outside the grid")
    interp = RegularGridInterpolator((g.xs, g.ps), g.values, method="linear")
    return float(interp([[x, p]])[0])
