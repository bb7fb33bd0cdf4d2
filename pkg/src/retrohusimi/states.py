"""Initial-state representations, Wigner functions and squeezed reference states.

Conventions: dimensionless quadratures with ``[x, p] = i``, ``a = (x + ip)/sqrt(2)``,
vacuum covariance ``I/2``, Wigner functions normalized to unit integral.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.sparse.linalg import expm_multiply

from .sl2r import (
    CanonicalParams,
    MetricTensor,
    Sl2Matrix,
    canonical_orthogonal,
    decompose,
    matrix_from_params,
    metric_of,
    orthogonal_matrix,
)

TAIL_TOL = 1e-6


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# Gaussian states


@dataclass(frozen=True)
class GaussianState:
    """Single-mode Gaussian state given by its mean ``(x, p)`` and covariance."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _frozen(self.mean)
        cov = _frozen(self.cov)
        if mean.shape != (2,) or cov.shape != (2, 2):
            raise ValueError("mean must have shape (2,) and cov shape (2, 2)")
        if not (np.isfinite(mean).all() and np.isfinite(cov).all()):
            raise ValueError("state moments must be finite")
        if abs(cov[0, 1] - cov[1, 0]) > 1e-12 * max(1.0, abs(cov).max()):
            raise ValueError("covariance must be symmetric")
        if cov[0, 0] <= 0 or np.linalg.det(cov) <= 0:
            raise ValueError("covariance must be positive definite")
        if np.linalg.det(cov) < 0.25 - 1e-12:
            raise ValueError("covariance violates the uncertainty bound det >= 1/4")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def purity(self) -> float:
        return 0.5 / math.sqrt(np.linalg.det(self.cov))

    def displaced(self, x: float, p: float) -> GaussianState:
        return GaussianState(self.mean + (x, p), self.cov)

    def transformed(self, m: Sl2Matrix) -> GaussianState:
        """Moments of the same state expressed in ``M``-coordinates."""
        a = m.array
        return GaussianState(a @ self.mean, a @ self.cov @ a.T)

    def pdf(self, x, p):
        x, p = np.broadcast_arrays(np.asarray(x, float), np.asarray(p, float))
        inv = np.linalg.inv(self.cov)
        dx, dp = x - self.mean[0], p - self.mean[1]
        q = inv[0, 0] * dx * dx + 2 * inv[0, 1] * dx * dp + inv[1, 1] * dp * dp
        return np.exp(-0.5 * q) / (2 * math.pi * math.sqrt(np.linalg.det(self.cov)))

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "cov": self.cov.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> GaussianState:
        return cls(d["mean"], d["cov"])


def vacuum() -> GaussianState:
    return GaussianState([0.0, 0.0], 0.5 * np.eye(2))


def coherent(x: float, p: float) -> GaussianState:
    return GaussianState([x, p], 0.5 * np.eye(2))


def squeezed_gaussian(m: Sl2Matrix, x: float = 0.0, p: float = 0.0, nbar: float = 0.0) -> GaussianState:
    """Gaussian state ``D(x,p) G rho_th G^dag`` with ``G^dag r G = M r``.

    ``nbar`` is the thermal occupation before squeezing; ``nbar = 0`` gives a
    pure state.
    """
    a = m.array
    return GaussianState([x, p], (nbar + 0.5) * (a @ a.T))


def wigner_gaussian(state: GaussianState, grid: PhaseSpaceGrid) -> PhaseSpaceGrid:
    X, P = grid.mesh()
    return grid.with_values(state.pdf(X, P))


# ---------------------------------------------------------------------------
# Phase-space grids


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Uniform inclusive lattice over ``[x_min, x_max] x [p_min, p_max]``.

    ``values[i, j]`` is the sample at ``(xs[i], ps[j])``.
    """

    x_min: float
    x_max: float
    nx: int
    p_min: float
    p_max: float
    n_p: int
    values: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.nx < 2 or self.n_p < 2:
            raise ValueError("grid needs at least two samples per axis")
        if not (self.x_max > self.x_min and self.p_max > self.p_min):
            raise ValueError("grid ranges must be increasing")
        vals = np.zeros((self.nx, self.n_p)) if self.values is None else self.values
        vals = _frozen(vals)
        if vals.shape != (self.nx, self.n_p):
            raise ValueError(f"values shape {vals.shape} does not match ({self.nx}, {self.n_p})")
        if not np.isfinite(vals).all():
            raise ValueError("grid values must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def parse(cls, spec: str) -> PhaseSpaceGrid:
        """Build an empty grid from ``"xmin:xmax:nx,pmin:pmax:np"``."""
        try:
            xs, ps = spec.split(",")
            x0, x1, nx = xs.split(":")
            p0, p1, n_p = ps.split(":")
            return cls(float(x0), float(x1), int(nx), float(p0), float(p1), int(n_p))
        except ValueError as exc:
            raise ValueError(f"bad grid spec {spec!r}: {exc}") from exc

    @classmethod
    def square(cls, half_width: float, n: int) -> PhaseSpaceGrid:
        return cls(-half_width, half_width, n, -half_width, half_width, n)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def ps(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_p)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / (self.n_p - 1)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xs, self.ps, indexing="ij")

    def with_values(self, values) -> PhaseSpaceGrid:
        return PhaseSpaceGrid(self.x_min, self.x_max, self.nx, self.p_min, self.p_max, self.n_p, values)

    def same_lattice(self, other: PhaseSpaceGrid) -> bool:
        return (self.x_min, self.x_max, self.nx, self.p_min, self.p_max, self.n_p) == (
            other.x_min, other.x_max, other.nx, other.p_min, other.p_max, other.n_p,
        )

    def integral(self) -> float:
        """Trapezoidal integral of the samples."""
        return float(np.trapezoid(np.trapezoid(self.values, dx=self.dp, axis=1), dx=self.dx))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {self.x_min!r} {self.x_max!r} {self.nx} {self.p_min!r} {self.p_max!r} {self.n_p}\n")
        for row in self.values:
            buf.write(" ".join(repr(float(v)) for v in row))
            buf.write("\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> PhaseSpaceGrid:
        lines = text.strip().splitlines()
        head = lines[0].lstrip("#").split()
        if len(head) != 6:
            raise ValueError("grid CSV header must be '# x_min x_max nx p_min p_max np'")
        x0, x1, nx, p0, p1, n_p = head
        values = np.array([[float(v) for v in line.split()] for line in lines[1:]])
        return cls(float(x0), float(x1), int(nx), float(p0), float(p1), int(n_p), values)


# ---------------------------------------------------------------------------
# Fock-space objects


@dataclass(frozen=True)
class FockVector:
    coeffs: np.ndarray

    def __post_init__(self):
        c = _frozen(self.coeffs, complex)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coefficients must be a non-empty 1-d array")
        if abs(np.linalg.norm(c) - 1.0) > 1e-9:
            raise ValueError(f"state must be normalized, norm is {np.linalg.norm(c)!r}")
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.coeffs.size

    def tail_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs[_tail_start(self.dim):]))

    def density(self) -> FockDensity:
        return FockDensity(np.outer(self.coeffs, self.coeffs.conj()))

    def to_dict(self) -> dict:
        return {"dim": self.dim, "coeffs": _interleave(self.coeffs)}

    @classmethod
    def from_dict(cls, d: dict) -> FockVector:
        return cls(_deinterleave(d["coeffs"]))


@dataclass(frozen=True)
class FockDensity:
    """Truncated density matrix in the number basis."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix, complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError("density matrix must be square with dim >= 1")
        if np.abs(m - m.conj().T).max() > 1e-12:
            raise ValueError("density matrix must be Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-9:
            raise ValueError(f"density matrix must have unit trace, got {np.trace(m).real!r}")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ValueError("density matrix must be positive semidefinite")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def number(cls, n: int, dim: int | None = None) -> FockDensity:
        dim = n + 1 if dim is None else dim
        if not 0 <= n < dim:
            raise ValueError("number state outside truncation")
        m = np.zeros((dim, dim), complex)
        m[n, n] = 1.0
        return cls(m)

    def padded(self, dim: int) -> FockDensity:
        if dim < self.dim:
            raise ValueError("cannot pad to a smaller dimension")
        m = np.zeros((dim, dim), complex)
        m[: self.dim, : self.dim] = self.matrix
        return FockDensity(m)

    def tail_weight(self) -> float:
        return float(np.trace(self.matrix[_tail_start(self.dim):, _tail_start(self.dim):]).real)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "matrix": [_interleave(row) for row in self.matrix]}

    @classmethod
    def from_dict(cls, d: dict) -> FockDensity:
        return cls(np.array([_deinterleave(row) for row in d["matrix"]]))


def _interleave(z) -> list:
    z = np.asarray(z, complex)
    return np.column_stack([z.real, z.imag]).ravel().tolist()


def _deinterleave(vals) -> np.ndarray:
    v = np.asarray(vals, float)
    if v.size % 2:
        raise ValueError("interleaved array needs an even number of entries")
    return v[0::2] + 1j * v[1::2]


def _tail_start(dim: int) -> int:
    # the top quarter of the number basis is where truncation corrupts operators
    return dim - max(1, dim // 4) if dim > 1 else dim


# ---------------------------------------------------------------------------
# Ladder operators and unitaries


def fock_ladder(dim: int) -> tuple[np.ndarray, np.ndarray]:
    if dim < 2:
        raise ValueError("truncation dimension must be at least 2")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    return a, a.conj().T


def quadratures(dim: int) -> tuple[np.ndarray, np.ndarray]:
    a, ad = fock_ladder(dim)
    return (a + ad) / math.sqrt(2), (a - ad) / (1j * math.sqrt(2))


def _check_finite(*vals):
    if not all(math.isfinite(v) for v in vals):
        raise ValueError("operator parameters must be finite")


def unitary_rotation(theta: float, dim: int) -> np.ndarray:
    """``exp(-i theta a^dag a)``; diagonal, hence exact under truncation."""
    _check_finite(theta)
    if dim < 2:
        raise ValueError("truncation dimension must be at least 2")
    return np.diag(np.exp(-1j * theta * np.arange(dim)))


def _squeeze_v_generator(phi: float, dim: int) -> np.ndarray:
    a, ad = fock_ladder(dim)
    return 0.5j * math.atanh(math.tan(phi)) * (a @ a + ad @ ad)


def _squeeze_w_generator(lam: float, dim: int) -> np.ndarray:
    a, ad = fock_ladder(dim)
    return 0.5 * math.log(lam) * (a @ a - ad @ ad)


def _displacement_generator(x: float, p: float, dim: int) -> np.ndarray:
    a, ad = fock_ladder(dim)
    alpha = (x + 1j * p) / math.sqrt(2)
    return alpha * ad - np.conj(alpha) * a


def unitary_squeeze_v(phi: float, dim: int) -> np.ndarray:
    """Obliquity squeeze ``exp[(i/2) artanh(tan phi) (a^2 + a^dag^2)]``."""
    _check_finite(phi)
    if not abs(phi) < math.pi / 4:
        raise ValueError(f"obliquity must satisfy |phi| < pi/4, got {phi!r}")
    return scipy.linalg.expm(_squeeze_v_generator(phi, dim))


def unitary_squeeze_w(lam: float, dim: int) -> np.ndarray:
    """Resolution squeeze ``exp[(1/2) ln(lam) (a^2 - a^dag^2)]``."""
    _check_finite(lam)
    if not lam > 0:
        raise ValueError(f"resolution must be positive, got {lam!r}")
    return scipy.linalg.expm(_squeeze_w_generator(lam, dim))


def displacement(x: float, p: float, dim: int) -> np.ndarray:
    """``exp[-i(x p - p x)]``, shifting quadrature means by ``(x, p)``."""
    _check_finite(x, p)
    return scipy.linalg.expm(_displacement_generator(x, p, dim))


def unitary_for(m: Sl2Matrix, dim: int) -> np.ndarray:
    """Unitary ``G = W V U`` with ``G^dag (x, p) G = M (x, p)`` on low sectors."""
    d = decompose(m)
    p = d.params
    return unitary_squeeze_w(p.lam, dim) @ unitary_squeeze_v(p.phi, dim) @ unitary_rotation(p.theta, dim)


# ---------------------------------------------------------------------------
# Squeezed reference states


def _as_metric(spec) -> MetricTensor:
    if isinstance(spec, MetricTensor):
        return spec
    if isinstance(spec, Sl2Matrix):
        return metric_of(spec)
    if isinstance(spec, CanonicalParams):
        return metric_of(matrix_from_params(spec))
    raise TypeError(f"expected MetricTensor, Sl2Matrix or CanonicalParams, got {type(spec).__name__}")


@lru_cache(maxsize=64)
def _reference_coeffs(theta0: float, lam0: float, dim: int) -> np.ndarray:
    # U^dag W^dag |0>; W^dag = W(1/lam)
    a = scipy.sparse.diags(np.sqrt(np.arange(1, dim, dtype=float)), 1, format="csr", dtype=complex)
    ad = a.conj().T.tocsr()
    gen = -0.5 * math.log(lam0) * (a @ a - ad @ ad)
    v = np.zeros(dim, complex)
    v[0] = 1.0
    v = expm_multiply(gen, v)
    v = np.exp(1j * theta0 * np.arange(dim)) * v
    v.setflags(write=False)
    return v


@lru_cache(maxsize=8)
def _sparse_ladder(dim: int):
    a = scipy.sparse.diags(np.sqrt(np.arange(1, dim, dtype=float)), 1, format="csr", dtype=complex)
    return a, a.conj().T.tocsr()


def squeezed_state(spec, x: float, p: float, dim: int) -> FockVector:
    """Displaced squeezed vacuum ``D(x,p) U_theta0^dag W_lam0^dag |0>``.

    ``spec`` may be a MetricTensor, Sl2Matrix or CanonicalParams; only the
    metric matters. The global phase is fixed to zero. Raises ValueError when
    more than ``TAIL_TOL`` of the norm sits in the top quarter of the basis.
    """
    _check_finite(x, p)
    if dim < 2:
        raise ValueError("truncation dimension must be at least 2")
    canon = canonical_orthogonal(_as_metric(spec))
    v = _reference_coeffs(canon.theta, canon.lam, dim)
    if x != 0.0 or p != 0.0:
        a, ad = _sparse_ladder(dim)
        alpha = (x + 1j * p) / math.sqrt(2)
        v = expm_multiply(alpha * ad - np.conj(alpha) * a, v)
    tail = float(np.linalg.norm(v[_tail_start(dim):]))
    if tail > TAIL_TOL:
        raise ValueError(
            f"truncation dim={dim} too small: tail norm {tail:.3g} exceeds {TAIL_TOL:g} at (x, p)=({x}, {p})"
        )
    return FockVector(v / np.linalg.norm(v))


def squeezed_coefficients(spec, points, dim: int) -> np.ndarray:
    """Number-basis coefficients of ``|(x,p)_M>`` for many points at once.

    Solves ``a_M |v> = beta |v>`` with ``a_M = mu a + nu a^dag`` by forward
    recurrence ``c_{n+1} = (beta c_n - nu sqrt(n) c_{n-1}) / (mu sqrt(n+1))``
    and normalizes over the truncation. Phases differ from
    :func:`squeezed_state` by a per-point constant. Returns shape
    ``(len(points), dim)``.
    """
    canon = canonical_orthogonal(_as_metric(spec))
    m0 = orthogonal_matrix(canon.theta, canon.lam)
    A = m0.m11 + 1j * m0.m21
    B = m0.m12 + 1j * m0.m22
    mu, nu = 0.5 * (A - 1j * B), 0.5 * (A + 1j * B)
    pts = np.atleast_2d(np.asarray(points, float))
    xm, pm = m0.apply(pts[:, 0], pts[:, 1])
    beta = (xm + 1j * pm) / math.sqrt(2)
    c = np.zeros((len(pts), dim), complex)
    c[:, 0] = 1.0
    if dim > 1:
        c[:, 1] = beta / mu
    for n in range(1, dim - 1):
        c[:, n + 1] = (beta * c[:, n] - nu * math.sqrt(n) * c[:, n - 1]) / (mu * math.sqrt(n + 1))
    c /= np.linalg.norm(c, axis=1)[:, None]
    tail = np.linalg.norm(c[:, _tail_start(dim):], axis=1)
    if tail.size and tail.max() > TAIL_TOL:
        k = int(tail.argmax())
        raise ValueError(
            f"truncation dim={dim} too small: tail norm {tail[k]:.3g} exceeds {TAIL_TOL:g} at (x, p)={tuple(pts[k])}"
        )
    return c


def suggested_dim(lam0: float, x: float = 0.0, p: float = 0.0) -> int:
    """Rough truncation heuristic; not a guarantee."""
    return int(math.ceil(16 * (1 + lam0 * lam0 + x * x + p * p)))


def annihilation_m(m: Sl2Matrix, dim: int) -> np.ndarray:
    """Truncated ``a_M = (x_M + i p_M)/sqrt(2)``."""
    x, p = quadratures(dim)
    xm = m.m11 * x + m.m12 * p
    pm = m.m21 * x + m.m22 * p
    return (xm + 1j * pm) / math.sqrt(2)


def eigen_residual(m: Sl2Matrix, x: float, p: float, v: FockVector) -> float:
    """``|| (a_M - (x_M + i p_M)/sqrt(2)) v ||``."""
    xm, pm = m.apply(x, p)
    am = annihilation_m(m, v.dim)
    return float(np.linalg.norm(am @ v.coeffs - (xm + 1j * pm) / math.sqrt(2) * v.coeffs))


# ---------------------------------------------------------------------------
# Gaussian <-> Fock


def gaussian_to_fock(state: GaussianState, dim: int) -> FockDensity:
    """Project a Gaussian state onto the first ``dim`` number states.

    Uses the Williamson form: thermal state of occupation ``sqrt(det cov) - 1/2``,
    a unit-determinant squeeze realizing the covariance shape, then a
    displacement.
    """
    nu = math.sqrt(np.linalg.det(state.cov))
    nbar = max(nu - 0.5, 0.0)
    w, vecs = np.linalg.eigh(state.cov / nu)
    shape = vecs @ np.diag(np.sqrt(w)) @ vecs.T
    shape /= math.sqrt(np.linalg.det(shape))
    if nbar == 0.0:
        rho = np.zeros((dim, dim), complex)
        rho[0, 0] = 1.0
    else:
        n = np.arange(dim)
        pops = (nbar / (nbar + 1)) ** n / (nbar + 1)
        rho = np.diag(pops / pops.sum()).astype(complex)
    g = unitary_for(Sl2Matrix.from_array(shape), dim)
    d = displacement(float(state.mean[0]), float(state.mean[1]), dim)
    u = d @ g
    rho = u @ rho @ u.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    tail = float(np.trace(rho[_tail_start(dim):, _tail_start(dim):]).real)
    if tail > TAIL_TOL:
        raise ValueError(f"truncation dim={dim} too small for Gaussian state: tail weight {tail:.3g}")
    return FockDensity(rho / np.trace(rho).real)


def fock_moments(rho: FockDensity) -> GaussianState:
    """Mean and symmetrized covariance of ``rho``, as a GaussianState."""
    d = rho.dim + 2
    r = rho.padded(d).matrix
    x, p = quadratures(d)

    def ev(op):
        return np.trace(r @ op).real

    mx, mp = ev(x), ev(p)
    vxx = ev(x @ x) - mx * mx
    vpp = ev(p @ p) - mp * mp
    vxp = 0.5 * ev(x @ p + p @ x) - mx * mp
    return GaussianState([mx, mp], [[vxx, vxp], [vxp, vpp]])


# ---------------------------------------------------------------------------
# Wigner function of a truncated density matrix


def _wigner_points(rho: np.ndarray, x: np.ndarray, p: np.ndarray) -> np.ndarray:
    # Laguerre recursion over |m><n| Wigner functions, normalized to unit integral
    dim = rho.shape[0]
    A = (x + 1j * p) / math.sqrt(2)
    Wl = [None] * dim
    Wl[0] = np.exp(-2.0 * np.abs(A) ** 2) / math.pi + 0j
    W = rho[0, 0].real * Wl[0].real
    for n in range(1, dim):
        Wl[n] = 2.0 * A * Wl[n - 1] / math.sqrt(n)
        W = W + 2 * np.real(rho[0, n] * Wl[n])
    for m in range(1, dim):
        temp = Wl[m].copy()
        Wl[m] = (2 * np.conj(A) * temp - math.sqrt(m) * Wl[m - 1]) / math.sqrt(m)
        W = W + np.real(rho[m, m] * Wl[m])
        for n in range(m + 1, dim):
            temp2 = (2 * A * Wl[n - 1] - math.sqrt(m) * temp) / math.sqrt(n)
            temp = Wl[n].copy()
            Wl[n] = temp2
            W = W + 2 * np.real(rho[m, n] * Wl[n])
    return W


def wigner_fock_points(rho: FockDensity, x, p, chunk: int = 20000) -> np.ndarray:
    x, p = np.broadcast_arrays(np.asarray(x, float), np.asarray(p, float))
    xf, pf = x.ravel(), p.ravel()
    out = np.empty(xf.size)
    for start in range(0, xf.size, chunk):
        sl = slice(start, start + chunk)
        out[sl] = _wigner_points(rho.matrix, xf[sl], pf[sl])
    return out.reshape(x.shape)


def wigner_fock(rho: FockDensity, grid: PhaseSpaceGrid) -> PhaseSpaceGrid:
    if rho.dim < 1:
        raise ValueError("truncation dimension must be at least 1")
    X, P = grid.mesh()
    return grid.with_values(wigner_fock_points(rho, X, P))
