"""Real 2x2 unit-determinant measurement matrices.

A measurement of the rotated quadrature pair ``(x_M, p_M) = M (x, p)`` is
described by ``M`` in SL(2, R), written in terms of a rotation ``theta``, an
obliquity ``phi`` and a resolution ``lam``::

    M = sqrt(sec 2phi) [[ cos(theta+phi)/lam,  sin(theta+phi)/lam],
                        [-lam sin(theta-phi),  lam cos(theta-phi)]]
      = T(lam) S(phi) R(theta)

Two measurements carry the same information iff ``M'^T M' == M^T M``; the
metric tensor ``(a, c; c, b)`` is therefore the class invariant, and every
class has a zero-obliquity member ``T(lam0) R(theta0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DET_RTOL = 1e-9
RECON_TOL = 1e-10

__all__ = [
    "CanonicalParams",
    "Sl2Matrix",
    "MetricTensor",
    "Decomposition",
    "wrap_angle",
    "mod_half_pi",
    "rotation",
    "obliquity",
    "resolution",
    "matrix_from_params",
    "params_from_matrix",
    "decompose",
    "metric_of",
    "are_equivalent",
    "canonical_orthogonal",
    "canonical_orthogonal_balanced",
    "orthogonal_matrix",
    "rebalance",
    "pointer_transform",
    "is_rotation",
    "accuracies",
]


def wrap_angle(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    if -math.pi < theta <= math.pi:
        return theta
    return math.pi - (math.pi - theta) % (2 * math.pi)


def mod_half_pi(theta: float) -> float:
    """Return ``theta - n*pi/2`` with ``n*pi/2 <= theta < (n+1)*pi/2``."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    n = math.floor(theta / (math.pi / 2))
    r = theta - n * (math.pi / 2)
    # floor can land one step off when theta sits a rounding error from a multiple
    if r >= math.pi / 2:
        r -= math.pi / 2
    elif r < 0:
        r += math.pi / 2
    return r


@dataclass(frozen=True)
class CanonicalParams:
    """Rotation, obliquity and resolution of a measurement matrix.

    ``theta`` is stored normalized into (-pi, pi]. ``phi`` must satisfy
    ``|phi| < pi/4`` and ``lam > 0``.
    """

    theta: float
    phi: float
    lam: float

    def __post_init__(self):
        for name in ("theta", "phi", "lam"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not abs(self.phi) < math.pi / 4:
            raise ValueError(f"obliquity must satisfy |phi| < pi/4, got {self.phi!r}")
        if not self.lam > 0:
            raise ValueError(f"resolution must be positive, got {self.lam!r}")
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "lam", float(self.lam))

    @classmethod
    def from_degrees(cls, theta: float, phi: float, lam: float) -> CanonicalParams:
        return cls(math.radians(theta), math.radians(phi), lam)

    def to_dict(self) -> dict:
        return {"theta": self.theta, "phi": self.phi, "lambda": self.lam}

    @classmethod
    def from_dict(cls, d: dict) -> CanonicalParams:
        return cls(float(d["theta"]), float(d["phi"]), float(d["lambda"]))


@dataclass(frozen=True)
class Sl2Matrix:
    """Real 2x2 matrix with unit determinant (relative tolerance 1e-9)."""

    m11: float
    m12: float
    m21: float
    m22: float

    def __post_init__(self):
        vals = (self.m11, self.m12, self.m21, self.m22)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("matrix entries must be finite")
        for name, v in zip(("m11", "m12", "m21", "m22"), vals):
            object.__setattr__(self, name, float(v))
        det = self.m11 * self.m22 - self.m12 * self.m21
        scale = max(1.0, abs(self.m11 * self.m22), abs(self.m12 * self.m21))
        if abs(det - 1.0) > DET_RTOL * scale:
            raise ValueError(f"determinant must be 1, got {det!r}")

    @classmethod
    def from_array(cls, m) -> Sl2Matrix:
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 array, got shape {m.shape}")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> Sl2Matrix:
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    def inverse(self) -> Sl2Matrix:
        # exact for det == 1; the constructor re-checks the determinant
        return Sl2Matrix(self.m22, -self.m12, -self.m21, self.m11)

    def __matmul__(self, other: Sl2Matrix) -> Sl2Matrix:
        if not isinstance(other, Sl2Matrix):
            return NotImplemented
        return Sl2Matrix.from_array(self.array @ other.array)

    def apply(self, x, p):
        """Map phase-space coordinates ``(x, p)`` to ``(x_M, p_M)``."""
        return self.m11 * x + self.m12 * p, self.m21 * x + self.m22 * p

    def to_dict(self) -> dict:
        return {"m": [[self.m11, self.m12], [self.m21, self.m22]]}

    @classmethod
    def from_dict(cls, d: dict) -> Sl2Matrix:
        return cls.from_array(d["m"])


@dataclass(frozen=True)
class MetricTensor:
    """Entries of the symmetric phase-space metric ``M^T M = (a, c; c, b)``."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, float(v))
        if not (self.a > 0 and self.b > 0):
            raise ValueError("metric diagonal entries must be positive")
        det = self.a * self.b - self.c * self.c
        if abs(det - 1.0) > DET_RTOL * max(1.0, self.a * self.b):
            raise ValueError(f"metric must satisfy ab - c^2 = 1, got {det!r}")

    @classmethod
    def identity(cls) -> MetricTensor:
        return cls(1.0, 1.0, 0.0)

    @classmethod
    def from_array(cls, g) -> MetricTensor:
        g = np.asarray(g, dtype=float)
        if g.shape != (2, 2) or abs(g[0, 1] - g[1, 0]) > 1e-12 * max(1.0, abs(g[0, 1])):
            raise ValueError("metric must be a symmetric 2x2 array")
        return cls(g[0, 0], g[1, 1], 0.5 * (g[0, 1] + g[1, 0]))

    @property
    def array(self) -> np.ndarray:
        return np.array([[self.a, self.c], [self.c, self.b]])

    @property
    def inverse_array(self) -> np.ndarray:
        return np.array([[self.b, -self.c], [-self.c, self.a]])

    def quadratic_form(self, dx, dp):
        """Squared line element ``a dx^2 + 2c dx dp + b dp^2``."""
        return self.a * dx * dx + 2.0 * self.c * dx * dp + self.b * dp * dp

    def max_abs_diff(self, other: MetricTensor) -> float:
        return max(abs(self.a - other.a), abs(self.b - other.b), abs(self.c - other.c))

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c}

    @classmethod
    def from_dict(cls, d: dict) -> MetricTensor:
        return cls(float(d["a"]), float(d["b"]), float(d["c"]))


@dataclass(frozen=True)
class Decomposition:
    t_lambda: Sl2Matrix
    s_phi: Sl2Matrix
    r_theta: Sl2Matrix
    params: CanonicalParams

    def product(self) -> Sl2Matrix:
        return self.t_lambda @ self.s_phi @ self.r_theta


def rotation(theta: float) -> Sl2Matrix:
    c, s = math.cos(theta), math.sin(theta)
    return Sl2Matrix(c, s, -s, c)


def obliquity(phi: float) -> Sl2Matrix:
    if not abs(phi) < math.pi / 4:
        raise ValueError(f"obliquity must satisfy |phi| < pi/4, got {phi!r}")
    k = math.sqrt(1.0 / math.cos(2 * phi))
    c, s = k * math.cos(phi), k * math.sin(phi)
    return Sl2Matrix(c, s, s, c)


def resolution(lam: float) -> Sl2Matrix:
    if not lam > 0:
        raise ValueError(f"resolution must be positive, got {lam!r}")
    return Sl2Matrix(1.0 / lam, 0.0, 0.0, lam)


def matrix_from_params(p: CanonicalParams) -> Sl2Matrix:
    k = math.sqrt(1.0 / math.cos(2 * p.phi))
    u, v = p.theta + p.phi, p.theta - p.phi
    return Sl2Matrix(
        k * math.cos(u) / p.lam,
        k * math.sin(u) / p.lam,
        -k * p.lam * math.sin(v),
        k * p.lam * math.cos(v),
    )


def params_from_matrix(m: Sl2Matrix) -> CanonicalParams:
    """Recover ``(theta, phi, lam)`` from a measurement matrix.

    The first row fixes ``theta + phi`` and the second ``theta - phi`` through
    two-argument arctangents; the first row norm then fixes ``lam``.
    """
    r1 = math.hypot(m.m11, m.m12)
    r2 = math.hypot(m.m21, m.m22)
    if not (r1 > 0 and r2 > 0):
        raise ValueError("matrix rows must have positive norm")
    s1 = math.atan2(m.m12, m.m11)
    s2 = math.atan2(-m.m21, m.m22)
    # cos 2phi > 0 pins the half-difference to (-pi/4, pi/4)
    phi = 0.5 * wrap_angle(s1 - s2)
    theta = wrap_angle(s2 + phi)
    lam = math.sqrt(1.0 / math.cos(2 * phi)) / r1
    try:
        params = CanonicalParams(theta, phi, lam)
    except ValueError as exc:
        raise ValueError(f"matrix has no valid parameterization: {exc}") from exc
    recon = matrix_from_params(params).array
    scale = max(1.0, float(np.abs(m.array).max()))
    if np.abs(recon - m.array).max() > RECON_TOL * scale:
        raise ValueError("parameter reconstruction failed; matrix is malformed")
    return params


def decompose(m: Sl2Matrix) -> Decomposition:
    """Factor ``m`` as ``T(lam) S(phi) R(theta)``."""
    p = params_from_matrix(m)
    return Decomposition(resolution(p.lam), obliquity(p.phi), rotation(p.theta), p)


def metric_of(m: Sl2Matrix) -> MetricTensor:
    a = m.m11 * m.m11 + m.m21 * m.m21
    b = m.m12 * m.m12 + m.m22 * m.m22
    c = m.m11 * m.m12 + m.m21 * m.m22
    return MetricTensor(a, b, c)


def are_equivalent(m1: Sl2Matrix, m2: Sl2Matrix, tol: float = 1e-9) -> bool:
    """True iff both measurements define the same phase-space metric."""
    return metric_of(m1).max_abs_diff(metric_of(m2)) <= tol


def orthogonal_matrix(theta0: float, lam0: float) -> Sl2Matrix:
    """Zero-obliquity matrix ``T(lam0) R(theta0)``."""
    return matrix_from_params(CanonicalParams(theta0, 0.0, lam0))


def canonical_orthogonal(g: MetricTensor) -> CanonicalParams:
    """Zero-obliquity representative ``(theta0, 0, lam0)`` of a metric class.

    When ``a == b`` (to relative 1e-12) the representative is
    ``theta0 = -pi/4``, ``lam0 = sqrt(a + c)``. Otherwise ``lam0`` is the root
    of ``lam^2 + lam^-2 = a + b`` selected by ``sign(a - b)`` and ``theta0``
    lies in (-pi/4, pi/4) with ``tan 2 theta0 = 2c / (a - b)``.
    """
    a, b, c = g.a, g.b, g.c
    if abs(a - b) <= 1e-12 * (a + b):
        theta0 = -math.pi / 4
        lam0 = math.sqrt(a + c)
    else:
        # (a+b)^2 - 4 == (a-b)^2 + 4c^2 given ab - c^2 == 1; the hypot form avoids
        # cancellation near the identity metric
        h = math.hypot(a - b, 2.0 * c)
        big = 0.5 * (a + b + h)
        if a > b:
            lam0 = math.sqrt(1.0 / big)
            theta0 = 0.5 * math.atan2(2.0 * c, a - b)
        else:
            lam0 = math.sqrt(big)
            theta0 = 0.5 * math.atan2(-2.0 * c, b - a)
    candidates = [(theta0, lam0), (theta0 + math.pi / 2, 1.0 / lam0)]
    for t, lam in candidates:
        params = CanonicalParams(t, 0.0, lam)
        if metric_of(matrix_from_params(params)).max_abs_diff(g) <= RECON_TOL * max(1.0, a + b):
            return params
    raise ArithmeticError(f"canonical representative failed to reproduce metric {g}")


def canonical_orthogonal_balanced(theta: float, phi: float) -> tuple[float, float]:
    """Closed-form ``(theta0, lam0)`` for a unit-resolution measurement."""
    if not abs(phi) < math.pi / 4:
        raise ValueError(f"obliquity must satisfy |phi| < pi/4, got {phi!r}")
    if phi == 0:
        return -math.pi / 4, 1.0
    theta0 = mod_half_pi(theta) - math.pi / 4
    sec2, tan2 = 1.0 / math.cos(2 * phi), math.tan(2 * phi)
    s2 = math.sin(2 * theta)
    # exact zeros of sin 2theta are unreachable in floating point for theta = k pi/2, k != 0
    if abs(s2) > 1e-15:
        lam0 = math.sqrt(sec2 + math.copysign(1.0, s2) * tan2)
    else:
        lam0 = math.sqrt(sec2 + math.cos(2 * theta) * tan2)
    return theta0, lam0


def rebalance(m: Sl2Matrix, tau: float) -> Sl2Matrix:
    """Absorb an accuracy asymmetry ``tau`` into the matrix: ``diag(1/tau, tau) M``."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau!r}")
    return Sl2Matrix(m.m11 / tau, m.m12 / tau, m.m21 * tau, m.m22 * tau)


def pointer_transform(m1: Sl2Matrix, m2: Sl2Matrix) -> Sl2Matrix:
    """``L = m2 m1^-1``, the map taking ``m1`` pointer readings to ``m2`` ones."""
    return m2 @ m1.inverse()


def is_rotation(l: Sl2Matrix, tol: float = 1e-9) -> bool:
    n1 = l.m11 * l.m11 + l.m12 * l.m12
    n2 = l.m21 * l.m21 + l.m22 * l.m22
    cross = l.m11 * l.m21 + l.m12 * l.m22
    return abs(n1 - 1.0) <= tol and abs(n2 - 1.0) <= tol and abs(cross) <= tol


def accuracies(p: CanonicalParams) -> dict:
    """Retrodictive accuracies of a balanced measurement and of its orthogonal twin.

    Returns the rms errors for the oblique quadratures ``x_{theta+phi}``,
    ``p_{theta-phi}`` and for the orthogonal pair ``x_{theta0}``,
    ``p_{theta0}``.
    """
    k = math.sqrt(2.0 / math.cos(2 * p.phi))
    canon = canonical_orthogonal(metric_of(matrix_from_params(p)))
    return {
        "theta0": canon.theta,
        "lambda0": canon.lam,
        "oblique_x": p.lam / k,
        "oblique_p": 1.0 / (p.lam * k),
        "orthogonal_x": canon.lam / math.sqrt(2.0),
        "orthogonal_p": 1.0 / (math.sqrt(2.0) * canon.lam),
    }
