import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retrohusimi.sl2r import (
    CanonicalParams,
    MetricTensor,
    Sl2Matrix,
    accuracies,
    are_equivalent,
    canonical_orthogonal,
    canonical_orthogonal_balanced,
    decompose,
    is_rotation,
    matrix_from_params,
    metric_of,
    mod_half_pi,
    obliquity,
    orthogonal_matrix,
    params_from_matrix,
    pointer_transform,
    rebalance,
    resolution,
    rotation,
    wrap_angle,
)

SEC80 = 1 / math.cos(math.radians(80))
TAN80 = math.tan(math.radians(80))

thetas = st.floats(-math.pi, math.pi, allow_nan=False)
phis = st.floats(-math.pi / 4 + 1e-3, math.pi / 4 - 1e-3)
lams = st.floats(0.1, 10.0)
params = st.builds(CanonicalParams, thetas, phis, lams)


def same_metric(t1, l1, t2, l2, tol=1e-10):
    return metric_of(orthogonal_matrix(t1, l1)).max_abs_diff(metric_of(orthogonal_matrix(t2, l2))) <= tol


# --- types -------------------------------------------------------------------


def test_params_reject_boundary_obliquity():
    with pytest.raises(ValueError):
        CanonicalParams(0.0, math.pi / 4, 1.0)
    with pytest.raises(ValueError):
        CanonicalParams(0.0, 0.1, 0.0)


def test_params_theta_normalized():
    assert CanonicalParams(-math.pi, 0, 1).theta == pytest.approx(math.pi)
    assert CanonicalParams(3 * math.pi / 2, 0, 1).theta == pytest.approx(-math.pi / 2)


def test_sl2_rejects_bad_determinant():
    with pytest.raises(ValueError):
        Sl2Matrix(1, 0, 0, 2)
    Sl2Matrix(1, 0, 0, 1 + 1e-12)


def test_metric_rejects_bad_determinant():
    with pytest.raises(ValueError):
        MetricTensor(2, 2, 0)
    with pytest.raises(ValueError):
        MetricTensor(-1, -1, 0)


def test_json_round_trip():
    p = CanonicalParams(0.3, 0.2, 1.7)
    assert json.loads(json.dumps(p.to_dict())) == {"theta": 0.3, "phi": 0.2, "lambda": 1.7}
    assert CanonicalParams.from_dict(p.to_dict()) == p
    m = matrix_from_params(p)
    assert Sl2Matrix.from_dict(json.loads(json.dumps(m.to_dict()))) == m
    g = metric_of(m)
    assert MetricTensor.from_dict(json.loads(json.dumps(g.to_dict()))) == g


# --- matrix_from_params --------------------------------------------------------


def test_identity_params():
    np.testing.assert_allclose(matrix_from_params(CanonicalParams(0, 0, 1)).array, np.eye(2), atol=1e-15)


def test_oblique40_matrix():
    m = matrix_from_params(CanonicalParams.from_degrees(0, 40, 1))
    c, s = math.cos(math.radians(40)), math.sin(math.radians(40))
    np.testing.assert_allclose(m.array, math.sqrt(SEC80) * np.array([[c, s], [s, c]]), rtol=1e-14)


def test_quarter_turn_resolution_two():
    # scalar evaluation of each entry with theta=pi/2, phi=0, lam=2
    t = math.pi / 2
    expected = [[math.cos(t) / 2, math.sin(t) / 2], [-2 * math.sin(t), 2 * math.cos(t)]]
    m = matrix_from_params(CanonicalParams(t, 0.0, 2.0))
    np.testing.assert_allclose(m.array, expected, atol=1e-15)
    np.testing.assert_allclose(m.array, [[0, 0.5], [-2, 0]], atol=1e-15)


# --- params_from_matrix --------------------------------------------------------


def test_params_of_identity():
    p = params_from_matrix(Sl2Matrix.identity())
    assert (p.theta, p.phi, p.lam) == pytest.approx((0, 0, 1))


def test_params_of_rotation():
    p = params_from_matrix(rotation(1.2))
    assert (p.theta, p.phi, p.lam) == pytest.approx((1.2, 0, 1), abs=1e-14)


def test_params_round_trip_example():
    p = params_from_matrix(matrix_from_params(CanonicalParams(0.3, 0.2, 1.7)))
    assert (p.theta, p.phi, p.lam) == pytest.approx((0.3, 0.2, 1.7), abs=1e-12)


def test_params_round_trip_1000_random():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        p = CanonicalParams(
            rng.uniform(-math.pi, math.pi), rng.uniform(-math.pi / 4, math.pi / 4), math.exp(rng.uniform(-2, 2))
        )
        q = params_from_matrix(matrix_from_params(p))
        assert abs(wrap_angle(q.theta - p.theta)) < 1e-10
        assert abs(q.phi - p.phi) < 1e-10
        assert abs(q.lam - p.lam) < 1e-10


@given(params)
def test_round_trip_property(p):
    m = matrix_from_params(p)
    q = params_from_matrix(m)
    assert abs(wrap_angle(q.theta - p.theta)) < 1e-9
    assert q.phi == pytest.approx(p.phi, abs=1e-9)
    assert q.lam == pytest.approx(p.lam, rel=1e-9)
    np.testing.assert_allclose(matrix_from_params(q).array, m.array, atol=1e-10 * max(1, np.abs(m.array).max()))


@given(params)
def test_decomposition_property(p):
    m = matrix_from_params(p)
    d = decompose(m)
    tol = 1e-12 * max(1.0, np.abs(m.array).max())
    np.testing.assert_allclose(d.product().array, m.array, atol=tol)
    t, s, r = d.t_lambda.array, d.s_phi.array, d.r_theta.array
    assert t[0, 1] == 0 and t[1, 0] == 0
    assert s[0, 1] == s[1, 0] and s[0, 0] == s[1, 1]
    np.testing.assert_allclose(r @ r.T, np.eye(2), atol=1e-15)


def test_params_of_negated_identity():
    p = params_from_matrix(Sl2Matrix(-1.0, 0.0, 0.0, -1.0))
    assert (p.theta, p.phi, p.lam) == pytest.approx((math.pi, 0, 1))


# --- metric ------------------------------------------------------------------


def test_metric_identity():
    assert metric_of(Sl2Matrix.identity()) == MetricTensor(1, 1, 0)


def test_metric_oblique40():
    g = metric_of(matrix_from_params(CanonicalParams.from_degrees(0, 40, 1)))
    assert g.a == pytest.approx(SEC80, rel=1e-14)
    assert g.b == pytest.approx(SEC80, rel=1e-14)
    assert g.c == pytest.approx(TAN80, rel=1e-14)


def test_metric_resolution_two():
    g = metric_of(resolution(2.0))
    assert (g.a, g.b, g.c) == (0.25, 4.0, 0.0)


@given(params)
def test_metric_equals_mtm(p):
    m = matrix_from_params(p).array
    np.testing.assert_allclose(metric_of(matrix_from_params(p)).array, m.T @ m, rtol=1e-12, atol=1e-12)


def test_quadratic_form_is_line_element():
    m = matrix_from_params(CanonicalParams(0.3, 0.1, 1.4))
    dx, dp = 0.7, -0.2
    xm, pm = m.apply(dx, dp)
    assert metric_of(m).quadratic_form(dx, dp) == pytest.approx(xm**2 + pm**2)


# --- equivalence ---------------------------------------------------------------


@given(params, thetas)
def test_rotated_is_equivalent(p, psi):
    m = matrix_from_params(p)
    scale = max(1.0, np.abs(m.array).max() ** 2)
    assert are_equivalent(m, rotation(psi) @ m, 1e-12 * scale * 10)


def test_identity_not_equivalent_to_resolution():
    assert not are_equivalent(Sl2Matrix.identity(), resolution(2.0))


def test_oblique40_oblique_equivalent_to_orthogonal():
    m = matrix_from_params(CanonicalParams.from_degrees(0, 40, 1))
    m0 = matrix_from_params(CanonicalParams.from_degrees(-45, 0, math.sqrt(SEC80 + TAN80)))
    assert are_equivalent(m, m0, 1e-9)


@settings(max_examples=50)
@given(params, thetas, thetas)
def test_equivalence_is_an_equivalence_relation(p, psi1, psi2):
    m1 = matrix_from_params(p)
    m2 = rotation(psi1) @ m1
    m3 = rotation(psi2) @ m2
    tol = 1e-11 * max(1.0, np.abs(m1.array).max() ** 2)
    assert are_equivalent(m1, m1, 0.0)
    assert are_equivalent(m1, m2, tol) and are_equivalent(m2, m1, tol)
    assert are_equivalent(m2, m3, tol) and are_equivalent(m1, m3, tol)


def test_equivalence_iff_pointer_rotation_1000_pairs():
    rng = np.random.default_rng(12)
    seen = {True: 0, False: 0}
    for k in range(1000):
        m = matrix_from_params(CanonicalParams(rng.uniform(-3, 3), rng.uniform(-0.7, 0.7), math.exp(rng.uniform(-1, 1))))
        m2 = rotation(rng.uniform(-3, 3)) @ m
        if k % 2:
            m2 = m2 @ obliquity(rng.uniform(0.05, 0.5) * rng.choice([-1, 1]))
        eq = are_equivalent(m, m2, 1e-9)
        assert eq == is_rotation(pointer_transform(m, m2), 1e-9)
        seen[eq] += 1
    assert seen[True] == 500 and seen[False] == 500


# --- canonical representatives -------------------------------------------------


def test_canonical_identity():
    c = canonical_orthogonal(MetricTensor(1, 1, 0))
    assert c.theta == pytest.approx(-math.pi / 4) and c.lam == pytest.approx(1.0)
    np.testing.assert_allclose(orthogonal_matrix(c.theta, c.lam).array, rotation(-math.pi / 4).array, atol=1e-15)


def test_canonical_oblique40():
    c = canonical_orthogonal(MetricTensor(SEC80, SEC80, TAN80))
    assert c.theta == pytest.approx(-math.pi / 4)
    assert c.lam == pytest.approx(math.sqrt(SEC80 + TAN80), rel=1e-13)
    assert c.lam == pytest.approx(3.3809, abs=1e-4)
    assert c.lam / math.sqrt(2) == pytest.approx(2.39, abs=0.005)
    assert 1 / (math.sqrt(2) * c.lam) == pytest.approx(0.21, abs=0.005)


def test_canonical_diagonal():
    c = canonical_orthogonal(MetricTensor(4.0, 0.25, 0.0))
    assert (c.theta, c.lam) == pytest.approx((0.0, 0.5))
    np.testing.assert_allclose(orthogonal_matrix(0.0, 0.5).array, np.diag([2.0, 0.5]))


@given(params)
def test_canonical_reconstructs_metric(p):
    g = metric_of(matrix_from_params(p))
    c = canonical_orthogonal(g)
    assert c.phi == 0.0
    m0 = orthogonal_matrix(c.theta, c.lam).array
    np.testing.assert_allclose(m0.T @ m0, g.array, atol=1e-10 * max(1.0, g.a + g.b))


def test_canonical_theta_satisfies_double_angle_relation():
    # tan 2theta0 = 2c / (a - b) is the relation the zero-obliquity equations impose
    g = metric_of(matrix_from_params(CanonicalParams.from_degrees(30, 10, 1)))
    c = canonical_orthogonal(g)
    assert math.tan(2 * c.theta) == pytest.approx(2 * g.c / (g.a - g.b))
    assert math.degrees(c.theta) == pytest.approx(-15.0)


def test_balanced_oblique40():
    t0, l0 = canonical_orthogonal_balanced(0.0, math.radians(40))
    assert t0 == pytest.approx(-math.pi / 4)
    assert l0 == pytest.approx(math.sqrt(SEC80 + TAN80))


def test_balanced_zero_obliquity():
    assert canonical_orthogonal_balanced(0.0, 0.0) == (-math.pi / 4, 1.0)


def test_balanced_cross_check_30_10():
    theta, phi = math.radians(30), math.radians(10)
    t0, l0 = canonical_orthogonal_balanced(theta, phi)
    c = canonical_orthogonal(metric_of(matrix_from_params(CanonicalParams(theta, phi, 1.0))))
    assert l0 == pytest.approx(c.lam, abs=1e-10)
    assert same_metric(t0, l0, c.theta, c.lam)


@given(thetas, phis)
def test_balanced_agrees_with_general(theta, phi):
    t0, l0 = canonical_orthogonal_balanced(theta, phi)
    g = metric_of(matrix_from_params(CanonicalParams(theta, phi, 1.0)))
    assert metric_of(orthogonal_matrix(t0, l0)).max_abs_diff(g) <= 1e-10 * (g.a + g.b)


@pytest.mark.parametrize("theta", [0.0, math.pi / 2, math.pi, -math.pi / 2])
def test_balanced_axis_aligned_rotations(theta):
    phi = 0.3
    t0, l0 = canonical_orthogonal_balanced(theta, phi)
    g = metric_of(matrix_from_params(CanonicalParams(theta, phi, 1.0)))
    assert metric_of(orthogonal_matrix(t0, l0)).max_abs_diff(g) < 1e-12


# --- small helpers -------------------------------------------------------------


@pytest.mark.parametrize(
    "theta, expected",
    [(0.0, 0.0), (math.pi / 2, 0.0), (-0.1, math.pi / 2 - 0.1), (math.pi, 0.0), (1.0, 1.0), (2.0, 2.0 - math.pi / 2)],
)
def test_mod_half_pi(theta, expected):
    assert mod_half_pi(theta) == pytest.approx(expected, abs=1e-15)


@given(st.floats(-100, 100))
def test_mod_half_pi_range(theta):
    r = mod_half_pi(theta)
    assert 0 <= r < math.pi / 2
    n = (theta - r) / (math.pi / 2)
    assert n == pytest.approx(round(n), abs=1e-9)


def test_rebalance_examples():
    m = matrix_from_params(CanonicalParams(0.3, 0.2, 1.7))
    assert rebalance(m, 1.0) == m
    np.testing.assert_allclose(rebalance(Sl2Matrix.identity(), 2.0).array, np.diag([0.5, 2.0]))
    np.testing.assert_allclose(rebalance(resolution(2.0), 0.5).array, np.eye(2))


def test_rebalance_changes_metric():
    m = matrix_from_params(CanonicalParams(0.8, -0.3, 1.2))
    assert metric_of(rebalance(m, 1.7)).max_abs_diff(metric_of(m)) > 1e-3
    assert rebalance(m, 1.7).det == pytest.approx(1.0)


def test_pointer_transform_examples():
    m = matrix_from_params(CanonicalParams(0.3, 0.2, 1.7))
    np.testing.assert_allclose(pointer_transform(m, m).array, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(pointer_transform(m, rotation(0.9) @ m).array, rotation(0.9).array, atol=1e-12)
    l = pointer_transform(Sl2Matrix.identity(), resolution(2.0))
    np.testing.assert_allclose(l.array, np.diag([0.5, 2.0]))
    assert not is_rotation(l)


def test_is_rotation_examples():
    assert is_rotation(rotation(0.7))
    assert not is_rotation(Sl2Matrix(0.5, 0, 0, 2))
    s = obliquity(0.1)
    assert np.sum(s.array[0] ** 2) == pytest.approx(1 / math.cos(0.2))
    assert not is_rotation(s)


def test_accuracies_oblique40():
    acc = accuracies(CanonicalParams.from_degrees(0, 40, 1))
    assert round(acc["oblique_x"], 2) == 0.29
    assert round(acc["oblique_p"], 2) == 0.29
    assert round(acc["orthogonal_x"], 2) == 2.39
    assert round(acc["orthogonal_p"], 2) == 0.21


def test_accuracies_identity():
    acc = accuracies(CanonicalParams(0, 0, 1))
    assert acc["theta0"] == pytest.approx(-math.pi / 4)
    assert acc["lambda0"] == pytest.approx(1.0)
    for k in ("oblique_x", "oblique_p", "orthogonal_x", "orthogonal_p"):
        assert acc[k] == pytest.approx(1 / math.sqrt(2))
