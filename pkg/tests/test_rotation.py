import numpy as np
import pytest

from proxyzoo import (
    BranchCutError,
    SkewParams,
    ValidationError,
    exp_skew,
    log_rotation,
    random_rotation,
    rotation_aligning,
)
from proxyzoo._kernels import rotation_and_dexp, rotation_from_params


def test_zero_params_give_identity():
    pt = exp_skew(SkewParams.zero(4))
    assert np.allclose(pt.O, np.eye(4), atol=1e-15)


def test_n2_closed_form():
    alpha = 0.37
    pt = exp_skew(SkewParams(np.array([alpha]), 2))
    expected = np.array([[np.cos(alpha), -np.sin(alpha)], [np.sin(alpha), np.cos(alpha)]])
    assert np.allclose(pt.O, expected, atol=1e-14)


def test_random_points_are_rotations():
    rng = np.random.default_rng(3)
    for n in (2, 3, 5):
        for _ in range(20):
            pt = exp_skew(SkewParams(rng.standard_normal(n * (n - 1) // 2), n))
            assert np.max(np.abs(pt.O.T @ pt.O - np.eye(n))) < 1e-12
            assert abs(np.linalg.det(pt.O) - 1.0) < 1e-10


def test_params_validation():
    with pytest.raises(ValidationError):
        SkewParams(np.zeros(2), 3)  # needs 3 entries
    with pytest.raises(ValidationError):
        SkewParams(np.array([np.nan]), 2)


def test_log_identity():
    params = log_rotation(np.eye(5))
    assert np.allclose(params.theta, 0.0)


def test_log_n2_closed_form():
    pt = exp_skew(SkewParams(np.array([0.3]), 2))
    back = log_rotation(pt.O)
    assert abs(back.theta[0] - 0.3) < 1e-12


def test_log_exp_roundtrip_n4():
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(100):
        O = random_rotation(4, rng).O
        back = exp_skew(log_rotation(O)).O
        worst = max(worst, np.max(np.abs(back - O)))
    assert worst < 1e-8


def test_log_branch_cut_and_validation():
    half_turn = np.diag([-1.0, -1.0, 1.0])
    with pytest.raises(BranchCutError):
        log_rotation(half_turn)
    with pytest.raises(ValidationError):
        log_rotation(np.diag([1.0, 1.0, -1.0]))  # det -1
    with pytest.raises(ValidationError):
        log_rotation(np.array([[1.0, 0.5], [0.0, 1.0]]))  # not orthogonal
    # rotation block at angle pi, embedded off-axis
    theta = np.pi
    R = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    O = np.eye(4)
    O[1:3, 1:3] = R
    with pytest.raises(BranchCutError):
        log_rotation(O)


def test_random_rotation_determinism_and_norms():
    a = random_rotation(5, 99).O
    b = random_rotation(5, 99).O
    assert np.array_equal(a, b)
    assert np.max(np.abs(np.linalg.norm(a, axis=0) - 1.0)) < 1e-12
    assert abs(np.linalg.det(a) - 1.0) < 1e-8


def test_random_rotation_first_column_centered():
    rng = np.random.default_rng(2024)
    n, draws = 3, 10_000
    acc = np.zeros(n)
    for _ in range(draws):
        acc += random_rotation(n, rng).O[:, 0]
    mean = acc / draws
    assert np.all(np.abs(mean) < 3.0 / np.sqrt(draws))


def test_rotation_point_consistency():
    pt = random_rotation(4, 5)
    rebuilt = exp_skew(pt.params).O
    assert np.max(np.abs(rebuilt - pt.O)) < 1e-10


@pytest.mark.parametrize("n", [2, 3, 5])
def test_rotation_aligning(n):
    rng = np.random.default_rng(n)
    for _ in range(10):
        v = rng.standard_normal(n)
        O = rotation_aligning(v)
        assert np.allclose(O[:, 0], v / np.linalg.norm(v), atol=1e-12)
        assert np.max(np.abs(O.T @ O - np.eye(n))) < 1e-12
        assert abs(np.linalg.det(O) - 1.0) < 1e-10
    # antipodal direction still returns a rotation
    O = rotation_aligning(-np.eye(n)[:, 0])
    assert np.allclose(O[:, 0], -np.eye(n)[:, 0], atol=1e-12)
    assert abs(np.linalg.det(O) - 1.0) < 1e-10


def test_directional_derivative_matches_finite_differences():
    # gradient of g' O(theta) e1 via the kernel vs central differences
    rng = np.random.default_rng(8)
    for n in (2, 3, 5):
        m = n * (n - 1) // 2
        g = rng.standard_normal(n)
        theta = rng.standard_normal(m)
        _, dO = rotation_and_dexp(theta, n)
        grad = np.array([g @ dO[k][:, 0] for k in range(m)])
        eps = 1e-6
        for k in range(m):
            tp, tm = theta.copy(), theta.copy()
            tp[k] += eps
            tm[k] -= eps
            fd = (g @ rotation_from_params(tp, n)[:, 0]
                  - g @ rotation_from_params(tm, n)[:, 0]) / (2 * eps)
            denom = max(1.0, abs(fd))
            assert abs(fd - grad[k]) / denom < 1e-5
