"""Parameterization and navigation of the rotation group SO(n).

Rotations are represented by the strictly-lower-triangular entries of a
skew-symmetric matrix S (row-major ordering) together with the exponentiated
matrix O = exp(S).  The logarithm (principal branch) seeds warm starts; Haar
draws seed the multi-start optimizers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._kernels import backend_name, rotation_and_dexp, rotation_from_params
from ._kernels_np import lower_pairs, n_params, skew_matrix
from .exceptions import BranchCutError, ValidationError

__all__ = [
    "SkewParams",
    "RotationPoint",
    "exp_skew",
    "log_rotation",
    "random_rotation",
    "rotation_aligning",
    "rotation_and_dexp",
    "rotation_from_params",
    "backend_name",
]

ORTHO_TOL = 1e-10
DET_TOL = 1e-8
# Rotation angles this close to pi have no usable principal logarithm.
_BRANCH_TOL = 1e-8


@dataclass(frozen=True)
class SkewParams:
    """Free coordinates of a rotation: strict lower triangle of S, row-major."""

    theta: np.ndarray
    n: int

    def __post_init__(self):
        theta = np.ascontiguousarray(self.theta, dtype=float)
        if theta.ndim != 1 or theta.shape[0] != n_params(self.n):
            raise ValidationError(
                f"expected {n_params(self.n)} parameters for n={self.n}, "
                f"got shape {theta.shape}"
            )
        if not np.all(np.isfinite(theta)):
            raise ValidationError("skew parameters must be finite")
        object.__setattr__(self, "theta", theta)

    @classmethod
    def zero(cls, n: int) -> "SkewParams":
        return cls(np.zeros(n_params(n)), n)

    def matrix(self) -> np.ndarray:
        return skew_matrix(self.theta, self.n)


@dataclass(frozen=True)
class RotationPoint:
    """A point on SO(n): skew coordinates plus the cached matrix exp(S)."""

    params: SkewParams
    O: np.ndarray

    @property
    def n(self) -> int:
        return self.params.n


def exp_skew(params: SkewParams) -> RotationPoint:
    """Exponentiate skew coordinates to a rotation matrix.

    Uses the scaling-and-squaring Pade exponential; the result satisfies
    ``‖O'O - I‖_max < 1e-10`` and ``det(O) = +1``.
    """
    O = scipy.linalg.expm(params.matrix())
    return RotationPoint(params, np.ascontiguousarray(O))


def log_rotation(O: np.ndarray) -> SkewParams:
    """Principal logarithm of a rotation, as skew coordinates.

    Runs a real Schur decomposition and reads the rotation angle off each
    2x2 block; orthogonality of O makes the Schur form block-diagonal.

    Raises
    ------
    ValidationError
        if O is not orthogonal with det +1.
    BranchCutError
        if some rotation angle is at pi (eigenvalue -1), where the
        principal logarithm is undefined; callers fall back to the
        identity start.
    """
    O = np.asarray(O, dtype=float)
    n = O.shape[0]
    if O.shape != (n, n):
        raise ValidationError("rotation must be square")
    if np.max(np.abs(O.T @ O - np.eye(n))) > 1e-8:
        raise ValidationError("matrix is not orthogonal (tolerance 1e-8)")
    if np.linalg.det(O) < 0:
        raise ValidationError("rotation must have det +1")

    T, Z = scipy.linalg.schur(O, output="real")
    B = np.zeros((n, n))
    i = 0
    while i < n:
        if i + 1 < n and abs(T[i + 1, i]) > 1e-12:
            ang = np.arctan2(T[i + 1, i], T[i, i])
            if abs(ang) >= np.pi - _BRANCH_TOL:
                raise BranchCutError("logarithm branch cut: rotation angle at pi")
            B[i, i + 1] = -ang
            B[i + 1, i] = ang
            i += 2
        else:
            if T[i, i] < 0:
                raise BranchCutError("logarithm branch cut: eigenvalue -1")
            i += 1
    S = Z @ B @ Z.T
    S = 0.5 * (S - S.T)
    rows, cols = lower_pairs(n)
    return SkewParams(S[rows, cols], n)


def random_rotation(n: int, seed) -> RotationPoint:
    """Haar-uniform draw from SO(n).

    QR of a Gaussian matrix with the R-diagonal sign correction, then a
    column flip to det +1.  ``seed`` may be an int or a Generator.
    """
    if n < 2:
        raise ValidationError("need n >= 2")
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    for _ in range(16):
        A = rng.standard_normal((n, n))
        Q, R = np.linalg.qr(A)
        d = np.sign(np.diag(R))
        d[d == 0] = 1.0
        Q = Q * d
        if np.linalg.det(Q) < 0:
            Q[:, -1] = -Q[:, -1]
        try:
            params = log_rotation(Q)
        except BranchCutError:
            continue  # measure-zero redraw
        return RotationPoint(params, np.ascontiguousarray(Q))
    raise BranchCutError("could not draw a rotation away from the branch cut")


def rotation_aligning(v: np.ndarray) -> np.ndarray:
    """Rotation in the plane span(e1, v) mapping e1 to v/‖v‖.

    Used to seed solver starts whose first column points at a given
    direction.  Falls back to a two-coordinate half-turn when v is close
    to -e1 (where the planar construction degenerates).
    """
    v = np.asarray(v, dtype=float)
    n = v.shape[0]
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ValidationError("cannot align with the zero vector")
    vhat = v / nv
    c = vhat[0]
    u = vhat.copy()
    u[0] -= 1.0  # u = vhat - e1, spans the rotation plane with e1
    s = np.linalg.norm(vhat - c * np.eye(n)[:, 0])
    if s < 1e-12:
        if c > 0:
            return np.eye(n)
        O = np.eye(n)
        O[0, 0] = -1.0
        O[1, 1] = -1.0
        return O
    uhat = (vhat - c * np.eye(n)[:, 0]) / s
    e1 = np.eye(n)[:, 0]
    O = (
        np.eye(n)
        + (c - 1.0) * (np.outer(e1, e1) + np.outer(uhat, uhat))
        + s * (np.outer(uhat, e1) - np.outer(e1, uhat))
    )
    return O
