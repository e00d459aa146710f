"""Partial identification of the proxy-quality parameter.

The data-implied upper bound on quality comes from a max-min problem on the
unit sphere: maximize (over sign-feasible directions q) the smallest cosine
between q and the normalized proxy moment vectors.  The cotangent transform
mapping that cosine to the quality bound is applied only after the solve; the
optimization itself uses the bounded cosine epigraph, which keeps every
constraint smooth with O(1) gradients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .exceptions import InfeasibleRegionError, ValidationError

__all__ = [
    "TauBoundResult",
    "rho",
    "tau_bar",
    "solve_cstar",
    "construct_point_id_zoo",
    "cstar_grid_oracle",
]

# c* within this distance of 1 means no finite quality bound.
_CSTAR_ONE_TOL = 1e-9


def rho(tau: float, n: int) -> float:
    """Angular cap radius arctan(sqrt(n-1)/tau); pi/2 at tau=0, 0 at tau=inf."""
    if n < 2:
        raise ValidationError("need n >= 2")
    if tau < 0:
        raise ValidationError("tau must be non-negative")
    if tau == 0:
        return math.pi / 2
    if math.isinf(tau):
        return 0.0
    return math.atan(math.sqrt(n - 1) / tau)


def tau_bar(c_star: float, n: int) -> float:
    """Quality bound sqrt(n-1) * c / sqrt(1 - c^2); infinite at c = 1."""
    if not 0.0 <= c_star <= 1.0 + _CSTAR_ONE_TOL:
        raise ValidationError(f"c_star {c_star} outside [0, 1]")
    c = min(c_star, 1.0)
    if c >= 1.0 - _CSTAR_ONE_TOL:
        return math.inf
    return math.sqrt(n - 1) * c / math.sqrt(1.0 - c * c)


@dataclass(frozen=True)
class TauBoundResult:
    c_star: float  # clipped to [0, 1]
    tau_bar: float  # inf when c_star = 1 within tolerance
    arg_q: np.ndarray
    c_star_raw: float
    angles: tuple  # angle between each moment vector and arg_q
    oracle_gap: float | None = None


def _sign_vectors(sign_constraints, n: int) -> np.ndarray:
    """Unit-normalized direction constraints on the target column q."""
    rows = []
    for con in sign_constraints:
        if getattr(con, "column", 0) != 0:
            continue  # constraints on other columns do not restrict q directly
        r = np.asarray(con.r, dtype=float)
        nr = np.linalg.norm(r)
        if nr > 0:
            rows.append(r / nr)
    return np.array(rows) if rows else np.zeros((0, n))


def solve_cstar(M, sign_constraints=(), solver_cfg=None, starts=None) -> TauBoundResult:
    """Maximize the worst-case cosine between q and the proxy moments.

    Epigraph form: max t subject to t <= M_l'q/|M_l| for every proxy, the
    column-1 sign constraints g_r(q) >= 0, and |q| = 1.  The unit norm is
    maintained by optimizing a free vector and renormalizing inside the
    objective and constraints.  Multi-start includes each normalized moment
    direction and Haar-uniform unit vectors.
    """
    from .bounds import SolverConfig  # local import to avoid a cycle

    cfg = solver_cfg or SolverConfig()
    M = [np.asarray(m, dtype=float) for m in M]
    if not M:
        raise ValidationError("need at least one proxy moment vector")
    n = M[0].shape[0]
    for ell, m in enumerate(M):
        if np.linalg.norm(m) <= 0:
            raise ValidationError(f"moment vector {ell} is zero")
    Mhat = np.array([m / np.linalg.norm(m) for m in M])
    V = _sign_vectors(sign_constraints, n)
    k, R = Mhat.shape[0], V.shape[0]
    A = np.vstack([Mhat, V]) if R else Mhat

    def split(x):
        y, t = x[:n], x[n]
        ny = np.linalg.norm(y)
        return y, t, ny, y / ny

    def cons_fun(x):
        y, t, ny, q = split(x)
        vals = A @ q
        out = np.empty(k + R + 1)
        out[:k] = vals[:k] - t
        out[k:k + R] = vals[k:]
        out[-1] = y @ y - 0.25
        return out

    def cons_jac(x):
        y, t, ny, q = split(x)
        vals = A @ q
        Jq = (A - np.outer(vals, q)) / ny
        J = np.zeros((k + R + 1, n + 1))
        J[:k + R, :n] = Jq
        J[:k, n] = -1.0
        J[-1, :n] = 2.0 * y
        return J

    grad = np.zeros(n + 1)
    grad[n] = -1.0

    if starts is None:
        rng = np.random.default_rng(cfg.seed)
        starts = [m for m in Mhat]
        mean = Mhat.sum(axis=0)
        if np.linalg.norm(mean) > 1e-12:
            starts.append(mean / np.linalg.norm(mean))
        for _ in range(cfg.restarts):
            v = rng.standard_normal(n)
            starts.append(v / np.linalg.norm(v))

    best = None
    best_c = -np.inf
    for q0 in starts:
        q0 = np.asarray(q0, dtype=float)
        q0 = q0 / np.linalg.norm(q0)
        x0 = np.concatenate([q0, [float((Mhat @ q0).min())]])
        res = minimize(
            lambda x: -x[n], x0, jac=lambda x: grad,
            constraints=[{"type": "ineq", "fun": cons_fun, "jac": cons_jac}],
            method="SLSQP", options={"maxiter": cfg.maxiter, "ftol": cfg.ftol},
        )
        y, t, ny, q = split(res.x)
        if R and float(np.min(V @ q)) < -cfg.feas_tol:
            continue
        c_here = float((Mhat @ q).min())
        if c_here > best_c:
            best_c, best = c_here, q.copy()
    if best is None:
        raise InfeasibleRegionError("empty sign-feasible sphere region")

    c_raw = best_c
    if c_raw > 1.0 + _CSTAR_ONE_TOL:
        raise ValidationError(f"cosine {c_raw} exceeds 1 beyond tolerance")
    c_clipped = float(min(max(c_raw, 0.0), 1.0))
    angles = tuple(float(np.arccos(np.clip(m @ best, -1.0, 1.0))) for m in Mhat)
    return TauBoundResult(
        c_star=c_clipped,
        tau_bar=tau_bar(c_clipped, n),
        arg_q=best,
        c_star_raw=c_raw,
        angles=angles,
    )


def construct_point_id_zoo(O0, tau0: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Two unit moment vectors whose caps at quality tau0 touch in one point.

    M1 and M2 sit symmetrically at angular distance rho(tau0) from the target
    column O0[:, 0], tilted along the equal-weight combination of the
    remaining columns; feeding them to a sweep at tau = tau0 pins the target
    column to O0[:, 0] exactly.
    """
    if tau0 < 1:
        raise ValidationError("point-identifying construction needs tau0 >= 1")
    O = O0.O if hasattr(O0, "O") else np.asarray(O0, dtype=float)
    if O.shape != (n, n):
        raise ValidationError(f"rotation must be {n} x {n}")
    r = rho(tau0, n)
    spread = O[:, 1:].sum(axis=1) * (math.sin(r) / math.sqrt(n - 1))
    M1 = math.cos(r) * O[:, 0] + spread
    M2 = math.cos(r) * O[:, 0] - spread
    return M1, M2


def _fibonacci_sphere(n_points: int) -> np.ndarray:
    i = np.arange(n_points) + 0.5
    z = 1.0 - 2.0 * i / n_points
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    th = math.pi * (3.0 - math.sqrt(5.0)) * i
    return np.column_stack([r * np.cos(th), r * np.sin(th), z])


def cstar_grid_oracle(M, sign_constraints=(), n_points: int = 100_000,
                      refine_rounds: int = 4) -> tuple[float, np.ndarray]:
    """Derivative-free max-min oracle on a dense sphere grid (n = 2 or 3).

    A global quasi-uniform scan followed by shrinking local grids around the
    incumbent; resolution after refinement is far below 1e-3 in the cosine.
    """
    M = [np.asarray(m, dtype=float) for m in M]
    n = M[0].shape[0]
    Mhat = np.array([m / np.linalg.norm(m) for m in M])
    V = _sign_vectors(sign_constraints, n)

    def best_on(pts):
        if V.shape[0]:
            mask = np.all(pts @ V.T >= -1e-12, axis=1)
            pts = pts[mask]
        if pts.shape[0] == 0:
            return None
        c = (pts @ Mhat.T).min(axis=1)
        i = int(np.argmax(c))
        return float(c[i]), pts[i]

    if n == 2:
        phi = np.linspace(-math.pi, math.pi, n_points, endpoint=False)
        pts = np.column_stack([np.cos(phi), np.sin(phi)])
        spacing = 2 * math.pi / n_points
    elif n == 3:
        pts = _fibonacci_sphere(n_points)
        spacing = math.sqrt(4 * math.pi / n_points)
    else:
        raise ValidationError("grid oracle is implemented for n in {2, 3}")

    incumbent = best_on(pts)
    if incumbent is None:
        raise InfeasibleRegionError("empty sign-feasible sphere region")
    radius = 3.0 * spacing
    side = 101
    for _ in range(refine_rounds):
        c0, q0 = incumbent
        basis = [v for v in np.linalg.svd(np.atleast_2d(q0))[2][1:]]
        offs = np.linspace(-radius, radius, side)
        if n == 2:
            local = np.outer(np.cos(offs), q0) + np.outer(np.sin(offs), basis[0])
        else:
            aa, bb = np.meshgrid(offs, offs)
            local = (q0[None, :]
                     + aa.ravel()[:, None] * basis[0][None, :]
                     + bb.ravel()[:, None] * basis[1][None, :])
            local /= np.linalg.norm(local, axis=1, keepdims=True)
        cand = best_on(np.vstack([local, q0[None, :]]))
        if cand is not None and cand[0] >= incumbent[0]:
            incumbent = cand
        radius = max(4.0 * (2.0 * radius / side), 1e-9)
    return incumbent
