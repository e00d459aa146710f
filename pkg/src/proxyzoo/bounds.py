"""Identified-set bounds by constrained optimization on the rotation manifold.

Each bound is an extremum of the linear form g' O[:, 0] over rotations
satisfying the compiled sign and ranking constraints.  The orthogonality
constraint is absorbed by the skew-symmetric exponential parameterization, so
the solver (SLSQP) sees a smooth unconstrained manifold plus smooth linear
forms of O.  Gradients are analytic, via the spectral derivative of the
matrix exponential supplied by the kernel backend.

Bounds are inner approximations: every reported endpoint is attained by a
stored feasible rotation.  A cell is EMPTY only when no start produces a
point within the feasibility tolerance; the smallest violation over starts is
kept as the infeasibility certificate.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ._kernels import rotation_and_dexp, rotation_from_params
from ._kernels_np import n_params
from .exceptions import BranchCutError, ValidationError
from .reduced_form import ReducedForm
from .restrictions import (
    ConstraintSystem,
    GrrConstraintSet,
    SignRestrictionSpec,
    compile_grr,
    compile_sign,
)
from .rotation import RotationPoint, SkewParams, log_rotation, random_rotation, rotation_aligning

__all__ = [
    "SolverConfig",
    "BoundProblem",
    "BoundResult",
    "IdentifiedSetGrid",
    "solve_bound",
    "sweep",
    "CircleOracle",
    "default_starts",
]

WIDTH_FLAG_TOL = 1e-6


@dataclass(frozen=True)
class SolverConfig:
    """Contract for the local NLP solves behind every bound."""

    restarts: int = 20
    seed: int = 0
    feas_tol: float = 1e-6
    ftol: float = 1e-8
    maxiter: int = 2000
    aligned_starts: bool = True
    polish_infeasible: bool = True
    jobs: int = 1


@dataclass(frozen=True)
class BoundProblem:
    rf: ReducedForm
    sign_constraints: tuple
    grr: GrrConstraintSet | None
    target: tuple  # (variable index, horizon)
    direction: str  # "min" | "max"

    def __post_init__(self):
        i, h = self.target
        if not 0 <= i < self.rf.n:
            raise ValidationError(f"variable index {i} out of range")
        if not 0 <= h <= self.rf.horizon:
            raise ValidationError(f"horizon {h} exceeds available horizon {self.rf.horizon}")
        if self.direction not in ("min", "max"):
            raise ValidationError("direction must be 'min' or 'max'")


@dataclass(frozen=True)
class BoundResult:
    value: float
    rotation: RotationPoint | None
    empty: bool
    violation: float  # at the argmin, or the infeasibility certificate
    n_starts: int
    n_feasible_starts: int
    iterations: int


class _ManifoldProgram:
    """Cached objective/constraint callbacks over the skew parameterization.

    One spectral kernel call per distinct point; the derivative tensor is
    computed lazily so pure line-search evaluations stay cheap.
    """

    def __init__(self, n: int, g: np.ndarray, system: ConstraintSystem, sense: float):
        self.n = n
        self.m = n_params(n)
        G = np.zeros((n, n))
        G[:, 0] = g
        self.gflat = G.ravel()
        self.system = system
        self.sense = sense
        self._key = None
        self._O = None
        self._key_jac = None
        self._dO = None

    def _value_point(self, x: np.ndarray) -> np.ndarray:
        key = x.tobytes()
        if key != self._key:
            self._O = rotation_from_params(np.ascontiguousarray(x), self.n)
            self._key = key
        return self._O

    def _jac_point(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        key = x.tobytes()
        if key != self._key_jac:
            O, dO = rotation_and_dexp(np.ascontiguousarray(x), self.n)
            self._O, self._key = O, key
            self._dO = dO.reshape(self.m, self.n * self.n)
            self._key_jac = key
        return self._O, self._dO

    def fun(self, x):
        return self.sense * float(self.gflat @ self._value_point(x).ravel())

    def jac(self, x):
        _, dO = self._jac_point(x)
        return self.sense * (dO @ self.gflat)

    def ineq_fun(self, x):
        return self.system.ineq_flat @ self._value_point(x).ravel()

    def ineq_jac(self, x):
        _, dO = self._jac_point(x)
        return self.system.ineq_flat @ dO.T

    def eq_fun(self, x):
        return self.system.eq_flat @ self._value_point(x).ravel()

    def eq_jac(self, x):
        _, dO = self._jac_point(x)
        return self.system.eq_flat @ dO.T

    def constraints(self):
        cons = []
        if self.system.n_ineq:
            cons.append({"type": "ineq", "fun": self.ineq_fun, "jac": self.ineq_jac})
        if self.system.n_eq:
            cons.append({"type": "eq", "fun": self.eq_fun, "jac": self.eq_jac})
        return cons

    def restore_feasibility(self, x0: np.ndarray, maxiter: int = 150) -> np.ndarray:
        """Drive the squared constraint violation down from an infeasible point."""

        def penalty(x):
            O, dO = self._jac_point(x)
            grad = np.zeros(self.m)
            val = 0.0
            if self.system.n_ineq:
                c = self.system.ineq_flat @ O.ravel()
                neg = np.minimum(c, 0.0)
                val += float(neg @ neg)
                grad += 2.0 * ((self.system.ineq_flat @ dO.T).T @ neg)
            if self.system.n_eq:
                e = self.system.eq_flat @ O.ravel()
                val += float(e @ e)
                grad += 2.0 * ((self.system.eq_flat @ dO.T).T @ e)
            return val, grad

        res = minimize(penalty, x0, jac=True, method="L-BFGS-B", options={"maxiter": maxiter})
        return res.x


def default_starts(n: int, cfg: SolverConfig, rng, warm=None, M=(), extra=()):
    """Start list: warm start, identity, moment-aligned rotations, Haar draws."""
    starts: list[np.ndarray] = []
    if warm is not None:
        starts.append(np.asarray(warm, dtype=float))
    starts.extend(np.asarray(t, dtype=float) for t in extra)
    starts.append(np.zeros(n_params(n)))
    if cfg.aligned_starts and len(M):
        directions = [np.asarray(m, float) / np.linalg.norm(m) for m in M]
        mean = np.sum(directions, axis=0)
        candidates = []
        if np.linalg.norm(mean) > 1e-12:
            candidates.append(mean / np.linalg.norm(mean))
        if len(directions) <= 2:
            candidates.extend(directions)
        for v in candidates:
            try:
                starts.append(log_rotation(rotation_aligning(v)).theta)
            except BranchCutError:
                continue
    for _ in range(cfg.restarts):
        starts.append(random_rotation(n, rng).params.theta)
    return starts


def _solve_cell(n, g, system, sense, starts, cfg):
    """Best feasible extremum of sense * g'O[:,0] over the start list."""
    prog = _ManifoldProgram(n, g, system, sense)
    cons = prog.constraints()
    options = {"maxiter": cfg.maxiter, "ftol": cfg.ftol}
    best_x = None
    best_val = np.inf
    best_viol_at_best = np.inf
    min_viol = np.inf
    n_feasible = 0
    total_iter = 0
    for x0 in starts:
        res = minimize(prog.fun, x0, jac=prog.jac, constraints=cons,
                       method="SLSQP", options=options)
        total_iter += int(res.get("nit", 0))
        x = res.x
        viol = system.max_violation(prog._value_point(x))
        if viol > cfg.feas_tol and cfg.polish_infeasible:
            x = prog.restore_feasibility(x)
            res = minimize(prog.fun, x, jac=prog.jac, constraints=cons,
                           method="SLSQP", options=options)
            total_iter += int(res.get("nit", 0))
            x = res.x
            viol = system.max_violation(prog._value_point(x))
        min_viol = min(min_viol, viol)
        if viol <= cfg.feas_tol:
            n_feasible += 1
            val = prog.fun(x)
            if val < best_val:
                best_val, best_x, best_viol_at_best = val, x.copy(), viol
    if best_x is None:
        return {
            "empty": True, "value": np.nan, "theta": None,
            "violation": min_viol, "n_feasible": 0,
            "n_starts": len(starts), "iterations": total_iter,
        }
    return {
        "empty": False, "value": sense * best_val, "theta": best_x,
        "violation": best_viol_at_best, "n_feasible": n_feasible,
        "n_starts": len(starts), "iterations": total_iter,
    }


def solve_bound(problem: BoundProblem, init, solver_cfg: SolverConfig | None = None) -> BoundResult:
    """Solve one bound problem from the given initial points.

    ``init`` is a list of :class:`SkewParams` (or raw theta vectors); the
    result is EMPTY when no start reaches feasibility, never a silent number.
    """
    cfg = solver_cfg or SolverConfig()
    if not init:
        raise ValidationError("need at least one initial point")
    rf = problem.rf
    system = ConstraintSystem(problem.sign_constraints, problem.grr, n=rf.n)
    g = rf.irf_vector(*problem.target)
    sense = 1.0 if problem.direction == "min" else -1.0
    starts = [p.theta if isinstance(p, SkewParams) else np.asarray(p, float) for p in init]
    out = _solve_cell(rf.n, g, system, sense, starts, cfg)
    rotation = None
    if not out["empty"]:
        params = SkewParams(out["theta"], rf.n)
        rotation = RotationPoint(params, rotation_from_params(params.theta, rf.n))
    return BoundResult(
        value=float(out["value"]),
        rotation=rotation,
        empty=bool(out["empty"]),
        violation=float(out["violation"]),
        n_starts=out["n_starts"],
        n_feasible_starts=out["n_feasible"],
        iterations=out["iterations"],
    )


@dataclass
class IdentifiedSetGrid:
    """Per (variable, horizon, tau) interval bounds with solver metadata."""

    tau_grid: tuple
    variables: tuple
    horizons: tuple
    names: tuple
    lower: np.ndarray  # (n_var, n_h, n_tau); NaN on empty cells
    upper: np.ndarray
    empty: np.ndarray
    violation: np.ndarray
    width_flag: np.ndarray  # width increased vs previous tau: local-optimum indicator
    argmin: np.ndarray  # object array of SkewParams, (n_var, n_h, n_tau, 2)
    solver_stats: dict = field(default_factory=dict)

    def width(self) -> np.ndarray:
        w = self.upper - self.lower
        w[self.empty] = 0.0
        return w

    def cell(self, variable: int, horizon: int, tau: float):
        vi = self.variables.index(variable)
        hi = self.horizons.index(horizon)
        ti = self.tau_grid.index(tau)
        return self.lower[vi, hi, ti], self.upper[vi, hi, ti], bool(self.empty[vi, hi, ti])

    def to_rows(self):
        rows = []
        for vi, v in enumerate(self.variables):
            name = self.names[v] if self.names else str(v)
            for hi, h in enumerate(self.horizons):
                for ti, tau in enumerate(self.tau_grid):
                    rows.append({
                        "variable": name,
                        "horizon": h,
                        "tau": tau,
                        "lower": self.lower[vi, hi, ti],
                        "upper": self.upper[vi, hi, ti],
                        "empty_flag": int(self.empty[vi, hi, ti]),
                        "violation": self.violation[vi, hi, ti],
                        "width_flag": int(self.width_flag[vi, hi, ti]),
                    })
        return rows

    def summary_dict(self) -> dict:
        return {
            "tau_grid": list(self.tau_grid),
            "variables": [self.names[v] if self.names else str(v) for v in self.variables],
            "horizons": list(self.horizons),
            "n_empty_cells": int(self.empty.sum()),
            "n_width_flags": int(self.width_flag.sum()),
            "solver_stats": self.solver_stats,
        }


def sweep(rf: ReducedForm, spec, tau_grid, variables=None, horizons=None,
          solver_cfg: SolverConfig | None = None) -> IdentifiedSetGrid:
    """Lower/upper identified-set bounds over a tau grid.

    ``spec`` is a :class:`SignRestrictionSpec` (compiled here) or an already
    compiled list of sign constraints.  Horizons within a (variable, tau,
    direction) chain are solved sequentially with warm starts; cells across
    chains are independent and are distributed over ``solver_cfg.jobs``
    workers.  Raw bounds are reported together with a flag on any cell whose
    width increased relative to the previous tau (a local-optimum indicator;
    widths should shrink as tau grows).
    """
    cfg = solver_cfg or SolverConfig()
    n = rf.n
    tau_grid = [float(t) for t in tau_grid]
    if any(t < 0 for t in tau_grid):
        raise ValidationError("tau grid must be non-negative")
    if any(b <= a for a, b in zip(tau_grid, tau_grid[1:])):
        raise ValidationError("tau grid must be strictly ascending")
    if variables is None:
        variables = list(range(n))
    variables = [rf.names.index(v) if isinstance(v, str) else int(v) for v in variables]
    if horizons is None:
        horizons = list(range(rf.horizon + 1))
    horizons = sorted(int(h) for h in horizons)
    if horizons and horizons[-1] > rf.horizon:
        raise ValidationError("requested horizon exceeds the reduced form's horizon")

    sign_constraints = compile_sign(spec, rf) if isinstance(spec, SignRestrictionSpec) else list(spec)
    systems = [ConstraintSystem(sign_constraints, compile_grr(rf.M, t, n) if rf.M else None, n=n)
               for t in tau_grid]
    g_list = [[rf.irf_vector(v, h) for h in horizons] for v in variables]
    moments = [np.asarray(m, float) for m in rf.M]

    chains = []
    for vi, _v in enumerate(variables):
        for ti, _t in enumerate(tau_grid):
            for si, sense in enumerate((1.0, -1.0)):
                seed_key = [int(cfg.seed), vi, ti, si]
                chains.append((vi, ti, si, (n, g_list[vi], systems[ti], sense, seed_key, cfg, moments)))

    t0 = time.perf_counter()
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            chain_results = list(pool.map(_chain_worker, [c[3] for c in chains]))
    else:
        chain_results = [_chain_worker(c[3]) for c in chains]
    wall = time.perf_counter() - t0

    nv, nh, nt = len(variables), len(horizons), len(tau_grid)
    lower = np.full((nv, nh, nt), np.nan)
    upper = np.full((nv, nh, nt), np.nan)
    empty = np.zeros((nv, nh, nt), dtype=bool)
    violation = np.zeros((nv, nh, nt))
    argmin = np.empty((nv, nh, nt, 2), dtype=object)
    stats = {"iterations": 0, "starts": 0, "max_violation": 0.0, "wall_seconds": wall}

    for (vi, ti, si, _), results in zip(chains, chain_results):
        for hi, out in enumerate(results):
            stats["iterations"] += out["iterations"]
            stats["starts"] += out["n_starts"]
            if out["empty"]:
                empty[vi, hi, ti] = True
                violation[vi, hi, ti] = max(violation[vi, hi, ti], out["violation"])
            else:
                stats["max_violation"] = max(stats["max_violation"], out["violation"])
                violation[vi, hi, ti] = max(violation[vi, hi, ti], out["violation"])
                theta = SkewParams(out["theta"], n)
                if si == 0:
                    lower[vi, hi, ti] = out["value"]
                    argmin[vi, hi, ti, 0] = theta
                else:
                    upper[vi, hi, ti] = out["value"]
                    argmin[vi, hi, ti, 1] = theta

    # A cell where only one direction failed is still unusable: mark empty.
    half = np.isnan(lower) ^ np.isnan(upper)
    empty |= np.isnan(lower) | np.isnan(upper)
    stats["n_half_empty"] = int(half.sum())

    width_flag = np.zeros((nv, nh, nt), dtype=bool)
    w = upper - lower
    w[empty] = 0.0
    for ti in range(1, nt):
        width_flag[:, :, ti] = w[:, :, ti] > w[:, :, ti - 1] + WIDTH_FLAG_TOL

    return IdentifiedSetGrid(
        tau_grid=tuple(tau_grid),
        variables=tuple(variables),
        horizons=tuple(horizons),
        names=tuple(rf.names),
        lower=lower,
        upper=upper,
        empty=empty,
        violation=violation,
        width_flag=width_flag,
        argmin=argmin,
        solver_stats=stats,
    )


def _chain_worker(payload):
    (n, g_list, system, sense, seed_key, cfg, moments) = payload
    rng = np.random.default_rng(np.random.SeedSequence(seed_key))
    warm = None
    results = []
    for g in g_list:
        starts = default_starts(n, cfg, rng, warm=warm, M=moments)
        out = _solve_cell(n, g, system, sense, starts, cfg)
        if not out["empty"]:
            warm = out["theta"]
        results.append(out)
    return results


class CircleOracle:
    """Brute-force n=2 oracle: a dense angle grid on SO(2).

    Evaluates the raw restriction definitions (no constraint splitting or
    scaling) and extremizes g' O[:, 0] over the feasible angles.
    """

    def __init__(self, sign_constraints, M, tau: float, n_points: int = 100_000):
        phi = np.linspace(-np.pi, np.pi, n_points, endpoint=False)
        c, s = np.cos(phi), np.sin(phi)
        # O = [[c, -s], [s, c]]: columns O1 = (c, s), O2 = (-s, c)
        feasible = np.ones(n_points, dtype=bool)
        for con in sign_constraints:
            if con.column == 0:
                vals = con.r[0] * c + con.r[1] * s
            else:
                vals = -con.r[0] * s + con.r[1] * c
            feasible &= vals >= 0.0
        for m in M:
            v1 = m[0] * c + m[1] * s
            v2 = -m[0] * s + m[1] * c
            if tau == 0.0:
                feasible &= v1 >= 0.0
            else:
                feasible &= v1 - tau * np.abs(v2) >= 0.0
        self.c, self.s = c, s
        self.feasible = feasible
        self.n_feasible = int(feasible.sum())

    def bounds(self, g) -> tuple[float, float]:
        if self.n_feasible == 0:
            return np.nan, np.nan
        vals = g[0] * self.c[self.feasible] + g[1] * self.s[self.feasible]
        return float(vals.min()), float(vals.max())
