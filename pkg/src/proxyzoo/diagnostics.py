"""Sensitivity diagnostics: breakdown values, zoo information, LOPO, and the
pairwise correlation-significance map.

A breakdown value is the weakest quality assumption under which a substantive
claim holds on the whole identified set.  Claims are evaluated on interval
endpoints only, which is valid because every supported claim kind is monotone
in the response over an interval; the quality grid is scanned in ascending
order (the claim is monotone in tau) with optional bisection refinement
between the bracketing grid points.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.stats

from .bounds import IdentifiedSetGrid, SolverConfig, sweep
from .exceptions import ValidationError
from .io import ProxySeries, _date_keys
from .reduced_form import ReducedForm

__all__ = [
    "ClaimTarget",
    "Claim",
    "BreakdownResult",
    "InfoReport",
    "LopoReport",
    "CorrelationMap",
    "breakdown_value",
    "zoo_information",
    "lopo",
    "correlation_map",
]

CLAIM_KINDS = ("sign_positive", "sign_negative", "joint_sign", "magnitude")
BASELINE_WIDTH_TOL = 1e-12
LOPO_CLAMP = 0.02


@dataclass(frozen=True)
class ClaimTarget:
    """One restricted response: direction +1 means theta >= threshold on the
    listed horizons, direction -1 means theta <= -threshold."""

    variable: int
    horizons: tuple
    direction: int = 1
    threshold: float = 0.0


@dataclass(frozen=True)
class Claim:
    kind: str
    targets: tuple
    name: str = ""

    def __post_init__(self):
        if self.kind not in CLAIM_KINDS:
            raise ValidationError(f"unknown claim kind {self.kind!r}")
        if not self.targets:
            raise ValidationError("claim needs at least one target")
        for t in self.targets:
            if t.direction not in (-1, 1):
                raise ValidationError("target direction must be +1 or -1")
            if not np.isfinite(t.threshold):
                raise ValidationError("magnitude threshold must be finite")

    @classmethod
    def from_config(cls, cfg: dict, resolve_variable=None) -> "Claim":
        resolve = resolve_variable if resolve_variable is not None else int
        targets = []
        for entry in cfg.get("targets", []):
            hz = entry.get("horizons", entry.get("horizon", 0))
            horizons = (hz,) if isinstance(hz, int) else tuple(range(int(hz[0]), int(hz[1]) + 1))
            direction = 1 if str(entry.get("sign", ">=0")).strip() in (">=0", "+", "pos", "1") else -1
            targets.append(
                ClaimTarget(
                    variable=resolve(entry["variable"]),
                    horizons=horizons,
                    direction=direction,
                    threshold=float(entry.get("threshold", 0.0)),
                )
            )
        return cls(kind=cfg.get("kind", "joint_sign"), targets=tuple(targets),
                   name=str(cfg.get("name", "")))

    def holds_on(self, cell) -> tuple[bool, bool]:
        """(holds, any_vacuous) given cell(variable, horizon) -> (lo, up, empty)."""
        vacuous = False
        for t in self.targets:
            for h in t.horizons:
                lo, up, empty = cell(t.variable, h)
                if empty:
                    vacuous = True  # empty set: vacuously satisfied, flagged
                    continue
                if t.direction > 0 and not lo >= t.threshold:
                    return False, vacuous
                if t.direction < 0 and not up <= -t.threshold:
                    return False, vacuous
        return True, vacuous


@dataclass(frozen=True)
class BreakdownResult:
    claim: Claim
    tau_star: float | None  # None when not supported at the grid maximum
    supported: bool
    grid_evaluations: tuple  # (tau, holds) pairs actually solved
    vacuous: bool = False
    refined: bool = False

    @property
    def not_supported(self) -> bool:
        return not self.supported


def _claim_cells(claim: Claim):
    variables = sorted({t.variable for t in claim.targets})
    horizons = sorted({h for t in claim.targets for h in t.horizons})
    return variables, horizons


def _holds_at(claim: Claim, rf, sign_constraints, tau: float, variables, horizons,
              cfg: SolverConfig) -> tuple[bool, bool]:
    grid = sweep(rf, sign_constraints, [tau], variables=variables, horizons=horizons,
                 solver_cfg=cfg)

    def cell(v, h):
        vi = grid.variables.index(v)
        hi = grid.horizons.index(h)
        return grid.lower[vi, hi, 0], grid.upper[vi, hi, 0], bool(grid.empty[vi, hi, 0])

    return claim.holds_on(cell)


def breakdown_value(claim: Claim, rf: ReducedForm, spec, tau_grid,
                    solver_cfg: SolverConfig | None = None,
                    refine: bool = True, resolution: float = 0.01) -> BreakdownResult:
    """Smallest grid tau at which the claim holds on the solved bounds.

    Ascending scan with early exit; when the claim first holds strictly
    inside the grid, bisection between the bracketing grid points refines
    tau* to ``resolution``.  NOT_SUPPORTED (tau_star None) when the claim
    still fails at the grid maximum.
    """
    from .restrictions import SignRestrictionSpec, compile_sign

    cfg = solver_cfg or SolverConfig()
    tau_grid = [float(t) for t in tau_grid]
    if any(b <= a for a, b in zip(tau_grid, tau_grid[1:])):
        raise ValidationError("tau grid must be strictly ascending")
    sign_constraints = compile_sign(spec, rf) if isinstance(spec, SignRestrictionSpec) else list(spec)
    variables, horizons = _claim_cells(claim)

    evaluations = []
    vacuous_any = False
    hold_idx = None
    for i, tau in enumerate(tau_grid):
        holds, vac = _holds_at(claim, rf, sign_constraints, tau, variables, horizons, cfg)
        vacuous_any |= vac
        evaluations.append((tau, holds))
        if holds:
            hold_idx = i
            break
    if hold_idx is None:
        return BreakdownResult(claim, None, False, tuple(evaluations), vacuous_any)

    tau_star = tau_grid[hold_idx]
    refined = False
    if refine and hold_idx > 0:
        lo, hi = tau_grid[hold_idx - 1], tau_grid[hold_idx]
        while hi - lo > resolution:
            mid = 0.5 * (lo + hi)
            holds, vac = _holds_at(claim, rf, sign_constraints, mid, variables, horizons, cfg)
            vacuous_any |= vac
            evaluations.append((mid, holds))
            if holds:
                hi = mid
            else:
                lo = mid
            refined = True
        tau_star = hi
    return BreakdownResult(claim, tau_star, True, tuple(evaluations), vacuous_any, refined)


@dataclass(frozen=True)
class InfoReport:
    """Width reduction of the identified set relative to the sign-only set."""

    kappa_full: float
    kappa_cells: np.ndarray  # (n_var, n_h); NaN on excluded cells
    tau_used: float
    excluded_cells: int  # zero-width sign-only baseline, left out of the mean
    empty_cells: int  # empty full-zoo cells, counted as width zero
    variables: tuple = ()
    horizons: tuple = ()


def zoo_information(full_grid: IdentifiedSetGrid, sign_only_grid: IdentifiedSetGrid,
                    tau: float) -> InfoReport:
    """kappa_{i,h} = 1 - width_full / width_sign, averaged over usable cells."""
    if full_grid.variables != sign_only_grid.variables or full_grid.horizons != sign_only_grid.horizons:
        raise ValidationError("grids must be solved on identical (variable, horizon) cells")
    ti = full_grid.tau_grid.index(tau)
    w_full = full_grid.width()[:, :, ti]
    w_sign = sign_only_grid.width()[:, :, 0]

    usable = w_sign > BASELINE_WIDTH_TOL
    if not usable.any():
        raise ValidationError("degenerate baseline: all sign-only widths are zero")
    kappa_cells = np.full(w_full.shape, np.nan)
    kappa_cells[usable] = 1.0 - w_full[usable] / w_sign[usable]
    return InfoReport(
        kappa_full=float(np.nanmean(kappa_cells)),
        kappa_cells=kappa_cells,
        tau_used=float(tau),
        excluded_cells=int((~usable).sum()),
        empty_cells=int(full_grid.empty[:, :, ti].sum()),
        variables=full_grid.variables,
        horizons=full_grid.horizons,
    )


@dataclass(frozen=True)
class LopoReport:
    labels: tuple
    kappa_full: float
    kappa_without: tuple
    deltas_raw: tuple
    deltas: tuple  # small negatives (>= -0.02) clamped to 0
    caveat: tuple  # True where the raw delta was negative (local-optimum artifact)
    tau_used: float


def lopo(rf: ReducedForm, spec, tau: float, variables=None, horizons=None,
         solver_cfg: SolverConfig | None = None, labels=None) -> LopoReport:
    """Leave-one-proxy-out information deltas at quality tau."""
    if rf.k < 2:
        raise ValidationError("LOPO needs at least two proxies")
    cfg = solver_cfg or SolverConfig()
    labels = tuple(labels) if labels else tuple(f"m{i + 1}" for i in range(rf.k))
    if len(labels) != rf.k:
        raise ValidationError("one label per proxy required")

    sign_rf = replace(rf, M=())
    sign_grid = sweep(sign_rf, spec, [0.0], variables=variables, horizons=horizons, solver_cfg=cfg)
    full_grid = sweep(rf, spec, [tau], variables=variables, horizons=horizons, solver_cfg=cfg)
    kappa_full = zoo_information(full_grid, sign_grid, tau).kappa_full

    kappa_without = []
    for ell in range(rf.k):
        M_minus = tuple(m for j, m in enumerate(rf.M) if j != ell)
        grid = sweep(replace(rf, M=M_minus), spec, [tau], variables=variables,
                     horizons=horizons, solver_cfg=cfg)
        kappa_without.append(zoo_information(grid, sign_grid, tau).kappa_full)

    deltas_raw = tuple(kappa_full - kw for kw in kappa_without)
    deltas = tuple(0.0 if -LOPO_CLAMP <= d < 0.0 else d for d in deltas_raw)
    caveat = tuple(d < 0.0 for d in deltas_raw)
    return LopoReport(
        labels=labels,
        kappa_full=kappa_full,
        kappa_without=tuple(kappa_without),
        deltas_raw=deltas_raw,
        deltas=deltas,
        caveat=caveat,
        tau_used=float(tau),
    )


@dataclass(frozen=True)
class CorrelationMap:
    labels_a: tuple
    labels_b: tuple
    corr: np.ndarray
    p_value: np.ndarray
    n_obs: np.ndarray
    na: np.ndarray  # insufficient overlap

    @staticmethod
    def bucket(p: float) -> int:
        """Significance shading: 3 for p<=0.01, 2 for p<=0.05, 1 for p<=0.10."""
        if np.isnan(p):
            return -1
        if p <= 0.01:
            return 3
        if p <= 0.05:
            return 2
        if p <= 0.10:
            return 1
        return 0

    def to_rows(self):
        rows = []
        for i, la in enumerate(self.labels_a):
            for j, lb in enumerate(self.labels_b):
                rows.append({
                    "proxy_a": la,
                    "proxy_b": lb,
                    "corr": self.corr[i, j],
                    "p_value": self.p_value[i, j],
                    "n_obs": int(self.n_obs[i, j]),
                    "bucket": self.bucket(self.p_value[i, j]),
                })
        return rows


def correlation_map(proxies_a, proxies_b=None, overlap_rule: str = "both-nonmissing",
                    min_overlap: int = 10) -> CorrelationMap:
    """Pairwise Pearson correlations with two-sided t-test p-values.

    Pairs are formed on dates where both series record an observation; cells
    with fewer than ``min_overlap`` such dates are marked NA.
    """
    if overlap_rule != "both-nonmissing":
        raise ValidationError(f"unknown overlap rule {overlap_rule!r}")
    symmetric = proxies_b is None
    proxies_b = proxies_a if symmetric else proxies_b

    def keyed(series: ProxySeries) -> dict:
        keys = _date_keys(series.dates)
        return {k: v for k, v in zip(keys.tolist(), series.values) if np.isfinite(v)}

    maps_a = [keyed(s) for s in proxies_a]
    maps_b = maps_a if symmetric else [keyed(s) for s in proxies_b]

    na_, nb_ = len(maps_a), len(maps_b)
    corr = np.full((na_, nb_), np.nan)
    pval = np.full((na_, nb_), np.nan)
    nobs = np.zeros((na_, nb_), dtype=int)
    na_mask = np.zeros((na_, nb_), dtype=bool)
    for i, da in enumerate(maps_a):
        for j, db in enumerate(maps_b):
            common = [k for k in da if k in db]
            nobs[i, j] = len(common)
            if len(common) < min_overlap:
                na_mask[i, j] = True
                continue
            x = np.array([da[k] for k in common])
            y = np.array([db[k] for k in common])
            sx, sy = x.std(), y.std()
            if sx == 0 or sy == 0:
                na_mask[i, j] = True
                continue
            r = float(np.corrcoef(x, y)[0, 1])
            r = max(min(r, 1.0), -1.0)
            dof = len(common) - 2
            if abs(r) >= 1.0:
                p = 0.0
            else:
                t = r * np.sqrt(dof / (1.0 - r * r))
                p = float(2.0 * scipy.stats.t.sf(abs(t), dof))
            corr[i, j] = r
            pval[i, j] = p
    return CorrelationMap(
        labels_a=tuple(s.label for s in proxies_a),
        labels_b=tuple(s.label for s in proxies_b),
        corr=corr,
        p_value=pval,
        n_obs=nobs,
        na=na_mask,
    )
