"""Compilation of sign, narrative, and generalized ranking restrictions.

All restrictions reduce to linear forms in the columns of the rotation
matrix.  A constraint is stored as a coefficient matrix W with the reading
``sum(W * O) >= 0`` (or ``= 0`` for the exact-exogeneity equalities), which
lets the solver evaluate a whole stack with one matrix product.

Ranking constraints with quality ``tau`` pair the split half-spaces
``M'O_1 >= +tau * M'O_j`` and ``M'O_1 >= -tau * M'O_j``; each pair is scaled
by ``1 / max(1, tau)`` so that constraint gradients stay O(1) even for the
near-valid-IV regime of very large tau.  Scaling by a positive constant
leaves the feasible set unchanged.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .exceptions import ValidationError
from .reduced_form import ReducedForm

__all__ = [
    "IrfRestriction",
    "NarrativeRestriction",
    "SignRestrictionSpec",
    "LinearColumnConstraint",
    "GrrConstraintSet",
    "ConstraintSystem",
    "compile_sign",
    "compile_grr",
    "check_feasibility",
    "grr_holds_direct",
]

logger = logging.getLogger(__name__)

ZERO_VECTOR_TOL = 1e-14
ORTHO_CHECK_TOL = 1e-8


@dataclass(frozen=True)
class IrfRestriction:
    """Response of `variable` to shock `shock` at `horizon` has sign `direction`.

    Indices are 0-based; direction +1 means non-negative, -1 non-positive.
    """

    variable: int
    shock: int
    horizon: int
    direction: int = 1


@dataclass(frozen=True)
class NarrativeRestriction:
    """Structural shock `shock` at a given date has sign `direction`.

    ``date`` is a date key matched against the residual sample, or an int
    residual-row index.
    """

    shock: int
    date: object
    direction: int = 1


@dataclass(frozen=True)
class SignRestrictionSpec:
    irf: tuple = ()
    narrative: tuple = ()
    self_sign: bool = True

    @classmethod
    def from_config(cls, cfg: dict, resolve_variable=None) -> "SignRestrictionSpec":
        """Build from a config mapping (1-based shock indices, named variables)."""
        resolve = resolve_variable if resolve_variable is not None else int

        def sign_of(s) -> int:
            s = str(s).strip()
            if s in (">=0", "+", "pos", "positive", "1"):
                return 1
            if s in ("<=0", "-", "neg", "negative", "-1"):
                return -1
            raise ValidationError(f"unknown sign {s!r} (use '>=0' or '<=0')")

        irf = []
        for entry in cfg.get("irf", []) or []:
            hz = entry.get("horizons", entry.get("horizon", 0))
            lo, hi = (hz, hz) if isinstance(hz, int) else (int(hz[0]), int(hz[1]))
            for h in range(lo, hi + 1):
                irf.append(
                    IrfRestriction(
                        variable=resolve(entry["variable"]),
                        shock=int(entry.get("shock", 1)) - 1,
                        horizon=h,
                        direction=sign_of(entry.get("sign", ">=0")),
                    )
                )
        narrative = [
            NarrativeRestriction(
                shock=int(entry.get("shock", 1)) - 1,
                date=entry["date"],
                direction=sign_of(entry.get("sign", ">=0")),
            )
            for entry in cfg.get("narrative", []) or []
        ]
        return cls(
            irf=tuple(irf),
            narrative=tuple(narrative),
            self_sign=bool(cfg.get("self_sign", True)),
        )


@dataclass(frozen=True)
class LinearColumnConstraint:
    """r' O[:, column] >= 0."""

    column: int
    r: np.ndarray
    label: str = ""

    def as_matrix(self, n: int) -> np.ndarray:
        W = np.zeros((n, n))
        W[:, self.column] = self.r
        return W

    def value(self, O: np.ndarray) -> float:
        return float(self.r @ O[:, self.column])


def compile_sign(spec: SignRestrictionSpec, rf: ReducedForm) -> list:
    """Compile a sign/narrative specification against a reduced form.

    Self-sign normalization contributes one constraint per column
    (r_i = L' e_i on column i); IRF entries use r = (C_h L)' e_i with the
    sign folded into r; narrative entries use r = L^{-1} u_{t0}.  Zero
    vectors are dropped with a logged warning.
    """
    n = rf.n
    out: list[LinearColumnConstraint] = []
    if spec.self_sign:
        for i in range(n):
            out.append(
                LinearColumnConstraint(column=i, r=rf.L[i, :].copy(), label=f"self_sign[{i}]")
            )
    for e in spec.irf:
        if not (0 <= e.variable < n and 0 <= e.shock < n):
            raise ValidationError(f"restriction indices out of range: {e}")
        if not (0 <= e.horizon <= rf.horizon):
            raise ValidationError(
                f"restricted horizon {e.horizon} exceeds available horizon {rf.horizon}"
            )
        if e.direction not in (-1, 1):
            raise ValidationError("direction must be +1 or -1")
        r = e.direction * (rf.C[e.horizon] @ rf.L)[e.variable, :]
        out.append(
            LinearColumnConstraint(
                column=e.shock,
                r=np.ascontiguousarray(r),
                label=f"irf[v={e.variable},j={e.shock},h={e.horizon},{'+' if e.direction > 0 else '-'}]",
            )
        )
    for e in spec.narrative:
        if not 0 <= e.shock < n:
            raise ValidationError(f"narrative shock index out of range: {e}")
        if isinstance(e.date, (int, np.integer)):
            row = int(e.date)
            if not 0 <= row < rf.U.shape[0]:
                raise ValidationError(f"narrative date (row {row}) outside sample")
        else:
            try:
                row = rf.dates.index(str(e.date))
            except ValueError:
                raise ValidationError(f"narrative date {e.date!r} outside sample") from None
        u = scipy.linalg.solve_triangular(rf.L, rf.U[row], lower=True)
        out.append(
            LinearColumnConstraint(
                column=e.shock,
                r=e.direction * u,
                label=f"narrative[j={e.shock},t={e.date}]",
            )
        )

    kept = []
    for c in out:
        if np.linalg.norm(c.r) <= ZERO_VECTOR_TOL:
            logger.warning("dropping zero-vector sign constraint %s", c.label)
            continue
        kept.append(c)
    return kept


@dataclass(frozen=True)
class GrrConstraintSet:
    """Ranking restrictions at quality tau, compiled to linear constraints.

    Finite tau > 0 yields 2 * k * (n - 1) half-spaces; tau = 0 degenerates
    to the single relevance constraint M' O_1 >= 0 per proxy; tau = inf is
    the exact-exogeneity path: equalities M' O_j = 0 (j >= 2) plus
    M' O_1 >= 0.
    """

    tau: float
    M: tuple
    n: int
    ineq_W: np.ndarray = field(init=False, repr=False)
    ineq_labels: tuple = field(init=False, repr=False)
    eq_W: np.ndarray = field(init=False, repr=False)
    eq_labels: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.tau < 0:
            raise ValidationError("proxy quality tau must be non-negative")
        M = tuple(np.ascontiguousarray(m, dtype=float) for m in self.M)
        n = self.n
        for ell, m in enumerate(M):
            if m.shape != (n,):
                raise ValidationError(f"moment vector {ell} has wrong shape {m.shape}")
            if np.linalg.norm(m) <= ZERO_VECTOR_TOL:
                raise ValidationError(f"moment vector {ell} is zero")
        object.__setattr__(self, "M", M)

        ineq, ineq_labels, eq, eq_labels = [], [], [], []
        if math.isinf(self.tau):
            for ell, m in enumerate(M):
                W = np.zeros((n, n))
                W[:, 0] = m
                ineq.append(W)
                ineq_labels.append(f"grr[l={ell},relevance]")
                for j in range(1, n):
                    Wj = np.zeros((n, n))
                    Wj[:, j] = m
                    eq.append(Wj)
                    eq_labels.append(f"grr[l={ell},j={j},exact]")
        elif self.tau == 0.0:
            for ell, m in enumerate(M):
                W = np.zeros((n, n))
                W[:, 0] = m
                ineq.append(W)
                ineq_labels.append(f"grr[l={ell},relevance]")
        else:
            scale = max(1.0, self.tau)
            for ell, m in enumerate(M):
                for j in range(1, n):
                    for s in (1.0, -1.0):
                        W = np.zeros((n, n))
                        W[:, 0] = m / scale
                        W[:, j] = -s * self.tau * m / scale
                        ineq.append(W)
                        eq_sign = "+" if s > 0 else "-"
                        ineq_labels.append(f"grr[l={ell},j={j},{eq_sign}]")
        object.__setattr__(self, "ineq_W", np.array(ineq) if ineq else np.zeros((0, n, n)))
        object.__setattr__(self, "ineq_labels", tuple(ineq_labels))
        object.__setattr__(self, "eq_W", np.array(eq) if eq else np.zeros((0, n, n)))
        object.__setattr__(self, "eq_labels", tuple(eq_labels))

    @property
    def k(self) -> int:
        return len(self.M)


def compile_grr(M, tau: float, n: int) -> GrrConstraintSet:
    """Ranking restrictions for proxy moment vectors at common quality tau."""
    return GrrConstraintSet(tau=float(tau), M=tuple(M), n=n)


def grr_holds_direct(O: np.ndarray, M, tau: float, slack: float = 0.0) -> bool:
    """Evaluate M'O_1 >= tau |M'O_j| directly; independent of the split path."""
    if math.isinf(tau):
        raise ValidationError("direct evaluation is for finite tau")
    for m in M:
        v = np.asarray(m) @ O
        if tau == 0.0:
            if v[0] < -slack:
                return False
        elif np.any(v[0] - tau * np.abs(v[1:]) < -slack):
            return False
    return True


class ConstraintSystem:
    """Stacked constraint matrices for fast evaluation inside the solver."""

    def __init__(self, sign_constraints=(), grr: GrrConstraintSet | None = None, n: int | None = None):
        if n is None:
            if grr is not None:
                n = grr.n
            elif sign_constraints:
                n = sign_constraints[0].r.shape[0]
            else:
                raise ValidationError("cannot infer dimension for an empty system")
        self.n = n
        ineq = [c.as_matrix(n) for c in sign_constraints]
        labels = [c.label for c in sign_constraints]
        eq: list[np.ndarray] = []
        eq_labels: list[str] = []
        if grr is not None:
            ineq.extend(grr.ineq_W)
            labels.extend(grr.ineq_labels)
            eq.extend(grr.eq_W)
            eq_labels.extend(grr.eq_labels)
        self.ineq_flat = (
            np.ascontiguousarray(np.array(ineq).reshape(len(ineq), n * n))
            if ineq
            else np.zeros((0, n * n))
        )
        self.eq_flat = (
            np.ascontiguousarray(np.array(eq).reshape(len(eq), n * n))
            if eq
            else np.zeros((0, n * n))
        )
        self.ineq_labels = tuple(labels)
        self.eq_labels = tuple(eq_labels)

    @property
    def n_ineq(self) -> int:
        return self.ineq_flat.shape[0]

    @property
    def n_eq(self) -> int:
        return self.eq_flat.shape[0]

    def ineq_values(self, O: np.ndarray) -> np.ndarray:
        return self.ineq_flat @ O.ravel()

    def eq_values(self, O: np.ndarray) -> np.ndarray:
        return self.eq_flat @ O.ravel()

    def max_violation(self, O: np.ndarray) -> float:
        worst = 0.0
        if self.n_ineq:
            worst = max(worst, float(np.max(-self.ineq_values(O), initial=0.0)))
        if self.n_eq:
            worst = max(worst, float(np.max(np.abs(self.eq_values(O)), initial=0.0)))
        return worst

    def is_feasible(self, O: np.ndarray, slack: float) -> bool:
        return self.max_violation(O) <= slack

    def column_vectors(self, column: int) -> np.ndarray:
        """Rows of ineq constraints touching only `column` (for the q-problem)."""
        out = []
        for row in self.ineq_flat:
            W = row.reshape(self.n, self.n)
            mask = np.linalg.norm(W, axis=0) > 0
            if mask.sum() == 1 and mask[column]:
                out.append(W[:, column])
        return np.array(out) if out else np.zeros((0, self.n))


def check_feasibility(O: np.ndarray, sign_constraints=(), grr: GrrConstraintSet | None = None,
                      slack: float = 1e-6) -> tuple[bool, float]:
    """Feasibility flag and the largest positive violation at O.

    O must be orthogonal to 1e-8.  Violations are measured on the compiled
    constraints (ranking pairs carry their 1/max(1, tau) scale).
    """
    O = np.asarray(O, dtype=float)
    n = O.shape[0]
    if np.max(np.abs(O.T @ O - np.eye(n))) > ORTHO_CHECK_TOL:
        raise ValidationError("rotation is not orthogonal to 1e-8")
    system = ConstraintSystem(sign_constraints, grr, n=n)
    worst = system.max_violation(O)
    return worst <= slack, worst
