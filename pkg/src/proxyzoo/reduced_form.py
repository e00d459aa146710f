"""Reduced-form VAR estimation and the consistently estimable ingredients.

Everything downstream (restrictions, bounds, quality diagnostics) consumes a
:class:`ReducedForm`: OLS coefficients, residual covariance and its Cholesky
factor, reduced-form impulse responses, and the proxy moment vectors.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .exceptions import ValidationError
from .io import Panel, ProxySeries

__all__ = [
    "VarSpec",
    "ReducedForm",
    "estimate_var",
    "cholesky_factor",
    "reduced_irfs",
    "proxy_moments",
    "companion_matrix",
]

SIGMA_FACTOR_TOL = 1e-10


@dataclass(frozen=True)
class VarSpec:
    """Estimation settings: lag order, intercept flag, IRF horizon."""

    lag_order: int
    include_constant: bool = True
    horizon: int = 24

    def __post_init__(self):
        if self.lag_order < 1:
            raise ValidationError("lag order must be >= 1")
        if self.horizon < 0:
            raise ValidationError("horizon must be >= 0")


@dataclass(frozen=True)
class ReducedForm:
    """Estimated reduced form: the identification-relevant parameter bundle."""

    A: tuple  # p coefficient matrices, each n x n
    intercept: np.ndarray
    U: np.ndarray  # (T - p) x n residuals
    Sigma: np.ndarray
    L: np.ndarray  # lower-triangular Cholesky factor, positive diagonal
    C: tuple  # H + 1 reduced-form IRF matrices, C[0] = I
    M: tuple = ()  # proxy moment vectors
    stable: bool = True
    names: tuple = ()
    dates: tuple = ()  # residual-sample dates, length T - p

    @property
    def n(self) -> int:
        return self.Sigma.shape[0]

    @property
    def p(self) -> int:
        return len(self.A)

    @property
    def k(self) -> int:
        return len(self.M)

    @property
    def horizon(self) -> int:
        return len(self.C) - 1

    def irf_vector(self, variable: int, h: int) -> np.ndarray:
        """Row of C_h L selecting (variable, h): theta = irf_vector @ O[:, 0]."""
        return np.ascontiguousarray((self.C[h] @ self.L)[variable, :])

    def with_proxy_moments(self, proxies, missing_policy: str = "zero") -> "ReducedForm":
        M = proxy_moments(self.U, self.L, proxies, missing_policy)
        return replace(self, M=tuple(M))

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "k": self.k,
            "horizon": self.horizon,
            "A": [a.tolist() for a in self.A],
            "intercept": self.intercept.tolist(),
            "U": self.U.tolist(),
            "Sigma": self.Sigma.tolist(),
            "L": self.L.tolist(),
            "C": [c.tolist() for c in self.C],
            "M": [m.tolist() for m in self.M],
            "stable": bool(self.stable),
            "names": list(self.names),
            "dates": list(self.dates),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ReducedForm":
        return cls(
            A=tuple(np.array(a) for a in d["A"]),
            intercept=np.array(d["intercept"]),
            U=np.array(d["U"]),
            Sigma=np.array(d["Sigma"]),
            L=np.array(d["L"]),
            C=tuple(np.array(c) for c in d["C"]),
            M=tuple(np.array(m) for m in d["M"]),
            stable=bool(d["stable"]),
            names=tuple(d.get("names", ())),
            dates=tuple(d.get("dates", ())),
        )


def companion_matrix(A) -> np.ndarray:
    A = [np.asarray(a, dtype=float) for a in A]
    n = A[0].shape[0]
    p = len(A)
    comp = np.zeros((n * p, n * p))
    comp[:n, :] = np.hstack(A)
    if p > 1:
        comp[n:, :-n] = np.eye(n * (p - 1))
    return comp


def cholesky_factor(Sigma: np.ndarray) -> np.ndarray:
    """Lower-triangular Cholesky factor with positive diagonal."""
    Sigma = np.asarray(Sigma, dtype=float)
    if Sigma.ndim != 2 or Sigma.shape[0] != Sigma.shape[1]:
        raise ValidationError("covariance must be square")
    if np.max(np.abs(Sigma - Sigma.T)) > 1e-10 * max(1.0, np.max(np.abs(Sigma))):
        raise ValidationError("covariance must be symmetric")
    try:
        return np.linalg.cholesky(Sigma)
    except np.linalg.LinAlgError:
        smallest = float(np.linalg.eigvalsh(Sigma)[0])
        raise ValidationError(
            f"covariance is not positive definite (smallest eigenvalue {smallest:.3e})"
        ) from None


def reduced_irfs(A, H: int) -> list:
    """C_0 = I and C_h = sum_{l=1}^{h} C_{h-l} A_l, with A_l = 0 past lag p."""
    A = [np.asarray(a, dtype=float) for a in A]
    n = A[0].shape[0]
    p = len(A)
    C = [np.eye(n)]
    for h in range(1, H + 1):
        acc = np.zeros((n, n))
        for ell in range(1, min(h, p) + 1):
            acc += C[h - ell] @ A[ell - 1]
        C.append(acc)
    return C


def estimate_var(panel, spec: VarSpec) -> ReducedForm:
    """OLS estimation of the VAR and assembly of the reduced form (without M).

    ``panel`` may be a :class:`Panel` or a plain T x n array.  The covariance
    uses the 1/(T-p) divisor.  Instability triggers a warning, not an error;
    a non-positive-definite residual covariance is an error.
    """
    if isinstance(panel, Panel):
        Y_full = panel.values
        names = panel.names
        dates = panel.dates
    else:
        Y_full = np.asarray(panel, dtype=float)
        if Y_full.ndim != 2:
            raise ValidationError("panel values must be a T x n matrix")
        names = tuple(f"y{j + 1}" for j in range(Y_full.shape[1]))
        dates = tuple(str(t) for t in range(Y_full.shape[0]))

    T, n = Y_full.shape
    p = spec.lag_order
    n_reg = n * p + (1 if spec.include_constant else 0)
    if T - p <= n * p + 1:
        raise ValidationError(
            f"insufficient sample: T - p = {T - p} must exceed n*p + 1 = {n * p + 1}"
        )

    Y = Y_full[p:]
    blocks = [Y_full[p - ell:T - ell] for ell in range(1, p + 1)]
    X = np.hstack(blocks)
    if spec.include_constant:
        X = np.hstack([np.ones((T - p, 1)), X])

    s = np.linalg.svd(X, compute_uv=False)
    if s[-1] <= max(X.shape) * np.finfo(float).eps * s[0]:
        raise ValidationError("collinear regressors in the VAR design matrix")

    B, *_ = np.linalg.lstsq(X, Y, rcond=None)
    U = Y - X @ B

    off = 1 if spec.include_constant else 0
    intercept = B[0] if spec.include_constant else np.zeros(n)
    A = tuple(B[off + ell * n: off + (ell + 1) * n, :].T for ell in range(p))

    Sigma = (U.T @ U) / (T - p)
    L = cholesky_factor(Sigma)
    if np.max(np.abs(Sigma - L @ L.T)) >= SIGMA_FACTOR_TOL:
        raise ValidationError("Cholesky reconstruction exceeds tolerance")

    eigs = np.linalg.eigvals(companion_matrix(A))
    stable = bool(np.max(np.abs(eigs)) < 1.0)
    if not stable:
        warnings.warn(
            "estimated VAR is unstable (companion eigenvalue on or outside the "
            "unit circle); impulse responses may diverge",
            RuntimeWarning,
            stacklevel=2,
        )

    return ReducedForm(
        A=A,
        intercept=np.asarray(intercept, dtype=float),
        U=U,
        Sigma=Sigma,
        L=L,
        C=tuple(reduced_irfs(A, spec.horizon)),
        stable=stable,
        names=names,
        dates=tuple(dates[p:]),
    )


def proxy_moments(U, L, proxies, missing_policy: str = "zero") -> list:
    """Sample proxy moment vectors M_l = mean of L^{-1} u_t m_{l,t}.

    Each proxy is demeaned on the residual window (mean of non-missing
    entries).  Under ``zero`` the divisor is the full residual count; under
    ``drop-report`` it is the non-missing count and missing dates are skipped.
    """
    U = np.asarray(U, dtype=float)
    L = np.asarray(L, dtype=float)
    Tu = U.shape[0]
    out = []
    for series in proxies:
        values = series.values if isinstance(series, ProxySeries) else np.asarray(series, dtype=float)
        label = series.label if isinstance(series, ProxySeries) else "proxy"
        if values.shape[0] < Tu:
            raise ValidationError(
                f"proxy {label!r} shorter than the residual sample "
                f"({values.shape[0]} < {Tu})"
            )
        window = values[values.shape[0] - Tu:]
        observed = ~np.isnan(window)
        if not observed.any():
            raise ValidationError(f"proxy {label!r} has no usable observations")
        if missing_policy == "zero":
            T_eff = Tu
        elif missing_policy == "drop-report":
            T_eff = int(observed.sum())
        else:
            raise ValidationError(f"unknown missing policy {missing_policy!r}")
        m = np.where(observed, window - window[observed].mean(), 0.0)
        if not np.any(m != 0.0):
            raise ValidationError(f"degenerate proxy {label!r}: all values equal")
        raw = U.T @ m / T_eff
        out.append(scipy.linalg.solve_triangular(L, raw, lower=True))
    return out
