"""Synthetic SVAR data with controlled proxy contamination.

Proxies are built directly from the structural shocks plus independent noise,
which gives exact control of the population correlations and hence of the
true quality ratio of each proxy.  The generator returns the ground truth
(impact matrix, target-shock impulse responses, per-proxy quality, the
rotation linking the population Cholesky factor to the impact matrix) for
oracle-based testing of the identification pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError
from .io import Panel, ProxySeries
from .reduced_form import ReducedForm, companion_matrix, reduced_irfs
from .restrictions import ConstraintSystem

__all__ = [
    "ProxyPlan",
    "DgpSpec",
    "SimTruth",
    "simulate",
    "sample_admissible_rotations",
    "median_b_proxy",
]


@dataclass(frozen=True)
class ProxyPlan:
    """Population correlations of one proxy with the structural shocks.

    ``target_corr`` is the correlation with shock 1; ``contamination`` lists
    the correlations with shocks 2..n.  The correlation vector must have norm
    below 1 so a noise component exists; ``noise_var`` only scales the proxy.
    """

    target_corr: float
    contamination: tuple
    noise_var: float = 1.0

    def corr_vector(self, n: int) -> np.ndarray:
        r = np.array([self.target_corr, *self.contamination], dtype=float)
        if r.shape[0] != n:
            raise ValidationError(
                f"plan has {r.shape[0] - 1} contamination entries; need n-1 = {n - 1}"
            )
        if np.linalg.norm(r) >= 1.0:
            raise ValidationError("correlation vector must have norm < 1")
        if self.noise_var <= 0:
            raise ValidationError("noise variance must be positive")
        return r

    def tau0(self) -> float:
        """min over contaminated shocks of target/|contamination|; inf if clean."""
        r1 = self.target_corr
        ratios = [abs(r1) / abs(c) for c in self.contamination if c != 0.0]
        return min(ratios) if ratios else np.inf


@dataclass(frozen=True)
class DgpSpec:
    n: int
    p: int
    T: int
    seed: int
    A: tuple
    B0: np.ndarray
    proxy_plans: tuple = ()
    burn_in: int = 200

    def __post_init__(self):
        A = tuple(np.ascontiguousarray(a, dtype=float) for a in self.A)
        B0 = np.ascontiguousarray(self.B0, dtype=float)
        if len(A) != self.p or any(a.shape != (self.n, self.n) for a in A):
            raise ValidationError("A must hold p matrices of shape n x n")
        if B0.shape != (self.n, self.n):
            raise ValidationError("B0 must be n x n")
        if abs(np.linalg.det(B0)) < 1e-12:
            raise ValidationError("B0 must be invertible")
        eigs = np.linalg.eigvals(companion_matrix(A))
        if np.max(np.abs(eigs)) >= 1.0:
            raise ValidationError("unstable coefficient matrices")
        for plan in self.proxy_plans:
            plan.corr_vector(self.n)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B0", B0)
        object.__setattr__(self, "proxy_plans", tuple(self.proxy_plans))


@dataclass(frozen=True)
class SimTruth:
    """Ground truth of a simulation run."""

    B0: np.ndarray  # impact matrix, columns sign-normalized (positive diagonal)
    O0: np.ndarray  # rotation with B0 = L0 @ O0, L0 the population Cholesky factor
    L0: np.ndarray
    A: tuple
    tau0: tuple  # true quality per proxy
    shocks: np.ndarray  # structural shocks, aligned to the panel rows
    proxy_corr: tuple = field(default=())  # planned corr vectors

    def irf(self, H: int) -> np.ndarray:
        """True responses of every variable to shock 1, shape (n, H+1)."""
        C = reduced_irfs(self.A, H)
        return np.column_stack([(C[h] @ self.B0)[:, 0] for h in range(H + 1)])


def simulate(spec: DgpSpec) -> tuple[Panel, list, SimTruth]:
    """Draw a panel and proxy series from the spec; returns ground truth too.

    Shocks are iid standard normal; the recursion is warmed up with a
    burn-in.  Impact-matrix columns are sign-normalized to a positive
    diagonal first so the self-sign normalization holds at the truth.
    """
    rng = np.random.default_rng(spec.seed)
    n, p, T = spec.n, spec.p, spec.T

    signs = np.sign(np.diag(spec.B0))
    signs[signs == 0] = 1.0
    B0 = spec.B0 * signs[None, :]

    total = T + spec.burn_in
    eps = rng.standard_normal((total, n))
    U = eps @ B0.T
    Y = np.zeros((total, n))
    for t in range(total):
        acc = U[t].copy()
        for ell in range(1, p + 1):
            if t - ell >= 0:
                acc += spec.A[ell - 1] @ Y[t - ell]
        Y[t] = acc
    Y = Y[spec.burn_in:]
    eps_used = eps[spec.burn_in:]

    dates = tuple(f"t{i + 1:05d}" for i in range(T))
    panel = Panel(dates=dates, values=Y, names=tuple(f"y{j + 1}" for j in range(n)))

    proxies = []
    corrs = []
    for ell, plan in enumerate(spec.proxy_plans):
        r = plan.corr_vector(n)
        scale = np.sqrt(plan.noise_var / (1.0 - r @ r))
        noise = rng.standard_normal(T) * np.sqrt(plan.noise_var)
        values = eps_used @ (r * scale) + noise
        proxies.append(ProxySeries(dates=dates, values=values, label=f"m{ell + 1}"))
        corrs.append(r)

    Sigma0 = B0 @ B0.T
    L0 = np.linalg.cholesky(Sigma0)
    O0 = np.linalg.solve(L0, B0)
    truth = SimTruth(
        B0=B0,
        O0=O0,
        L0=L0,
        A=spec.A,
        tau0=tuple(plan.tau0() for plan in spec.proxy_plans),
        shocks=eps_used,
        proxy_corr=tuple(corrs),
    )
    return panel, proxies, truth


def sample_admissible_rotations(system: ConstraintSystem, n: int, count: int = 100,
                                seed: int = 0, max_tries: int = 500_000) -> list:
    """Accept/reject Haar draws against a compiled constraint system."""
    rng = np.random.default_rng(seed)
    out = []
    tries = 0
    while len(out) < count and tries < max_tries:
        tries += 1
        A = rng.standard_normal((n, n))
        Q, R = np.linalg.qr(A)
        d = np.sign(np.diag(R))
        d[d == 0] = 1.0
        Q = Q * d
        if np.linalg.det(Q) < 0:
            Q[:, -1] = -Q[:, -1]
        if system.max_violation(Q) <= 0.0:
            out.append(Q)
    if len(out) < count:
        raise ValidationError(
            f"sign restrictions too tight for sampling: {len(out)} admissible "
            f"draws in {max_tries} tries"
        )
    return out


def median_b_proxy(admissible_draws, rf: ReducedForm, variant: str = "median") -> ProxySeries:
    """Proxy built from the shock series of a representative admissible model.

    ``median`` inverts the element-wise median of the admissible impact
    matrices; ``closest`` uses the admissible draw nearest to that median in
    Frobenius distance.  The proxy is the implied first structural shock
    series on the residual sample, demeaned.
    """
    if variant not in ("median", "closest"):
        raise ValidationError("variant must be 'median' or 'closest'")
    draws = [d.O if hasattr(d, "O") else np.asarray(d, dtype=float) for d in admissible_draws]
    if len(draws) < 100:
        raise ValidationError(
            f"need at least 100 admissible draws, got {len(draws)}"
        )
    Bs = np.array([rf.L @ O for O in draws])
    B_med = np.median(Bs, axis=0)
    if variant == "closest":
        dist = np.linalg.norm(Bs - B_med[None, :, :], axis=(1, 2))
        B_use = Bs[int(np.argmin(dist))]
    else:
        B_use = B_med
    shocks = np.linalg.solve(B_use, rf.U.T)[0]
    shocks = shocks - shocks.mean()
    return ProxySeries(dates=rf.dates, values=shocks, label=f"{variant}_b")
