import numpy as np
import pytest

from proxyzoo import DgpSpec, ProxyPlan, SolverConfig, VarSpec, estimate_var, simulate

# Stable 3-variable DGP with a non-trivial rotated impact matrix.
A3 = np.array([
    [0.50, 0.10, 0.00],
    [0.05, 0.40, 0.10],
    [0.00, 0.10, 0.30],
])
B03 = np.array([
    [1.00, 0.30, 0.20],
    [-0.40, 1.20, 0.10],
    [0.25, -0.20, 0.90],
])

A2 = np.array([
    [0.50, 0.10],
    [0.04, 0.30],
])
B02 = np.array([
    [1.00, 0.40],
    [-0.50, 0.80],
])

# Contamination plan with true quality ratio 0.3 / 0.1 = 3.
EXAMPLE_PLAN = ProxyPlan(target_corr=0.3, contamination=(-0.05, 0.10))


@pytest.fixture(scope="session")
def sim3():
    """T=5000 three-variable run with the quality-3 contaminated proxy."""
    spec = DgpSpec(n=3, p=1, T=5000, seed=20240817, A=(A3,), B0=B03,
                   proxy_plans=(EXAMPLE_PLAN,))
    panel, proxies, truth = simulate(spec)
    return spec, panel, proxies, truth


@pytest.fixture(scope="session")
def rf3(sim3):
    _, panel, proxies, _ = sim3
    rf = estimate_var(panel, VarSpec(lag_order=1, horizon=24))
    return rf.with_proxy_moments(proxies)


@pytest.fixture(scope="session")
def sim2():
    """Small two-variable run with one decent proxy (quality 4)."""
    spec = DgpSpec(n=2, p=1, T=800, seed=7, A=(A2,), B0=B02,
                   proxy_plans=(ProxyPlan(target_corr=0.4, contamination=(0.1,)),))
    panel, proxies, truth = simulate(spec)
    return spec, panel, proxies, truth


@pytest.fixture(scope="session")
def rf2(sim2):
    _, panel, proxies, _ = sim2
    rf = estimate_var(panel, VarSpec(lag_order=1, horizon=8))
    return rf.with_proxy_moments(proxies)


@pytest.fixture
def quick_solver():
    """Solver settings for unit tests: fewer restarts, same tolerances."""
    return SolverConfig(restarts=6, seed=11)
