"""Set-identified impulse responses for proxy-SVARs with a zoo of proxies.

Identification combines generalized ranking restrictions on proxy quality
with sign and narrative restrictions; the package computes interval bounds
for structural impulse responses over a quality grid, partially identifies
the quality parameter itself, and reports breakdown-value and
proxy-informativeness diagnostics.
"""

from ._kernels import backend_name
from .bounds import (
    BoundProblem,
    BoundResult,
    CircleOracle,
    IdentifiedSetGrid,
    SolverConfig,
    solve_bound,
    sweep,
)
from .diagnostics import (
    Claim,
    ClaimTarget,
    CorrelationMap,
    InfoReport,
    LopoReport,
    breakdown_value,
    correlation_map,
    lopo,
    zoo_information,
)
from .dgp import DgpSpec, ProxyPlan, SimTruth, median_b_proxy, sample_admissible_rotations, simulate
from .exceptions import BranchCutError, InfeasibleRegionError, ValidationError
from .io import Panel, ProxySeries, align_proxy, load_panel, load_proxies, write_panel, write_series
from .quality import (
    TauBoundResult,
    construct_point_id_zoo,
    cstar_grid_oracle,
    rho,
    solve_cstar,
    tau_bar,
)
from .reduced_form import (
    ReducedForm,
    VarSpec,
    cholesky_factor,
    estimate_var,
    proxy_moments,
    reduced_irfs,
)
from .restrictions import (
    ConstraintSystem,
    GrrConstraintSet,
    IrfRestriction,
    LinearColumnConstraint,
    NarrativeRestriction,
    SignRestrictionSpec,
    check_feasibility,
    compile_grr,
    compile_sign,
    grr_holds_direct,
)
from .rotation import (
    RotationPoint,
    SkewParams,
    exp_skew,
    log_rotation,
    random_rotation,
    rotation_aligning,
)

__version__ = "0.1.0"
