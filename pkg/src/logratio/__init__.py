"""logratio: the log-ratio function family and its structural properties.

Evaluate h(z) = ln z / ln((1+z^2)/(1+z)) and its relatives on the cut
plane, tabulate their closed-form boundary densities, verify the
associated integral representations by quadrature, and test complete,
logarithmic, Bernstein and finite-order operator monotonicity.

Subpackages
-----------
core             principal-branch evaluation, boundary limits, gated grids
densities        closed-form densities rho, varrho, g2, sigma and kernels
quadrature       adaptive Gauss-Kronrod engine with folded endpoints
representations  residual reports for the integral representations
analysis         jets, CM/LCM/Bernstein/degree/geometric checkers
opmon            Loewner-order operator monotonicity trials
cli              batch command line (`logratio --help`)
"""

from .core import (
    AccuracyLossWarning,
    BoundaryComponent,
    ExtrapolationResult,
    FunctionId,
    boundary_G,
    boundary_limit,
    eval_G,
    eval_H,
    eval_h,
    eval_inv_z2H,
    gated_upper_halfplane_grid,
    principal_log,
    scalar_function,
)
from .densities import (
    BREAKPOINTS,
    g2,
    h_rep_kernel,
    levy_density_invzH,
    levy_density_z2H,
    rho,
    select_sigma_candidate,
    sigma,
    sigma_discrepancy_report,
    varrho_paper,
    write_density_csv,
)
from .quadrature import (
    IntegrandSpec,
    Kernel,
    NonConvergenceError,
    QuadratureResult,
    TailHint,
    integrate_panel,
    integrate_semi_infinite,
    laplace_transform,
    levy_integral,
    stieltjes_transform,
)
from .representations import (
    RepresentationId,
    ResidualReport,
    residual,
    truncated_split,
    verify_representation,
)
from .analysis import (
    DegreeEstimate,
    PropertyReport,
    TaylorJet,
    check_bernstein,
    check_cm,
    check_closure_identities,
    check_lcm,
    check_stieltjes_geometric,
    degree_ratio,
    degree_ratio_closed_form_H,
    estimate_cm_degree,
    power_scaled,
    taylor_jet,
)
from .opmon import (
    LoewnerTrial,
    OperatorMonotoneReport,
    check_operator_monotone,
    hermitian_eig,
    matrix_apply,
    sample_ordered_pair,
    trial_log_csv,
)

__version__ = "0.1.0"
