"""Numerical laboratory for a chemotaxis system coupled to an
incompressible viscous flow on rectangular domains.

The package simulates the coupled dynamics on a staggered grid, measures
exponential decay rates against their spectral predictions, and
mechanizes the scalar certificate arithmetic (integral constants,
smallness thresholds, and trajectory inequalities) that governs the
small-data regime.
"""

from .grid import (
    GridError,
    RectDomain,
    ScalarField,
    SystemState,
    VectorField,
    build_grid,
    lp_norm,
    lp_norm_values,
    mean,
)
from .operators import (
    advect_scalar,
    chemo_flux_div,
    divergence,
    grad_to_faces,
    laplacian_neumann,
)
from .sensitivity import (
    CutoffField,
    SensitivitySpec,
    build_cutoff,
    eta_convergence_study,
    eval_tensor,
)
from .spectral import (
    EigReport,
    duhamel_residual_n,
    heat_apply,
    lambda1_neumann,
    neumann_lambda1,
    verify_heat_estimate,
)
from .fluid import StokesEig, helmholtz_project, ns_step, stokes_lambda1
from .steppers import StepConfig, step_c, step_n, step_system
from .ledger import (
    Certificate,
    LedgerError,
    ParameterSet,
    check_initial_smallness,
    choose_M_eps,
    choose_M_eps_alternative,
    compute_C1_to_C7,
    default_parameters,
    lemma24_sup_ratio,
    scalar_inequality_suite,
    sigma,
    sigma_integral,
)
from .monitor import CertificateReport, FitResult, NormTrace, certify, fit_rate, record
from .simulate import run_system

__version__ = "0.1.0"
