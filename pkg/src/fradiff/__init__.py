"""fradiff: numerical laboratory for time-fractional evolution equations.

Solves d_t^alpha u + N[u] = 0 with zero exterior Dirichlet data for a
catalog of local and nonlocal diffusion operators, audits the discrete
energy inequalities step by step, and fits the power-law decay of
Lebesgue norms against the predicted exponent alpha/gamma.
"""

from .analysis import (
    DecayReport,
    FitError,
    check_lemma_az,
    check_sa,
    estimate_cstar,
    fit_decay_exponent,
    symmetrized_energy,
)
from .config import ConfigError, ScenarioConfig, initial_field, parse_config, parse_config_file
from .grid import Field, FieldError, Grid, GridError, inner_energy, lp_norm
from .mittag import (
    FodeSolution,
    barrier,
    fit_barrier_constant,
    mittag_leffler,
    solve_scalar_fode,
)
from .operators import (
    DirectionalFrac,
    DoublyNonlinear,
    FracLaplacian,
    FracMeanCurvature,
    FracPLaplacian,
    FracPorousMedium,
    FracSum,
    Laplacian,
    MeanCurvature,
    OperatorParameterError,
    PLaplacian,
    PorousMedium,
    apply_operator,
    is_linear,
    is_local,
    max_gradient,
    predicted_gamma,
)
from .runner import read_report_csv, run_scenario, write_report_csv
from .stepping import (
    HistoryBuffer,
    StepError,
    TimeMesh,
    caputo_weights,
    discrete_caputo,
    evolve,
    l1_coefficients,
    smallest_eigenpair,
    step,
)

__version__ = "0.1.0"
