"""Desk-scale numerics for multi-bump concentration in singularly
perturbed Schrodinger equations: ground-state shooting, nondegeneracy
spectra, interaction asymptotics, reduced ring-energy optimization, and
full 3D Newton refinement of ring ansatz solutions."""

from .errors import (
    ConfigurationError,
    InsufficientResolutionError,
    MultibumpError,
    NoRootError,
    NumericalFailureError,
    UnsolvableParametersError,
)
from .ground_state import (
    GroundStateProfile,
    Moments,
    decay_constant,
    get_profile,
    moments,
    ode_defect,
    read_profile,
    solve_ground_state,
    write_profile,
)
from .interaction import (
    InteractionFit,
    cross_term,
    interaction_constant,
    pair_sum,
    potential_tail,
)
from .params import (
    PeakConfiguration,
    PotentialModel,
    ProblemParams,
    ReducedConstants,
    WindowSpec,
    peak_positions,
)
from .reduced import (
    RadiusOptimum,
    balance_radius,
    optimize_radius,
    reduced_F,
    reduced_F1,
    reduced_constants,
    scaling_table,
    window_sign_check,
)
from .spectral import (
    NondegeneracyReport,
    SectorSpectrum,
    nondegeneracy_report,
    sector_eigs,
)

__version__ = "0.1.0"
