"""Static soliton pairs in 1D scalar field theories.

Kink models, exact deformed Phi^4 kinks, a gauge-fixed relaxation solver for
kink-antikink and kink-kink configurations, and the large-distance
perturbation theory of their interaction energy.
"""

__version__ = "0.1.0"

from .errors import (KinkStaticsError, ModelInconsistency, NumericalFailure, OutOfRange,
                     SingularBoundary, SingularConfiguration, StepFailure,
                     UnsupportedConfiguration, UsageError)
from .model import (AccumulatedMass, FieldModel, KinkAsymptotics, asymptotics, get_model,
                    kink_mass, make_phi4, make_sine_gordon, partial_mass)
from .grid import (Dirichlet, FieldProfile, FixedVacuum, Grid1D, Neumann, first_derivative4,
                   fluctuation_operator, inner_product, integrate, lowest_eigenpairs,
                   second_derivative)
from .relaxation import (EnergyTable, PairKind, RelaxationConfig, Snapshot, annihilation_run,
                         collinearity_check, evolve_step, gauge_source, initial_pair_profile,
                         interaction_fit, natural_distance, solve_pair)
from .asymptotic import (ABCoefficients, EtaProfile, PotentialCurve, ab_coefficients,
                         asymptotic_energy, eta_boundary, eta_profile, eta_residual,
                         potential_from_ode)

__all__ = [name for name in dir() if not name.startswith("_")]
