"""Networked bivirus SIS toolkit.

Simulates competitive two-virus SIS dynamics on weighted digraphs,
enumerates and classifies every equilibrium in the invariant region, and
certifies the equilibrium counting laws (Poincaré-Hopf index sum and
sphere Morse inequalities) on concrete models.
"""

from .counting import (
    Configuration,
    CountReport,
    MorseVector,
    build_count_report,
    coexistence_bounds,
    configuration,
    morse_inequalities,
    morse_vector,
    n2_configuration_check,
    poincare_hopf_sum,
)
from .dynamics import BasinSample, Terminal, Trajectory, basin_sample, integrate
from .equilibria import (
    Equilibrium,
    EquilibriumAtlas,
    EquilibriumClass,
    Provenance,
    SearchBudget,
    boundary_equilibria,
    classify,
    enumerate_all,
    homotopy_enumerate,
    newton_search,
)
from .errors import (
    AssumptionError,
    BivirusError,
    DegenerateEquilibrium,
    DegeneracyError,
    IntegrationError,
    ModelFormatError,
    NonConvergenceError,
    PreconditionError,
    StiffnessError,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .model import (
    BivirusModel,
    State,
    ValidationReport,
    VirusParams,
    jacobian,
    load_model,
    reproduction_numbers,
    validate,
    vector_field,
)
from .singlevirus import Regime, SingleVirusResult, solve_endemic
from .spectral import Spectrum, eigenvalues, irreducible, perron_vectors

__version__ = "0.1.0"
