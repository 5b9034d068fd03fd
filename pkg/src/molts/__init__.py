"""Multi-objective linear contextual bandits with optimistic Thompson sampling."""
from .errors import (ArgumentError, ConfigurationError, InvariantViolation, MoltsError,
                     NumericalError, UnboundedError)
from .linalg import RlsState, SampleBlock
from .lp import BACKEND, LpSolution, LpStatus, dominance_margin, maximin_over_simplex, solve_dense_lp
from .pareto import (FrontKind, FrontSet, dominates, effective_front, effective_gap, effective_gaps,
                     pareto_front, pareto_gap, pareto_gaps, scalarized_argmax, weight_for_arm)
from .policies import Algorithm, Decision, PolicyConfig, min_samples, select_arm

__version__ = "0.1.0"
