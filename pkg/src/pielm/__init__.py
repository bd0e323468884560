"""Physics-informed extreme learning machine for inverse Stefan problems."""

from .basis import DerivOrder, ElmBasis, eval_feature_derivs, eval_features, init_basis
from .cases import CaseDefinition, get_case, verify_case_consistency
from .config import RunConfig
from .constraints import LinearConstraint, LinearTerm, assemble_system, residual
from .evaluation import boundary_trace, evaluate_field, relative_l2, robustness_trial
from .pipeline import solve_case
from .solver import condition_report, solve_min_norm

__version__ = "0.1.0"
