"""Noether symmetries, gauge functions and conservation laws for polynomial
Lagrangians, derived and verified exactly over the rationals."""

from .expr import Expr, VarId
from .jets import (Generator, HeadroomError, JetSpace, evolutionary_form,
                   prolong_ode, prolong_pde, total_derivative)
from .parsing import ParseError, parse
from .variational import (ELSystem, HessianReport, Lagrangian, ReductionError,
                          euler_lagrange, hessian, reduce_mod_el)
from .engine import (Ansatz, ConservationLaw, DeterminingSystem,
                     NoetherSolution, NonSymmetryError, UnsupportedProblem,
                     VerificationReport, boundary_terms, characteristics,
                     combine_solutions, condition_residual,
                     conservation_vector, determining_system, find_gauge,
                     first_integral, hessian_relation_check, match_generator,
                     solve, solve_noether, verify, verify_candidate)
from .numeric import (CompiledExpr, NumericConfig, NumericReport, Trajectory,
                      compile_expr, drift_report, integrate_el,
                      seeded_initial_conditions)
from .problem import Problem, ProblemError, load_problem

__version__ = "0.1.0"

__all__ = [
    "Ansatz", "CompiledExpr", "ConservationLaw", "DeterminingSystem",
    "ELSystem", "Expr", "Generator", "HeadroomError", "HessianReport",
    "JetSpace", "Lagrangian", "NoetherSolution", "NonSymmetryError",
    "NumericConfig", "NumericReport", "ParseError", "Problem", "ProblemError",
    "ReductionError", "Trajectory", "UnsupportedProblem",
    "VerificationReport", "boundary_terms", "characteristics",
    "combine_solutions", "compile_expr", "condition_residual",
    "conservation_vector", "determining_system", "drift_report",
    "euler_lagrange", "evolutionary_form", "find_gauge", "first_integral",
    "hessian", "hessian_relation_check", "integrate_el", "load_problem",
    "match_generator", "parse", "prolong_ode", "prolong_pde",
    "reduce_mod_el", "seeded_initial_conditions", "solve", "solve_noether",
    "total_derivative", "verify", "verify_candidate",
]
