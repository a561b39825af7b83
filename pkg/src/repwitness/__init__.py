"""Representations of finitely presented groups in SU(2) and SO(3).

Exact homological certificates (Smith normal form, the cup-product form mu,
predicted degrees and intersection numbers) decide when representations with
prescribed values exist; a Gauss-Newton solver then constructs witnesses.
"""
from .homology import (
    HypothesisError,
    Presentation,
    analyze,
    build_thm2_constraints,
    check_thm1,
    check_thm2,
    kappa,
    mu_form,
    sigma_generator,
)
from .kernels import BACKEND
from .liegrp import covering_map, degree_formula, empirical_degree, word_differential, word_eval
from .solver import (
    BudgetExhausted,
    ConstraintSystem,
    nonabelian_check,
    solve,
    solve_thm1,
    solve_thm2,
    w2_evaluate,
)
from .words import (
    Word,
    abelianize,
    express_as_commutators,
    lambda_form,
    multiply,
    parse_word,
    substitute,
)
from .zlinalg import ExteriorElement, IntMatrix, kernel_basis, push_forward, smith_normal_form, top_det, wedge

__version__ = "0.1.0"
