from itertools import product

import numpy as np
import pytest

from _catalog import ALL, B2_ONE, BS, CYCLIC5, FREE2, GENUS2, HOPF, LENS, TORSION, TORSION6, abelian_rep
from repwitness.config import Tolerances
from repwitness.homology import HypothesisError, Presentation, check_thm2, mod2_cycles
from repwitness.liegrp import ONE, QI, QJ, covering_map, qmul, random_unit, rotation, word_eval
from repwitness.solver import (
    BudgetExhausted,
    ConstraintSystem,
    canonical_commutator_pair,
    in_maximal_torus,
    klein_four_diagnostic,
    lift_signs,
    nonabelian_check,
    relator_signs,
    solve,
    solve_thm1,
    solve_thm1_torus,
    solve_thm2,
    w2_evaluate,
)
from repwitness.words import Word, parse_word
from repwitness.zlinalg import kernel_basis, IntMatrix
from repwitness.words import abelianize

COMM = parse_word("[x1,x2]", 2)


def integral_mod2_classes(P: Presentation) -> set[tuple[int, ...]]:
    """Mod-2 reductions of integral 2-cycles."""
    if not P.s:
        return {()}
    basis = kernel_basis(IntMatrix.from_columns([abelianize(w) for w in P.relators], rows=P.n))
    out = set()
    for coeffs in product((0, 1), repeat=len(basis)):
        out.add(tuple(sum(c * v[i] for c, v in zip(coeffs, basis)) % 2 for i in range(P.s)))
    return out


# --- generic solve -----------------------------------------------------------------

def test_solve_commutator_minus_one_is_conjugate_to_i_j():
    w = solve(ConstraintSystem(2, [(COMM, -ONE)]), seed=3)
    assert w.max_residual < 1e-9
    g, h = canonical_commutator_pair(*w.rep)
    assert np.abs(g - QI).max() < 1e-6 and np.abs(h - QJ).max() < 1e-6


def test_solve_free_assignment():
    rng = np.random.default_rng(0)
    t = random_unit(rng, 2)
    sys_ = ConstraintSystem(2, [(Word([1], 2), t[0]), (Word([2], 2), t[1])])
    w = solve(sys_, seed=1)
    assert w.max_residual < 1e-12
    assert np.allclose(w.rep, t, atol=1e-12)


def test_solve_genus_two_product_minus_one():
    w = solve(ConstraintSystem(4, [(parse_word("[x1,x3][x2,x4]", 4), -ONE)]), seed=0)
    assert w.max_residual < 1e-9


def test_solve_is_deterministic():
    sys_ = ConstraintSystem(3, [(parse_word("[x1,x2] x3^2", 3), -ONE), (parse_word("x3 x1 x3", 3), QJ)])
    a, b = solve(sys_, seed=42), solve(sys_, seed=42)
    assert np.array_equal(a.rep, b.rep) and a.residuals == b.residuals
    assert a.restarts_used == b.restarts_used and a.seed == 42


def test_solve_residuals_are_recomputed():
    sys_ = ConstraintSystem(2, [(COMM, -ONE)])
    w = solve(sys_, seed=5)
    assert w.residuals == sys_.residuals(w.rep)
    assert abs(np.linalg.norm(word_eval(COMM, w.rep) + ONE) - w.residuals[0]) < 1e-15


def test_solve_reports_budget_exhaustion():
    # x1 = 1 and x1^2 = -1 are incompatible
    sys_ = ConstraintSystem(1, [(Word([1], 1), ONE), (Word([1, 1], 1), -ONE)])
    with pytest.raises(BudgetExhausted) as exc:
        solve(sys_, budget=3, seed=0)
    assert exc.value.restarts == 3 and exc.value.best_residual > 0.1
    assert exc.value.best_rep.shape == (1, 4)


def test_constraint_system_validation():
    with pytest.raises(ValueError):
        ConstraintSystem(2, [(COMM, np.array([2.0, 0, 0, 0]))])
    with pytest.raises(ValueError):
        ConstraintSystem(3, [(COMM, ONE)])
    with pytest.raises(ValueError):
        solve(ConstraintSystem(2, [(COMM, ONE)]), budget=0)


def test_anticommuting_solutions():
    for seed in range(10):
        g, h = solve(ConstraintSystem(2, [(COMM, -ONE)]), seed=seed).rep
        assert abs(g[0]) < 1e-6 and abs(h[0]) < 1e-6
        assert abs(g[1:] @ h[1:]) < 1e-6


# --- Theorem 1 -----------------------------------------------------------------------

def test_thm1_torsion_group_with_free_gamma():
    P = Presentation.parse(2, ["x1^5"])
    t = random_unit(np.random.default_rng(1))
    w = solve_thm1(P, [P.word("x2")], [t], seed=0)
    assert w.max_residual < 1e-9
    assert np.allclose(word_eval(P.word("x1^5"), w.rep), ONE, atol=1e-9)
    assert np.allclose(w.rep[1], t, atol=1e-9)


def test_thm1_free_group():
    P = FREE2.P
    t = random_unit(np.random.default_rng(2), 2)
    w = solve_thm1(P, [P.word("x1"), P.word("x2")], list(t))
    assert np.allclose(w.rep, t, atol=1e-9)


def test_thm1_baumslag_solitar_type():
    P = BS.P
    t = random_unit(np.random.default_rng(3))
    w = solve_thm1(P, [P.word("x1")], [t], seed=1)
    assert w.max_residual < 1e-9


def test_thm1_rotation_targets():
    P = Presentation.parse(2, ["x1^3 x2^-2"])
    R = rotation([1, 2, 3], 1.1)
    w = solve_thm1(P, [P.word("x1 x2")], [R], seed=0)
    phi = [covering_map(q) for q in w.rep]
    assert np.allclose(phi[0] @ phi[1], R, atol=1e-9)


def test_thm1_hypothesis_failure():
    with pytest.raises(HypothesisError):
        solve_thm1(HOPF.P, [HOPF.P.word("x1")], [ONE])


def test_thm1_torus_backend():
    P = Presentation.parse(2, ["x1^5"])
    theta = solve_thm1_torus(P, [P.word("x2")], [[0.3, 0.7]])
    assert theta.shape == (2, 2)
    assert np.allclose(np.mod(5 * theta[0] + 0.5, 1) - 0.5, 0, atol=1e-9)
    assert np.allclose(theta[1], [0.3, 0.7])


# --- Stiefel-Whitney class -----------------------------------------------------------

def test_w2_examples():
    P = HOPF.P
    half_turns = [rotation([1, 0, 0], np.pi), rotation([0, 1, 0], np.pi)]
    assert w2_evaluate(P, half_turns, [1]) == 1
    coaxial = [rotation([1, 0, 0], np.pi), rotation([1, 0, 0], 0.7)]
    assert w2_evaluate(P, coaxial, [1]) == 0
    assert w2_evaluate(P, half_turns, [0]) == 0


def test_w2_rejects_non_cycle_and_non_representation():
    P = Presentation.parse(1, ["x1^3"])
    with pytest.raises(ValueError, match="cycle"):
        w2_evaluate(P, [rotation([0, 0, 1], 2 * np.pi / 3)], [1])
    with pytest.raises(ValueError, match="not satisfied"):
        w2_evaluate(HOPF.P, [rotation([1, 0, 0], 1.0), rotation([0, 1, 0], 1.0)], [1])


def test_lift_signs_flip_with_torsion_character():
    P = Presentation.parse(1, ["x1^2"])
    assert lift_signs(P, [rotation([0, 0, 1], np.pi)]) == (1,)
    assert lift_signs(P, [np.eye(3)]) == (0,)
    # a half-turn on RP^2 has w2 = w1(L)^2 != 0 although its image is abelian
    assert w2_evaluate(P, [rotation([0, 0, 1], np.pi)], [1]) == 1


def test_w2_invariant_under_relifting():
    rng = np.random.default_rng(4)
    for fx in ALL:
        P = fx.P
        rots, _ = abelian_rep(P, rng)
        for c in mod2_cycles(P):
            base = w2_evaluate(P, rots, c)
            assert all(w2_evaluate(P, rots, c, rng=rng) == base for _ in range(20))


@pytest.mark.parametrize("fx", ALL, ids=lambda f: f.name)
def test_abelian_images_kill_integral_classes(fx):
    rng = np.random.default_rng(5)
    P = fx.P
    integral = integral_mod2_classes(P)
    for _ in range(20):
        rots, _ = abelian_rep(P, rng)
        assert in_maximal_torus(rots)
        for c in mod2_cycles(P):
            if c in integral:
                assert w2_evaluate(P, rots, c) == 0


def test_abelian_images_can_see_non_integral_mod2_classes():
    # H_1 has 2-torsion: half-turn characters give w2 != 0 on a mod-2 cycle
    # that is not the reduction of an integral one
    rng = np.random.default_rng(6)
    for fx in (TORSION6, LENS):
        P = fx.P
        integral = integral_mod2_classes(P)
        seen = set()
        for _ in range(40):
            rots, _ = abelian_rep(P, rng)
            for c in mod2_cycles(P):
                if w2_evaluate(P, rots, c):
                    seen.add(c)
        assert seen and not seen & integral


# --- image checks ------------------------------------------------------------------

def test_nonabelian_check_examples():
    # half-turns about orthogonal axes commute: their image is a Klein four-group
    assert not nonabelian_check([rotation([1, 0, 0], np.pi), rotation([0, 1, 0], np.pi)])
    assert not nonabelian_check([rotation([1, 0, 0], 0.3), rotation([1, 0, 0], 1.9)])
    assert nonabelian_check([rotation([1, 0, 0], np.pi / 2), rotation([0, 1, 0], np.pi)])
    assert nonabelian_check([rotation([1, 0, 0], 0.3), rotation([1, 1, 0], 0.3)])


def test_maximal_torus_check():
    klein = [rotation([1, 0, 0], np.pi), rotation([0, 1, 0], np.pi)]
    assert not in_maximal_torus(klein)
    assert in_maximal_torus([rotation([1, 1, 0], 0.3), np.eye(3), rotation([-1, -1, 0], 2.0)])
    assert in_maximal_torus([np.eye(3)])
    assert klein_four_diagnostic(klein) == {"half_turns": 2, "distinct_axes": 2, "orthogonal_axes": True}
    assert klein_four_diagnostic([rotation([1, 0, 0], 0.3)]) is None


def test_canonical_commutator_pair():
    rng = np.random.default_rng(7)
    for c in random_unit(rng, 10):
        g = qmul(qmul(c, QI), np.array([c[0], -c[1], -c[2], -c[3]]))
        h = qmul(qmul(c, QJ), np.array([c[0], -c[1], -c[2], -c[3]]))
        cg, ch = canonical_commutator_pair(g, h)
        assert np.allclose(cg, QI) and np.allclose(ch, QJ)


# --- Theorem 2 ----------------------------------------------------------------------

@pytest.mark.parametrize("fx", B2_ONE, ids=lambda f: f.name)
def test_thm2_witness(fx):
    P = fx.P
    res = solve_thm2(P, fx.gamma_words(), seed=0)
    assert res.witness.max_residual < 1e-9
    assert res.w2.lift_signs == res.constraints.eta
    assert res.w2.pairing[res.sigma] == 1
    for g in res.constraints.gammas:
        assert np.allclose(covering_map(word_eval(g, res.witness.rep)), np.eye(3), atol=1e-9)
    # the SO(3) image never lies in a maximal torus
    assert not res.in_torus


def test_thm2_hopf_images_anticommute():
    res = solve_thm2(HOPF.P, seed=1)
    g, h = res.witness.rep
    assert np.allclose(qmul(g, h), -qmul(h, g), atol=1e-9)
    # forced: commuting half-turns, a Klein four-group
    assert not res.nonabelian
    assert klein_four_diagnostic(res.so3)["orthogonal_axes"]


def test_thm2_genus_two_gammas_map_to_identity():
    P = GENUS2.P
    res = solve_thm2(P, [P.word("x1"), P.word("x3")], seed=0)
    for k in (0, 2):
        assert np.allclose(covering_map(res.witness.rep[k]), np.eye(3), atol=1e-9)
    assert np.allclose(word_eval(P.relators[0], res.witness.rep), -ONE, atol=1e-9)


def test_thm2_torsion_trivial_eta_branch():
    P = TORSION.P
    res = solve_thm2(P, eta=(1, 0), seed=0)
    assert res.constraints.epsilons == (-1, 1)
    x3 = res.witness.rep[2]
    assert np.allclose(qmul(qmul(x3, x3), x3), ONE, atol=1e-9)
    assert res.nonabelian


def test_thm2_hypothesis_failure():
    with pytest.raises(HypothesisError):
        solve_thm2(GENUS2.P, [GENUS2.P.word("x1"), GENUS2.P.word("x2")])
    with pytest.raises(HypothesisError):
        solve_thm2(CYCLIC5.P)


def test_thm2_is_deterministic():
    a = solve_thm2(TORSION.P, seed=9)
    b = solve_thm2(TORSION.P, seed=9)
    assert np.array_equal(a.witness.rep, b.witness.rep)


def test_relator_signs_detect_non_representation():
    with pytest.raises(ValueError):
        relator_signs(HOPF.P, random_unit(np.random.default_rng(8), 2))


def test_custom_tolerances():
    tol = Tolerances(success=1e-6)
    w = solve(ConstraintSystem(2, [(COMM, -ONE)]), seed=0, tol=tol)
    assert w.max_residual < 1e-6
