"""Witness representations by random-restart Gauss-Newton on Sp(1)^n.

Also evaluates the second Stiefel-Whitney class of the induced SO(3)
representation on mod-2 2-cycles and tests whether its image is abelian.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .homology import (
    HypothesisError,
    Presentation,
    Thm2Constraints,
    analyze,
    build_thm2_constraints,
    check_thm1,
    sigma_generator,
)
from .liegrp import (
    ONE,
    covering_map,
    gauss_newton,
    normalize,
    qconj,
    qmul,
    random_unit,
    rotation_lift,
    word_eval,
)
from .words import Word, abelianize

__all__ = [
    "ConstraintSystem",
    "Witness",
    "BudgetExhausted",
    "W2Report",
    "Thm2Witness",
    "solve",
    "solve_thm1",
    "solve_thm1_torus",
    "solve_thm2",
    "lift_signs",
    "relator_signs",
    "w2_evaluate",
    "nonabelian_check",
    "in_maximal_torus",
    "klein_four_diagnostic",
    "canonical_commutator_pair",
]


@dataclass
class ConstraintSystem:
    n: int
    constraints: list[tuple[Word, np.ndarray]]
    origin: str = "raw"

    def __post_init__(self):
        fixed = []
        for w, t in self.constraints:
            if w.n != self.n:
                raise ValueError(f"constraint word {w} is not in F_{self.n}")
            t = np.asarray(t, dtype=float)
            if t.shape != (4,) or abs(np.linalg.norm(t) - 1) > 1e-9:
                raise ValueError(f"target for {w} must be a unit quaternion")
            fixed.append((w, t / np.linalg.norm(t)))
        self.constraints = fixed

    def residuals(self, g) -> list[float]:
        return [float(np.linalg.norm(word_eval(w, g) - t)) for w, t in self.constraints]


@dataclass
class Witness:
    rep: np.ndarray  # (n, 4) images of the generators in Sp(1)
    residuals: list[float]
    restarts_used: int
    seed: int

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    def so3(self) -> list[np.ndarray]:
        return [covering_map(q) for q in self.rep]


class BudgetExhausted(RuntimeError):
    """No restart converged; this is not evidence that no solution exists."""

    def __init__(self, best_residual: float, best_rep: np.ndarray | None, restarts: int):
        self.best_residual = best_residual
        self.best_rep = best_rep
        self.restarts = restarts
        super().__init__(f"no witness after {restarts} restarts (best residual {best_residual:.3e})")


def solve(
    system: ConstraintSystem,
    budget: int = 200,
    seed: int = 0,
    max_iter: int = 100,
    tol: Tolerances = DEFAULT,
) -> Witness:
    """Find g in Sp(1)^n with w(g) = t for every constraint.

    Restart k draws its Haar start from the k-th child of ``SeedSequence(seed)``,
    so the result depends only on the system and the seed.
    """
    if budget < 1:
        raise ValueError("budget must be positive")
    words = [np.asarray(w.letters, dtype=np.int_) for w, _ in system.constraints]
    targets = np.array([t for _, t in system.constraints]).reshape(-1, 4)
    best_res, best_rep = np.inf, None
    children = np.random.SeedSequence(seed).spawn(budget)
    for k, child in enumerate(children):
        g0 = random_unit(np.random.default_rng(child), system.n)
        if not words:
            return Witness(g0, [], k + 1, seed)
        r = gauss_newton(words, targets, g0, tol=tol.success, max_iter=max_iter)
        residuals = system.residuals(r.g)  # recomputed from scratch
        worst = max(residuals)
        if r.converged and worst < tol.success:
            return Witness(r.g, residuals, k + 1, seed)
        if worst < best_res:
            best_res, best_rep = worst, r.g
    raise BudgetExhausted(best_res, best_rep, budget)


def _as_target(t) -> tuple[np.ndarray, bool]:
    t = np.asarray(t, dtype=float)
    if t.shape == (4,):
        return normalize(t), False
    if t.shape == (3, 3):
        return rotation_lift(t), True
    raise ValueError(f"target must be a unit quaternion or a 3x3 rotation, got shape {t.shape}")


def solve_thm1(
    P: Presentation,
    gammas: Sequence[Word],
    targets: Sequence,
    budget: int = 200,
    seed: int = 0,
    tol: Tolerances = DEFAULT,
) -> Witness:
    """phi: pi_1(X) -> Sp(1) or SO(3) with phi(gamma_i) = t_i, when b2 = 0.

    Rotation targets are lifted to Sp(1); the sign patterns of the lifts are
    tried in turn, all-positive first.
    """
    if len(targets) != len(gammas):
        raise ValueError("need one target per gamma")
    cert = check_thm1(P, gammas)
    if not cert.holds:
        raise HypothesisError(cert.reason)
    lifted = [_as_target(t) for t in targets]
    flexible = [i for i, (_, is_rot) in enumerate(lifted) if is_rot]
    last: BudgetExhausted | None = None
    for signs in product((1, -1), repeat=len(flexible)):
        tg = [q for q, _ in lifted]
        for i, s in zip(flexible, signs):
            tg[i] = s * tg[i]
        cons = [(w, ONE) for w in P.relators] + list(zip(gammas, tg))
        try:
            return solve(ConstraintSystem(P.n, cons, "thm1"), budget, seed, tol=tol)
        except BudgetExhausted as exc:
            last = exc
    raise last


def solve_thm1_torus(P: Presentation, gammas: Sequence[Word], angles) -> np.ndarray:
    """phi: pi_1(X) -> U(1)^m with phi(gamma_i) = exp(2 pi i angles[i]) when b2 = 0.

    ``angles`` is an (r, m) array of fractions of a turn; returns an (n, m)
    array of angles for the generators.  On a torus the relators only see the
    abelianization, so this is a real linear system.
    """
    cert = check_thm1(P, gammas)
    if not cert.holds:
        raise HypothesisError(cert.reason)
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    if angles.shape[0] != len(gammas):
        raise ValueError("need one row of angles per gamma")
    A = np.array([abelianize(w) for w in P.relators] + [abelianize(g) for g in gammas], dtype=float)
    b = np.vstack([np.zeros((P.s, angles.shape[1])), angles])
    theta = np.linalg.lstsq(A.reshape(-1, P.n), b, rcond=None)[0]
    if np.abs(A @ theta - b).max() > 1e-9:
        raise ArithmeticError("torus system has no real solution")  # excluded by the hypothesis
    return np.mod(theta, 1.0)


# --- Stiefel-Whitney class ----------------------------------------------------

def _lifts(rots: Sequence[np.ndarray], rng: np.random.Generator | None) -> np.ndarray:
    qs = np.array([rotation_lift(R) for R in rots])
    if rng is not None:
        qs *= rng.choice([-1.0, 1.0], size=(len(qs), 1))
    return qs


def relator_signs(P: Presentation, qs: np.ndarray, tol: Tolerances = DEFAULT) -> tuple[int, ...]:
    """delta(psi(w_i)) for psi given by the Sp(1) images ``qs`` (0 for +1, 1 for -1)."""
    out = []
    for i, w in enumerate(P.relators):
        v = word_eval(w, qs)
        if np.linalg.norm(v - ONE) < tol.snap:
            out.append(0)
        elif np.linalg.norm(v + ONE) < tol.snap:
            out.append(1)
        else:
            raise ValueError(f"relator {i} is not satisfied in SO(3): psi(w_{i}) = {v}")
    return tuple(out)


def lift_signs(
    P: Presentation,
    rots: Sequence[np.ndarray],
    rng: np.random.Generator | None = None,
    tol: Tolerances = DEFAULT,
) -> tuple[int, ...]:
    """Relator signs for lifts of the SO(3) images; random lifts when ``rng`` is given."""
    if len(rots) != P.n:
        raise ValueError(f"need {P.n} rotations, got {len(rots)}")
    return relator_signs(P, _lifts(rots, rng), tol)


def w2_evaluate(
    P: Presentation,
    rots: Sequence[np.ndarray],
    cycle: Sequence[int],
    rng: np.random.Generator | None = None,
    tol: Tolerances = DEFAULT,
) -> int:
    """<w2(phi), [c]> = sum_i c_i delta(psi(w_i)) mod 2 for a mod-2 cycle c."""
    c = [int(x) % 2 for x in cycle]
    if len(c) != P.s:
        raise ValueError(f"cycle needs {P.s} entries, got {len(c)}")
    bd = [sum(ci * abelianize(w)[g] for ci, w in zip(c, P.relators)) % 2 for g in range(P.n)]
    if any(bd):
        raise ValueError(f"{tuple(c)} is not a mod-2 cycle")
    signs = lift_signs(P, rots, rng, tol)
    return sum(ci * si for ci, si in zip(c, signs)) % 2


@dataclass
class W2Report:
    lift_signs: tuple[int, ...]
    pairing: dict[tuple[int, ...], int] = field(default_factory=dict)


def nonabelian_check(rots: Sequence[np.ndarray], tol: Tolerances = DEFAULT) -> bool:
    """True iff two of the rotations fail to commute."""
    rots = [np.asarray(R, dtype=float) for R in rots]
    for a in range(len(rots)):
        for b in range(a + 1, len(rots)):
            if np.abs(rots[a] @ rots[b] - rots[b] @ rots[a]).max() > tol.commute:
                return True
    return False


def rotation_axis(R, tol: float = DEFAULT.commute) -> np.ndarray | None:
    """Unit axis of a rotation, or None for the identity."""
    R = np.asarray(R, dtype=float)
    if np.abs(R - np.eye(3)).max() < tol:
        return None
    w, v = np.linalg.eigh((R + R.T) / 2)
    return v[:, int(np.argmin(np.abs(w - 1)))]


def in_maximal_torus(rots: Sequence[np.ndarray], tol: Tolerances = DEFAULT) -> bool:
    """True iff all rotations fix a common axis, i.e. the image lies in one SO(2)."""
    axes = [a for a in (rotation_axis(R, tol.commute) for R in rots) if a is not None]
    return all(abs(abs(a @ axes[0]) - 1) < tol.commute for a in axes[1:])


def klein_four_diagnostic(rots: Sequence[np.ndarray], tol: Tolerances = DEFAULT) -> dict | None:
    """For images that are all half-turns (or identity): are their axes orthogonal?

    An abelian image of this kind can be a Klein four-group, which is not in
    a maximal torus; commutativity alone does not decide torus containment.
    """
    axes = []
    for R in rots:
        R = np.asarray(R, dtype=float)
        if np.abs(R - np.eye(3)).max() < tol.commute:
            continue
        if abs(np.trace(R) + 1) > tol.commute:
            return None
        w, v = np.linalg.eigh((R + np.eye(3)) / 2)
        axes.append(v[:, -1])
    distinct = []
    for a in axes:
        if all(abs(abs(a @ b) - 1) > tol.commute for b in distinct):
            distinct.append(a)
    orth = all(abs(a @ b) < tol.commute for i, a in enumerate(distinct) for b in distinct[i + 1:])
    return {"half_turns": len(axes), "distinct_axes": len(distinct), "orthogonal_axes": orth}


@dataclass
class Thm2Witness:
    witness: Witness
    constraints: Thm2Constraints
    w2: W2Report
    nonabelian: bool
    in_torus: bool
    sigma: tuple[int, ...]

    @property
    def so3(self) -> list[np.ndarray]:
        return self.witness.so3()


def solve_thm2(
    P: Presentation,
    gammas: Sequence[Word] = (),
    eta: Sequence[int] | None = None,
    budget: int = 200,
    seed: int = 0,
    tol: Tolerances = DEFAULT,
) -> Thm2Witness:
    """phi: pi_1(X) -> SO(3) with phi(gamma_i) = 1 and w2(phi) = eta, when b2 = 1."""
    profile = analyze(P)
    sigma = sigma_generator(profile) if profile.b2 == 1 else None
    cons = build_thm2_constraints(P, profile, sigma, gammas, eta)
    eps = list(cons.epsilons) + [1] * len(cons.gammas)
    words = list(cons.v_words) + list(cons.gammas)
    system = ConstraintSystem(P.n, [(w, e * ONE) for w, e in zip(words, eps)], "thm2")
    witness = solve(system, budget, seed, tol=tol)
    rots = witness.so3()
    signs = relator_signs(P, witness.rep, tol)
    if signs != cons.eta:
        raise AssertionError(f"lift signs {signs} differ from eta {cons.eta}")  # internal
    report = W2Report(signs, {sigma.coefficients: w2_evaluate(P, rots, sigma.coefficients, tol=tol)})
    return Thm2Witness(
        witness, cons, report, nonabelian_check(rots, tol), in_maximal_torus(rots, tol), sigma.coefficients
    )


def canonical_commutator_pair(g, h) -> tuple[np.ndarray, np.ndarray]:
    """Conjugate (g, h) so that Im g points along i and Im h lies in the i-j plane with j >= 0."""
    g, h = np.asarray(g, dtype=float), np.asarray(h, dtype=float)
    e1 = g[1:] / np.linalg.norm(g[1:])
    v = h[1:] - (h[1:] @ e1) * e1
    e2 = v / np.linalg.norm(v)
    R = np.array([e1, e2, np.cross(e1, e2)])
    c = rotation_lift(R)
    conj = lambda q: qmul(qmul(c, q), qconj(c))  # noqa: E731
    return conj(g), conj(h)
