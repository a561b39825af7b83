"""Unit quaternions Sp(1) = SU(2), the covering Sp(1) -> SO(3), and word maps.

Quaternions are float arrays ``(w, x, y, z)``; an n-tuple of them (a point of
Sp(1)^n) is an ``(n, 4)`` array.  Tangent vectors at such a point are
right-trivialized, ``(n, 3)`` arrays of pure imaginary parts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .config import DEFAULT, Tolerances
from .words import Word, abelianize
from .zlinalg import IntMatrix

ONE = np.array([1.0, 0.0, 0.0, 0.0])
QI = np.array([0.0, 1.0, 0.0, 0.0])
QJ = np.array([0.0, 0.0, 1.0, 0.0])
QK = np.array([0.0, 0.0, 0.0, 1.0])


def qmul(a, b) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def qconj(q) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def qexp(v) -> np.ndarray:
    """exp of the pure quaternion with imaginary part v (works row-wise)."""
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v, axis=-1, keepdims=True)
    safe = np.where(theta > 0, theta, 1.0)
    scale = np.where(theta > 1e-8, np.sin(theta) / safe, 1.0 - theta**2 / 6)
    return np.concatenate([np.cos(theta), scale * v], axis=-1)


def random_unit(rng: np.random.Generator, n: int | None = None) -> np.ndarray:
    """Haar-distributed unit quaternion(s): normalized 4-dim Gaussians."""
    shape = (4,) if n is None else (n, 4)
    return normalize(rng.standard_normal(shape))


def covering_map(q, tol: float = 1e-9) -> np.ndarray:
    """Rotation v -> q v q^-1 of the pure quaternions, as a 3x3 matrix."""
    q = np.asarray(q, dtype=float)
    if abs(np.linalg.norm(q) - 1.0) > tol:
        raise ValueError(f"covering_map needs a unit quaternion, |q| = {np.linalg.norm(q)}")
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def rotation_lift(R, tol: float = 1e-9) -> np.ndarray:
    """One of the two unit quaternions over a rotation (the one with w >= 0)."""
    R = np.asarray(R, dtype=float)
    if np.abs(R.T @ R - np.eye(3)).max() > tol or abs(np.linalg.det(R) - 1) > tol:
        raise ValueError("not a rotation matrix")
    # Shepperd: pick the largest diagonal entry of the 4x4 symmetric form
    tr = np.trace(R)
    cands = np.array([tr, R[0, 0], R[1, 1], R[2, 2]])
    k = int(np.argmax(cands))
    if k == 0:
        w = np.sqrt(1 + tr) / 2
        q = [w, (R[2, 1] - R[1, 2]) / (4 * w), (R[0, 2] - R[2, 0]) / (4 * w), (R[1, 0] - R[0, 1]) / (4 * w)]
    elif k == 1:
        x = np.sqrt(1 + 2 * R[0, 0] - tr) / 2
        q = [(R[2, 1] - R[1, 2]) / (4 * x), x, (R[0, 1] + R[1, 0]) / (4 * x), (R[0, 2] + R[2, 0]) / (4 * x)]
    elif k == 2:
        y = np.sqrt(1 + 2 * R[1, 1] - tr) / 2
        q = [(R[0, 2] - R[2, 0]) / (4 * y), (R[0, 1] + R[1, 0]) / (4 * y), y, (R[1, 2] + R[2, 1]) / (4 * y)]
    else:
        z = np.sqrt(1 + 2 * R[2, 2] - tr) / 2
        q = [(R[1, 0] - R[0, 1]) / (4 * z), (R[0, 2] + R[2, 0]) / (4 * z), (R[1, 2] + R[2, 1]) / (4 * z), z]
    q = normalize(q)
    return q if q[0] >= 0 else -q


def rotation(axis, angle: float) -> np.ndarray:
    """Rotation by ``angle`` about ``axis`` in SO(3)."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    return covering_map(np.concatenate([[np.cos(angle / 2)], np.sin(angle / 2) * axis]))


def _letters(w: Word) -> np.ndarray:
    return np.asarray(w.letters, dtype=np.int_)


def _check_rank(w: Word, g) -> np.ndarray:
    g = np.ascontiguousarray(g, dtype=float)
    if g.ndim != 2 or g.shape[1] != 4 or g.shape[0] != w.n:
        raise ValueError(f"word in F_{w.n} needs an ({w.n}, 4) tuple, got shape {g.shape}")
    return g


def word_eval(w: Word, g) -> np.ndarray:
    """w evaluated at the tuple g in Sp(1)^n."""
    return kernels.eval_word(_letters(w), _check_rank(w, g))


def word_jacobian(w: Word, g) -> tuple[np.ndarray, np.ndarray]:
    """(w(g), D) where D is the 3 x 3n right-trivialized differential."""
    return kernels.word_jacobian(_letters(w), _check_rank(w, g))


def word_differential(w: Word, g, xi) -> np.ndarray:
    """d/dt w(exp(t xi) g) w(g)^-1 at t = 0, as a pure imaginary 3-vector.

    This is the Fox-calculus form: the sum over letters of +-Ad(prefix) xi_i.
    """
    _, D = word_jacobian(w, g)
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.shape[0] != 3 * w.n:
        raise ValueError(f"tangent vector needs {w.n} x 3 entries")
    return D @ xi


def word_eval_so3(w: Word, rots: Sequence[np.ndarray]) -> np.ndarray:
    """w evaluated in SO(3) at the rotations ``rots``."""
    if len(rots) != w.n:
        raise ValueError(f"word in F_{w.n} needs {w.n} rotations")
    out = np.eye(3)
    for a in w.letters:
        R = np.asarray(rots[abs(a) - 1], dtype=float)
        out = out @ (R if a > 0 else R.T)
    return out


def degree_formula(words: Sequence[Word], rank_m: int = 1) -> int:
    """Degree of (w_1, ..., w_n): G^n -> G^n for G of rank m: det(abelianized)^m."""
    if not words:
        raise ValueError("need at least one word")
    n = words[0].n
    if len(words) != n or any(w.n != n for w in words):
        raise ValueError(f"need exactly n words in F_n, got {len(words)} words in F_{n}")
    if rank_m < 1:
        raise ValueError("rank must be positive")
    return IntMatrix.from_columns([abelianize(w) for w in words], rows=n).det() ** rank_m


def commutator_point_orientation(g=QI, h=QJ) -> int:
    """Sign of the point (g, h) of {[g, h] = -1} in the quotient by conjugation.

    Tangent vectors of Sp(1)^2 are right-trivialized with the (i, j, k) basis
    in each factor.  The conjugation orbit is oriented by the Lie algebra
    basis, a slice is oriented so that (orbit, slice) is positive, and the
    sign is that of the commutator's differential on the slice.
    """
    g, h = np.asarray(g, dtype=float), np.asarray(h, dtype=float)
    pair = np.array([g, h])
    _, D = kernels.word_jacobian(np.array([1, 2, -1, -2], dtype=np.int_), pair)
    # infinitesimal action p -> exp(-t e) p exp(t e), right-trivialized: (Ad_p - 1) e
    orbit = np.vstack([covering_map(g) - np.eye(3), covering_map(h) - np.eye(3)])
    if np.linalg.matrix_rank(orbit) < 3:
        raise ValueError("stabilizer of (g, h) is not finite")
    q, _ = np.linalg.qr(np.hstack([orbit, np.eye(6)]))
    slice_ = q[:, 3:6]
    if np.linalg.det(np.hstack([orbit, slice_])) < 0:
        slice_[:, 0] *= -1
    return 1 if np.linalg.det(D @ slice_) > 0 else -1


# --- Gauss-Newton on Sp(1)^n ------------------------------------------------

def retract(g: np.ndarray, step: np.ndarray) -> np.ndarray:
    """g_i -> exp(step_i) g_i, renormalized."""
    e = qexp(step.reshape(-1, 3))
    out = np.empty_like(g)
    for i in range(g.shape[0]):
        out[i] = qmul(e[i], g[i])
    return normalize(out)


def _max_residual(res: np.ndarray) -> float:
    return float(np.sqrt((res.reshape(-1, 4) ** 2).sum(axis=1)).max()) if res.size else 0.0


@dataclass
class NewtonResult:
    g: np.ndarray
    max_residual: float
    iterations: int
    converged: bool


def gauss_newton(
    words: Sequence[np.ndarray],
    targets: np.ndarray,
    g0: np.ndarray,
    tol: float = DEFAULT.success,
    max_iter: int = 100,
    polish: bool = True,
) -> NewtonResult:
    """Minimize sum_c |w_c(g) - t_c|^2 with right-trivialized steps and Armijo backtracking."""
    g = normalize(np.array(g0, dtype=float))
    targets = np.ascontiguousarray(targets, dtype=float)
    res, jac = kernels.system(words, targets, g)
    it = 0
    while it < max_iter:
        worst = _max_residual(res)
        if worst < tol:
            break
        step = -np.linalg.lstsq(jac, res, rcond=None)[0]
        if not np.all(np.isfinite(step)) or np.linalg.norm(step) < 1e-15:
            return NewtonResult(g, worst, it, False)
        F = res @ res
        slope = 2.0 * res @ (jac @ step)
        alpha = 1.0
        while True:
            g_new = retract(g, alpha * step)
            res_new, jac_new = kernels.system(words, targets, g_new)
            if res_new @ res_new <= F + 1e-4 * alpha * slope:
                break
            alpha *= 0.5
            if alpha < 1e-10:
                return NewtonResult(g, worst, it, False)
        g, res, jac = g_new, res_new, jac_new
        it += 1
    worst = _max_residual(res)
    if worst >= tol:
        return NewtonResult(g, worst, it, False)
    if polish:
        step = -np.linalg.lstsq(jac, res, rcond=None)[0]
        g_new = retract(g, step)
        res_new, _ = kernels.system(words, targets, g_new)
        if res_new @ res_new <= res @ res:
            g, res = g_new, res_new
    return NewtonResult(g, _max_residual(res), it, True)


# --- empirical degree at n = 1 ----------------------------------------------

@dataclass
class DegreeEstimate:
    degree: int | None  # None when inconclusive
    target: np.ndarray
    solutions: list[np.ndarray] = field(default_factory=list)
    signs: list[int] = field(default_factory=list)
    starts_used: int = 0
    conclusive: bool = False
    reason: str = ""


def _dedup(points: list[np.ndarray], radius: float) -> list[np.ndarray]:
    pts = sorted(points, key=lambda p: tuple(p))
    out: list[np.ndarray] = []
    for p in pts:
        if all(np.linalg.norm(p - q) > radius for q in out):
            out.append(p)
    return out


def empirical_degree(
    w: Word,
    target=None,
    seeds: int = 10_000,
    seed: int = 0,
    patience: int = 300,
    max_resample: int = 5,
    tol: Tolerances = DEFAULT,
) -> DegreeEstimate:
    """Signed count of solutions of w(g) = target on S^3 by multi-start Newton.

    Stops after ``patience`` consecutive starts find no new solution, or after
    ``seeds`` starts.  With no target given, a Haar-random one is drawn and
    redrawn if some solution has a near-singular differential.  A run that
    ends without ``patience`` quiet starts is reported inconclusive.  The
    stopping rule is probabilistic: a tiny ``patience`` can miss basins.
    """
    if w.n != 1:
        raise ValueError("empirical_degree is implemented for words in F_1 only")
    if not any(abelianize(w)):
        raise ValueError("word is trivial in the abelianization; its degree is 0 and w(g) = t is not regular")
    rng = np.random.default_rng(seed)
    letters = [_letters(w)]
    resample = target is None
    attempts = 0
    while True:
        t = random_unit(rng) if resample else normalize(target)
        est = _count_preimages(letters, t, rng, seeds, patience, tol)
        if est.reason != "singular" or not resample or attempts >= max_resample:
            return est
        attempts += 1


def _count_preimages(letters, t, rng, seeds, patience, tol: Tolerances) -> DegreeEstimate:
    est = DegreeEstimate(None, t)
    targets = t.reshape(1, 4)
    found: list[np.ndarray] = []
    hits: list[int] = []
    quiet = 0
    for start in range(seeds):
        est.starts_used = start + 1
        r = gauss_newton(letters, targets, random_unit(rng, 1), tol=tol.newton, max_iter=60)
        new = False
        if r.converged:
            p = r.g[0]
            near = [k for k, q in enumerate(found) if np.linalg.norm(p - q) <= tol.dedup]
            if near:
                hits[near[0]] += 1
            else:
                found.append(p)
                hits.append(1)
                new = True
        quiet = 0 if new else quiet + 1
        # stop once nothing new turned up for a while and no solution was seen
        # only once (Good-Turing: the unseen basins then carry little mass)
        if found and quiet >= patience and min(hits) >= 2:
            break
    est.solutions = _dedup(found, tol.dedup)
    if not est.solutions:
        est.reason = "no solutions found"
        return est
    for p in est.solutions:
        _, D = kernels.word_jacobian(letters[0], p.reshape(1, 4))
        if np.linalg.svd(D, compute_uv=False).min() < tol.singular:
            est.reason = "singular"
            return est
        est.signs.append(1 if np.linalg.det(D) > 0 else -1)
    if quiet < patience or min(hits) < 2:
        est.reason = "start budget exhausted while still finding new solutions"
        return est
    est.degree = sum(est.signs)
    est.conclusive = True
    return est
