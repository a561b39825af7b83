"""Homological certificates of a presentation 2-complex.

The complex X of ``<x_1..x_n | w_0..w_s>`` has one 0-cell, a 1-cell per
generator and a 2-cell per relator.  Its boundary map C_2 -> C_1 sends the
i-th 2-cell to the exponent-sum vector of w_i, and since there are no 3-cells
H_2(X) is the integer kernel of that map.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from .words import (
    Word,
    abelianize,
    express_as_commutators,
    lambda_form,
    parse_word,
    substitute,
)
from .zlinalg import (
    ExteriorElement,
    IntMatrix,
    SnfResult,
    gcd_all,
    kernel_basis,
    push_forward,
    smith_normal_form,
    top_det,
    wedge,
)

__all__ = [
    "Presentation",
    "HomologyProfile",
    "SigmaClass",
    "MuForm",
    "Thm1Certificate",
    "Thm2Certificate",
    "Thm2Constraints",
    "HypothesisError",
    "analyze",
    "sigma_generator",
    "mu_form",
    "check_thm1",
    "check_thm2",
    "build_thm2_constraints",
    "kappa",
    "mod2_cycles",
    "unimodular_completion",
]


class HypothesisError(ValueError):
    """A theorem's hypotheses (or an operation's precondition) do not hold."""


@dataclass(frozen=True)
class Presentation:
    n: int
    relators: tuple[Word, ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a presentation needs at least one generator")
        object.__setattr__(self, "relators", tuple(self.relators))
        for w in self.relators:
            if w.n != self.n:
                raise ValueError(f"relator {w} is not a word in F_{self.n}")
        if self.names is not None:
            names = tuple(self.names)
            if len(names) != self.n or len(set(names)) != self.n:
                raise ValueError("generator names must be unique, one per generator")
            object.__setattr__(self, "names", names)

    @classmethod
    def parse(cls, n: int, relators: Sequence[str], names: Sequence[str] | None = None) -> "Presentation":
        return cls(n, tuple(parse_word(r, n, names) for r in relators), tuple(names) if names else None)

    @property
    def s(self) -> int:
        """Number of 2-cells."""
        return len(self.relators)

    def word(self, text: str) -> Word:
        return parse_word(text, self.n, self.names)

    def generator_names(self) -> tuple[str, ...]:
        return self.names or tuple(f"x{k}" for k in range(1, self.n + 1))


@dataclass(frozen=True)
class HomologyProfile:
    b1: int
    b2: int
    torsion_order: int
    boundary: IntMatrix
    snf: SnfResult
    free_quotient_map: IntMatrix  # L = Z^n -> A_0 = H_1 / T

    @property
    def rank(self) -> int:
        return self.snf.rank

    def to_free_quotient(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.free_quotient_map @ v

    def basis_labels(self, names: Sequence[str]) -> list[str]:
        """Name A_0 basis vectors after generators when they are generator images."""
        labels = []
        for k in range(self.b1):
            row = self.free_quotient_map.row(k)
            hits = [j for j, x in enumerate(row) if x]
            if len(hits) == 1 and row[hits[0]] == 1 and all(
                self.free_quotient_map[r, hits[0]] == 0 for r in range(self.b1) if r != k
            ):
                labels.append(names[hits[0]])
            else:
                labels.append(f"a{k + 1}")
        return labels


@dataclass(frozen=True)
class SigmaClass:
    coefficients: tuple[int, ...]


@dataclass(frozen=True)
class MuForm:
    mu: ExteriorElement
    word: Word  # commutator word whose linearization was pushed forward


def _row_hermite(P: IntMatrix) -> IntMatrix:
    """Row-style Hermite form H @ P with H unimodular (H is discarded)."""
    a = P.tolist()
    m, n = P.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if a[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[piv] = a[piv], a[r]
            for i in range(r + 1, m):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            if all(a[i][c] == 0 for i in range(r + 1, m)):
                break
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
    return IntMatrix(a, n)


def analyze(P: Presentation) -> HomologyProfile:
    boundary = IntMatrix.from_columns([abelianize(w) for w in P.relators], rows=P.n)
    snf = smith_normal_form(boundary)
    r = snf.rank
    b1 = P.n - r
    b2 = P.s - r
    quotient = snf.U.submatrix(range(r, P.n), range(P.n))
    quotient = _row_hermite(quotient)
    return HomologyProfile(b1, b2, snf.torsion_order, boundary, snf, quotient)


def sigma_generator(profile: HomologyProfile) -> SigmaClass:
    if profile.b2 != 1:
        raise HypothesisError(f"H_2 is not infinite cyclic (b2 = {profile.b2})")
    (v,) = kernel_basis(profile.boundary)
    g = gcd_all(v)
    v = tuple(x // g for x in v)
    first = next(x for x in v if x)
    if first < 0:
        v = tuple(-x for x in v)
    return SigmaClass(v)


def _relator_product(P: Presentation, coefficients: Sequence[int]) -> Word:
    exps = Word.from_exponents(coefficients)
    return substitute(exps, P.relators)


def mu_form(P: Presentation, profile: HomologyProfile | None = None, sigma: SigmaClass | None = None) -> MuForm:
    """The skew form on A_0 = H_1/T given by cup product against sigma."""
    profile = profile or analyze(P)
    sigma = sigma or sigma_generator(profile)
    w0 = _relator_product(P, sigma.coefficients)
    lam = lambda_form(w0)
    return MuForm(push_forward(lam, profile.free_quotient_map), w0)


def _wedge_all(forms: Sequence[ExteriorElement], rank: int) -> ExteriorElement:
    out = ExteriorElement.scalar(1, rank)
    for f in forms:
        out = wedge(out, f)
    return out


def _lift_to_word(profile: HomologyProfile, target: Sequence[int], n: int) -> Word:
    """A word in F_n whose image in A_0 is ``target``."""
    snf = smith_normal_form(profile.free_quotient_map)
    # P = U^-1 D V^-1 with D = [I | 0] since P is onto; x = V (U target ; 0)
    y = snf.U @ target
    x = snf.V @ (tuple(y) + (0,) * (n - len(y)))
    return Word.from_exponents(x)


@dataclass
class Thm1Certificate:
    holds: bool
    b2: int
    gamma_rank: int
    torsion_order: int
    reason: str = ""
    degree: int | None = None  # det(w_1..w_s, z_1..z_r)^m, the degree of the word map
    predicted_degree: int | None = None  # (|T| det(h_1..h_r))^m up to sign
    rank_m: int = 1


def _rational_rank(vectors: Sequence[Sequence[int]], dim: int) -> int:
    if not vectors:
        return 0
    return smith_normal_form(IntMatrix.from_columns(list(vectors), rows=dim)).rank


def check_thm1(P: Presentation, gammas: Sequence[Word], rank_m: int = 1) -> Thm1Certificate:
    """Existence criterion for prescribing values on gammas when b2 = 0."""
    profile = analyze(P)
    images = [profile.to_free_quotient(abelianize(g)) for g in gammas]
    r = _rational_rank(images, profile.b1)
    cert = Thm1Certificate(False, profile.b2, r, profile.torsion_order, rank_m=rank_m)
    if profile.b2 != 0:
        cert.reason = f"b2 = {profile.b2}, need 0"
        return cert
    if r != len(gammas):
        cert.reason = "gammas are linearly dependent in H_1(X; Q)"
        return cert
    cert.holds = True
    if r == profile.b1:
        h = IntMatrix.from_columns(images, rows=profile.b1).det() if r else 1
        cert.predicted_degree = (profile.torsion_order * h) ** rank_m
        cols = [abelianize(w) for w in P.relators] + [abelianize(g) for g in gammas]
        cert.degree = IntMatrix.from_columns(cols, rows=P.n).det() ** rank_m if cols else 1
    return cert


@dataclass
class Thm2Certificate:
    holds: bool
    b1: int
    b2: int
    torsion_order: int
    reason: str = ""
    sigma: SigmaClass | None = None
    mu: ExteriorElement | None = None
    gammas: tuple[Word, ...] = ()  # completed to b1 - 2 entries when holds
    prediction: int = 0  # |T| det(mu ^ gamma_1 ^ ... ^ gamma_{b1-2})


def check_thm2(P: Presentation, gammas: Sequence[Word]) -> Thm2Certificate:
    """Existence criterion for SO(3) representations with w2 pairing sigma nontrivially."""
    profile = analyze(P)
    cert = Thm2Certificate(False, profile.b1, profile.b2, profile.torsion_order)
    if profile.b2 != 1:
        cert.reason = f"b2 = {profile.b2}, need 1"
        return cert
    if profile.b1 < 2:
        cert.reason = f"b1 = {profile.b1} < 2, so mu = 0"
        return cert
    sigma = sigma_generator(profile)
    mu = mu_form(P, profile, sigma).mu
    cert.sigma, cert.mu = sigma, mu
    vecs = [ExteriorElement.vector(profile.to_free_quotient(abelianize(g))) for g in gammas]
    form = wedge(mu, _wedge_all(vecs, profile.b1))
    if form.is_zero():
        cert.reason = "mu ^ gamma_1 ^ ... vanishes"
        return cert
    completed = list(gammas)
    # extend by basis vectors of A_0 until top degree (keeps the form nonzero)
    for k in range(profile.b1):
        if form.degree == profile.b1:
            break
        e = ExteriorElement.basis([k], profile.b1)
        trial = wedge(form, e)
        if not trial.is_zero():
            form = trial
            completed.append(_lift_to_word(profile, [int(i == k) for i in range(profile.b1)], P.n))
    cert.holds = True
    cert.gammas = tuple(completed)
    cert.prediction = profile.torsion_order * top_det(form)
    return cert


# --- rewriting the relators along a unimodular matrix -----------------------

# Elementary automorphisms of F_m, as (kind, i, j, c) with 0-based i, j:
#   ("add", i, j, c): y_j -> y_j y_i^c      matrix I + c E_ij
#   ("swap", i, j, 0): y_i <-> y_j
#   ("neg", j, j, 0): y_j -> y_j^-1

def _elementary_images(op, m: int) -> list[Word]:
    kind, i, j, c = op
    gens = [Word.generator(k + 1, m) for k in range(m)]
    if kind == "add":
        gens[j] = gens[j] * gens[i] ** c
    elif kind == "swap":
        gens[i], gens[j] = gens[j], gens[i]
    elif kind == "neg":
        gens[j] = gens[j].inverse()
    return gens


def _elementary_inverse(op):
    kind, i, j, c = op
    return (kind, i, j, -c) if kind == "add" else op


def unimodular_completion(sigma: Sequence[int]) -> list[tuple[str, int, int, int]]:
    """Elementary operations E_1..E_k whose product M has first column sigma.

    Row-reduces the primitive vector sigma to e_0 (Euclid), then inverts.
    """
    v = list(sigma)
    if gcd_all(v) != 1:
        raise ValueError(f"{tuple(sigma)} is not primitive")
    reductions = []  # row operations R with R_k...R_1 sigma = e_0
    while sum(1 for x in v if x) > 1:
        p = min((i for i, x in enumerate(v) if x), key=lambda i: abs(v[i]))
        for q, x in enumerate(v):
            if q != p and x:
                c = x // v[p]
                v[q] -= c * v[p]
                reductions.append(("add", q, p, -c))  # row_q -= c row_p
    p = next(i for i, x in enumerate(v) if x)
    if p != 0:
        v[0], v[p] = v[p], v[0]
        reductions.append(("swap", 0, p, 0))
    if v[0] < 0:
        reductions.append(("neg", 0, 0, 0))
    # M = R_1^-1 R_2^-1 ... R_k^-1
    return [_elementary_inverse(op) for op in reductions]


def _op_matrix(op, m: int) -> IntMatrix:
    cols = [abelianize(w) for w in _elementary_images(op, m)]
    return IntMatrix.from_columns(cols, rows=m)


def _compose_images(ops, m: int) -> list[Word]:
    """Images of y_1..y_m under op_1 o op_2 o ... o op_k."""
    images = [Word.generator(k + 1, m) for k in range(m)]
    for op in ops:
        elem = _elementary_images(op, m)
        images = [substitute(e, images) for e in elem]
    return images


@dataclass
class Thm2Constraints:
    v_words: tuple[Word, ...]  # rewritten relators w'_0 .. w'_s
    epsilons: tuple[int, ...]  # targets +-1, epsilons[0] == -1
    commutator_pairs: list[tuple[Word, Word]]  # w'_0 = prod [u_l, v_l]
    eta: tuple[int, ...]
    M: IntMatrix
    gammas: tuple[Word, ...] = ()
    automorphism: tuple[Word, ...] = field(default=(), repr=False)  # alpha(y_j) in F_{s+1}

    def v_rest(self) -> list[Word]:
        return list(self.v_words[1:]) + list(self.gammas)


def build_thm2_constraints(
    P: Presentation,
    profile: HomologyProfile | None = None,
    sigma: SigmaClass | None = None,
    gammas: Sequence[Word] = (),
    eta: Sequence[int] | None = None,
) -> Thm2Constraints:
    """Rewrite the relators so that the first one represents sigma.

    A unimodular M with first column sigma is realized by a product of Nielsen
    moves alpha; the new relators are w'_j = p(alpha(y_j)) where p sends y_i to
    the i-th relator.  Targets are eps_j = (-1)^{(M^T eta)_j}.
    """
    profile = profile or analyze(P)
    cert = check_thm2(P, gammas)
    if not cert.holds:
        raise HypothesisError(f"hypothesis of the b2 = 1 criterion fails: {cert.reason}")
    sigma = sigma or cert.sigma
    m = P.s
    if eta is None:
        odd = [i for i, c in enumerate(sigma.coefficients) if c % 2]
        eta = tuple(int(i == odd[-1]) for i in range(m))
    eta = tuple(int(x) % 2 for x in eta)
    if len(eta) != m:
        raise ValueError(f"eta needs {m} entries, got {len(eta)}")
    if sum(c * e for c, e in zip(sigma.coefficients, eta)) % 2 != 1:
        raise HypothesisError("eta pairs trivially with sigma")

    ops = unimodular_completion(sigma.coefficients)
    M = IntMatrix.identity(m)
    for op in ops:
        M = M @ _op_matrix(op, m)
    if M.column(0) != tuple(sigma.coefficients) or abs(M.det()) != 1:
        raise AssertionError("unimodular completion is inconsistent")  # internal
    alpha = _compose_images(ops, m)
    new = tuple(substitute(a, P.relators) for a in alpha)

    # the old relators are words in the new ones: w_i = p'(alpha^-1(y_i))
    alpha_inv = _compose_images([_elementary_inverse(op) for op in reversed(ops)], m)
    if tuple(substitute(a, new) for a in alpha_inv) != P.relators:
        raise AssertionError("rewritten relators do not recover the originals")  # internal

    eps = tuple(
        -1 if sum(M[i, j] * eta[i] for i in range(m)) % 2 else 1 for j in range(m)
    )
    assert eps[0] == -1
    pairs = express_as_commutators(new[0])
    return Thm2Constraints(new, eps, pairs, eta, M, tuple(cert.gammas), tuple(alpha))


def kappa(v0_pairs: Sequence[tuple[Word, Word]], v_rest: Sequence[Word], n: int) -> int:
    """det(lambda ^ v_1 ^ ... ^ v_{n-2}) with lambda = sum u_l ^ v_l."""
    if len(v_rest) != n - 2:
        raise ValueError(f"need n - 2 = {n - 2} further words, got {len(v_rest)}")
    lam = ExteriorElement(2, n)
    for u, v in v0_pairs:
        lam = lam + wedge(ExteriorElement.vector(abelianize(u)), ExteriorElement.vector(abelianize(v)))
    vecs = [ExteriorElement.vector(abelianize(v)) for v in v_rest]
    return top_det(wedge(lam, _wedge_all(vecs, n)))


def mod2_cycles(P: Presentation) -> list[tuple[int, ...]]:
    """All c in (Z/2)^s with boundary(c) = 0 mod 2 (brute force over 2^s)."""
    cols = [abelianize(w) for w in P.relators]
    out = []
    for c in product((0, 1), repeat=P.s):
        if all(sum(ci * col[g] for ci, col in zip(c, cols)) % 2 == 0 for g in range(P.n)):
            out.append(c)
    return out
