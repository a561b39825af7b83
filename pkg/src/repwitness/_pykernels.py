"""Pure-Python word-map kernels (fallback for the compiled ``_ckernels``).

Quaternions are ``(w, x, y, z)``.  A word is an int array of signed 1-based
generator indices; ``g`` is an ``(n, 4)`` float array of unit quaternions.
Tangent vectors are right-trivialized: a perturbation of g_i is
``exp(t xi_i) g_i`` with xi_i pure imaginary, stored as 3 reals.
"""
from math import sqrt

import numpy as np

BACKEND = "python"


def _mul(a, b):
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def _normalize(q):
    s = sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    return (q[0] / s, q[1] / s, q[2] / s, q[3] / s)


def _rot(q):
    w, x, y, z = q
    return (
        (1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)),
        (2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)),
        (2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)),
    )


def _check(letters, n):
    for a in letters:
        if a == 0 or abs(a) > n:
            raise ValueError(f"letters must be nonzero with |letter| <= {n}")


def _gens(g):
    arr = np.asarray(g, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ValueError(f"expected an (n, 4) array of quaternions, got shape {arr.shape}")
    gs = [tuple(row) for row in arr.tolist()]
    inv = [(q[0], -q[1], -q[2], -q[3]) for q in gs]
    return gs, inv


def eval_word(letters, g):
    gs, inv = _gens(g)
    _check(letters, len(gs))
    q = (1.0, 0.0, 0.0, 0.0)
    for a in letters:
        q = _mul(q, gs[a - 1] if a > 0 else inv[-a - 1])
    return np.array(_normalize(q))


def _word_jac(letters, gs, inv, n):
    d = [[0.0] * (3 * n) for _ in range(3)]
    q = (1.0, 0.0, 0.0, 0.0)
    for a in letters:
        if a > 0:
            R = _rot(q)
            q = _mul(q, gs[a - 1])
            col, s = 3 * (a - 1), 1.0
        else:
            q = _mul(q, inv[-a - 1])
            R = _rot(q)
            col, s = 3 * (-a - 1), -1.0
        for r in range(3):
            row, Rr = d[r], R[r]
            row[col] += s * Rr[0]
            row[col + 1] += s * Rr[1]
            row[col + 2] += s * Rr[2]
    return _normalize(q), d


def word_jacobian(letters, g):
    """Value W of the word and its 3 x 3n right-trivialized differential."""
    gs, inv = _gens(g)
    _check(letters, len(gs))
    W, d = _word_jac(letters, gs, inv, len(gs))
    return np.array(W), np.array(d)


def system(words, targets, g):
    """Residuals W_c - t_c (4 per constraint) and their 4k x 3n Jacobian."""
    gs, inv = _gens(g)
    n = len(gs)
    k = len(words)
    res = np.empty(4 * k)
    jac = np.empty((4 * k, 3 * n))
    tg = np.asarray(targets, dtype=float)
    if tg.shape != (k, 4):
        raise ValueError(f"{k} words need a ({k}, 4) target array, got shape {tg.shape}")
    for c, letters in enumerate(words):
        _check(letters, n)
        W, d = _word_jac(letters, gs, inv, n)
        res[4 * c:4 * c + 4] = (W[0] - tg[c, 0], W[1] - tg[c, 1], W[2] - tg[c, 2], W[3] - tg[c, 3])
        # d(W) = delta * W for pure imaginary delta = d @ xi
        B = np.array([_mul(e, W) for e in ((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))]).T
        jac[4 * c:4 * c + 4] = B @ np.array(d)
    return res, jac
