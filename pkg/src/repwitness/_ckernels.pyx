# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled word-map kernels; same contract as ``_pykernels``."""
from libc.math cimport sqrt

import numpy as np

BACKEND = "cython"


cdef inline void qmul(const double* a, const double* b, double* out) noexcept nogil:
    cdef double w = a[0]*b[0] - a[1]*b[1] - a[2]*b[2] - a[3]*b[3]
    cdef double x = a[0]*b[1] + a[1]*b[0] + a[2]*b[3] - a[3]*b[2]
    cdef double y = a[0]*b[2] - a[1]*b[3] + a[2]*b[0] + a[3]*b[1]
    cdef double z = a[0]*b[3] + a[1]*b[2] - a[2]*b[1] + a[3]*b[0]
    out[0] = w
    out[1] = x
    out[2] = y
    out[3] = z


cdef inline void qnormalize(double* q) noexcept nogil:
    cdef double s = sqrt(q[0]*q[0] + q[1]*q[1] + q[2]*q[2] + q[3]*q[3])
    q[0] /= s
    q[1] /= s
    q[2] /= s
    q[3] /= s


cdef inline void add_rot(const double* q, double s, double[:, ::1] d, Py_ssize_t col) noexcept nogil:
    cdef double w = q[0], x = q[1], y = q[2], z = q[3]
    d[0, col] += s * (1 - 2 * (y*y + z*z))
    d[0, col + 1] += s * 2 * (x*y - w*z)
    d[0, col + 2] += s * 2 * (x*z + w*y)
    d[1, col] += s * 2 * (x*y + w*z)
    d[1, col + 1] += s * (1 - 2 * (x*x + z*z))
    d[1, col + 2] += s * 2 * (y*z - w*x)
    d[2, col] += s * 2 * (x*z - w*y)
    d[2, col + 1] += s * 2 * (y*z + w*x)
    d[2, col + 2] += s * (1 - 2 * (x*x + y*y))


cdef void load_letter(const double[:, ::1] g, long a, double* out) noexcept nogil:
    cdef Py_ssize_t i
    if a > 0:
        i = a - 1
        out[0] = g[i, 0]
        out[1] = g[i, 1]
        out[2] = g[i, 2]
        out[3] = g[i, 3]
    else:
        i = -a - 1
        out[0] = g[i, 0]
        out[1] = -g[i, 1]
        out[2] = -g[i, 2]
        out[3] = -g[i, 3]


cdef void _eval(const long[::1] letters, const double[:, ::1] g, double* q) noexcept nogil:
    cdef double h[4]
    cdef double t[4]
    cdef Py_ssize_t a
    q[0] = 1.0
    q[1] = 0.0
    q[2] = 0.0
    q[3] = 0.0
    for a in range(letters.shape[0]):
        load_letter(g, letters[a], h)
        qmul(q, h, t)
        q[0] = t[0]
        q[1] = t[1]
        q[2] = t[2]
        q[3] = t[3]
    qnormalize(q)


cdef void _jac(const long[::1] letters, const double[:, ::1] g, double* q, double[:, ::1] d) noexcept nogil:
    cdef double h[4]
    cdef double t[4]
    cdef Py_ssize_t a
    cdef long x
    q[0] = 1.0
    q[1] = 0.0
    q[2] = 0.0
    q[3] = 0.0
    for a in range(letters.shape[0]):
        x = letters[a]
        load_letter(g, x, h)
        if x > 0:
            add_rot(q, 1.0, d, 3 * (x - 1))
        qmul(q, h, t)
        q[0] = t[0]
        q[1] = t[1]
        q[2] = t[2]
        q[3] = t[3]
        if x < 0:
            add_rot(q, -1.0, d, 3 * (-x - 1))
    qnormalize(q)


def _as_letters(letters, Py_ssize_t n):
    arr = np.ascontiguousarray(letters, dtype=np.int_)
    if arr.ndim != 1:
        raise ValueError("letters must be a 1-d integer array")
    if arr.size and (np.abs(arr).max() > n or not arr.all()):
        raise ValueError(f"letters must be nonzero with |letter| <= {n}")
    return arr


def _as_tuple(g):
    arr = np.ascontiguousarray(g, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ValueError(f"expected an (n, 4) array of quaternions, got shape {arr.shape}")
    return arr


def eval_word(letters, g):
    cdef double q[4]
    cdef double[:, ::1] gv = _as_tuple(g)
    cdef long[::1] lv = _as_letters(letters, gv.shape[0])
    _eval(lv, gv, q)
    return np.array([q[0], q[1], q[2], q[3]])


def word_jacobian(letters, g):
    cdef double q[4]
    cdef double[:, ::1] gv = _as_tuple(g)
    cdef long[::1] lv = _as_letters(letters, gv.shape[0])
    out = np.zeros((3, 3 * gv.shape[0]))
    cdef double[:, ::1] d = out
    _jac(lv, gv, q, d)
    return np.array([q[0], q[1], q[2], q[3]]), out


def system(words, targets, g):
    cdef double[:, ::1] gv = _as_tuple(g)
    cdef double[:, ::1] tv = _as_tuple(targets)
    cdef Py_ssize_t n = gv.shape[0], k = len(words), c, r, col, e
    if tv.shape[0] != k:
        raise ValueError(f"{k} words but {tv.shape[0]} targets")
    res_arr = np.empty(4 * k)
    jac_arr = np.zeros((4 * k, 3 * n))
    d_arr = np.zeros((3, 3 * n))
    cdef double[::1] res = res_arr
    cdef double[:, ::1] jac = jac_arr
    cdef double[:, ::1] d = d_arr
    cdef double q[4]
    cdef double b[3][4]
    cdef double unit[4]
    cdef long[::1] lv
    for c in range(k):
        lv = _as_letters(words[c], n)
        d[:, :] = 0.0
        _jac(lv, gv, q, d)
        for r in range(4):
            res[4 * c + r] = q[r] - tv[c, r]
        for e in range(3):
            unit[0] = 0.0
            unit[1] = 0.0
            unit[2] = 0.0
            unit[3] = 0.0
            unit[e + 1] = 1.0
            qmul(unit, q, b[e])
        for r in range(4):
            for col in range(3 * n):
                jac[4 * c + r, col] = b[0][r] * d[0, col] + b[1][r] * d[1, col] + b[2][r] * d[2, col]
    return res_arr, jac_arr
