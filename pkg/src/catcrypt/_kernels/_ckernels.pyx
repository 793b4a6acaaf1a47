# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see _pykernels.py for the reference semantics."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

NAME = "cython"


def bool_matmul(const cnp.uint8_t[:, :] a, const cnp.uint8_t[:, :] b):
    cdef Py_ssize_t n = a.shape[0], k = a.shape[1], m = b.shape[1]
    cdef Py_ssize_t i, j, c
    if k != b.shape[0]:
        raise ValueError(f"inner dimensions differ: {k} vs {b.shape[0]}")
    out = np.zeros((n, m), dtype=np.uint8)
    cdef cnp.uint8_t[:, :] o = out
    for i in range(n):
        for j in range(k):
            if a[i, j]:
                for c in range(m):
                    if b[j, c]:
                        o[i, c] = 1
    return out


def int_matmul(const cnp.int64_t[:, :] a, const cnp.int64_t[:, :] b):
    cdef Py_ssize_t n = a.shape[0], k = a.shape[1], m = b.shape[1]
    cdef Py_ssize_t i, j, c
    cdef cnp.int64_t x
    if k != b.shape[0]:
        raise ValueError(f"inner dimensions differ: {k} vs {b.shape[0]}")
    out = np.zeros((n, m), dtype=np.int64)
    cdef cnp.int64_t[:, :] o = out
    for i in range(n):
        for j in range(k):
            x = a[i, j]
            if x != 0:
                for c in range(m):
                    o[i, c] += x * b[j, c]
    return out


def seed_histogram(const cnp.int64_t[:, :] table, Py_ssize_t n_out):
    cdef Py_ssize_t n_seeds = table.shape[0], n_in = table.shape[1]
    cdef Py_ssize_t rho, x
    cdef cnp.int64_t y
    out = np.zeros((n_in, n_out), dtype=np.int64)
    cdef cnp.int64_t[:, :] o = out
    for rho in range(n_seeds):
        for x in range(n_in):
            y = table[rho, x]
            if y >= 0:
                if y >= n_out:
                    raise ValueError(f"output {y} out of range {n_out}")
                o[x, y] += 1
    return out


def compose_tables(const cnp.int64_t[:, :] g, const cnp.int64_t[:, :] f):
    cdef Py_ssize_t n1 = f.shape[0], n_in = f.shape[1]
    cdef Py_ssize_t n2 = g.shape[0], n_mid = g.shape[1]
    cdef Py_ssize_t rho1, rho2, x, base
    cdef cnp.int64_t y
    out = np.full((n1 * n2, n_in), -1, dtype=np.int64)
    cdef cnp.int64_t[:, :] o = out
    for rho2 in range(n2):
        base = rho2 * n1
        for rho1 in range(n1):
            for x in range(n_in):
                y = f[rho1, x]
                if y >= 0:
                    if y >= n_mid:
                        raise ValueError(f"intermediate value {y} out of range {n_mid}")
                    o[base + rho1, x] = g[rho2, y]
    return out
