"""Pure-Python reference kernels.

Every function here has a compiled twin in ``_ckernels.pyx`` with the same
signature and the same results; the benchmark compares the two.
"""
import numpy as np

NAME = "python"


def bool_matmul(a, b):
    n, k = a.shape
    k2, m = b.shape
    if k != k2:
        raise ValueError(f"inner dimensions differ: {k} vs {k2}")
    al = a.tolist()
    bl = b.tolist()
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        row = out[i]
        for j in range(k):
            if al[i][j]:
                bj = bl[j]
                for c in range(m):
                    if bj[c]:
                        row[c] = 1
    return np.array(out, dtype=np.uint8).reshape(n, m)


def int_matmul(a, b):
    """Product of int64 matrices; caller guarantees no overflow."""
    n, k = a.shape
    k2, m = b.shape
    if k != k2:
        raise ValueError(f"inner dimensions differ: {k} vs {k2}")
    al = a.tolist()
    bl = b.tolist()
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        row = out[i]
        for j in range(k):
            x = al[i][j]
            if x:
                bj = bl[j]
                for c in range(m):
                    row[c] += x * bj[c]
    return np.array(out, dtype=np.int64).reshape(n, m)


def seed_histogram(table, n_out):
    """counts[x, y] = #{seed | table[seed, x] == y}; -1 marks undefined."""
    n_seeds, n_in = table.shape
    tl = table.tolist()
    counts = [[0] * n_out for _ in range(n_in)]
    for rho in range(n_seeds):
        trow = tl[rho]
        for x in range(n_in):
            y = trow[x]
            if y >= 0:
                if y >= n_out:
                    raise ValueError(f"output {y} out of range {n_out}")
                counts[x][y] += 1
    return np.array(counts, dtype=np.int64).reshape(n_in, n_out)


def compose_tables(g, f):
    """Table of g after f with seed index (rho2 << r1) | rho1.

    ``f`` has shape (2**r1, n_in) with outputs indexing the columns of ``g``,
    which has shape (2**r2, n_mid).
    """
    n1, n_in = f.shape
    n2, n_mid = g.shape
    fl = f.tolist()
    gl = g.tolist()
    out = [[-1] * n_in for _ in range(n1 * n2)]
    for rho2 in range(n2):
        grow = gl[rho2]
        base = rho2 * n1
        for rho1 in range(n1):
            frow = fl[rho1]
            orow = out[base + rho1]
            for x in range(n_in):
                y = frow[x]
                if y >= 0:
                    if y >= n_mid:
                        raise ValueError(f"intermediate value {y} out of range {n_mid}")
                    orow[x] = grow[y]
    return np.array(out, dtype=np.int64).reshape(n1 * n2, n_in)
