"""Exact linear algebra: Smith invariants over Z, elimination over F_2."""

from __future__ import annotations

import numpy as np


def smith_invariants(M) -> list:
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix."""
    A = [[int(x) for x in row] for row in np.asarray(M, dtype=object).tolist()]
    if not A or not A[0]:
        return []
    rows, cols = len(A), len(A[0])
    out = []
    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero absolute value in the remaining block
        piv = None
        for i in range(t, rows):
            for j in range(t, cols):
                if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, rows):
                if A[i][t]:
                    q = A[i][t] // p
                    if q:
                        A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    if A[i][t]:
                        done = False
            for j in range(t + 1, cols):
                if A[t][j]:
                    q = A[t][j] // p
                    if q:
                        for row in A:
                            row[j] -= q * row[t]
                    if A[t][j]:
                        done = False
            if not done:
                # move the smallest remainder into the pivot position
                best = (abs(p), t, t)
                for i in range(t + 1, rows):
                    if A[i][t] and abs(A[i][t]) < best[0]:
                        best = (abs(A[i][t]), i, t)
                for j in range(t + 1, cols):
                    if A[t][j] and abs(A[t][j]) < best[0]:
                        best = (abs(A[t][j]), t, j)
                _, i, j = best
                A[t], A[i] = A[i], A[t]
                for row in A:
                    row[t], row[j] = row[j], row[t]
                continue
            # divisibility: the pivot must divide every remaining entry
            bad = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if A[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad])]
        out.append(abs(A[t][t]))
        t += 1
    return out


def rank_z(M) -> int:
    return len(smith_invariants(M))


def _rows_as_ints(M) -> list:
    M = np.asarray(M)
    out = []
    for row in M.tolist():
        v = 0
        for j, x in enumerate(row):
            if int(x) % 2:
                v |= 1 << j
        out.append(v)
    return out


def rank_f2(M) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(_echelon(_rows_as_ints(M)))


def _echelon(rows: list) -> list:
    """Reduced basis of the F_2 row space as pivot-distinct ints."""
    basis: dict = {}
    for r in rows:
        while r:
            h = r.bit_length() - 1
            if h in basis:
                r ^= basis[h]
            else:
                basis[h] = r
                break
    return list(basis.values())


def to_f2(M) -> np.ndarray:
    return (np.asarray(M, dtype=np.int64) % 2).astype(np.uint8)


def matmul_f2(A, B) -> np.ndarray:
    return (np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64) % 2).astype(np.uint8)


def nullspace_f2(M) -> np.ndarray:
    """Basis of {x : M x = 0} over F_2, as the columns of the returned matrix."""
    M = to_f2(M)
    rows, cols = M.shape
    A = M.copy()
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] ^= A[r]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        x = np.zeros(cols, dtype=np.uint8)
        x[f] = 1
        for i, pc in enumerate(pivots):
            if A[i, f]:
                x[pc] = 1
        basis.append(x)
    if not basis:
        return np.zeros((cols, 0), dtype=np.uint8)
    return np.array(basis, dtype=np.uint8).T


def in_span_f2(basis_rows: list, v: int) -> bool:
    for b in sorted(basis_rows, reverse=True):
        if v ^ b < v:
            v ^= b
    return v == 0


def column_ints(M) -> list:
    return _rows_as_ints(np.asarray(M).T)
