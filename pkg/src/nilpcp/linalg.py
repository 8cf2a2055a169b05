"""Exact integer matrix algebra: Hermite and Smith normal forms, Diophantine solving.

Matrices are plain lists of rows of Python ints (arbitrary precision).
"""
from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

IntMatrix = List[List[int]]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> IntMatrix:
    return [[0] * cols for _ in range(rows)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> IntMatrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    if len(A[0]) != inner:
        raise ValueError(f"shape mismatch: {len(A)}x{len(A[0])} times {inner}x{cols}")
    out = zeros(len(A), cols)
    for i, row in enumerate(A):
        o = out[i]
        for k, a in enumerate(row):
            if a:
                bk = B[k]
                for j in range(cols):
                    o[j] += a * bk[j]
    return out


def matvec(A: Sequence[Sequence[int]], x: Sequence[int]) -> List[int]:
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def transpose(A: Sequence[Sequence[int]], cols: Optional[int] = None) -> IntMatrix:
    if not A:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*A)]


def det(A: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def hermite_normal_form(M: Sequence[Sequence[int]]) -> Tuple[IntMatrix, IntMatrix]:
    """Row Hermite normal form.

    Returns ``(H, U)`` with ``U`` unimodular and ``U @ M == H``. Pivots of ``H``
    are positive and the entries above each pivot lie in ``[0, pivot)``.
    """
    rows = len(M)
    cols = len(M[0]) if rows else 0
    H = [list(r) for r in M]
    U = identity(rows)
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        while True:
            nz = [i for i in range(r, rows) if H[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[p] = H[p], H[r]
            U[r], U[p] = U[p], U[r]
            done = True
            for i in range(r + 1, rows):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    _row_axpy(H, i, r, -q)
                    _row_axpy(U, i, r, -q)
                    if H[i][c]:
                        done = False
            if done:
                break
        if r < rows and H[r][c]:
            if H[r][c] < 0:
                H[r] = [-x for x in H[r]]
                U[r] = [-x for x in U[r]]
            piv = H[r][c]
            for i in range(r):
                q = H[i][c] // piv
                if q:
                    _row_axpy(H, i, r, -q)
                    _row_axpy(U, i, r, -q)
            pivots.append(c)
            r += 1
    return H, U


def _row_axpy(A: IntMatrix, dst: int, src: int, k: int) -> None:
    a, b = A[dst], A[src]
    for j in range(len(a)):
        a[j] += k * b[j]


def _col_axpy(A: IntMatrix, dst: int, src: int, k: int) -> None:
    for row in A:
        row[dst] += k * row[src]


def _swap_cols(A: IntMatrix, i: int, j: int) -> None:
    for row in A:
        row[i], row[j] = row[j], row[i]


def smith_normal_form(M: Sequence[Sequence[int]]) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form ``(S, U, V)`` with ``U @ M @ V == S``.

    ``S`` is diagonal with non-negative entries d1 | d2 | ... ; ``U`` and ``V``
    are unimodular.
    """
    rows = len(M)
    cols = len(M[0]) if rows else 0
    S = [list(r) for r in M]
    U = identity(rows)
    V = identity(cols)
    t = 0
    while t < min(rows, cols):
        entries = [(abs(S[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if S[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        S[t], S[pi] = S[pi], S[t]
        U[t], U[pi] = U[pi], U[t]
        _swap_cols(S, t, pj)
        _swap_cols(V, t, pj)
        while True:
            changed = False
            for i in range(t + 1, rows):
                if S[i][t]:
                    q = S[i][t] // S[t][t]
                    _row_axpy(S, i, t, -q)
                    _row_axpy(U, i, t, -q)
                    if S[i][t]:
                        changed = True
            for j in range(t + 1, cols):
                if S[t][j]:
                    q = S[t][j] // S[t][t]
                    _col_axpy(S, j, t, -q)
                    _col_axpy(V, j, t, -q)
                    if S[t][j]:
                        changed = True
            if changed:
                # move the smallest nonzero entry of row/col t onto the diagonal
                cand = [(abs(S[i][t]), i, t) for i in range(t, rows) if S[i][t]]
                cand += [(abs(S[t][j]), t, j) for j in range(t, cols) if S[t][j]]
                _, i, j = min(cand)
                if i != t:
                    S[t], S[i] = S[i], S[t]
                    U[t], U[i] = U[i], U[t]
                if j != t:
                    _swap_cols(S, t, j)
                    _swap_cols(V, t, j)
                continue
            # divisibility: the pivot must divide every remaining entry
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if S[i][j] % S[t][t]), None)
            if bad is None:
                break
            _row_axpy(S, t, bad[0], 1)
            _row_axpy(U, t, bad[0], 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return S, U, V


def elementary_divisors(M: Sequence[Sequence[int]]) -> List[int]:
    S, _, _ = smith_normal_form(M)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0)) if S[i][i]]


def solve_diophantine(A: Sequence[Sequence[int]], b: Sequence[int]
                      ) -> Optional[Tuple[List[int], List[List[int]]]]:
    """Integer solutions of ``A x = b``.

    Returns ``(particular, basis)`` where every solution is ``particular`` plus an
    integer combination of ``basis`` (a basis of the kernel lattice), or ``None``
    when no integer solution exists.
    """
    rows = len(A)
    if rows != len(b):
        raise ValueError("right-hand side length does not match the number of rows")
    cols = len(A[0]) if rows else 0
    if rows == 0:
        return [0] * cols, identity(cols)
    S, U, V = smith_normal_form(A)
    c = matvec(U, b)
    y = [0] * cols
    rank = 0
    for i in range(min(rows, cols)):
        d = S[i][i]
        if d == 0:
            break
        if c[i] % d:
            return None
        y[i] = c[i] // d
        rank += 1
    if any(c[i] for i in range(rank, rows)):
        return None
    x = matvec(V, y)
    basis = [[V[r][j] for r in range(cols)] for j in range(rank, cols)]
    return x, basis
