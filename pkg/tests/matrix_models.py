"""Concrete unitriangular matrix models used as independent references."""


def mat_mul(A, B):
    n = len(A)
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def eye(n):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def unit(n, entries):
    M = [list(r) for r in eye(n)]
    for (i, j), v in entries.items():
        M[i][j] += v
    return tuple(tuple(r) for r in M)


def uni_inverse(A):
    """Inverse of a unitriangular integer matrix, via the finite Neumann series."""
    n = len(A)
    N = tuple(tuple(A[i][j] - (i == j) for j in range(n)) for i in range(n))
    out, term = eye(n), eye(n)
    for k in range(1, n):
        term = mat_mul(term, N)
        sign = -1 if k % 2 else 1
        out = tuple(tuple(out[i][j] + sign * term[i][j] for j in range(n)) for i in range(n))
    return out


def mat_pow(A, e):
    if e < 0:
        A, e = uni_inverse(A), -e
    out = eye(len(A))
    for _ in range(e):
        out = mat_mul(out, A)
    return out


# H3: a1 = I + E12, a2 = I + E23, a3 = I + E13
H3_GENS = (unit(3, {(0, 1): 1}), unit(3, {(1, 2): 1}), unit(3, {(0, 2): 1}))


def h3_matrix(x):
    a, b, c = x
    return ((1, a, c + a * b), (0, 1, b), (0, 0, 1))


def h3_coords(M):
    return (M[0][1], M[1][2], M[0][2] - M[0][1] * M[1][2])


def word_matrix(gens, w):
    M = eye(len(gens[0]))
    for x in w:
        M = mat_mul(M, gens[x - 1] if x > 0 else uni_inverse(gens[-x - 1]))
    return M


# two representations of the free nilpotent group of rank 2 and class 3 in U_4;
# jointly they are faithful (checked in the tests)
F23_REPS = (
    (unit(4, {(0, 1): 1, (2, 3): 1}), unit(4, {(1, 2): 1})),
    (unit(4, {(0, 1): 1}), unit(4, {(1, 2): 1, (2, 3): 1})),
)
