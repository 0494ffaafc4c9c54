"""
Exact integer linear algebra.

Matrices come in as any nested sequence of ints and go out as tuples of
tuples. Python ints are arbitrary precision, so Smith and Hermite
intermediate entries never overflow.
"""

from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

from errors import LinalgError
from models import IntMatrix, IntVector, SmithDecomposition

Rows = List[List[int]]


def _rows(A: Sequence[Sequence[int]]) -> Rows:
    rows = [[int(x) for x in row] for row in A]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise LinalgError("matrix is not rectangular")
    return rows


def _freeze(rows: Rows) -> IntMatrix:
    return tuple(tuple(r) for r in rows)


def identity(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(A: Sequence[Sequence[int]]) -> IntMatrix:
    rows = _rows(A)
    if not rows:
        return ()
    return tuple(tuple(rows[i][j] for i in range(len(rows))) for j in range(len(rows[0])))


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> IntMatrix:
    a, b = _rows(A), _rows(B)
    if a and len(a[0]) != len(b):
        raise LinalgError(f"shape mismatch: {len(a)}x{len(a[0])} times {len(b)}x?")
    cols = list(zip(*b)) if b else []
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def matvec(A: Sequence[Sequence[int]], v: Sequence[int]) -> IntVector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in A)


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(u, v))


def gcd_list(values: Sequence[int]) -> int:
    g = 0
    for x in values:
        g = gcd(g, int(x))
    return g


def primitive(v: Sequence[int]) -> IntVector:
    """Divide v by the gcd of its coordinates; the sign is kept."""
    g = gcd_list(v)
    if g == 0:
        raise LinalgError("no primitive representative for the zero vector")
    return tuple(int(x) // g for x in v)


def hnf(A: Sequence[Sequence[int]]) -> Tuple[IntMatrix, IntMatrix]:
    """Row Hermite normal form.

    Args:
        A: a nonempty integer matrix.

    Returns:
        (H, U) with U unimodular and U.A = H. Pivots of H are positive, the
        entries above each pivot lie in [0, pivot) and zero rows are last.
    """
    M = _rows(A)
    if not M or not M[0]:
        raise LinalgError("hnf of an empty matrix")
    m, n = len(M), len(M[0])
    U = [list(r) for r in identity(m)]
    p = 0
    for j in range(n):
        if p == m:
            break
        while True:
            live = [i for i in range(p, m) if M[i][j] != 0]
            if not live:
                break
            k = min(live, key=lambda i: abs(M[i][j]))
            if k != p:
                M[p], M[k] = M[k], M[p]
                U[p], U[k] = U[k], U[p]
            if len(live) == 1:
                break
            for i in range(p + 1, m):
                if M[i][j] != 0:
                    q = M[i][j] // M[p][j]
                    M[i] = [x - q * y for x, y in zip(M[i], M[p])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[p])]
        if M[p][j] == 0:
            continue
        if M[p][j] < 0:
            M[p] = [-x for x in M[p]]
            U[p] = [-x for x in U[p]]
        for i in range(p):
            q = M[i][j] // M[p][j]
            if q:
                M[i] = [x - q * y for x, y in zip(M[i], M[p])]
                U[i] = [x - q * y for x, y in zip(U[i], U[p])]
        p += 1
    return _freeze(M), _freeze(U)


def _min_nonzero(S: Rows, t: int) -> Optional[Tuple[int, int]]:
    best = None
    for i in range(t, len(S)):
        for j in range(t, len(S[0])):
            if S[i][j] != 0 and (best is None or abs(S[i][j]) < abs(S[best[0]][best[1]])):
                best = (i, j)
    return best


def snf(A: Sequence[Sequence[int]]) -> SmithDecomposition:
    """Smith normal form U.A.V = S with U, V unimodular.

    The diagonal of S is the divisibility chain of invariant factors, with
    any zeros at the tail.
    """
    S = _rows(A)
    if not S or not S[0]:
        raise LinalgError("snf of an empty matrix")
    m, n = len(S), len(S[0])
    U = [list(r) for r in identity(m)]
    V = [list(r) for r in identity(n)]

    def swap_rows(a: int, b: int) -> None:
        S[a], S[b] = S[b], S[a]
        U[a], U[b] = U[b], U[a]

    def swap_cols(a: int, b: int) -> None:
        for row in S:
            row[a], row[b] = row[b], row[a]
        for row in V:
            row[a], row[b] = row[b], row[a]

    def add_row(dst: int, src: int, q: int) -> None:
        S[dst] = [x + q * y for x, y in zip(S[dst], S[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst: int, src: int, q: int) -> None:
        for row in S:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        pos = _min_nonzero(S, t)
        if pos is None:
            break
        swap_rows(t, pos[0])
        swap_cols(t, pos[1])
        while True:
            clean = True
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // S[t][t]))
                    clean = clean and S[i][t] == 0
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // S[t][t]))
                    clean = clean and S[t][j] == 0
            if not clean:
                # a smaller remainder appeared in row or column t; pivot on it
                cands = [(i, t) for i in range(t, m) if S[i][t]] + [(t, j) for j in range(t, n) if S[t][j]]
                i, j = min(cands, key=lambda c: abs(S[c[0]][c[1]]))
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % S[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]

    factors = tuple(S[i][i] for i in range(min(m, n)))
    return SmithDecomposition(U=_freeze(U), S=_freeze(S), V=_freeze(V), invariant_factors=factors)


def rank(A: Sequence[Sequence[int]]) -> int:
    rows = _rows(A)
    if not rows or not rows[0]:
        return 0
    H, _ = hnf(rows)
    return sum(1 for r in H if any(r))


def determinant(A: Sequence[Sequence[int]]) -> int:
    """Fraction-free Bareiss elimination."""
    M = _rows(A)
    n = len(M)
    if any(len(r) != n for r in M):
        raise LinalgError("determinant of a non-square matrix")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def cross_normal(vectors: Sequence[Sequence[int]]) -> IntVector:
    """Generalized cross product of d-1 vectors in Z^d (cofactor expansion)."""
    rows = _rows(vectors)
    d = len(rows) + 1
    if any(len(r) != d for r in rows):
        raise LinalgError("cross_normal needs d-1 vectors of length d")
    if d == 2:
        return (-rows[0][1], rows[0][0])
    if d == 3:
        (a1, a2, a3), (b1, b2, b3) = rows
        return (a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1)
    out = []
    for i in range(d):
        minor = [r[:i] + r[i + 1:] for r in rows]
        out.append((-1) ** i * determinant(minor))
    return tuple(out)


def cokernel_invariants(A: Sequence[Sequence[int]]) -> Tuple[int, Tuple[int, ...]]:
    """Structure of Z^m / A.Z^n as (free rank, torsion factors > 1)."""
    rows = _rows(A)
    m = len(rows)
    if m == 0:
        return 0, ()
    if not rows[0]:
        return m, ()
    factors = snf(rows).invariant_factors
    nonzero = [f for f in factors if f != 0]
    return m - len(nonzero), tuple(f for f in nonzero if f > 1)


def kernel_basis(A: Sequence[Sequence[int]]) -> IntMatrix:
    """Integer basis of {x : A.x = 0}, one vector per row."""
    rows = _rows(A)
    dec = snf(rows)
    r = sum(1 for f in dec.invariant_factors if f != 0)
    n = len(rows[0])
    return tuple(tuple(dec.V[i][j] for i in range(n)) for j in range(r, n))


def solve_integer(A: Sequence[Sequence[int]], b: Sequence[int]) -> Optional[IntVector]:
    """An integer x with A.x = b, or None when no integer solution exists."""
    rows = _rows(A)
    dec = snf(rows)
    m, n = len(rows), len(rows[0])
    c = matvec(dec.U, b)
    y = [0] * n
    for i in range(m):
        s = dec.invariant_factors[i] if i < min(m, n) else 0
        if s == 0:
            if c[i] != 0:
                return None
            continue
        if c[i] % s:
            return None
        y[i] = c[i] // s
    return matvec(dec.V, y)


def solve_rational(A: Sequence[Sequence[int]], b: Sequence[int]) -> Tuple[Fraction, ...]:
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(_rows(A), b)]
    if any(len(r) != n + 1 for r in M):
        raise LinalgError("solve_rational needs a square system")
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k] != 0), None)
        if piv is None:
            raise LinalgError("matrix is singular")
        M[k], M[piv] = M[piv], M[k]
        inv = 1 / M[k][k]
        M[k] = [x * inv for x in M[k]]
        for i in range(n):
            if i != k and M[i][k] != 0:
                f = M[i][k]
                M[i] = [x - f * y for x, y in zip(M[i], M[k])]
    return tuple(M[i][n] for i in range(n))


def unimodular_inverse(U: Sequence[Sequence[int]]) -> IntMatrix:
    rows = _rows(U)
    n = len(rows)
    if abs(determinant(rows)) != 1:
        raise LinalgError("matrix is not unimodular")
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        x = solve_rational(rows, e)
        cols.append([int(v) for v in x])
    return transpose(cols)
