"""Similarity of matrices over F_p via the Frobenius (rational canonical) form.

Polynomials are coefficient tuples, lowest degree first, with no trailing
zeros; the zero polynomial is ``()``.
"""

from __future__ import annotations

from typing import Sequence

from .errors import InputError

Poly = tuple[int, ...]
FpMatrix = list[list[int]]


def _trim(c: Sequence[int], p: int) -> Poly:
    c = [x % p for x in c]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def deg(a: Poly) -> int:
    return len(a) - 1


def padd(a: Poly, b: Poly, p: int) -> Poly:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)], p)


def pscale(a: Poly, s: int, p: int) -> Poly:
    return _trim([s * x for x in a], p)


def pmul(a: Poly, b: Poly, p: int) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out, p)


def pdivmod(a: Poly, b: Poly, p: int) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, p)
    r = list(a)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        f = r[-1] * inv % p
        q[shift] = f
        for i, y in enumerate(b):
            r[shift + i] = (r[shift + i] - f * y) % p
        r = list(_trim(r, p))
    return _trim(q, p), tuple(r)


def monic(a: Poly, p: int) -> Poly:
    return pscale(a, pow(a[-1], -1, p), p) if a else a


def char_matrix(a: Sequence[Sequence[int]], p: int) -> list[list[Poly]]:
    """``x I - A`` as a matrix of polynomials."""
    n = len(a)
    return [[_trim([-a[i][j]] + ([1] if i == j else []), p) for j in range(n)] for i in range(n)]


def invariant_factors(a: Sequence[Sequence[int]], p: int) -> list[Poly]:
    """Nonconstant invariant factors of ``x I - A`` over F_p[x], each dividing the next."""
    s = char_matrix(a, p)
    n = len(s)
    for t in range(n):
        nonzero = [(deg(s[i][j]), i, j) for i in range(t, n) for j in range(t, n) if s[i][j]]
        if not nonzero:
            break
        _, i0, j0 = min(nonzero)
        s[t], s[i0] = s[i0], s[t]
        for row in s:
            row[t], row[j0] = row[j0], row[t]
        while True:
            for i in range(t + 1, n):
                if s[i][t]:
                    q, _ = pdivmod(s[i][t], s[t][t], p)
                    s[i] = [padd(x, pscale(pmul(q, y, p), -1, p), p) for x, y in zip(s[i], s[t])]
            for j in range(t + 1, n):
                if s[t][j]:
                    q, _ = pdivmod(s[t][j], s[t][t], p)
                    for row in s:
                        row[j] = padd(row[j], pscale(pmul(q, row[t], p), -1, p), p)
            rest = [(deg(s[i][t]), i, t) for i in range(t + 1, n) if s[i][t]]
            rest += [(deg(s[t][j]), t, j) for j in range(t + 1, n) if s[t][j]]
            if rest:
                _, i0, j0 = min(rest)
                s[t], s[i0] = s[i0], s[t]
                for row in s:
                    row[t], row[j0] = row[j0], row[t]
                continue
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, n) if pdivmod(s[i][j], s[t][t], p)[1]),
                None,
            )
            if bad is None:
                break
            s[t] = [padd(x, y, p) for x, y in zip(s[t], s[bad])]
    diag = [monic(s[i][i], p) for i in range(n)]
    return [f for f in diag if deg(f) >= 1]


def companion(f: Poly, p: int) -> FpMatrix:
    """Companion matrix of a monic polynomial (ones on the subdiagonal)."""
    k = deg(f)
    m = [[0] * k for _ in range(k)]
    for i in range(1, k):
        m[i][i - 1] = 1
    for i in range(k):
        m[i][k - 1] = (-f[i]) % p
    return m


def frobenius_form(a: Sequence[Sequence[int]], p: int) -> tuple[list[Poly], FpMatrix]:
    """Invariant factors and the block-diagonal companion matrix of ``A`` over F_p."""
    factors = invariant_factors(a, p)
    n = len(a)
    out = [[0] * n for _ in range(n)]
    pos = 0
    for f in factors:
        block = companion(f, p)
        for i, row in enumerate(block):
            out[pos + i][pos : pos + len(row)] = row
        pos += len(block)
    if pos != n:
        raise AssertionError("invariant factor degrees do not add up to the matrix size")
    return factors, out


def mat_mul_mod(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], p: int) -> FpMatrix:
    n = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(row[k] * b[k][j] for k in range(n)) % p for j in range(cols)] for row in a]


def mat_pow_mod(a: Sequence[Sequence[int]], e: int, p: int) -> FpMatrix:
    n = len(a)
    out = [[int(i == j) for j in range(n)] for i in range(n)]
    base = [[x % p for x in row] for row in a]
    while e:
        if e & 1:
            out = mat_mul_mod(out, base, p)
        base = mat_mul_mod(base, base, p)
        e >>= 1
    return out


def rank_mod(a: Sequence[Sequence[int]], p: int) -> int:
    m = [[x % p for x in row] for row in a]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], -1, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def similar(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], p: int) -> bool:
    if len(a) != len(b):
        raise InputError("matrices of different sizes")
    return invariant_factors(a, p) == invariant_factors(b, p)
