"""Brute-force oracles and random generators shared by the test modules.

Oracles here never call the SNF-based code paths they check.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from destackify.chart import Chart, DivisorLabel
from destackify.divisorialify import Atlas
from destackify.ktheory import HModule
from destackify.zlinalg import FinAbGroup

# ---------------------------------------------------------------------------
# group oracles


def span(m: FinAbGroup, gens) -> set[tuple[int, ...]]:
    """The subgroup generated by ``gens``, by closure."""
    seen = {m.zero()}
    frontier = [m.zero()]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple((a + b) % d for a, b, d in zip(x, g, m.invariant_factors))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def cosets(m: FinAbGroup, gens) -> int:
    h = span(m, gens)
    reps = set()
    for x in m.elements():
        reps.add(min(tuple((a + b) % d for a, b, d in zip(x, y, m.invariant_factors)) for y in h))
    return len(reps)


def pairing(a, chi, factors) -> Fraction:
    return sum((Fraction(x * y, d) for x, y, d in zip(a, chi, factors)), Fraction(0)) % 1


def divisorial_index_oracle(c: Chart, nonzero) -> int:
    """Count coordinates on which the relative stabilizer acts nontrivially.

    The relative stabilizer K is enumerated inside the dual group
    ``A = ⊕ Z/d_i`` as the common kernel of the characters of coordinates
    that are nonzero at the point or carry a divisor.
    """
    f = c.group.invariant_factors
    killed = set(nonzero) | set(c.divisor_coords)
    k = [
        a
        for a in itertools.product(*(range(d) for d in f))
        if all(pairing(a, c.characters[j], f) == 0 for j in killed)
    ]
    return sum(1 for chi in c.characters if any(pairing(a, chi, f) != 0 for a in k))


def codim_oracle(c: Chart, nonzero) -> int:
    f = c.group.invariant_factors
    k = [
        a
        for a in itertools.product(*(range(d) for d in f))
        if all(pairing(a, c.characters[j], f) == 0 for j in nonzero)
    ]
    return sum(1 for chi in c.characters if any(pairing(a, chi, f) != 0 for a in k))


def hilbert_basis_oracle(c: Chart, bound: int | None = None) -> list[tuple[int, ...]]:
    """Minimal nonzero invariant exponent vectors in the box ``[0, |M|]^n``."""
    m = c.group
    b = m.order if bound is None else bound
    inv = []
    for v in itertools.product(range(b + 1), repeat=c.dim):
        if not any(v):
            continue
        total = m.zero()
        for t, chi in zip(v, c.characters):
            total = tuple((x + t * y) % d for x, y, d in zip(total, chi, m.invariant_factors))
        if not any(total):
            inv.append(v)
    minimal = [v for v in inv if not any(u != v and all(a <= b_ for a, b_ in zip(u, v)) for u in inv)]
    return sorted(minimal, reverse=True)


# ---------------------------------------------------------------------------
# F_p oracles


def gl_elements(n: int, p: int):
    for entries in itertools.product(range(p), repeat=n * n):
        g = [list(entries[i * n : (i + 1) * n]) for i in range(n)]
        if _det_mod(g, p):
            yield g


def _det_mod(a, p):
    n = len(a)
    if n == 0:
        return 1
    if n == 1:
        return a[0][0] % p
    return sum(
        (-1) ** j * a[0][j] * _det_mod([row[:j] + row[j + 1 :] for row in a[1:]], p) for j in range(n)
    ) % p


def _mul(a, b, p):
    n = len(b)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) % p for j in range(len(b[0]))] for i in range(len(a))]


def similar_oracle(a, b, p) -> bool:
    """Search GL_n(F_p) for ``g`` with ``g a = b g``."""
    a = [[x % p for x in r] for r in a]
    b = [[x % p for x in r] for r in b]
    return any(_mul(g, a, p) == _mul(b, g, p) for g in gl_elements(len(a), p))


# ---------------------------------------------------------------------------
# random data


def random_group(rng: random.Random, max_order: int, max_rank: int = 3) -> FinAbGroup:
    while True:
        orders = [rng.randint(1, max_order) for _ in range(rng.randint(1, max_rank))]
        if math.prod(orders) <= max_order:
            break
    from destackify.zlinalg import present

    return present(orders).group


def random_chart(
    rng: random.Random, dim: int, max_order: int, divisor_prob: float = 0.3, zero_prob: float = 0.15
) -> Chart:
    m = random_group(rng, max_order)
    chars = []
    for _ in range(dim):
        if rng.random() < zero_prob:
            chars.append(m.zero())
        else:
            chars.append(tuple(rng.randrange(d) for d in m.invariant_factors))
    coords = [i for i in range(dim) if rng.random() < divisor_prob]
    keys = rng.sample(range(10), len(coords))
    divs = tuple((DivisorLabel((k,), f"D{k}"), i) for k, i in zip(keys, coords))
    return Chart(m, tuple(chars), divs)


def random_atlas(rng: random.Random, max_dim: int = 4, max_order: int = 60, max_charts: int = 4) -> Atlas:
    d = rng.randint(1, max_dim)
    return Atlas([(f"c{k}", random_chart(rng, d, max_order)) for k in range(rng.randint(1, max_charts))])


# automorphisms of (Z/q)^n and of general p-groups, columns = images of generators


def _reduce(d, x):
    return [[v % d[i] for v in row] for i, row in enumerate(x)]


def compose(d, x, y):
    n = len(d)
    return _reduce(d, [[sum(x[i][k] * y[k][j] for k in range(n)) for j in range(n)] for i in range(n)])


def is_automorphism(d, x) -> bool:
    n = len(d)
    if any(x[i][j] * d[j] % d[i] for i in range(n) for j in range(n)):
        return False
    m = FinAbGroup(tuple(d))
    cols = [tuple(x[i][j] % d[i] for i in range(n)) for j in range(n)]
    return len(span(m, cols)) == m.order


def automorphism_order(d, x, cap: int = 10_000) -> int:
    n = len(d)
    ident = _reduce(d, [[int(i == j) for j in range(n)] for i in range(n)])
    y = _reduce(d, x)
    for k in range(1, cap):
        if y == ident:
            return k
        y = compose(d, y, x)
    raise AssertionError("automorphism order too large")


def inverse(d, x):
    o = automorphism_order(d, x)
    y = _reduce(d, [[int(i == j) for j in range(len(d))] for i in range(len(d))])
    for _ in range(o - 1):
        y = compose(d, y, x)
    return y


def random_automorphism(rng: random.Random, d) -> list[list[int]]:
    n = len(d)
    while True:
        x = [
            [rng.randrange(0, d[i], d[i] // math.gcd(d[i], d[j])) for j in range(n)]
            for i in range(n)
        ]
        if is_automorphism(d, x):
            return x


def _block_diag(blocks, n):
    out = [[0] * n for _ in range(n)]
    pos = 0
    for b in blocks:
        for i, row in enumerate(b):
            out[pos + i][pos : pos + len(b)] = row
        pos += len(b)
    return out


def random_order_h_block(rng: random.Random, size: int, q: int, p: int, h: int):
    """A block on (Z/q)^size of order dividing ``h``."""
    kinds = ["scalar", "perm"]
    if h % p == 0 and size >= 2 and q > 1:
        kinds.append("unipotent")
    kind = rng.choice(kinds)
    if kind == "perm":
        lengths = [length for length in range(1, size + 1) if h % length == 0]
        length = rng.choice(lengths)
        b = [[int(i == j) for j in range(size)] for i in range(size)]
        for i in range(length):
            b[i] = [0] * size
        for i in range(length):
            b[(i + 1) % length][i] = 1
        return b
    if kind == "unipotent":
        b = [[int(i == j) for j in range(size)] for i in range(size)]
        b[1][0] = q // p * rng.randint(1, p - 1) if q > p else rng.randint(1, p - 1)
        if h % q == 0:
            b[1][0] = rng.randint(1, q - 1)
        return b
    units = [u for u in range(1, q) if math.gcd(u, q) == 1 and pow(u, h, q) == 1 % q] or [1]
    u = rng.choice(units)
    return [[u if i == j else 0 for j in range(size)] for i in range(size)]


def random_equal_divisor_module(rng: random.Random) -> HModule:
    """``(Z/q)^n`` plus a prime-to-p part, with an action of order dividing ``h``."""
    p = rng.choice([2, 3, 5])
    e = rng.randint(1, 2)
    q = p**e
    n = rng.randint(1, 3)
    h = rng.choice([p, p * 2, q, 2 * q, p * 3] if p != 3 else [3, 6, q, 2 * q])
    blocks = []
    remaining = n
    while remaining:
        size = rng.randint(1, remaining)
        blocks.append(random_order_h_block(rng, size, q, p, h))
        remaining -= size
    sigma = _block_diag(blocks, n)
    d = [q] * n
    g = random_automorphism(rng, d)
    act = compose(d, compose(d, g, sigma), inverse(d, g))
    # prime-to-p summand, acted on by a unit of order dividing h
    extra = rng.choice([[], [7], [2] if p != 2 else [3], [5] if p != 5 else [7]])
    orders = d + extra
    full = [row + [0] * len(extra) for row in act]
    for k, o in enumerate(extra):
        units = [u for u in range(1, o) if pow(u, h, o) == 1]
        full.append([0] * n + [rng.choice(units) if j == k else 0 for j in range(len(extra))])
    return HModule.from_orders(orders, full, p, h)


def random_p_group_module(rng: random.Random) -> HModule:
    """A p-group with mixed elementary divisors and an action of order dividing ``h``."""
    p = rng.choice([2, 3])
    exps = sorted(rng.choice([[1, 2], [1, 1, 2], [1, 2, 2], [2, 3], [1, 3]]))
    d = [p**e for e in exps]
    h = rng.choice([p, p * p, 2 * p if p == 3 else 6, 2 * 3 if p == 2 else 2])
    # block diagonal on homogeneous components
    blocks = []
    for e in sorted(set(exps)):
        size = exps.count(e)
        blocks.append(random_order_h_block(rng, size, p**e, p, h))
    sigma = _block_diag(blocks, len(d))
    if h % p == 0 and rng.random() < 0.5:
        # wild-type coupling: first generator picks up a multiple of p in the last
        top = len(d) - 1
        if d[top] > d[0]:
            sigma[top][0] = (sigma[top][0] + d[top] // d[0] * rng.randint(1, p - 1)) % d[top]
            if automorphism_order(d, sigma) and h % automorphism_order(d, sigma):
                sigma[top][0] = 0
    g = random_automorphism(rng, d)
    act = compose(d, compose(d, g, sigma), inverse(d, g))
    assert h % automorphism_order(d, act) == 0
    return HModule(FinAbGroup(tuple(d)), tuple(map(tuple, act)), p, h)


WILD = HModule(FinAbGroup((3, 9)), ((1, 0), (3, 1)), 3, 3)


def charpoly_oracle(a, p) -> list[int]:
    """``det(xI - A)`` over F_p by cofactor expansion; coefficients lowest first."""

    def padd(f, g):
        out = [0] * max(len(f), len(g))
        for i, c in enumerate(f):
            out[i] += c
        for i, c in enumerate(g):
            out[i] += c
        return [c % p for c in out]

    def pmul(f, g):
        out = [0] * (len(f) + len(g) - 1) if f and g else []
        for i, x in enumerate(f):
            for j, y in enumerate(g):
                out[i + j] = (out[i + j] + x * y) % p
        return out

    def det(m):
        if not m:
            return [1]
        total = [0]
        for j, entry in enumerate(m[0]):
            minor = [row[:j] + row[j + 1 :] for row in m[1:]]
            term = pmul(entry, det(minor))
            if j % 2:
                term = [-c % p for c in term]
            total = padd(total, term)
        return total

    n = len(a)
    m = [[[(-a[i][j]) % p, 1] if i == j else [(-a[i][j]) % p] for j in range(n)] for i in range(n)]
    out = det(m)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out
