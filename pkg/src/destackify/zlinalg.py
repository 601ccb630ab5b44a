"""Exact integer lattice algebra.

Matrices are lists of rows of Python ints. Finite abelian groups are kept in
invariant-factor normal form and their elements are tuples reduced modulo the
invariant factors, so equality and hashing are canonical.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import InputError

IntMatrix = list[list[int]]
GroupElement = tuple[int, ...]


# ---------------------------------------------------------------------------
# plain matrix helpers


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> IntMatrix:
    return [[0] * cols for _ in range(rows)]


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> IntMatrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    if any(len(row) != inner for row in a):
        raise ValueError("shape mismatch in mat_mul")
    return [[sum(row[k] * b[k][j] for k in range(inner)) for j in range(cols)] for row in a]


def mat_vec(a: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
    if not a:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*a)]


def columns_to_matrix(cols: Sequence[Sequence[int]], rows: int) -> IntMatrix:
    """Stack column vectors side by side into a rows x len(cols) matrix."""
    return [[c[i] for c in cols] for i in range(rows)]


def determinant(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


def _snf(a: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix, IntMatrix]:
    """Return (U, U^-1, S, V) with U*A*V = S."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    s = [list(map(int, row)) for row in a]
    u = identity(rows)
    uinv = identity(rows)
    v = identity(cols)

    def swap_rows(i: int, j: int) -> None:
        if i == j:
            return
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]
        for row in uinv:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i: int, j: int) -> None:
        if i == j:
            return
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, q: int) -> None:
        # row_dst += q * row_src
        if q == 0:
            return
        s[dst] = [x + q * y for x, y in zip(s[dst], s[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]
        for row in uinv:
            row[src] -= q * row[dst]

    def add_col(dst: int, src: int, q: int) -> None:
        if q == 0:
            return
        for row in s:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    for t in range(min(rows, cols)):
        nonzero = [(abs(s[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if s[i][j]]
        if not nonzero:
            break
        _, i0, j0 = min(nonzero)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            for i in range(t + 1, rows):
                if s[i][t]:
                    add_row(i, t, -(s[i][t] // s[t][t]))
            for j in range(t + 1, cols):
                if s[t][j]:
                    add_col(j, t, -(s[t][j] // s[t][t]))
            rest = [(abs(s[i][t]), i, t) for i in range(t + 1, rows) if s[i][t]]
            rest += [(abs(s[t][j]), t, j) for j in range(t + 1, cols) if s[t][j]]
            if rest:
                # a remainder smaller than the pivot survived; it becomes the pivot
                _, i0, j0 = min(rest)
                swap_rows(t, i0)
                swap_cols(t, j0)
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if s[i][j] % s[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
            for row in uinv:
                row[t] = -row[t]
    return u, uinv, s, v


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form of an integer matrix.

    Returns ``(U, S, V)`` with ``U @ A @ V == S``, ``U`` and ``V`` unimodular,
    and ``S`` diagonal with nonnegative entries ``s_1 | s_2 | ...``.
    """
    u, _, s, v = _snf(a)
    return u, s, v


def diagonal(s: Sequence[Sequence[int]]) -> list[int]:
    return [s[i][i] for i in range(min(len(s), len(s[0]) if s else 0))]


def kernel_basis(a: Sequence[Sequence[int]], cols: int) -> list[list[int]]:
    """A Z-basis of {y in Z^cols : A y = 0}."""
    if not a:
        return identity(cols)
    _, _, s, v = _snf(a)
    diag = diagonal(s)
    rank = sum(1 for x in diag if x)
    return [[v[i][j] for i in range(cols)] for j in range(rank, cols)]


def solve_integer(a: Sequence[Sequence[int]], b: Sequence[int], cols: int) -> list[int] | None:
    """An integer solution of ``A y = b`` or None when there is none."""
    rows = len(b)
    if rows == 0:
        return [0] * cols
    if cols == 0:
        return [] if not any(b) else None
    u, _, s, v = _snf(a)
    ub = mat_vec(u, b)
    z = [0] * cols
    for i in range(rows):
        d = s[i][i] if i < cols else 0
        if d == 0:
            if ub[i]:
                return None
        else:
            if ub[i] % d:
                return None
            z[i] = ub[i] // d
    return mat_vec(v, z)


# ---------------------------------------------------------------------------
# finite abelian groups


@dataclass(frozen=True)
class FinAbGroup:
    """A finite abelian group ``Z/d_1 + ... + Z/d_k`` with ``d_1 | ... | d_k``."""

    invariant_factors: tuple[int, ...] = ()
    order: int = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        factors = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", factors)
        for d in factors:
            if d < 2:
                raise InputError(f"invariant factors must be >= 2, got {factors}")
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise InputError(f"invariant factors must form a divisibility chain, got {factors}")
        object.__setattr__(self, "order", math.prod(factors))

    @classmethod
    def trivial(cls) -> FinAbGroup:
        return cls(())

    @classmethod
    def cyclic(cls, n: int) -> FinAbGroup:
        return cls((n,)) if n > 1 else cls(())

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def reduce(self, coeffs: Iterable[int]) -> GroupElement:
        coeffs = tuple(coeffs)
        if len(coeffs) != self.rank:
            raise InputError(
                f"element {coeffs} has length {len(coeffs)}, group {self.invariant_factors} needs {self.rank}"
            )
        return tuple(int(c) % d for c, d in zip(coeffs, self.invariant_factors))

    def zero(self) -> GroupElement:
        return (0,) * self.rank

    def add(self, x: GroupElement, y: GroupElement) -> GroupElement:
        return self.reduce(a + b for a, b in zip(x, y))

    def scale(self, n: int, x: GroupElement) -> GroupElement:
        return self.reduce(n * a for a in x)

    def element_order(self, x: GroupElement) -> int:
        return math.lcm(1, *(d // math.gcd(a, d) for a, d in zip(x, self.invariant_factors)))

    def elements(self) -> Iterator[GroupElement]:
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def primes(self) -> list[int]:
        return prime_factors(self.order)

    def relations(self) -> list[list[int]]:
        """Relation columns ``d_i e_i`` of the presentation."""
        k = self.rank
        return [[d if i == j else 0 for i in range(k)] for j, d in enumerate(self.invariant_factors)]

    def direct_sum(self, other: FinAbGroup) -> Presentation:
        return present(self.invariant_factors + other.invariant_factors)


def prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class Presentation:
    """An isomorphism ``Z^k / R  ->  group``.

    ``proj`` (rank x k) sends a vector of Z^k to group coordinates; ``lift``
    (k x rank) has as columns preimages of the group's standard generators.
    """

    group: FinAbGroup
    proj: tuple[tuple[int, ...], ...]
    lift: tuple[tuple[int, ...], ...]

    def image(self, x: Sequence[int]) -> GroupElement:
        return self.group.reduce(mat_vec(self.proj, x))

    def preimage(self, y: GroupElement) -> list[int]:
        return mat_vec(self.lift, y)


def cokernel(relations: Sequence[Sequence[int]], k: int) -> Presentation:
    """Normalized presentation of ``Z^k`` modulo the span of ``relations``.

    Raises InputError when the quotient is infinite.
    """
    rels = [list(r) for r in relations if any(r)]
    if not rels:
        if k:
            raise InputError("quotient is infinite")
        return Presentation(FinAbGroup.trivial(), (), ())
    a = columns_to_matrix(rels, k)
    u, uinv, s, _ = _snf(a)
    diag = [s[i][i] if i < len(rels) else 0 for i in range(k)]
    if any(d == 0 for d in diag):
        raise InputError("quotient is infinite")
    keep = [i for i, d in enumerate(diag) if d != 1]
    group = FinAbGroup(tuple(diag[i] for i in keep))
    proj = tuple(tuple(u[i]) for i in keep)
    lift = tuple(tuple(uinv[r][i] for i in keep) for r in range(k))
    return Presentation(group, proj, lift)


def present(orders: Sequence[int]) -> Presentation:
    """Normalize ``Z/n_1 + ... + Z/n_k`` (any positive n_i) to invariant factors."""
    k = len(orders)
    if any(int(n) < 1 for n in orders):
        raise InputError(f"cyclic orders must be positive, got {list(orders)}")
    rels = [[n if i == j else 0 for i in range(k)] for j, n in enumerate(orders)]
    return cokernel(rels, k)


def _check_elements(m: FinAbGroup, elems: Iterable[Sequence[int]]) -> list[GroupElement]:
    return [m.reduce(x) for x in elems]


def quotient_presentation(m: FinAbGroup, gens: Sequence[Sequence[int]]) -> Presentation:
    """``M / <gens>`` in normal form with the projection from M's coordinates."""
    gens = _check_elements(m, gens)
    return cokernel(m.relations() + [list(g) for g in gens], m.rank)


def subgroup_combination(x: Sequence[int], gens: Sequence[Sequence[int]], m: FinAbGroup) -> list[int] | None:
    """Integers ``c`` with ``sum c_j gens_j == x`` in ``m``, or None."""
    x = m.reduce(x)
    gens = _check_elements(m, gens)
    cols = [list(g) for g in gens] + m.relations()
    if not cols:
        return None if any(x) else []
    sol = solve_integer(columns_to_matrix(cols, m.rank), list(x), len(cols))
    return None if sol is None else sol[: len(gens)]


def in_subgroup(x: Sequence[int], gens: Sequence[Sequence[int]], m: FinAbGroup) -> bool:
    """Whether ``x`` lies in the subgroup of ``m`` generated by ``gens``."""
    return subgroup_combination(x, gens, m) is not None


@dataclass(frozen=True)
class Subgroup:
    """A subgroup ``N`` of ``ambient`` with a normal-form presentation.

    ``basis[t]`` is the element of the ambient group corresponding to the
    t-th standard generator of ``group``.
    """

    ambient: FinAbGroup
    gens: tuple[GroupElement, ...]
    group: FinAbGroup
    basis: tuple[GroupElement, ...]
    _pres: Presentation

    def coords(self, x: Sequence[int]) -> GroupElement:
        """Coordinates of an ambient element in the subgroup's presentation."""
        x = self.ambient.reduce(x)
        cols = [list(g) for g in self.gens] + self.ambient.relations()
        if not cols:
            if any(x):
                raise InputError(f"{x} is not in the subgroup")
            return ()
        sol = solve_integer(columns_to_matrix(cols, self.ambient.rank), list(x), len(cols))
        if sol is None:
            raise InputError(f"{x} is not in the subgroup")
        return self._pres.image(sol[: len(self.gens)])


def subgroup(m: FinAbGroup, gens: Sequence[Sequence[int]]) -> Subgroup:
    """Present the subgroup of ``m`` generated by ``gens``."""
    gens = tuple(_check_elements(m, gens))
    g = len(gens)
    if g == 0:
        return Subgroup(m, (), FinAbGroup.trivial(), (), Presentation(FinAbGroup.trivial(), (), ()))
    cols = [list(x) for x in gens] + m.relations()
    a = columns_to_matrix(cols, m.rank) if m.rank else []
    if m.rank:
        ker = kernel_basis(a, len(cols))
    else:
        ker = identity(len(cols))
    rels = [y[:g] for y in ker]
    pres = cokernel(rels, g)
    basis = tuple(
        m.reduce(mat_vec(columns_to_matrix(list(gens), m.rank), pres.preimage(e)))
        if m.rank else ()
        for e in identity(pres.group.rank)
    )
    return Subgroup(m, gens, pres.group, basis, pres)


def is_p_group(m: FinAbGroup, p: int) -> bool:
    return all(x == p for x in m.primes())


def subgroup_of_order_less_than(m: FinAbGroup, q: int) -> list[GroupElement]:
    """Generators of ``{a in m : order(a) < q}`` for a p-group ``m`` and p-power ``q``."""
    ps = prime_factors(q)
    if len(ps) != 1:
        raise InputError(f"{q} is not a prime power")
    p = ps[0]
    if not is_p_group(m, p):
        raise InputError(f"group {m.invariant_factors} is not a {p}-group")
    # in a p-group, order < q means killed by q/p
    kill = q // p
    gens = []
    for i, d in enumerate(m.invariant_factors):
        step = d // math.gcd(d, kill)
        if step % d:
            gens.append(tuple(step if j == i else 0 for j in range(m.rank)))
    return gens
