"""Orbifold charts ``[A^n / D(M)]`` with coordinate divisors.

A chart stores the character group ``M`` of the diagonalizable group, one
character per coordinate, and an ordered set of divisor labels each sitting on
a coordinate hyperplane ``{x_i = 0}``. Points are abstracted to orbit types:
the set of coordinates that do not vanish. For a diagonal action the
stabilizer at a point with nonzero set ``S`` is Cartier dual to
``M / <chi_j : j in S>``, and every invariant here is a count of characters
surviving in such a quotient.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import InputError, ResourceError, UnsupportedInputError
from .zlinalg import FinAbGroup, GroupElement, in_subgroup, quotient_presentation

OrbitType = frozenset  # of coordinate indices that are nonzero


@dataclass(frozen=True, order=True)
class DivisorLabel:
    """A divisor name with its position in the well-ordering of labels."""

    order_key: tuple[int, ...]
    name: str = field(compare=False)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Chart:
    group: FinAbGroup
    characters: tuple[GroupElement, ...]
    divisors: tuple[tuple[DivisorLabel, int], ...] = ()

    def __post_init__(self) -> None:
        chars = tuple(self.group.reduce(c) for c in self.characters)
        object.__setattr__(self, "characters", chars)
        divs = tuple(sorted(((lab, int(i)) for lab, i in self.divisors), key=lambda t: t[0]))
        object.__setattr__(self, "divisors", divs)
        coords = [i for _, i in divs]
        if len(set(coords)) != len(coords):
            raise InputError(f"two divisors on the same coordinate: {coords}")
        if any(not 0 <= i < len(chars) for i in coords):
            raise InputError(f"divisor coordinate out of range for n={len(chars)}: {coords}")
        keys = [lab.order_key for lab, _ in divs]
        names = [lab.name for lab, _ in divs]
        if len(set(keys)) != len(keys) or len(set(names)) != len(names):
            raise InputError("divisor labels must have distinct names and order keys")

    @property
    def dim(self) -> int:
        return len(self.characters)

    @property
    def divisor_coords(self) -> frozenset[int]:
        return frozenset(i for _, i in self.divisors)

    def label_coord(self, name: str) -> int:
        for lab, i in self.divisors:
            if lab.name == name:
                return i
        raise InputError(f"unknown divisor label {name!r}")

    def label(self, name: str) -> DivisorLabel:
        for lab, _ in self.divisors:
            if lab.name == name:
                return lab
        raise InputError(f"unknown divisor label {name!r}")


def make_chart(
    factors: Sequence[int],
    characters: Sequence[Sequence[int]],
    divisors: dict[str, int] | Sequence[tuple[str, int]] = (),
) -> Chart:
    """Convenience constructor; divisor order follows the given order."""
    items = list(divisors.items()) if isinstance(divisors, dict) else list(divisors)
    labels = tuple((DivisorLabel((k,), name), i) for k, (name, i) in enumerate(items))
    return Chart(FinAbGroup(tuple(factors)), tuple(tuple(c) for c in characters), labels)


def orbit_types(n: int) -> Iterator[frozenset[int]]:
    """All 2^n orbit types, by increasing size then lexicographically."""
    for size in range(n + 1):
        for s in itertools.combinations(range(n), size):
            yield frozenset(s)


def _check_orbit(c: Chart, nonzero: Iterable[int]) -> frozenset[int]:
    s = frozenset(nonzero)
    if any(not 0 <= i < c.dim for i in s):
        raise InputError(f"orbit type {sorted(s)} out of range for n={c.dim}")
    return s


def surviving(c: Chart, killed: Iterable[int]) -> frozenset[int]:
    """Coordinates whose character is nonzero in ``M / <chi_j : j in killed>``."""
    q = quotient_presentation(c.group, [c.characters[j] for j in killed])
    return frozenset(i for i, chi in enumerate(c.characters) if any(q.image(chi)))


def split_representation(c: Chart) -> tuple[frozenset[int], frozenset[int]]:
    """Trivial and non-trivial coordinates of the cotangent representation."""
    triv = frozenset(i for i, chi in enumerate(c.characters) if not any(chi))
    return triv, frozenset(range(c.dim)) - triv


def stabilizer_dual(c: Chart, nonzero: Iterable[int]) -> FinAbGroup:
    """Character group of the stabilizer at a point of the given orbit type."""
    s = _check_orbit(c, nonzero)
    return quotient_presentation(c.group, [c.characters[j] for j in sorted(s)]).group


def codim_of_stackiness(c: Chart, nonzero: Iterable[int] = ()) -> int:
    return len(surviving(c, sorted(_check_orbit(c, nonzero))))


def divisorial_index(c: Chart, nonzero: Iterable[int] = ()) -> int:
    """Codimension of stackiness relative to the divisor torus.

    The relevant stabilizer is the kernel of the divisor characters inside
    the point stabilizer, dual to ``M / <chi_j : j in S or j a divisor>``.
    """
    s = _check_orbit(c, nonzero)
    return len(surviving(c, sorted(s | c.divisor_coords)))


def max_divisorial_locus(c: Chart) -> tuple[int, frozenset[int]]:
    """Maximum divisorial index and the coordinates cutting out its locus.

    The maximum is attained at the origin, and the locus is the coordinate
    subspace ``V(x_i : i in J)``.
    """
    locus = surviving(c, sorted(c.divisor_coords))
    return len(locus), locus


def is_divisorial(c: Chart) -> bool:
    gens = [c.characters[i] for i in sorted(c.divisor_coords)]
    return all(in_subgroup(chi, gens, c.group) for chi in c.characters)


def orbit_type_table(c: Chart, max_dim: int = 6) -> list[dict]:
    """Both indices for every orbit type; only the origin above ``max_dim``."""
    types = orbit_types(c.dim) if c.dim <= max_dim else iter([frozenset()])
    return [
        {
            "nonzero": sorted(s),
            "stabilizer": list(stabilizer_dual(c, s).invariant_factors),
            "codim": codim_of_stackiness(c, s),
            "divisorial_index": divisorial_index(c, s),
        }
        for s in types
    ]


# ---------------------------------------------------------------------------
# single-point analyzer for finite matrix groups (characteristic zero)

QMatrix = list[list[Fraction]]


@dataclass(frozen=True)
class MatrixGroupAction:
    dimension: int
    generators: tuple[tuple[tuple[Fraction, ...], ...], ...]
    divisor_indices: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        gens = tuple(tuple(tuple(Fraction(x) for x in row) for row in g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        n = self.dimension
        for g in gens:
            if len(g) != n or any(len(row) != n for row in g):
                raise InputError(f"generator is not {n}x{n}")
            if _rank(g) != n:
                raise InputError("generators must be invertible")
        if any(not 0 <= i < n for i in self.divisor_indices):
            raise InputError("divisor index out of range")


def _rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[QMatrix, list[int]]:
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    return m[:r], pivots


def _rank(a: Sequence[Sequence[Fraction]]) -> int:
    return len(_rref(a, len(a[0]) if a else 0)[1])


def _nullspace(rows: Sequence[Sequence[Fraction]], n: int) -> list[tuple[Fraction, ...]]:
    red, pivots = _rref(rows, n)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def _qmul(a, b):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def _group_closure(gens, n: int, max_order: int):
    one = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
    seen = {one}
    frontier = [one]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _qmul(x, g)
                if y not in seen:
                    seen.add(y)
                    if len(seen) > max_order:
                        raise ResourceError(f"matrix group exceeds {max_order} elements (or is infinite)")
                    nxt.append(y)
        frontier = nxt
    return seen


def matrix_group_stackiness(
    a: MatrixGroupAction, max_order: int = 10_000
) -> tuple[int, list[tuple[Fraction, ...]]]:
    """Codimension of stackiness at a fixed point of a finite linear action.

    Returns ``(n - dim V^G, basis of V^G)``. With divisor indices, each
    hyperplane ``{x_i = 0}`` must be invariant (row i of every generator is a
    multiple of ``e_i``) and the group is first cut down to the kernel of the
    divisor characters ``g -> g_ii``.
    """
    n = a.dimension
    gens = a.generators
    if a.divisor_indices:
        for g in gens:
            for i in a.divisor_indices:
                if any(g[i][j] != 0 for j in range(n) if j != i):
                    raise UnsupportedInputError(
                        f"divisor hyperplane x_{i} = 0 is not invariant under all generators"
                    )
        group = _group_closure(gens, n, max_order)
        gens = tuple(g for g in group if all(g[i][i] == 1 for i in a.divisor_indices))
    rows = [
        [g[i][j] - (1 if i == j else 0) for j in range(n)]
        for g in gens
        for i in range(n)
    ]
    basis = _nullspace(rows, n) if rows else [
        tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)
    ]
    return n - len(basis), basis
