"""Graded splitting and Tor computations for finite abelian groups with a cyclic action.

A module here is a finite abelian group ``A`` (invariant-factor form) with a
cyclic group of order ``h`` acting through one integer matrix whose j-th
column is the image of the j-th generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import modrep
from .errors import InputError, InvariantViolation
from .zlinalg import (
    FinAbGroup,
    GroupElement,
    columns_to_matrix,
    identity,
    is_p_group,
    mat_mul,
    mat_vec,
    present,
    prime_factors,
    quotient_presentation,
    smith_normal_form,
    subgroup,
    subgroup_of_order_less_than,
)


# ---------------------------------------------------------------------------
# graded vector spaces


@dataclass(frozen=True)
class GradedVectorSpace:
    """Finite-dimensional representation of ``D(M)``: dimensions per degree in ``M``."""

    group: FinAbGroup
    dims: tuple[tuple[GroupElement, int], ...] = ()

    def __init__(self, group: FinAbGroup, dims: Mapping[Sequence[int], int] | None = None) -> None:
        acc: dict[GroupElement, int] = {}
        for k, v in (dims or {}).items():
            if v < 0:
                raise InputError(f"negative dimension {v} in degree {k}")
            key = group.reduce(k)
            acc[key] = acc.get(key, 0) + int(v)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "dims", tuple(sorted((k, v) for k, v in acc.items() if v)))

    def as_dict(self) -> dict[GroupElement, int]:
        return dict(self.dims)

    @property
    def dimension(self) -> int:
        return sum(v for _, v in self.dims)

    def __add__(self, other: GradedVectorSpace) -> GradedVectorSpace:
        if other.group != self.group:
            raise InputError("grading groups differ")
        acc = self.as_dict()
        for k, v in other.dims:
            acc[k] = acc.get(k, 0) + v
        return GradedVectorSpace(self.group, acc)


def split_graded(v: GradedVectorSpace) -> tuple[GradedVectorSpace, GradedVectorSpace]:
    """Split into the degree-zero part and the rest."""
    zero = v.group.zero()
    triv = {k: d for k, d in v.dims if k == zero}
    nt = {k: d for k, d in v.dims if k != zero}
    return GradedVectorSpace(v.group, triv), GradedVectorSpace(v.group, nt)


# ---------------------------------------------------------------------------
# modules with a cyclic action


def _is_prime(p: int) -> bool:
    return p >= 2 and prime_factors(p) == [p]


@dataclass(frozen=True)
class HModule:
    group: FinAbGroup
    action: tuple[tuple[int, ...], ...]
    p: int
    h: int

    def __post_init__(self) -> None:
        d = self.group.invariant_factors
        k = len(d)
        act = [list(map(int, row)) for row in self.action]
        if len(act) != k or any(len(row) != k for row in act):
            raise InputError(f"action must be a {k}x{k} matrix")
        if not _is_prime(self.p):
            raise InputError(f"characteristic {self.p} is not prime")
        if self.h < 1:
            raise InputError("order of H must be positive")
        for i in range(k):
            for j in range(k):
                # the image of d_j e_j = 0 must vanish
                if act[i][j] * d[j] % d[i]:
                    raise InputError(f"action is not well defined on {d}: entry ({i},{j})")
        act = [[x % d[i] for x in row] for i, row in enumerate(act)]
        object.__setattr__(self, "action", tuple(tuple(row) for row in act))
        if k:
            _, s, _ = smith_normal_form([row + [d[i] if i == j else 0 for j in range(k)] for i, row in enumerate(act)])
            if any(s[i][i] != 1 for i in range(k)):
                raise InputError("action is not an automorphism")
        if self.apply_power(self.h) != identity(k):
            raise InputError(f"action does not have order dividing {self.h}")

    @classmethod
    def from_orders(cls, orders: Sequence[int], action: Sequence[Sequence[int]], p: int, h: int) -> HModule:
        """Build from any cyclic decomposition, normalizing to invariant factors."""
        k = len(orders)
        if len(action) != k or any(len(row) != k for row in action):
            raise InputError(f"action must be a {k}x{k} matrix")
        for i in range(k):
            for j in range(k):
                if action[i][j] * orders[j] % orders[i]:
                    raise InputError(f"action is not well defined on {list(orders)}: entry ({i},{j})")
        pres = present(orders)
        lift = [list(r) for r in pres.lift]
        proj = [list(r) for r in pres.proj]
        new = mat_mul(proj, mat_mul([list(r) for r in action], lift)) if proj else []
        return cls(pres.group, tuple(tuple(r) for r in new), p, h)

    def apply(self, x: Sequence[int]) -> GroupElement:
        return self.group.reduce(mat_vec(self.action, x))

    def apply_power(self, e: int) -> list[list[int]]:
        """Columns of the reduced matrix of ``action**e``."""
        k = self.group.rank
        cols = []
        for j in range(k):
            x = tuple(int(i == j) for i in range(k))
            for _ in range(e):
                x = self.apply(x)
            cols.append(list(x))
        return columns_to_matrix(cols, k)


@dataclass(frozen=True)
class TorPair:
    t0: tuple[tuple[int, ...], ...]
    t1: tuple[tuple[int, ...], ...]
    coords: tuple[int, ...] = ()  # invariant-factor positions with p | d_i

    @property
    def dim(self) -> int:
        return len(self.t0)


def _relation_lift(m: HModule, gen_lift: Sequence[Sequence[int]]) -> list[list[int]]:
    # Q with P diag(d) = diag(d) Q
    d = m.group.invariant_factors
    k = len(d)
    q = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            num = gen_lift[i][j] * d[j]
            if num % d[i]:
                raise InputError("action does not lift to the relation lattice")
            q[i][j] = num // d[i]
    return q


def tor_pair(m: HModule) -> TorPair:
    """Action of the generator on ``Tor_0(F_p, A)`` and ``Tor_1(F_p, A)``.

    Uses the resolution ``0 -> Z^k --diag(d)--> Z^k -> A -> 0``: the action
    lifts to ``P`` on generators and ``Q`` on relations with
    ``P diag(d) = diag(d) Q``, and both reduce mod p on the coordinates where
    ``p | d_i``.
    """
    p = m.p
    d = m.group.invariant_factors
    idx = tuple(i for i, x in enumerate(d) if x % p == 0)
    gen = [list(r) for r in m.action]
    rel = _relation_lift(m, gen)
    # a different lift of the same automorphism must give the same Tor_1 action
    other = [[x + d[i] for x in row] for i, row in enumerate(gen)]
    rel2 = _relation_lift(m, other)
    t0 = tuple(tuple(gen[i][j] % p for j in idx) for i in idx)
    t1 = tuple(tuple(rel[i][j] % p for j in idx) for i in idx)
    if t1 != tuple(tuple(rel2[i][j] % p for j in idx) for i in idx):
        raise InvariantViolation("Tor_1 action depends on the chosen lift")
    return TorPair(t0, t1, idx)


def same_cyclic_modular_rep(t: TorPair, h: int, p: int) -> bool:
    """Whether the two actions are isomorphic representations of ``Z/h`` over F_p."""
    n = t.dim
    for name, mat in (("t0", t.t0), ("t1", t.t1)):
        if len(mat) != n or any(len(r) != n for r in mat):
            raise InputError(f"{name} is not {n}x{n}")
        if modrep.rank_mod(mat, p) != n:
            raise InputError(f"{name} is not invertible over F_{p}")
        if modrep.mat_pow_mod(mat, h, p) != [[int(i == j) for j in range(n)] for i in range(n)]:
            raise InputError(f"{name} does not have order dividing {h}")
    return modrep.similar(t.t0, t.t1, p)


# ---------------------------------------------------------------------------
# K_0 triviality via the elementary-divisor filtration


@dataclass
class Piece:
    group: tuple[int, ...]
    action: list[list[int]]
    t0: list[list[int]]
    t1: list[list[int]]
    frobenius_t0: list[list[int]]
    frobenius_t1: list[list[int]]
    isomorphic: bool

    def to_json(self) -> dict:
        return {
            "group": list(self.group),
            "action": self.action,
            "t0": self.t0,
            "t1": self.t1,
            "frobenius_t0": self.frobenius_t0,
            "frobenius_t1": self.frobenius_t1,
            "isomorphic": self.isomorphic,
        }


@dataclass
class K0Certificate:
    trivial: bool
    argument: str  # "vacuous" | "maschke" | "filtration"
    pieces: list[Piece] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "trivial": self.trivial,
            "argument": self.argument,
            "pieces": [pc.to_json() for pc in self.pieces],
        }


def _restrict_to_subgroup(m: HModule, gens: list[GroupElement]) -> HModule:
    sub = subgroup(m.group, gens)
    cols = [list(sub.coords(m.apply(b))) for b in sub.basis]
    return HModule(sub.group, tuple(map(tuple, columns_to_matrix(cols, sub.group.rank))), m.p, m.h)


def _quotient_module(m: HModule, gens: list[GroupElement]) -> HModule:
    q = quotient_presentation(m.group, gens)
    cols = [list(q.image(m.apply(q.preimage(e)))) for e in identity(q.group.rank)]
    return HModule(q.group, tuple(map(tuple, columns_to_matrix(cols, q.group.rank))), m.p, m.h)


def _certify_piece(m: HModule) -> Piece:
    t = tor_pair(m)
    ok = same_cyclic_modular_rep(t, m.h, m.p)
    return Piece(
        m.group.invariant_factors,
        [list(r) for r in m.action],
        [list(r) for r in t.t0],
        [list(r) for r in t.t1],
        modrep.frobenius_form(t.t0, m.p)[1],
        modrep.frobenius_form(t.t1, m.p)[1],
        ok,
    )


def filtration_pieces(m: HModule) -> list[HModule]:
    """Graded pieces of ``A ⊃ A' ⊃ A'' ⊃ ...`` where each step keeps the
    elements of order below the current exponent; every piece has all
    elementary divisors equal."""
    pieces = []
    while m.group.order > 1:
        d = m.group.invariant_factors
        if len(set(d)) == 1:
            pieces.append(m)
            break
        gens = subgroup_of_order_less_than(m.group, m.group.exponent)
        pieces.append(_quotient_module(m, gens))
        m = _restrict_to_subgroup(m, gens)
    return pieces


def cotangent_class_trivial(m: HModule) -> tuple[bool, K0Certificate]:
    """Certify that ``[F_p (x)^L A]`` vanishes in the representation ring.

    Done piece by piece along the elementary-divisor filtration, comparing
    the Tor_0 and Tor_1 actions on each piece.
    """
    primes = m.group.primes()
    if len(primes) > 1:
        raise InputError(f"group {m.group.invariant_factors} is not a p-group; split it first")
    if not primes or primes[0] != m.p:
        return True, K0Certificate(True, "vacuous")
    if m.h % m.p:
        return True, K0Certificate(True, "maschke")
    pieces = [_certify_piece(pc) for pc in filtration_pieces(m)]
    ok = all(pc.isomorphic for pc in pieces)
    return ok, K0Certificate(ok, "filtration", pieces)


def split_primary(m: HModule) -> list[HModule]:
    """Equivariant decomposition of ``A`` into its p-primary parts."""
    out = []
    for q in m.group.primes():
        # the q-part is the image of multiplication by the prime-to-q cofactor
        cof = m.group.order
        while cof % q == 0:
            cof //= q
        gens = [m.group.scale(cof, tuple(int(i == j) for j in range(m.group.rank))) for i in range(m.group.rank)]
        out.append(_restrict_to_subgroup(m, gens))
    return out


def tor_report(m: HModule, certify: bool = False) -> dict:
    t = tor_pair(m)
    if t.dim == 0:
        verdict = "isomorphic (vacuous)"
    else:
        verdict = "isomorphic" if same_cyclic_modular_rep(t, m.h, m.p) else "not isomorphic"
    out: dict = {
        "group": list(m.group.invariant_factors),
        "p": m.p,
        "h": m.h,
        "t0": [list(r) for r in t.t0],
        "t1": [list(r) for r in t.t1],
        "verdict": verdict,
    }
    if certify:
        certs = []
        trivial = True
        for part in split_primary(m):
            ok, cert = cotangent_class_trivial(part)
            trivial &= ok
            certs.append({"primary_part": list(part.group.invariant_factors), **cert.to_json()})
        out["k0_certificate"] = {"trivial": trivial, "parts": certs}
    return out


def is_p_module(m: HModule) -> bool:
    return is_p_group(m.group, m.p)
