import random

import pytest

from destackify.errors import InputError
from destackify.ktheory import (
    GradedVectorSpace,
    HModule,
    TorPair,
    cotangent_class_trivial,
    filtration_pieces,
    same_cyclic_modular_rep,
    split_graded,
    split_primary,
    tor_pair,
    tor_report,
)
from destackify.modrep import mat_pow_mod
from destackify.zlinalg import FinAbGroup
from helpers import WILD, charpoly_oracle, random_equal_divisor_module, random_p_group_module, similar_oracle


def test_split_graded():
    m = FinAbGroup((6,))
    v = GradedVectorSpace(m, {(0,): 2, (1,): 1, (7,): 1, (3,): 0})
    triv, nt = split_graded(v)
    assert triv.as_dict() == {(0,): 2}
    assert nt.as_dict() == {(1,): 2}
    assert triv + nt == v
    assert v.dimension == 4


def test_split_graded_empty_and_invalid():
    m = FinAbGroup((2,))
    triv, nt = split_graded(GradedVectorSpace(m))
    assert triv.dimension == nt.dimension == 0
    with pytest.raises(InputError):
        GradedVectorSpace(m, {(1,): -1})
    with pytest.raises(InputError):
        GradedVectorSpace(m) + GradedVectorSpace(FinAbGroup((3,)))


def test_wild_tor():
    t = tor_pair(WILD)
    assert t.t0 == ((1, 0), (0, 1))
    assert t.t1 == ((1, 0), (1, 1))
    assert not same_cyclic_modular_rep(t, 3, 3)
    assert tor_report(WILD)["verdict"] == "not isomorphic"


def test_wild_k0_certificate():
    ok, cert = cotangent_class_trivial(WILD)
    assert ok and cert.argument == "filtration"
    assert [pc.group for pc in cert.pieces] == [(3,), (3, 3)] or all(pc.isomorphic for pc in cert.pieces)
    assert all(pc.isomorphic for pc in cert.pieces)


def test_filtration_pieces_have_equal_divisors():
    pieces = filtration_pieces(WILD)
    assert sorted(pc.group.order for pc in pieces) == [3, 9]
    for pc in pieces:
        assert len(set(pc.group.invariant_factors)) == 1


def test_equal_divisors_identity():
    m = HModule.from_orders([5, 5], [[1, 0], [0, 1]], 5, 5)
    t = tor_pair(m)
    assert t.t0 == t.t1 == ((1, 0), (0, 1))


def test_equal_divisors_give_equal_tor():
    rng = random.Random(51)
    for _ in range(40):
        m = random_equal_divisor_module(rng)
        t = tor_pair(m)
        if len(set(m.group.invariant_factors)) == 1:
            # all orders equal: Q = P, so t0 = t1 on the nose
            assert t.t0 == t.t1
        assert same_cyclic_modular_rep(t, m.h, m.p)


def test_tor_dimension_counts_p_divisible_factors():
    rng = random.Random(52)
    for _ in range(60):
        m = random_p_group_module(rng) if rng.random() < 0.5 else random_equal_divisor_module(rng)
        t = tor_pair(m)
        assert t.dim == sum(1 for d in m.group.invariant_factors if d % m.p == 0)
        ident = [[int(i == j) for j in range(t.dim)] for i in range(t.dim)]
        assert mat_pow_mod(t.t0, m.h, m.p) == ident
        assert mat_pow_mod(t.t1, m.h, m.p) == ident


def test_same_cyclic_modular_rep_swap_vs_sign():
    t = TorPair(((0, 1), (1, 0)), ((1, 0), (0, 4)))
    assert same_cyclic_modular_rep(t, 2, 5)
    assert similar_oracle(t.t0, t.t1, 5)


def test_same_cyclic_modular_rep_rejects_bad_input():
    with pytest.raises(InputError):
        same_cyclic_modular_rep(TorPair(((1, 0), (0, 0)), ((1, 0), (0, 1))), 2, 3)
    with pytest.raises(InputError):
        same_cyclic_modular_rep(TorPair(((2,),), ((1,),)), 1, 3)
    with pytest.raises(InputError):
        same_cyclic_modular_rep(TorPair(((1,),), ((1, 0),)), 1, 3)


def test_cotangent_vacuous_and_maschke():
    ok, cert = cotangent_class_trivial(HModule.from_orders([5, 5], [[0, 1], [1, 0]], 3, 2))
    assert ok and cert.argument == "vacuous"
    ok, cert = cotangent_class_trivial(HModule.from_orders([3, 9], [[2, 0], [0, 8]], 3, 2))
    assert ok and cert.argument == "maschke"


def test_cotangent_cyclic_nine():
    ok, cert = cotangent_class_trivial(HModule.from_orders([9], [[4]], 3, 3))
    assert ok
    assert all(pc.isomorphic for pc in cert.pieces)


def test_cotangent_rejects_mixed_primes():
    with pytest.raises(InputError):
        cotangent_class_trivial(HModule.from_orders([6], [[1]], 3, 1))


def test_certified_implies_equal_charpolys():
    # K_0 classes agree iff composition factors agree, read off the characteristic polynomial
    rng = random.Random(53)
    for _ in range(80):
        m = random_p_group_module(rng)
        ok, _ = cotangent_class_trivial(m)
        t = tor_pair(m)
        assert ok
        assert charpoly_oracle(t.t0, m.p) == charpoly_oracle(t.t1, m.p)


def test_split_primary():
    m = HModule.from_orders([2, 3, 4], [[1, 0, 0], [0, 2, 0], [0, 0, 3]], 2, 2)
    parts = split_primary(m)
    assert sorted(pt.group.invariant_factors for pt in parts) == [(2, 4), (3,)]
    report = tor_report(m, certify=True)
    assert report["k0_certificate"]["trivial"]


@pytest.mark.parametrize(
    "orders, action, p, h",
    [
        ([3, 9], [[1, 0], [1, 1]], 3, 3),  # e_0 has order 3 but (1, 1) has order 9
        ([4], [[2]], 2, 2),  # not an automorphism
        ([5], [[2]], 5, 2),  # order 4 does not divide 2
        ([5], [[1]], 4, 1),  # 4 is not prime
        ([5], [[1], [1]], 5, 1),  # wrong shape
    ],
)
def test_hmodule_validation(orders, action, p, h):
    with pytest.raises(InputError):
        HModule.from_orders(orders, action, p, h)


def test_hmodule_apply():
    assert WILD.apply((1, 0)) == (1, 3)
    assert WILD.apply_power(3) == [[1, 0], [0, 1]]
