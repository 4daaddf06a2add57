from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from finflow.catalog import catalog_group, catalog_instances, is_normal, subgroups, valid_families
from finflow.errors import InvalidFamily
from finflow.perm import identity, mul, symmetric_group
from finflow.samuel import (
    SetFamilyAlgebra,
    SubgroupFamily,
    build_L,
    embed_into_sym,
    invariant_subalgebras,
    is_associative,
    is_left_invariant,
    is_syndetic_subalgebra,
    maximal_syndetic_subalgebra,
    minimal_left_ideals,
    multiplication_table,
    quotient_group,
    ret_algebra_correspondence,
    semigroup_mul,
    stone_space,
    verify_instance,
)
from oracles import set_partitions

S3 = symmetric_group(3)
A3 = frozenset(i for i, g in enumerate(S3.elements)
               if sum(1 for a in range(3) for b in range(a + 1, 3) if g[a] > g[b]) % 2 == 0)
WHOLE = frozenset(range(6))


def members_of(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def L_bruteforce(G, N) -> set[frozenset[int]]:
    """{VB : V in N, B ⊆ G} with plain set arithmetic."""
    el, idx = G.elements, G.index
    out = set()
    for mask in range(1 << G.order):
        B = members_of(mask)
        for V in N.members:
            out.add(frozenset(idx[mul(el[v], el[b])] for v in V for b in B))
    return out


def test_power_set_when_identity_is_a_member():
    N = SubgroupFamily(S3, [WHOLE, frozenset({0})])
    L = build_L(S3, N)
    assert L.size == 64


def test_sign_quotient():
    N = SubgroupFamily(S3, [WHOLE, A3])
    L = build_L(S3, N)
    assert {members_of(x) for x in L.sets()} == {frozenset(), A3, WHOLE - A3, WHOLE}
    points, action = stone_space(L, S3)
    assert len(points) == 2
    for g in range(6):
        # even permutations fix both points, odd ones swap them
        assert (action.act(g, 0) == 0) == (g in A3)
    assert multiplication_table(L, S3) == [[0, 1], [1, 0]]
    assert minimal_left_ideals(points, multiplication_table(L, S3), action) == [frozenset({0, 1})]
    assert maximal_syndetic_subalgebra(L, S3).atoms == L.atoms
    assert ret_algebra_correspondence(L, S3).equal


def test_trivial_family():
    L = build_L(S3, SubgroupFamily(S3, [WHOLE]))
    assert L.size == 2
    points, action = stone_space(L, S3)
    assert len(points) == 1
    assert is_syndetic_subalgebra(L, S3)
    assert maximal_syndetic_subalgebra(L, S3).atoms == L.atoms


@pytest.mark.parametrize("name", ["C4", "D2", "S3", "D4", "Q8"])
def test_L_matches_bruteforce(name):
    G = catalog_group(name)
    for fam in valid_families(G):
        N = SubgroupFamily(G, fam)
        assert {members_of(x) for x in build_L(G, N).sets()} == L_bruteforce(G, N)


def test_identity_atom_is_neutral():
    for _, G, fam in list(catalog_instances(max_order=8))[:40]:
        L = build_L(G, SubgroupFamily(G, fam))
        e = L.atom_of(0)
        for v in range(len(L.atoms)):
            assert semigroup_mul(e, v, L, G) == v


def test_quotient_group_shape():
    cosets, table = quotient_group(S3, [S3.elements[i] for i in A3])
    assert len(cosets) == 2 and is_associative(table)


@pytest.mark.parametrize("name", ["C4", "D2", "S3", "D4", "C6", "Q8"])
def test_invariant_subalgebras_match_partition_oracle(name):
    G = catalog_group(name)
    for fam in valid_families(G):
        L = build_L(G, SubgroupFamily(G, fam))
        points, action = stone_space(L, G)
        oracle = set()
        for part in set_partitions(range(len(L.atoms))):
            blocks = {frozenset(b) for b in part}
            if all(frozenset(action.act(g, x) for x in b) in blocks for g in range(G.order) for b in blocks):
                oracle.add(frozenset(frozenset().union(*(members_of(L.atoms[x]) for x in b)) for b in blocks))
        found = {frozenset(members_of(a) for a in B.atoms) for B in invariant_subalgebras(L, G)}
        assert found == oracle


def test_syndetic_examples():
    power = SetFamilyAlgebra(6, tuple(1 << i for i in range(6)))
    assert is_syndetic_subalgebra(power, S3)
    sign = build_L(S3, SubgroupFamily(S3, [WHOLE, A3]))
    assert is_syndetic_subalgebra(sign, S3) and is_left_invariant(sign, S3)
    # {∅, {e}, G∖{e}, G} is not left invariant
    assert not is_syndetic_subalgebra(SetFamilyAlgebra(6, (1, 62)), S3)


def test_embedding_examples():
    Z2 = catalog_group("C2")
    emb = embed_into_sym(Z2, SubgroupFamily(Z2, [frozenset({0, 1}), frozenset({0})]))
    assert emb.degree == 3 and emb.ok
    assert emb.translates == [[0], [1], [0, 1]]
    assert emb.images[0] == identity(3) and emb.images[1] == (1, 0, 2)
    emb = embed_into_sym(S3, SubgroupFamily(S3, [WHOLE, A3, frozenset({0})]))
    assert emb.degree == 1 + 2 + 6 and emb.ok


def test_embedding_needs_trivial_core():
    with pytest.raises(InvalidFamily):
        embed_into_sym(S3, SubgroupFamily(S3, [WHOLE, A3]))


def test_family_validation():
    order2 = [V for V in subgroups(S3) if len(V) == 2]
    with pytest.raises(InvalidFamily):
        SubgroupFamily(S3, [WHOLE, order2[0], frozenset({0})])   # not conjugation closed
    with pytest.raises(InvalidFamily):
        SubgroupFamily(S3, [WHOLE, frozenset({0, 1, 2})])      # not a subgroup
    with pytest.raises(InvalidFamily):
        SubgroupFamily(S3, [A3])                                # G missing
    with pytest.raises(InvalidFamily):
        SubgroupFamily(S3, [WHOLE] + order2)                    # not directed


def test_family_enumeration_is_complete_on_S3():
    # brute force: every set of subgroups that contains G, is conjugation-closed and directed
    from itertools import combinations

    subs = subgroups(S3)
    found = set()
    others = [V for V in subs if V != WHOLE]
    for r in range(len(others) + 1):
        for chosen in combinations(others, r):
            try:
                SubgroupFamily(S3, (WHOLE,) + chosen)
            except InvalidFamily:
                continue
            found.add(frozenset((WHOLE,) + chosen))
    assert found == {frozenset(f) for f in valid_families(S3)}
    # the cores of valid families are exactly the normal subgroups
    assert {min(f, key=len) for f in found} == {V for V in subs if is_normal(S3, V)}


INSTANCES = list(catalog_instances())


@settings(max_examples=25)
@given(st.sampled_from(INSTANCES))
def test_random_catalog_instances_verify(inst):
    _, G, fam = inst
    res = verify_instance(G, SubgroupFamily(G, fam))
    assert res["boolean"] and res["left_invariant"] and res["associative"]
    assert res["matches_quotient"] and res["stone_of_maximal_is_ideal"] and res["ret_correspondence"]
    assert res["embedding_ok"] in (True, None)
    # for a finite group the whole Stone space is the unique minimal left ideal
    assert res["minimal_left_ideals"] == [list(range(res["maximal_syndetic_atoms"]))]
