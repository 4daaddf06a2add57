from __future__ import annotations

from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from finflow.canon import canonical_form
from finflow.dynamics import act_on_order
from finflow.embeddings import automorphism_group
from finflow.errors import BoundTooLarge, NotABasis
from finflow.orders import (
    ALL_ORDERS_ON_SETS,
    NATURAL_BA,
    NATURAL_VS2,
    ORDERED_GRAPHS,
    all_linear_orders,
    check_order_forgetful,
    check_ordering_property,
    is_natural_order,
    is_normal_ordering,
    natural_order_vs,
    natural_orders_boolean,
    natural_orders_vs,
    natural_ranking_boolean,
    no_space,
)
from finflow.structures import boolean_algebra, graph, ordered_graph, pure_set, subuniverses, vector_space
from oracles import graph_isomorphic_bruteforce


def test_all_linear_orders_counts():
    assert [len(all_linear_orders(n)) for n in (1, 3, 4)] == [1, 6, 24]
    with pytest.raises(BoundTooLarge):
        all_linear_orders(9)


def antilex_less(x: int, y: int, atom_order) -> bool:
    """Independent antilex rule: the highest differing atom (in atom order) decides."""
    for a in reversed(atom_order):
        bx, by = x >> a & 1, y >> a & 1
        if bx != by:
            return by == 1
    return False


@pytest.mark.parametrize("m", range(1, 5))
def test_natural_ba_orders_follow_antilex_rule(m):
    for ao in permutations(range(m)):
        r = natural_ranking_boolean(m, ao)
        for x in range(1 << m):
            for y in range(1 << m):
                assert (r[x] < r[y]) == antilex_less(x, y, ao)
        # restricted to atoms, the order reproduces the atom order
        atoms = sorted(range(m), key=lambda a: r[1 << a])
        assert atoms == list(ao)


def test_natural_ba_examples():
    (T,) = natural_orders_boolean(boolean_algebra(1))
    assert T.order == (0, 1)
    a, b = 1, 2
    T = boolean_algebra(2).with_order(natural_ranking_boolean(2, (0, 1)))
    assert T.sorted_by_order() == [0, a, b, a | b]


@pytest.mark.parametrize("m", range(1, 5))
def test_natural_ba_count_and_isomorphism(m):
    orders = natural_orders_boolean(boolean_algebra(m))
    assert len(orders) == len({T.order for T in orders}) == len(list(permutations(range(m))))
    assert len({canonical_form(T).encoding for T in orders}) == 1


def test_natural_vs_examples():
    S = vector_space(1, 2)
    assert natural_order_vs(S, [1]).sorted_by_order() == [0, 1]
    # coordinates (c1, c2) with e1 = 1, e2 = 2: 00 < 10 < 01 < 11
    assert natural_order_vs(vector_space(2, 2), [1, 2]).sorted_by_order() == [0, 1, 2, 3]
    assert natural_order_vs(vector_space(1, 3), [1]).sorted_by_order() == [0, 1, 2]
    with pytest.raises(NotABasis):
        natural_order_vs(vector_space(2, 2), [1, 1])


def test_normal_ordering_examples():
    S = boolean_algebra(2)
    nat = natural_ranking_boolean(2, (0, 1))
    assert is_normal_ordering(S, nat, NATURAL_BA)
    top_below_bottom = (1, 0, 2, 3)
    assert not is_normal_ordering(S, top_below_bottom, NATURAL_BA)
    assert all(is_normal_ordering(pure_set(3), r, ALL_ORDERS_ON_SETS) for r in all_linear_orders(3))


def test_no_space_examples():
    assert len(no_space(boolean_algebra(2), NATURAL_BA)) == 2
    assert len(no_space(pure_set(3), ALL_ORDERS_ON_SETS)) == 6
    assert len(no_space(vector_space(2, 2), NATURAL_VS2)) == 6


@pytest.mark.parametrize("S,K", [(boolean_algebra(1), NATURAL_BA), (boolean_algebra(2), NATURAL_BA),
                                 (boolean_algebra(3), NATURAL_BA), (vector_space(1, 2), NATURAL_VS2),
                                 (vector_space(2, 2), NATURAL_VS2)])
def test_no_space_closed_under_automorphisms(S, K):
    space = set(no_space(S, K))
    for g in automorphism_group(S).elements:
        assert {act_on_order(g, r) for r in space} == space


@pytest.mark.parametrize("m", range(1, 3))
def test_normal_ordering_matches_membership(m):
    # for a hereditary class, normality on S equals membership of (S, <)
    S = boolean_algebra(m)
    for r in all_linear_orders(S.n):
        assert is_normal_ordering(S, r, NATURAL_BA) == is_natural_order(S.with_order(r))


@given(st.permutations(range(8)))
def test_normal_ordering_matches_membership_b3(r):
    S = boolean_algebra(3)
    assert is_normal_ordering(S, r, NATURAL_BA) == is_natural_order(S.with_order(r))


def test_natural_orders_of_b3_are_normal():
    S = boolean_algebra(3)
    assert all(is_normal_ordering(S, T.order, NATURAL_BA) for T in natural_orders_boolean(S))


@pytest.mark.parametrize("m", range(1, 5))
def test_induced_orders_on_subalgebras_are_natural(m):
    from finflow.structures import induced

    for T in natural_orders_boolean(boolean_algebra(m))[:2]:
        for U in subuniverses(T):
            A, _ = induced(T, U)
            assert is_natural_order(A)


def test_forgetfulness_examples():
    assert check_order_forgetful(NATURAL_BA, 3).order_forgetful
    assert check_order_forgetful(ALL_ORDERS_ON_SETS, 4).order_forgetful
    report = check_order_forgetful(ORDERED_GRAPHS, 3)
    assert not report.order_forgetful
    X, Y = report.counterexample
    assert X.n == Y.n == 3
    assert graph_isomorphic_bruteforce(3, X.edges(), Y.edges()) is not None
    assert graph_isomorphic_bruteforce(3, X.edges(), Y.edges(), X.order, Y.order) is None


def test_path_with_middle_first_vs_second():
    path = [(0, 1), (1, 2)]
    middle_first = ordered_graph(3, path, (1, 0, 2))
    middle_second = ordered_graph(3, path, (0, 1, 2))
    assert canonical_form(middle_first.reduct()).encoding == canonical_form(middle_second.reduct()).encoding
    assert canonical_form(middle_first).encoding != canonical_form(middle_second).encoding
    assert graph_isomorphic_bruteforce(3, path, path, (1, 0, 2), (0, 1, 2)) is None


def test_ordering_property_examples():
    assert check_ordering_property(ALL_ORDERS_ON_SETS, pure_set(2), 4).n == 2
    assert check_ordering_property(NATURAL_BA, boolean_algebra(2), 3).m == 2
    B = check_ordering_property(ORDERED_GRAPHS, graph(3, [(0, 1)]), 4)
    # exhaustive: some graph on at most 4 vertices has every order containing every order of A
    if B is not None:
        from finflow.embeddings import iter_embedding_maps
        from finflow.orders import k_expansions
        for X in k_expansions(graph(3, [(0, 1)]), ORDERED_GRAPHS):
            for Y in k_expansions(B, ORDERED_GRAPHS):
                assert next(iter_embedding_maps(X, Y), None) is not None


def test_natural_vs_orders_count():
    # GL(2,2) has 6 ordered bases and distinct bases give distinct orders
    assert len(natural_orders_vs(vector_space(2, 2))) == 6
