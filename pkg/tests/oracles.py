"""Independent brute-force oracles and closed-form counts used by the tests.

Nothing here calls the search code it is compared against.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations, product
from math import comb


def binomial(n: int, k: int) -> int:
    return comb(n, k)


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Partitions of an n-set into k nonempty blocks (recurrence)."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def gaussian_binomial(d: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^d (product formula)."""
    if not 0 <= k <= d:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (d - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def graph_isomorphic_bruteforce(n, edges1, edges2, order1=None, order2=None):
    """Search all n! bijections for an (order-preserving) graph isomorphism."""
    e1 = {frozenset(e) for e in edges1}
    e2 = {frozenset(e) for e in edges2}
    if len(e1) != len(e2):
        return None
    for pi in permutations(range(n)):
        if {frozenset((pi[a], pi[b])) for a, b in map(tuple, e1)} != e2:
            continue
        if order1 is not None and any((order1[a] < order1[b]) != (order2[pi[a]] < order2[pi[b]])
                                      for a in range(n) for b in range(n)):
            continue
        return pi
    return None


def subspaces_bruteforce(d: int, p: int) -> set[frozenset[int]]:
    """All subspaces of F_p^d as sets of codes, by closing every subset under the operations."""
    def vec(x):
        return [(x // p ** i) % p for i in range(d)]

    def code(v):
        return sum(c * p ** i for i, c in enumerate(v))

    n = p ** d
    found = set()
    # a subspace is spanned by at most d vectors
    for r in range(d + 1):
        for gens in combinations(range(1, n), r):
            span = set()
            for coeffs in product(range(p), repeat=r):
                v = [0] * d
                for c, g in zip(coeffs, gens):
                    v = [(a + c * b) % p for a, b in zip(v, vec(g))]
                span.add(code(v))
            found.add(frozenset(span))
    return found


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def arrow_bruteforce_sets(c: int, b: int, a: int, k: int) -> tuple[bool, tuple[int, ...] | None]:
    """C -> (B)^A_k for pure sets by enumerating every colouring (lex order)."""
    acopies = list(combinations(range(c), a))
    idx = {s: i for i, s in enumerate(acopies)}
    bcopies = [[idx[s] for s in combinations(B, a)] for B in combinations(range(c), b)]
    for col in product(range(k), repeat=len(acopies)):
        if not any(len({col[i] for i in hb}) == 1 for hb in bcopies):
            return False, col
    return True, None


def syndetic_bound_bruteforce(mult, S) -> int | None:
    """Least number of left translates of S covering the group, by trying all translate sets."""
    n = len(mult)
    S = list(S)
    if not S:
        return None
    translates = {frozenset(mult[g][s] for s in S) for g in range(n)}
    translates = list(translates)
    for r in range(1, len(translates) + 1):
        for choice in combinations(translates, r):
            if len(frozenset().union(*choice)) == n:
                return r
    return None
