"""Finite G-flows: actions, return sets, syndetic bounds and minimality.

Group elements are referred to by their index in ``G.elements`` (sorted
one-line notation, identity first). Return sets are frozensets of such
indices, and a translate ``gS`` is computed through the multiplication table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

import numpy as np

from .embeddings import automorphism_group, enumerate_copies
from .errors import (
    CriteriaDisagree,
    DegreeMismatch,
    InternalCheckFailed,
    MalformedH,
    NotASubgroup,
    PreconditionFailed,
    ValidationError,
)
from .orders import OrderClassK, no_space
from .perm import PermGroup, inverse, mul
from .structures import FinStructure, generated, induced, restrict_ranking, subuniverses

ReturnSet = frozenset  # of group-element indices


# --- actions -------------------------------------------------------------------

class GroupAction:
    """An action given by a table ``table[g, x] = index of g·x``.

    The identity and compatibility laws are checked on construction.
    """

    def __init__(self, group: PermGroup, points: Sequence[Hashable], table: np.ndarray):
        self.group = group
        self.points = list(points)
        self.table = np.asarray(table, dtype=np.int64)
        self.point_index = {x: i for i, x in enumerate(self.points)}
        self._check_laws()

    @classmethod
    def from_function(cls, group: PermGroup, points: Sequence[Hashable],
                      act: Callable[[tuple[int, ...], Any], Any]) -> "GroupAction":
        index = {x: i for i, x in enumerate(points)}
        table = np.empty((group.order, len(points)), dtype=np.int64)
        for gi, g in enumerate(group.elements):
            for xi, x in enumerate(points):
                y = act(g, x)
                if y not in index:
                    raise ValidationError(f"action leaves the point set: {g}·{x} = {y}")
                table[gi, xi] = index[y]
        return cls(group, points, table)

    def _check_laws(self) -> None:
        T = self.table
        n_g, n_x = self.group.order, len(self.points)
        if T.shape != (n_g, n_x):
            raise ValidationError(f"action table has shape {T.shape}, expected {(n_g, n_x)}")
        if n_x == 0:
            return
        if not np.array_equal(T[0], np.arange(n_x)):
            raise ValidationError("the identity does not act trivially")
        M = self.group.mult_table
        for g in range(n_g):
            # act(g h, x) == act(g, act(h, x)) for every h and x
            if not np.array_equal(T[M[g]], T[g][T]):
                raise ValidationError("action is not compatible with the group law")

    def act(self, g: int, x: int) -> int:
        return int(self.table[g, x])

    def image(self, g: int, O: Iterable[int]) -> frozenset[int]:
        return frozenset(int(self.table[g, x]) for x in O)

    def orbits(self) -> list[frozenset[int]]:
        """Orbits by graph search along the generators."""
        idx = self.group.index
        gens = [idx[g] for g in self.group.generators]
        seen: set[int] = set()
        out = []
        for x in range(len(self.points)):
            if x in seen:
                continue
            orbit = {x}
            stack = [x]
            while stack:
                y = stack.pop()
                for g in gens:
                    z = int(self.table[g, y])
                    if z not in orbit:
                        orbit.add(z)
                        stack.append(z)
            seen |= orbit
            out.append(frozenset(orbit))
        return out

    def to_json(self) -> dict[str, Any]:
        return {"group": [list(g) for g in self.group.generators],
                "group_order": self.group.order,
                "points": [list(p) if isinstance(p, tuple) else p for p in self.points],
                "table": self.table.tolist()}


def act_on_order(g: Sequence[int], ranking: Sequence[int]) -> tuple[int, ...]:
    """The order ``g<``: ``a (g<) b`` iff ``g⁻¹a < g⁻¹b``."""
    if len(g) != len(ranking):
        raise DegreeMismatch(f"permutation of degree {len(g)} on an order of {len(ranking)} points")
    ginv = inverse(g)
    return tuple(ranking[ginv[a]] for a in range(len(g)))


def order_action(G: PermGroup, orders: Sequence[Sequence[int]]) -> GroupAction:
    """The action of G on a G-invariant list of rankings."""
    return GroupAction.from_function(G, [tuple(o) for o in orders], act_on_order)


def return_set(action: GroupAction, x: int, O: Iterable[int]) -> ReturnSet:
    """``{g : g·x ∈ O}`` as group-element indices."""
    O = set(O)
    col = action.table[:, x]
    return frozenset(int(g) for g in np.nonzero(np.isin(col, list(O)))[0]) if O else frozenset()


# --- syndetic bounds -----------------------------------------------------------

def left_translate(G: PermGroup, g: int, S: Iterable[int]) -> frozenset[int]:
    row = G.mult_table[g]
    return frozenset(int(row[s]) for s in S)


def syndetic_bound(G: PermGroup, S: Iterable[int],
                   memo: dict[tuple[int, ...], int] | None = None) -> int | None:
    """Least number of left translates of S covering G; None for empty S.

    Exact set cover by branch and bound: branch on the uncovered element
    with the fewest covering translates, prune with ``ceil(uncovered/|S|)``,
    seeded by the greedy cover. When the greedy cover is not provably
    optimal and ``memo`` is given, results are shared between two-sided
    translates (see :func:`translation_key`).
    """
    S = sorted(set(S))
    if not S:
        return None
    n = G.order
    full = (1 << n) - 1
    M = G.mult_table
    bits = np.zeros((n, n), dtype=bool)
    bits[np.arange(n)[:, None], M[:, S]] = True  # row g: the translate gS
    packed = np.unique(np.packbits(bits, axis=1, bitorder="little"), axis=0)
    masks = sorted(int.from_bytes(row.tobytes(), "little") for row in packed)
    size = len(S)
    if len(masks) * size == n:
        # the translates partition G (S is a left-coset-like block)
        return len(masks)

    # greedy upper bound
    covered = 0
    greedy = 0
    while covered != full:
        best = max(masks, key=lambda m: (m & ~covered).bit_count())
        covered |= best
        greedy += 1
    best_count = [greedy]
    lower_root = math.ceil(n / size)
    if greedy == lower_root:
        return greedy
    key = None
    if memo is not None:
        key = translation_key(G, S)
        if key in memo:
            return memo[key]

    covering = [[m for m in masks if m >> e & 1] for e in range(n)]

    def rec(covered: int, used: int):
        if covered == full:
            best_count[0] = min(best_count[0], used)
            return
        uncovered = n - covered.bit_count()
        if used + math.ceil(uncovered / size) >= best_count[0]:
            return
        # uncovered element with the fewest options
        rest = full & ~covered
        opts_best = None
        while rest:
            low = rest & -rest
            e = low.bit_length() - 1
            opts = covering[e]
            if opts_best is None or len(opts) < len(opts_best):
                opts_best = opts
                if len(opts) == 1:
                    break
            rest ^= low
        for m in sorted(opts_best, key=lambda m: -(m & ~covered).bit_count()):
            rec(covered | m, used + 1)
            if best_count[0] == lower_root:
                return

    rec(0, 0)
    if key is not None:
        memo[key] = best_count[0]
    return best_count[0]


def translation_key(G: PermGroup, S: Iterable[int]) -> tuple[int, ...]:
    """A canonical key for the two-sided translates ``aSb`` of S.

    The syndetic bound is invariant under both: left translation permutes the
    family of translates, right translation by ``b`` maps a cover of G to a
    cover of ``Gb = G``. The key is the least sorted ``aSb``; its first entry
    is the identity, which happens exactly when ``a = b⁻¹s⁻¹`` for some s in
    S, so only the conjugates ``b⁻¹(s⁻¹S)b`` need comparing.
    """
    S = np.array(sorted(set(S)), dtype=np.int64)
    if S.size == 0:
        return ()
    M = G.mult_table
    inv = np.array(G.inverse_index, dtype=np.int64)
    b = np.arange(G.order)
    best = None
    for s in S:
        left = M[inv[int(s)], S]                          # s⁻¹S, contains the identity
        rows = np.sort(M[M[inv[:, None], left[None, :]], b[:, None]], axis=1)  # row b: b⁻¹(s⁻¹S)b
        order = np.lexsort(rows.T[::-1])
        cand = tuple(int(v) for v in rows[order[0]])
        if best is None or cand < best:
            best = cand
    return best


# --- minimality ----------------------------------------------------------------

@dataclass
class MinimalityReport:
    verdict: bool
    criteria: dict[str, bool]
    points: int
    group_order: int
    witness: dict[str, Any] | None = None

    def to_json(self) -> dict[str, Any]:
        return {"verdict": "minimal" if self.verdict else "not minimal",
                "criteria": self.criteria, "points": self.points,
                "group_order": self.group_order, "witness": self.witness}


SUBSET_LIMIT = 8


def _open_sets(n_points: int) -> Iterable[frozenset[int]]:
    """Nonempty subsets when the space is small, singletons otherwise.

    Both (ii) and (iii) are monotone in O, so singletons decide them; all
    subsets are enumerated on small spaces as an extra cross-check.
    """
    if n_points <= SUBSET_LIMIT:
        for mask in range(1, 1 << n_points):
            yield frozenset(x for x in range(n_points) if mask >> x & 1)
    else:
        for x in range(n_points):
            yield frozenset([x])


def is_minimal(action: GroupAction) -> MinimalityReport:
    """Decide minimality three ways and insist that they agree.

    (i) every orbit is the whole space; (ii) the translates of every
    nonempty O cover the space; (iii) every return set ``ret(x, O)`` of a
    nonempty O is syndetic (nonempty, with a finite bound).
    """
    n = len(action.points)
    if n == 0:
        raise PreconditionFailed("the point set is empty")
    G = action.group
    orbits = action.orbits()
    crit_i = len(orbits) == 1
    witness = None if crit_i else {"invariant_subset": sorted(min(orbits, key=min))}

    crit_ii = True
    for O in _open_sets(n):
        union: set[int] = set()
        for g in range(G.order):
            union |= action.image(g, O)
        if len(union) != n:
            crit_ii = False
            break

    crit_iii = True
    memo: dict[frozenset[int], int | None] = {}
    for x in range(n):
        for O in _open_sets(n):
            ret = return_set(action, x, O)
            if ret not in memo:
                memo[ret] = syndetic_bound(G, ret)
            if memo[ret] is None:
                crit_iii = False
                break
        if not crit_iii:
            break

    criteria = {"orbit_closure": crit_i, "translates_cover": crit_ii, "syndetic_returns": crit_iii}
    if len(set(criteria.values())) != 1:
        raise CriteriaDisagree(f"minimality criteria disagree: {criteria}")
    return MinimalityReport(crit_i, criteria, n, G.order, witness)


# --- stabilizers and cosets ----------------------------------------------------

def pointwise_stabilizer(G: PermGroup, A: Iterable[int]) -> PermGroup:
    A = list(A)
    if any(not 0 <= a < G.degree for a in A):
        raise DegreeMismatch("points outside the degree")
    return G.subgroup(g for g in G.elements if all(g[a] == a for a in A))


def setwise_stabilizer(G: PermGroup, A: Iterable[int]) -> PermGroup:
    A = frozenset(A)
    if any(not 0 <= a < G.degree for a in A):
        raise DegreeMismatch("points outside the degree")
    return G.subgroup(g for g in G.elements if frozenset(g[a] for a in A) == A)


def coset_representatives(H: PermGroup, K: PermGroup) -> list[tuple[int, ...]]:
    """Least element (in sorted element order) of each right coset ``Hk`` of H in K."""
    if not H.is_subgroup_of(K):
        raise NotASubgroup("H is not a subgroup of K")
    covered: set[tuple[int, ...]] = set()
    reps = []
    for k in K.elements:
        if k in covered:
            continue
        reps.append(k)
        covered.update(mul(h, k) for h in H.elements)
    return reps


# --- minimality on spaces of normal orders ------------------------------------

def density_surrogate(S: FinStructure, G: PermGroup, aut: PermGroup | None = None) -> bool:
    """G ≤ Aut(S) and, on every subuniverse, G realizes the same restrictions as Aut(S).

    A finite group cannot be dense in anything; this is the property the
    universality argument actually uses: every partial isomorphism realized by
    an automorphism is realized by an element of G.
    """
    aut = aut or automorphism_group(S)
    if not G.is_subgroup_of(aut):
        return False
    for U in subuniverses(S):
        U = sorted(U)
        if {tuple(g[u] for u in U) for g in G.elements} != {tuple(g[u] for u in U) for g in aut.elements}:
            return False
    return True


@dataclass
class NOFlowReport:
    structure: dict[str, Any]
    order_class: str
    group_order: int
    no_size: int
    density_surrogate: bool
    minimality: MinimalityReport
    bound_checks: int = 0
    attained: int = 0
    violations: list[dict[str, Any]] = field(default_factory=list)
    per_subuniverse: list[dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.minimality.verdict and not self.violations and self.density_surrogate

    def to_json(self) -> dict[str, Any]:
        return {"check": "minimal_flow_NO", "structure": self.structure, "class": self.order_class,
                "group_order": self.group_order, "no_size": self.no_size,
                "density_surrogate": self.density_surrogate,
                "minimality": self.minimality.to_json(),
                "bound_checks": self.bound_checks, "bound_attained": self.attained,
                "violations": self.violations, "per_subuniverse": self.per_subuniverse,
                "status": "pass" if self.ok else "fail"}


def minimal_flow_check_NO(S: FinStructure, K: OrderClassK, G: PermGroup | None = None) -> NOFlowReport:
    """Minimality of G on NO_K(S) and the syndetic bound ``[G_(A) : G_A]`` on every return set."""
    aut = automorphism_group(S.reduct())
    G = aut if G is None else G
    if not density_surrogate(S.reduct(), G, aut):
        raise PreconditionFailed("G does not realize every restriction of Aut(S)")
    NO = no_space(S, K)
    if not NO:
        raise PreconditionFailed("NO_K(S) is empty")
    action = order_action(G, NO)
    mini = is_minimal(action)
    report = NOFlowReport(S.to_json(), K.label(), G.order, len(NO), True, mini)
    base = S.reduct()
    memo: dict[frozenset[int], int | None] = {}
    key_memo: dict[tuple[int, ...], int | None] = {}
    for U in subuniverses(base):
        U = sorted(U)
        index = setwise_stabilizer(G, U).order // pointwise_stabilizer(G, U).order
        A, inc = induced(base, U)
        aut_a = automorphism_group(A).order
        k_orders = _k_orders_on(U, A, inc, K)
        # group NO by its restriction to U once
        by_restriction: dict[tuple[int, ...], list[int]] = {}
        for xi, r in enumerate(NO):
            by_restriction.setdefault(restrict_ranking(r, U), []).append(xi)
        worst = 0
        for x in range(len(NO)):
            for sub in k_orders:
                star = by_restriction.get(sub, [])
                ret = return_set(action, x, star)
                if ret not in memo:
                    memo[ret] = syndetic_bound(G, ret, key_memo)
                b = memo[ret]
                report.bound_checks += 1
                if b is None or b > index:
                    report.violations.append({"order": list(NO[x]), "subuniverse": U,
                                              "suborder": list(sub), "bound": b, "index": index})
                else:
                    report.attained += int(b == index)
                worst = max(worst, b or 0)
        # index == |Aut(A)| exactly when every automorphism of A extends to G
        report.per_subuniverse.append({"subuniverse": U, "index": index, "aut_A": aut_a,
                                       "automorphisms_extend": index == aut_a,
                                       "k_orders": len(k_orders), "max_bound": worst})
    return report


def _k_orders_on(U: Sequence[int], A: FinStructure, inc: Sequence[int], K: OrderClassK) -> list[tuple[int, ...]]:
    """K-orders on the substructure A, as rankings of the elements of U (sorted)."""
    pos = {u: i for i, u in enumerate(U)}
    out = set()
    for r in no_space(A, K):
        # r ranks A's elements; A-element a sits at inc[a] in S
        ranks = [0] * len(U)
        for a, s in enumerate(inc):
            ranks[pos[s]] = r[a]
        out.add(tuple(ranks))
    return sorted(out)


# --- the colouring argument behind maximality ----------------------------------

@dataclass
class ProofTrace:
    status: str  # "complement-empty" | "contradiction" | "no-monochromatic-window"
    A: list[int]
    H_prime: list[int]
    complement: list[int]
    claims: dict[str, bool]
    coloring: dict[str, Any] | None = None
    window: list[int] | None = None
    monochromatic_copy: list[int] | None = None
    color: str | None = None
    f: list[int] | None = None
    refuted_claim: str | None = None

    def to_json(self) -> dict[str, Any]:
        return {k: v for k, v in self.__dict__.items()}


def proof_coloring_trace(G: PermGroup, S: FinStructure, A: Sequence[int], H: Iterable[int],
                         translates: Sequence[int] | tuple[Sequence[int], Sequence[int]]) -> ProofTrace:
    """Run the colouring argument on a finite instance.

    ``A`` is a subuniverse of S, ``H`` a set of group indices closed under
    left multiplication by the pointwise stabilizer of A, ``translates`` the
    indices claimed to cover G by translates of ``H' = S^A H`` and of its
    complement (one list for both, or a pair of lists).

    Copies ``A'`` of A are coloured ``H'`` when ``h⁻¹[A] = A'`` for some h in
    H. If a copy C' of the window C (generated by the images ``g_i[A]``) is
    monochromatic, any f in G with ``f[C'] = C`` escapes the translates of
    one of the two sets, which refutes that covering claim.
    """
    from .ramsey import Coloring, find_monochromatic_copy

    A = sorted(set(A))
    if frozenset(A) not in set(subuniverses(S)):
        raise PreconditionFailed(f"{A} is not a subuniverse")
    H = frozenset(H)
    if not H:
        raise MalformedH("H is empty")
    M = G.mult_table
    idx = G.index
    G_A = pointwise_stabilizer(G, A)
    G_setA = setwise_stabilizer(G, A)
    if any(int(M[idx[a], h]) not in H for a in G_A.elements for h in H):
        raise MalformedH("H is not a union of right cosets of the pointwise stabilizer")
    reps = [idx[s] for s in coset_representatives(G_A, G_setA)]
    H_prime = frozenset(int(M[s, h]) for s in reps for h in H)
    comp = frozenset(range(G.order)) - H_prime
    if isinstance(translates, tuple) and len(translates) == 2 and not isinstance(translates[0], int):
        t_h, t_c = list(translates[0]), list(translates[1])
    else:
        t_h = t_c = list(translates)
    covers_h = set().union(*(left_translate(G, g, H_prime) for g in t_h)) == set(range(G.order)) if t_h else False
    covers_c = bool(comp) and bool(t_c) and set().union(
        *(left_translate(G, g, comp) for g in t_c)) == set(range(G.order))
    trace = ProofTrace("complement-empty", A, sorted(H_prime), sorted(comp),
                       {"H_prime_covered": covers_h, "complement_covered": covers_c})
    if not comp:
        return trace

    base = S.reduct()
    A_struct, _ = induced(base, A)
    copyset = enumerate_copies(A_struct, base)
    hits = {tuple(sorted(G.elements[G.inverse_index[h]][a] for a in A)) for h in H}
    colors = tuple(0 if cp in hits else 1 for cp in copyset.copies)
    coloring = Coloring(copyset, colors, 2)
    trace.coloring = {"copies": [list(c) for c in copyset.copies], "colors": list(colors),
                      "labels": ["H_prime", "complement"]}

    window = sorted(generated(base, [G.elements[g][a] for g in sorted(set(t_h) | set(t_c)) for a in A]))
    trace.window = window
    C_struct, _ = induced(base, window)
    found = find_monochromatic_copy(base, C_struct, A_struct, coloring)
    if found is None:
        trace.status = "no-monochromatic-window"
        return trace
    copy, col = found
    trace.monochromatic_copy = list(copy)
    col = 0 if col is None else col
    trace.color = "H_prime" if col == 0 else "complement"
    target = frozenset(window)
    f = next(g for g in G.elements if frozenset(g[x] for x in copy) == target)
    trace.f = list(f)
    fi = idx[f]
    if col == 0:
        # f ∈ g_i H' for every i, so the complement translates miss f
        escaped = all(int(M[G.inverse_index[g], fi]) not in comp for g in t_c)
        trace.refuted_claim = "complement_covered"
    else:
        escaped = all(int(M[G.inverse_index[g], fi]) not in H_prime for g in t_h)
        trace.refuted_claim = "H_prime_covered"
    if not escaped or trace.claims[trace.refuted_claim]:
        raise InternalCheckFailed("the monochromatic window did not refute a covering claim")
    trace.status = "contradiction"
    return trace
