"""Linear-order expansions: LO(n), natural orders, normal orderings.

"Antilexicographic" is read as *the highest differing coordinate decides*:
for Boolean algebras, ``x < y`` iff the greatest atom (under the atom order)
of the symmetric difference lies below ``y``; for vector spaces, ``x < y``
iff at the highest basis index where the coordinates differ, ``x`` has the
smaller coordinate under the field order ``0 < 1 < ... < p-1``. Under this
reading the natural order for the standard atom order or standard basis is
the integer order of the element coding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Sequence

from .canon import _coordinates, canonical_form, enumerate_class
from .embeddings import iter_embedding_maps
from .errors import BoundTooLarge, InvalidDescriptor, NotABasis
from .structures import (
    FinStructure,
    Ranking,
    StructKind,
    induced,
    standard,
    subuniverses,
    vs_greedy_basis,
    vs_span,
)

ORDER_CAP = 7


def all_linear_orders(n: int, cap: int = ORDER_CAP) -> list[Ranking]:
    """All n! rankings of ``0..n-1``, in lexicographic order of the ranking."""
    if n > cap:
        raise BoundTooLarge(f"LO({n}) has {n}! points; cap is {cap}")
    return [tuple(p) for p in itertools.permutations(range(n))]


# --- natural orders -------------------------------------------------------------

def natural_ranking_boolean(m: int, atom_order: Sequence[int]) -> Ranking:
    """Ranking of B(m) induced by ``atom_order`` (atoms listed least first)."""
    if sorted(atom_order) != list(range(m)):
        raise InvalidDescriptor("atom order must list every atom once")
    weight = {a: 1 << i for i, a in enumerate(atom_order)}
    return tuple(sum(weight[a] for a in range(m) if x >> a & 1) for x in range(1 << m))


def natural_orders_boolean(S: FinStructure) -> list[FinStructure]:
    """The m! naturally ordered expansions of a Boolean algebra, one per atom order."""
    if S.kind.family != "boolean":
        raise InvalidDescriptor("natural_orders_boolean needs a Boolean algebra")
    base = S.reduct()
    return [base.with_order(natural_ranking_boolean(S.m, ao))
            for ao in itertools.permutations(range(S.m))]


def natural_ranking_vs(S: FinStructure, basis: Sequence[int]) -> Ranking:
    d, p = S.d, S.p
    if len(basis) != d or len(vs_span(d, p, basis)) != S.n:
        raise NotABasis(f"{list(basis)} is not a basis of F_{p}^{d}")
    coords = _coordinates(d, p, basis)
    return tuple(coords[x] for x in range(S.n))


def natural_order_vs(S: FinStructure, basis_order: Sequence[int]) -> FinStructure:
    """The natural expansion of a vector space for an ordered basis (least first)."""
    if S.kind.family != "vector":
        raise InvalidDescriptor("natural_order_vs needs a vector space")
    return S.reduct().with_order(natural_ranking_vs(S, basis_order))


def ordered_bases(d: int, p: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    n = p ** d

    def rec(prefix: list[int]):
        if len(prefix) == d:
            out.append(tuple(prefix))
            return
        span = vs_span(d, p, prefix)
        for v in range(n):
            if v not in span:
                prefix.append(v)
                rec(prefix)
                prefix.pop()

    rec([])
    return out


def natural_orders_vs(S: FinStructure) -> list[FinStructure]:
    base = S.reduct()
    seen: dict[Ranking, None] = {}
    for b in ordered_bases(S.d, S.p):
        seen.setdefault(natural_ranking_vs(S, b), None)
    return [base.with_order(r) for r in sorted(seen)]


def is_natural_order(S: FinStructure) -> bool:
    """Whether an ordered Boolean algebra or vector space carries a natural order.

    The candidate atom order (or basis) is read off the ranking itself, so no
    enumeration is needed: atoms in rank order; basis vectors as the least
    elements outside the span of the earlier ones.
    """
    if S.order is None:
        return False
    by_rank = S.sorted_by_order()
    if S.kind.family == "boolean":
        atom_order = [x.bit_length() - 1 for x in by_rank if x and x & (x - 1) == 0]
        return natural_ranking_boolean(S.m, atom_order) == S.order
    if S.kind.family == "vector":
        basis = vs_greedy_basis(S.d, S.p, by_rank)
        return natural_ranking_vs(S, basis) == S.order
    return True


# --- order classes --------------------------------------------------------------

@dataclass(frozen=True)
class OrderClassK:
    """An order expansion class over ``base`` kind.

    ``predicate`` is ``"all"`` (every linear order) or ``"natural"`` (natural
    orders of Boolean algebras or vector spaces).
    """

    base: StructKind
    predicate: str = "all"
    p: int = 2
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.base.is_ordered:
            raise InvalidDescriptor("base kind must be unordered")
        if self.predicate not in ("all", "natural"):
            raise InvalidDescriptor(f"unknown order predicate {self.predicate!r}")
        if self.predicate == "natural" and self.base.family == "relational":
            raise InvalidDescriptor("natural orders are defined for Boolean algebras and vector spaces")

    @property
    def kind(self) -> StructKind:
        return self.base.ordered

    def contains(self, T: FinStructure) -> bool:
        if T.kind is not self.kind:
            return False
        if T.kind.family == "vector" and T.p != self.p:
            return False
        return self.predicate == "all" or is_natural_order(T)

    def label(self) -> str:
        return self.name or f"{self.predicate}-orders/{self.base.value}"


ALL_ORDERS_ON_SETS = OrderClassK(StructKind.SET, "all", name="linear-orders")
ORDERED_GRAPHS = OrderClassK(StructKind.GRAPH, "all", name="ordered-graphs")
NATURAL_BA = OrderClassK(StructKind.BOOLALG, "natural", name="natural-ba")
NATURAL_VS2 = OrderClassK(StructKind.VECSPACE, "natural", p=2, name="natural-vs2")
NATURAL_VS3 = OrderClassK(StructKind.VECSPACE, "natural", p=3, name="natural-vs3")


def is_normal_ordering(S: FinStructure, ranking: Sequence[int], K: OrderClassK) -> bool:
    """Every generated substructure, with the restricted order, lies in K."""
    T = S.reduct().with_order(ranking)
    for U in subuniverses(T):
        A, _ = induced(T, U)
        if not K.contains(A):
            return False
    return True


def no_space(S: FinStructure, K: OrderClassK, cap: int = ORDER_CAP) -> list[Ranking]:
    """NO_K(S) as a sorted list of rankings.

    Within the cap this filters LO(n) by :func:`is_normal_ordering`. Above it,
    natural classes are generated directly (all atom orders, or all ordered
    bases); K is hereditary there, so both routes agree.
    """
    if S.n <= cap:
        return [r for r in all_linear_orders(S.n, cap) if is_normal_ordering(S, r, K)]
    if K.predicate == "natural" and S.kind.family == "boolean":
        return sorted({T.order for T in natural_orders_boolean(S)})
    if K.predicate == "natural" and S.kind.family == "vector":
        return [T.order for T in natural_orders_vs(S)]
    raise BoundTooLarge(f"NO space over {S.n} elements exceeds cap {cap}")


def k_expansions(S: FinStructure, K: OrderClassK, cap: int = ORDER_CAP) -> list[FinStructure]:
    """The K-expansions of S, one per isomorphism type, sorted by encoding."""
    reps: dict[bytes, FinStructure] = {}
    for r in no_space(S, K, cap):
        T = S.reduct().with_order(r)
        reps.setdefault(canonical_form(T).encoding, T)
    return [reps[e] for e in sorted(reps)]


def order_class_members(K: OrderClassK, bound: int) -> list[FinStructure]:
    """Members of K of size <= bound, one per isomorphism type."""
    if K.predicate == "natural":
        # any two natural orders of the same size are isomorphic: the bijection
        # carrying one atom order (ordered basis) to the other preserves both
        # the algebra and the induced orders, so the identity ranking suffices
        out = []
        for size in range(1 if K.base.family == "boolean" else 0, bound + 1):
            S = standard(K.base, size, K.p)
            out.append(S.with_order(range(S.n)))
        return sorted(out, key=lambda T: canonical_form(T).encoding)
    reps: dict[bytes, FinStructure] = {}
    for T in enumerate_class(K.kind, bound, p=K.p):
        reps.setdefault(canonical_form(T).encoding, T)
    return [reps[e] for e in sorted(reps)]


@dataclass
class ForgetfulReport:
    order_class: str
    bound: int
    pairs_checked: int
    counterexample: tuple[FinStructure, FinStructure] | None = None

    @property
    def order_forgetful(self) -> bool:
        return self.counterexample is None

    def to_json(self) -> dict[str, Any]:
        return {
            "check": "order_forgetful",
            "class": self.order_class,
            "bound": self.bound,
            "status": "pass" if self.order_forgetful else "fail",
            "pairs_checked": self.pairs_checked,
            "counterexample": None if self.counterexample is None
            else [T.to_json() for T in self.counterexample],
        }


def _forgetful_candidates(K: OrderClassK, bound: int) -> list[FinStructure]:
    """Members to compare: every expansion of every base structure, so that
    pairs with isomorphic reducts actually occur and the check is not vacuous.

    For "all" classes the base structures are one reduct per isomorphism type,
    each with every linear order; for natural classes they are the standard
    structures with every natural order.
    """
    if K.predicate != "natural":
        reducts: dict[bytes, FinStructure] = {}
        for T in order_class_members(K, bound):
            reducts.setdefault(canonical_form(T.reduct()).encoding, T.reduct())
        return [S.with_order(r) for S in reducts.values() for r in all_linear_orders(S.n)]
    out: list[FinStructure] = []
    for size in range(1 if K.base.family == "boolean" else 0, bound + 1):
        S = standard(K.base, size, K.p)
        out.extend(natural_orders_boolean(S) if K.base.family == "boolean" else natural_orders_vs(S))
    return out


def check_order_forgetful(K: OrderClassK, bound: int) -> ForgetfulReport:
    """Check that isomorphic reducts force isomorphic ordered structures.

    Members are compared pairwise in enumeration order; the first pair with
    isomorphic reducts but no order-preserving isomorphism is reported.
    """
    members = _forgetful_candidates(K, bound)
    reduct_enc = [canonical_form(X.reduct()).encoding for X in members]
    full_enc = [canonical_form(X).encoding for X in members]
    checked = 0
    for i, X in enumerate(members):
        for j in range(i + 1, len(members)):
            if reduct_enc[i] != reduct_enc[j]:
                continue
            checked += 1
            if full_enc[i] != full_enc[j]:
                return ForgetfulReport(K.label(), bound, checked, (X, members[j]))
    return ForgetfulReport(K.label(), bound, checked)


def _embeds(X: FinStructure, Y: FinStructure) -> bool:
    return next(iter_embedding_maps(X, Y), None) is not None


def check_ordering_property(K: OrderClassK, A: FinStructure, bound: int) -> FinStructure | None:
    """Least B (class order, size <= bound) such that every K-order on A embeds
    into every K-order on B."""
    if A.kind is not K.base:
        raise InvalidDescriptor("A must belong to the reduct class")
    a_orders = k_expansions(A, K)
    if K.base.family == "relational":
        candidates = enumerate_class(K.base, bound)
    else:
        candidates = [standard(K.base, s, K.p) for s in range(0 if K.base.family == "vector" else 1, bound + 1)]
    for B in candidates:
        if B.size < A.size:
            continue
        b_orders = k_expansions(B, K)
        if all(_embeds(X, Y) for X in a_orders for Y in b_orders):
            return B
    return None
