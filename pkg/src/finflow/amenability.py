"""Extreme-amenability criteria for finite permutation groups.

For a finite group the universal minimal flow is a point exactly when the
group is trivial, so every criterion here must agree with ``G.order == 1``.
The module mechanizes the stabilizer criterion, the colouring criterion on
left cosets of pointwise stabilizers and the preserved-order criterion, and
cross-checks them on each instance. It also checks that naturally ordered
finite Boolean algebras and vector spaces are rigid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Any, Sequence

from .dynamics import act_on_order, pointwise_stabilizer, setwise_stabilizer
from .embeddings import automorphism_group
from .errors import BoundTooLarge, EquivalenceViolated, NotNaturallyOrdered, ShapeMismatch
from .orders import is_natural_order
from .perm import PermGroup
from .structures import FinStructure

DEGREE_CAP = 64
COLORING_COSET_CAP = 12
COLORING_K_CAP = 3

LIMITATION = ("finite groups: extreme amenability reduces to triviality; "
              "the report checks that the criteria agree with that")


def point_subsets(degree: int):
    """All point subsets, ordered by size and then lexicographically."""
    for r in range(degree + 1):
        yield from combinations(range(degree), r)


# --- condition (b)(i): setwise stabilizers equal pointwise ones ------------------

def check_condition_b_i(G: PermGroup) -> tuple[int, ...] | None:
    """Least A (by size, then lex) whose setwise stabilizer exceeds its pointwise one."""
    if G.degree > DEGREE_CAP:
        raise BoundTooLarge(f"degree {G.degree} above {DEGREE_CAP}")
    for A in point_subsets(G.degree):
        if setwise_stabilizer(G, A).order != pointwise_stabilizer(G, A).order:
            return A
    return None


# --- condition (b)(ii): colourings of left cosets of G_A --------------------------

def left_cosets(G: PermGroup, A: Sequence[int]) -> list[tuple[int, ...]]:
    """Left cosets hG_A, each as its sorted element indices, ordered by least element.

    hG_A is determined by the map ``a -> h[a]`` on A, which is how the cosets
    are grouped. This order is the one colourings are indexed by.
    """
    groups: dict[tuple[int, ...], list[int]] = {}
    for i, h in enumerate(G.elements):
        groups.setdefault(tuple(h[a] for a in A), []).append(i)
    return sorted((tuple(v) for v in groups.values()), key=lambda c: c[0])


def check_condition_b_ii(G: PermGroup, A: Sequence[int], B: Sequence[int],
                         c: Sequence[int], k: int) -> tuple[tuple[int, ...], int] | None:
    """First g (in element order) and colour i with c(hG_A) = i whenever h[A] ⊆ g[B]."""
    A, B = list(A), list(B)
    if not set(A) <= set(B) or any(not 0 <= x < G.degree for x in B):
        raise ShapeMismatch("A must be a subset of B inside the point set")
    cosets = left_cosets(G, A)
    if len(c) != len(cosets):
        raise ShapeMismatch(f"colouring has {len(c)} entries for {len(cosets)} cosets")
    if k < 1 or any(not 0 <= x < k for x in c):
        raise ShapeMismatch("colours must lie in range(k)")
    for g in G.elements:
        target = frozenset(g[b] for b in B)
        seen = {c[ci] for ci, cos in enumerate(cosets)
                if all(G.elements[cos[0]][a] in target for a in A)}
        if len(seen) == 1:
            return g, seen.pop()
    return None


def b_ii_scan(G: PermGroup, k: int = 2) -> dict[str, Any]:
    """Search for an (A, c) with B = all points for which no witness g exists.

    Colourings are enumerated exhaustively when there are at most
    ``COLORING_COSET_CAP`` cosets; otherwise only the colouring that separates
    the first coset from the rest is tried.
    """
    if k > COLORING_K_CAP:
        raise BoundTooLarge(f"k={k} above {COLORING_K_CAP}")
    everything = list(range(G.degree))
    instances = 0
    for A in point_subsets(G.degree):
        n_cosets = len(left_cosets(G, A))
        if n_cosets <= COLORING_COSET_CAP:
            colourings = product(range(k), repeat=n_cosets)
        else:
            colourings = [(0,) + (1,) * (n_cosets - 1)]
        for c in colourings:
            instances += 1
            if check_condition_b_ii(G, A, everything, c, k) is None:
                return {"status": "fail", "instances": instances,
                        "witness": {"A": list(A), "B": everything, "coloring": list(c), "k": k}}
    return {"status": "pass", "instances": instances, "witness": None}


# --- condition (c)(i'): a preserved linear order ------------------------------------

def preserves_linear_order(G: PermGroup) -> tuple[int, ...] | None:
    """A ranking fixed by every element, or None.

    The least point of a preserved order is fixed by all of G, and so on down
    the order, so the search only ever places common fixed points. Among the
    preserved orders the one listing points in increasing order is returned.
    """
    if G.degree > DEGREE_CAP:
        raise BoundTooLarge(f"degree {G.degree} above {DEGREE_CAP}")
    placed: list[int] = []
    remaining = list(range(G.degree))
    while remaining:
        fixed = [x for x in remaining if all(g[x] == x for g in G.elements)]
        if not fixed:
            return None
        placed.append(fixed[0])
        remaining.remove(fixed[0])
    ranking = [0] * G.degree
    for r, x in enumerate(placed):
        ranking[x] = r
    ranking = tuple(ranking)
    if any(act_on_order(g, ranking) != ranking for g in G.elements):
        raise EquivalenceViolated("constructed order is not preserved")
    return ranking


# --- report ------------------------------------------------------------------------

@dataclass
class AmenabilityReport:
    verdict: bool
    condition_b_i: dict[str, Any]
    condition_c_i: dict[str, Any]
    condition_b_ii: dict[str, Any]
    cross_check: bool
    group_order: int
    degree: int
    note: str = field(default=LIMITATION)

    def to_json(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "group_order": self.group_order,
            "degree": self.degree,
            "condition_b_i": self.condition_b_i,
            "condition_c_i": self.condition_c_i,
            "condition_b_ii": self.condition_b_ii,
            "cross_check": self.cross_check,
            "note": self.note,
        }


def is_extremely_amenable_finite(G: PermGroup) -> AmenabilityReport:
    A = check_condition_b_i(G)
    b_i = {"status": "pass" if A is None else "fail", "witness": None if A is None else list(A)}
    order = preserves_linear_order(G)
    c_i = {"status": "pass" if order is not None else "fail",
           "order": None if order is None else list(order)}
    b_ii = b_ii_scan(G)
    trivial = G.order == 1
    verdicts = {trivial, A is None, order is not None, b_ii["status"] == "pass"}
    if len(verdicts) != 1:
        raise EquivalenceViolated(
            f"criteria disagree: trivial={trivial}, b_i={b_i['status']}, "
            f"c_i={c_i['status']}, b_ii={b_ii['status']}")
    return AmenabilityReport(trivial, b_i, c_i, b_ii, True, G.order, G.degree)


# --- rigidity of natural orders -----------------------------------------------------

def ordered_rigidity_check(S: FinStructure) -> bool:
    """Whether a naturally ordered Boolean algebra or vector space has only the identity automorphism."""
    if S.kind.family not in ("boolean", "vector") or not is_natural_order(S):
        raise NotNaturallyOrdered("expected a naturally ordered Boolean algebra or vector space")
    return automorphism_group(S).is_trivial()
