"""Bounded checkers for the hereditary, joint-embedding and amalgamation properties.

Amalgamation is checked in its strong form: the witness ``(D, k, l)`` has
``k∘i == l∘j`` and the images of ``k`` and ``l`` meet exactly in the image of
``A``. A strong witness is in particular an ordinary one. Two facts keep the
search exhaustive but small:

* a witness may be replaced by the substructure generated by the two images,
  so only ``D`` generated by ``k(B) ∪ l(C)`` needs to be searched;
* for a strong amalgam, ``size(D) >= size(B) + size(C) - size(A)`` (elements
  for relational kinds, dimension for vector spaces, atoms for Boolean
  algebras, where the atoms of ``D`` under each atom of ``A`` must connect
  the two induced partitions).

For relational kinds ``D`` therefore lives on the pushout set, and the search
runs over its completions (cross edges, order interleavings). For algebraic
kinds the search runs over the class members of admissible size.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Sequence

from .canon import enumerate_class
from .embeddings import Embedding, automorphism_group, is_embedding, iter_embedding_maps
from .errors import BoundTooLarge, InvalidEmbedding, MembershipError
from .orders import OrderClassK, is_natural_order, order_class_members
from .perm import mul
from .structures import FinStructure, StructKind, generated, induced, subuniverses


@dataclass(frozen=True)
class ClassDescriptor:
    kind: StructKind
    size_bound: int
    predicate: str | Callable[[FinStructure], bool] | None = None
    p: int = 2
    name: str = field(default="", compare=False)

    def contains(self, S: FinStructure) -> bool:
        if S.kind is not self.kind:
            return False
        if S.kind.family == "vector" and S.p != self.p:
            return False
        if self.predicate is None:
            return True
        if self.predicate == "natural":
            return is_natural_order(S)
        return bool(self.predicate(S))

    def label(self) -> str:
        return self.name or self.kind.value

    def members(self, bound: int | None = None) -> list[FinStructure]:
        """Members up to ``bound``, one per isomorphism type, sorted by encoding."""
        bound = self.size_bound if bound is None else bound
        if self.predicate == "natural":
            return order_class_members(OrderClassK(self.kind.base, "natural", self.p), bound)
        out = enumerate_class(self.kind, bound, p=self.p)
        if callable(self.predicate):
            out = [S for S in out if self.predicate(S)]
        return out


SETS = ClassDescriptor(StructKind.SET, 6, name="sets")
CHAINS = ClassDescriptor(StructKind.LINORDER, 6, name="linear-orders")
GRAPHS = ClassDescriptor(StructKind.GRAPH, 4, name="graphs")
ORDERED_GRAPHS = ClassDescriptor(StructKind.ORDERED_GRAPH, 4, name="ordered-graphs")
BOOLEAN_ALGEBRAS = ClassDescriptor(StructKind.BOOLALG, 3, name="boolean-algebras")
NATURAL_BOOLEAN_ALGEBRAS = ClassDescriptor(StructKind.ORDERED_BOOLALG, 3, "natural",
                                           name="natural-boolean-algebras")
VECTOR_SPACES_F2 = ClassDescriptor(StructKind.VECSPACE, 3, p=2, name="vector-spaces-f2")
VECTOR_SPACES_F3 = ClassDescriptor(StructKind.VECSPACE, 2, p=3, name="vector-spaces-f3")
NATURAL_VECTOR_SPACES_F2 = ClassDescriptor(StructKind.ORDERED_VECSPACE, 3, "natural", p=2,
                                           name="natural-vector-spaces-f2")

SHIPPED_CLASSES = {c.name: c for c in (
    SETS, CHAINS, GRAPHS, ORDERED_GRAPHS, BOOLEAN_ALGEBRAS, NATURAL_BOOLEAN_ALGEBRAS,
    VECTOR_SPACES_F2, VECTOR_SPACES_F3, NATURAL_VECTOR_SPACES_F2)}


@dataclass
class AmalgamWitness:
    D: FinStructure
    k: Embedding
    l: Embedding

    def validate(self, i: Embedding, j: Embedding, strong: bool = True) -> bool:
        if not (is_embedding(self.k.dom, self.D, self.k.map) and is_embedding(self.l.dom, self.D, self.l.map)):
            return False
        if any(self.k.map[i.map[a]] != self.l.map[j.map[a]] for a in range(i.dom.n)):
            return False
        if strong:
            common = {self.k.map[x] for x in i.map}
            if set(self.k.map) & set(self.l.map) != common:
                return False
        return True

    def to_json(self) -> dict[str, Any]:
        return {"D": self.D.to_json(), "k": list(self.k.map), "l": list(self.l.map)}


@dataclass
class JointEmbedding:
    C: FinStructure
    f: Embedding
    g: Embedding

    def validate(self) -> bool:
        return is_embedding(self.f.dom, self.C, self.f.map) and is_embedding(self.g.dom, self.C, self.g.map)

    def to_json(self) -> dict[str, Any]:
        return {"C": self.C.to_json(), "f": list(self.f.map), "g": list(self.g.map)}


@dataclass
class FraisseReport:
    axiom: str
    cls: str
    bound: int
    instances: int = 0
    witness: dict[str, Any] | None = None
    counterexample: dict[str, Any] | None = None

    @property
    def ok(self) -> bool:
        return self.counterexample is None

    def to_json(self) -> dict[str, Any]:
        out = {"axiom": self.axiom, "class": self.cls, "bound": self.bound,
               "status": "pass" if self.ok else "fail", "instances": self.instances}
        if self.ok:
            out["witness"] = self.witness
        else:
            out["counterexample"] = self.counterexample
        return out


# --- hereditary property ---------------------------------------------------------

def check_hereditary(K: ClassDescriptor, bound: int | None = None) -> FraisseReport:
    bound = K.size_bound if bound is None else bound
    if bound > K.size_bound:
        raise BoundTooLarge(f"bound {bound} exceeds class bound {K.size_bound}")
    report = FraisseReport("HD", K.label(), bound)
    for B in K.members(bound):
        for seed, U in _seeds(B):
            report.instances += 1
            A, _ = induced(B, U)
            if not K.contains(A):
                report.counterexample = {"B": B.to_json(), "seed": list(seed),
                                         "substructure": A.to_json()}
                return report
    return report


def _seeds(B: FinStructure) -> Iterator[tuple[list[int], frozenset[int]]]:
    """Each distinct generated subuniverse with the least seed (bitmask order) producing it."""
    if B.n > 12:
        for U in subuniverses(B):
            yield sorted(U), U
        return
    seen: set[frozenset[int]] = set()
    for mask in range(1 << B.n):
        seed = [x for x in range(B.n) if mask >> x & 1]
        U = generated(B, seed)
        if U not in seen:
            seen.add(U)
            yield seed, U


# --- amalgamation ----------------------------------------------------------------

def _require(K: ClassDescriptor, *structs: FinStructure) -> None:
    for S in structs:
        if not K.contains(S):
            raise MembershipError(f"{S.describe()} is not in class {K.label()}")


def check_amalgamation(K: ClassDescriptor, A: FinStructure, B: FinStructure, C: FinStructure,
                       i: Embedding, j: Embedding, bound: int | None = None) -> AmalgamWitness | None:
    """Search a strong amalgam of ``i: A -> B`` and ``j: A -> C`` inside K."""
    _require(K, A, B, C)
    for e, dom, cod in ((i, A, B), (j, A, C)):
        if e.dom != dom or e.cod != cod or not is_embedding(dom, cod, e.map):
            raise InvalidEmbedding(f"{e.map} is not an embedding {dom.describe()} -> {cod.describe()}")
    bound = B.size + C.size if bound is None else bound
    lower = B.size + C.size - A.size
    if lower > bound:
        return None
    if K.kind.family == "relational":
        return _relational_amalgam(K, A, B, C, i.map, j.map)
    return _algebraic_amalgam(K, A, B, C, i.map, j.map, lower, bound)


def _algebraic_amalgam(K, A, B, C, i, j, lower, bound) -> AmalgamWitness | None:
    for D in K.members(bound):
        if D.size < lower:
            continue
        for l in iter_embedding_maps(C, D):
            fixed = {i[a]: l[j[a]] for a in range(A.n)}
            common = set(fixed.values())
            lset = set(l)
            for k in iter_embedding_maps(B, D, fixed):
                if set(k) & lset == common:
                    return AmalgamWitness(D, Embedding(B, D, k), Embedding(C, D, l))
    return None


def _relational_amalgam(K, A, B, C, i, j) -> AmalgamWitness | None:
    """Search completions of the pushout set ``B ⊔_A C``.

    B keeps labels ``0..|B|-1``; elements of C outside ``j(A)`` get fresh labels
    in increasing order.
    """
    nb = B.n
    j_inv = {j[a]: a for a in range(A.n)}
    l: list[int] = []
    fresh = nb
    for c in range(C.n):
        if c in j_inv:
            l.append(i[j_inv[c]])
        else:
            l.append(fresh)
            fresh += 1
    n = fresh
    k = tuple(range(nb))
    l = tuple(l)
    new_b = [x for x in range(nb) if x not in set(i)]
    new_c = [c for c in range(C.n) if c not in j_inv]
    cross = [(x, l[c]) for x in new_b for c in new_c]

    base_edges = set()
    if K.kind.has_graph:
        base_edges |= {(a, b) for a, b in B.edges()}
        base_edges |= {tuple(sorted((l[a], l[b]))) for a, b in C.edges()}

    if K.kind.is_ordered:
        b_seq = B.sorted_by_order()
        c_seq = [l[c] for c in C.sorted_by_order()]
        orders = _merges(b_seq, c_seq, set(i))
    else:
        orders = iter([None])

    for seq in orders:
        ranking = None
        if seq is not None:
            ranking = [0] * n
            for r, x in enumerate(seq):
                ranking[x] = r
        edge_choices = itertools.product((0, 1), repeat=len(cross)) if K.kind.has_graph else [()]
        for choice in edge_choices:
            edges = base_edges | {e for e, bit in zip(cross, choice) if bit}
            D = _make(K.kind, n, edges, ranking)
            if K.contains(D):
                return AmalgamWitness(D, Embedding(B, D, k), Embedding(C, D, l))
    return None


def _merges(xs: Sequence[int], ys: Sequence[int], shared: set[int]) -> Iterator[list[int]]:
    """Linear orders on the union of two chains extending both; shared points align."""
    out: list[int] = []

    def rec(a: int, b: int):
        if a == len(xs) and b == len(ys):
            yield list(out)
            return
        nx = xs[a] if a < len(xs) else None
        ny = ys[b] if b < len(ys) else None
        if nx is not None and nx in shared and ny == nx:
            out.append(nx)
            yield from rec(a + 1, b + 1)
            out.pop()
            return
        if nx is not None and nx not in shared:
            out.append(nx)
            yield from rec(a + 1, b)
            out.pop()
        if ny is not None and ny not in shared:
            out.append(ny)
            yield from rec(a, b + 1)
            out.pop()

    yield from rec(0, 0)


def _make(kind: StructKind, n: int, edges, ranking) -> FinStructure:
    from .structures import _adjacency

    adjacency = _adjacency(n, edges) if kind.has_graph else None
    return FinStructure(kind, n, adjacency=adjacency, order=tuple(ranking) if ranking is not None else None)


# --- joint embedding -------------------------------------------------------------

def check_jep(K: ClassDescriptor, A: FinStructure, B: FinStructure,
              bound: int | None = None) -> JointEmbedding | None:
    """A least member C of K (size <= bound) into which both A and B embed."""
    _require(K, A, B)
    bound = A.size + B.size if bound is None else bound
    if K.kind.family != "relational":
        for C in K.members(bound):
            f = next(iter_embedding_maps(A, C), None)
            g = next(iter_embedding_maps(B, C), None)
            if f is not None and g is not None:
                return JointEmbedding(C, Embedding(A, C, f), Embedding(B, C, g))
        return None
    # C generated by the two images: amalgamate over the largest common part first
    for t in range(min(A.n, B.n), -1, -1):
        if A.n + B.n - t > bound:
            break
        for SA in itertools.combinations(range(A.n), t):
            A0, inc_a = induced(A, SA)
            for SB in itertools.combinations(range(B.n), t):
                B0, inc_b = induced(B, SB)
                for iso in iter_embedding_maps(A0, B0):
                    j = tuple(inc_b[x] for x in iso)
                    w = _relational_amalgam(K, A0, A, B, inc_a, j)
                    if w is not None:
                        return JointEmbedding(w.D, w.k, w.l)
    return None


# --- grid drivers ----------------------------------------------------------------

def _orbit_reps(maps: list[tuple[int, ...]], group) -> list[tuple[int, ...]]:
    """Representatives of the left-composition action of ``group`` on embedding maps."""
    seen: set[tuple[int, ...]] = set()
    reps = []
    for f in maps:
        if f in seen:
            continue
        reps.append(f)
        for g in group.elements:
            seen.add(mul(g, f))
    return reps


def amalgamation_grid(K: ClassDescriptor, bound: int | None = None) -> FraisseReport:
    """Check AP on every (A, B, C, i, j) with members up to ``bound``.

    ``i`` and ``j`` range over orbit representatives of Aut(B) and Aut(C):
    post-composing with automorphisms does not change solvability.
    """
    bound = K.size_bound if bound is None else bound
    report = FraisseReport("AP", K.label(), bound)
    members = K.members(bound)
    auts = {S: automorphism_group(S) for S in members}
    emb_reps: dict[tuple[FinStructure, FinStructure], list] = {}
    for A in members:
        for B in members:
            maps = sorted(iter_embedding_maps(A, B)) if A.size <= B.size else []
            emb_reps[A, B] = _orbit_reps(maps, auts[B]) if maps else []
    for A in members:
        for B in members:
            for C in members:
                if C.size < B.size:
                    continue  # (B, C) and (C, B) are mirror instances
                for i in emb_reps[A, B]:
                    for j in emb_reps[A, C]:
                        if B == C and j < i:
                            continue
                        report.instances += 1
                        I, J = Embedding(A, B, i), Embedding(A, C, j)
                        w = check_amalgamation(K, A, B, C, I, J)
                        if w is None or not w.validate(I, J):
                            report.counterexample = {"A": A.to_json(), "B": B.to_json(),
                                                     "C": C.to_json(), "i": list(i), "j": list(j)}
                            return report
    return report


def jep_grid(K: ClassDescriptor, bound: int | None = None) -> FraisseReport:
    bound = K.size_bound if bound is None else bound
    report = FraisseReport("JEP", K.label(), bound)
    members = K.members(bound)
    for x, A in enumerate(members):
        for B in members[x:]:
            report.instances += 1
            w = check_jep(K, A, B)
            if w is None or not w.validate():
                report.counterexample = {"A": A.to_json(), "B": B.to_json()}
                return report
    return report


def fraisse_grid(K: ClassDescriptor, bound: int | None = None,
                 axioms: Sequence[str] = ("HD", "JEP", "AP")) -> list[FraisseReport]:
    out = []
    for ax in axioms:
        if ax == "HD":
            out.append(check_hereditary(K, bound))
        elif ax == "JEP":
            out.append(jep_grid(K, bound))
        elif ax == "AP":
            out.append(amalgamation_grid(K, bound))
        else:
            raise ValueError(f"unknown axiom {ax!r}")
    return out
