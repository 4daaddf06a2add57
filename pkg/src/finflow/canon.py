"""Canonical encodings, isomorphism tests and class enumeration.

Encodings start with a header (kind code, size, field order) so sorting by
encoding sorts first by kind and then by size. Bodies by kind:

* Set, BoolAlg, VecSpace: empty. The fixed coding already determines these
  up to isomorphism, and the relabelling is the identity.
* LinOrder and every ordered kind: elements are relabelled by rank. An
  isomorphism of ordered structures must be the unique order-preserving
  bijection, so it suffices to encode the remaining structure in rank
  coordinates (adjacency bits; atom decomposition; coordinates w.r.t. the
  rank-greedy basis).
* Graph: individualisation-refinement over equitable ordered partitions,
  taking the least leaf encoding. Twin vertices are branched on once.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple, Sequence

from .errors import BoundTooLarge, KindMismatch
from .perm import inverse
from .structures import (
    FinStructure,
    StructKind,
    graph,
    ordered_graph,
    pure_set,
    chain,
    boolean_algebra,
    vector_space,
    vs_greedy_basis,
    vs_tables,
)


class CanonicalForm(NamedTuple):
    encoding: bytes
    relabel: tuple[int, ...]  # relabel[x] = canonical label of element x

    @property
    def hex(self) -> str:
        return self.encoding.hex()


def _header(S: FinStructure) -> bytes:
    return bytes([S.kind.code]) + S.size.to_bytes(2, "big") + bytes([S.p or 0])


def _pack_graph(n: int, has_edge, label_of: Sequence[int]) -> bytes:
    """Upper-triangle adjacency bits in the order given by ``label_of`` (label -> vertex)."""
    bits = 0
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            bits = (bits << 1) | int(has_edge(label_of[i], label_of[j]))
            count += 1
    nbytes = (count + 7) // 8
    return bits.to_bytes(nbytes, "big") if nbytes else b""


def canonical_form(S: FinStructure) -> CanonicalForm:
    k = S.kind
    head = _header(S)
    if k in (StructKind.SET, StructKind.BOOLALG, StructKind.VECSPACE):
        return CanonicalForm(head, tuple(range(S.n)))
    if k is StructKind.GRAPH:
        enc, label_of = _graph_canon(S)
        return CanonicalForm(head + enc, inverse(label_of))
    relabel = tuple(S.order)
    by_rank = S.sorted_by_order()
    if k is StructKind.LINORDER:
        body = b""
    elif k is StructKind.ORDERED_GRAPH:
        body = _pack_graph(S.n, S.has_edge, by_rank)
    elif k is StructKind.ORDERED_BOOLALG:
        atoms = [x for x in by_rank if x and x & (x - 1) == 0]
        width = (S.m + 7) // 8
        body = b"".join(
            sum(1 << i for i, a in enumerate(atoms) if x & a).to_bytes(width, "big") for x in by_rank
        )
    else:
        basis = vs_greedy_basis(S.d, S.p, by_rank)
        coords = _coordinates(S.d, S.p, basis)
        body = b"".join(coords[x].to_bytes(2, "big") for x in by_rank)
    return CanonicalForm(head + body, relabel)


def _coordinates(d: int, p: int, basis: Sequence[int]) -> dict[int, int]:
    """Map each vector to the base-p code of its coordinates w.r.t. ``basis``."""
    _, add, scal = vs_tables(d, p)
    out = {0: 0}
    for j, b in enumerate(basis):
        new = {}
        for x, c in out.items():
            for a in range(1, p):
                new[add[x][scal[a][b]]] = c + a * p ** j
        out.update(new)
    return out


# --- graphs -------------------------------------------------------------------

def _refine(S: FinStructure, cells: list[list[int]]) -> list[list[int]]:
    """Coarsest equitable refinement; split pieces ordered by invariant signature."""
    adj = S.adjacency
    while True:
        cell_of = {}
        for ci, cell in enumerate(cells):
            for v in cell:
                cell_of[v] = ci
        masks = [sum(1 << v for v in cell) for cell in cells]
        new: list[list[int]] = []
        changed = False
        for cell in cells:
            if len(cell) == 1:
                new.append(cell)
                continue
            groups: dict[tuple[int, ...], list[int]] = {}
            for v in cell:
                sig = tuple(bin(adj[v] & mk).count("1") for mk in masks)
                groups.setdefault(sig, []).append(v)
            if len(groups) > 1:
                changed = True
            for sig in sorted(groups):
                new.append(sorted(groups[sig]))
        cells = new
        if not changed:
            return cells


def _graph_canon(S: FinStructure) -> tuple[bytes, tuple[int, ...]]:
    n = S.n
    if n == 0:
        return b"", ()
    adj = S.adjacency
    best: list = [None, None]

    def twins(u: int, v: int) -> bool:
        return (adj[u] & ~(1 << v)) == (adj[v] & ~(1 << u))

    def search(cells: list[list[int]]):
        cells = _refine(S, cells)
        if len(cells) == n:
            label_of = tuple(c[0] for c in cells)
            enc = _pack_graph(n, S.has_edge, label_of)
            if best[0] is None or enc < best[0]:
                best[0], best[1] = enc, label_of
            return
        target = min((i for i, c in enumerate(cells) if len(c) > 1), key=lambda i: (len(cells[i]), i))
        tried: list[int] = []
        for v in cells[target]:
            if any(twins(u, v) for u in tried):
                continue
            tried.append(v)
            rest = [u for u in cells[target] if u != v]
            search(cells[:target] + [[v], rest] + cells[target + 1:])

    search([list(range(n))])
    return best[0], best[1]


def brute_force_encoding(S: FinStructure) -> bytes:
    """Least encoding over all n! relabellings; an oracle for small graphs."""
    if S.kind is not StructKind.GRAPH:
        raise KindMismatch("brute-force oracle implemented for graphs only")
    return _header(S) + min(_pack_graph(S.n, S.has_edge, perm)
                            for perm in itertools.permutations(range(S.n)))


# --- isomorphism ----------------------------------------------------------------

def are_isomorphic(S: FinStructure, T: FinStructure) -> tuple[int, ...] | None:
    """An isomorphism ``S -> T`` as an element map, or None."""
    if S.kind is not T.kind:
        raise KindMismatch(f"{S.kind.value} vs {T.kind.value}")
    cs, ct = canonical_form(S), canonical_form(T)
    if cs.encoding != ct.encoding:
        return None
    t_of_label = inverse(ct.relabel)
    return tuple(t_of_label[cs.relabel[x]] for x in range(S.n))


# --- class enumeration ----------------------------------------------------------

CLASS_CAPS = {
    StructKind.SET: 12,
    StructKind.LINORDER: 12,
    StructKind.GRAPH: 6,
    StructKind.ORDERED_GRAPH: 5,
    StructKind.BOOLALG: 8,
    StructKind.ORDERED_BOOLALG: 3,
    StructKind.VECSPACE: 6,
    StructKind.ORDERED_VECSPACE: 1,
}


def enumerate_class(kind: StructKind, size_bound: int, *, min_size: int | None = None,
                    p: int = 2) -> list[FinStructure]:
    """One representative per isomorphism class with ``min_size <= size <= size_bound``.

    Size counts elements, atoms (Boolean algebras) or dimension (vector
    spaces). ``min_size`` defaults to 0, except 1 for Boolean algebras.
    Ordered algebraic kinds enumerate every ranking, so their caps are tiny;
    use the natural-order generators in :mod:`finflow.orders` instead.
    """
    cap = CLASS_CAPS[kind]
    if kind is StructKind.ORDERED_VECSPACE and p ** size_bound > 8:
        raise BoundTooLarge(f"ordered F_{p}^{size_bound} has too many rankings")
    if kind is not StructKind.ORDERED_VECSPACE and size_bound > cap:
        raise BoundTooLarge(f"{kind.value} enumeration capped at size {cap}")
    lo = (1 if kind.family == "boolean" else 0) if min_size is None else min_size
    if kind.family == "boolean":
        lo = max(lo, 1)
    reps: dict[bytes, FinStructure] = {}
    for size in range(lo, size_bound + 1):
        for S in _all_labelled(kind, size, p):
            enc = canonical_form(S).encoding
            if enc not in reps:
                reps[enc] = S
    return [reps[e] for e in sorted(reps)]


def _all_labelled(kind: StructKind, size: int, p: int):
    if kind is StructKind.SET:
        yield pure_set(size)
    elif kind is StructKind.LINORDER:
        yield chain(size)
    elif kind is StructKind.BOOLALG:
        yield boolean_algebra(size)
    elif kind is StructKind.VECSPACE:
        yield vector_space(size, p)
    elif kind in (StructKind.GRAPH, StructKind.ORDERED_GRAPH):
        pairs = list(itertools.combinations(range(size), 2))
        for mask in range(1 << len(pairs)):
            edges = [pr for i, pr in enumerate(pairs) if mask >> i & 1]
            # an ordered graph is fixed up to isomorphism by its edges in rank order
            yield graph(size, edges) if kind is StructKind.GRAPH else ordered_graph(size, edges)
    elif kind is StructKind.ORDERED_BOOLALG:
        for perm in itertools.permutations(range(1 << size)):
            yield boolean_algebra(size, perm)
    elif kind is StructKind.ORDERED_VECSPACE:
        for perm in itertools.permutations(range(p ** size)):
            yield vector_space(size, p, perm)
