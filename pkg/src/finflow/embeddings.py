"""Embeddings, copies and automorphism groups.

Enumeration is by kind:

* relational kinds: backtracking over images of ``0, 1, ...`` in increasing
  order, checking injectivity, adjacency and order against earlier choices;
* Boolean algebras: embeddings are unital, so they correspond to ordered
  partitions of the target's atoms into one nonempty block per source atom;
* vector spaces: backtracking over images of the standard basis, keeping
  them independent and (for ordered spaces) checking the order on the span
  built so far.

Every routine returns results sorted by the element map, so output is
deterministic. :func:`is_embedding` is a separate brute-force validator that
does not share code with the enumerators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import InvalidEmbedding, KindMismatch
from .perm import PermGroup, identity
from .structures import (
    FinStructure,
    StructKind,
    subuniverses,
    vs_span,
    vs_tables,
)


@dataclass(frozen=True)
class Embedding:
    dom: FinStructure
    cod: FinStructure
    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(self.map))

    def __call__(self, x: int) -> int:
        return self.map[x]

    @property
    def image(self) -> tuple[int, ...]:
        return tuple(sorted(self.map))

    def compose(self, inner: "Embedding") -> "Embedding":
        """``self ∘ inner``."""
        return Embedding(inner.dom, self.cod, tuple(self.map[x] for x in inner.map))

    def validate(self) -> None:
        if not is_embedding(self.dom, self.cod, self.map):
            raise InvalidEmbedding(f"map {self.map} is not an embedding "
                                   f"{self.dom.describe()} -> {self.cod.describe()}")


@dataclass(frozen=True)
class CopySet:
    base: FinStructure
    pattern: FinStructure
    copies: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.copies)

    def index(self) -> dict[tuple[int, ...], int]:
        return {c: i for i, c in enumerate(self.copies)}


def is_embedding(A: FinStructure, C: FinStructure, f: Sequence[int]) -> bool:
    """Check every relation and operation of the kind directly."""
    if A.kind is not C.kind or len(f) != A.n:
        return False
    if any(not 0 <= y < C.n for y in f) or len(set(f)) != len(f):
        return False
    n = A.n
    if A.order is not None:
        for a in range(n):
            for b in range(n):
                if (A.order[a] < A.order[b]) != (C.order[f[a]] < C.order[f[b]]):
                    return False
    if A.adjacency is not None:
        for a in range(n):
            for b in range(n):
                if A.has_edge(a, b) != C.has_edge(f[a], f[b]):
                    return False
    fam = A.kind.family
    if fam == "boolean":
        top_a, top_c = (1 << A.m) - 1, (1 << C.m) - 1
        if f[0] != 0 or f[top_a] != top_c:
            return False
        for x in range(n):
            if f[top_a ^ x] != top_c ^ f[x]:
                return False
            for y in range(n):
                if f[x & y] != f[x] & f[y] or f[x | y] != f[x] | f[y]:
                    return False
    elif fam == "vector":
        if A.p != C.p:
            return False
        _, add_a, scal_a = vs_tables(A.d, A.p)
        _, add_c, scal_c = vs_tables(C.d, C.p)
        for x in range(n):
            for y in range(n):
                if f[add_a[x][y]] != add_c[f[x]][f[y]]:
                    return False
            for c in range(A.p):
                if f[scal_a[c][x]] != scal_c[c][f[x]]:
                    return False
    return True


def _check_kinds(A: FinStructure, C: FinStructure) -> None:
    if A.kind is not C.kind:
        raise KindMismatch(f"{A.kind.value} vs {C.kind.value}")
    if A.kind.family == "vector" and A.p != C.p:
        raise KindMismatch(f"field orders differ: {A.p} vs {C.p}")


def iter_embedding_maps(A: FinStructure, C: FinStructure,
                        fixed: dict[int, int] | None = None) -> Iterator[tuple[int, ...]]:
    """Element maps of all embeddings A -> C, optionally with prescribed values.

    Relational kinds are produced in lexicographic order; the algebraic kinds
    in the order of their generators (callers that need sorted output sort).
    """
    _check_kinds(A, C)
    fixed = fixed or {}
    fam = A.kind.family
    if fam == "relational":
        yield from _relational(A, C, fixed)
    elif fam == "boolean":
        for f in _boolean(A, C):
            if all(f[x] == y for x, y in fixed.items()):
                yield f
    else:
        for f in _vector(A, C):
            if all(f[x] == y for x, y in fixed.items()):
                yield f


def _relational(A: FinStructure, C: FinStructure, fixed: dict[int, int]) -> Iterator[tuple[int, ...]]:
    n = A.n
    if n > C.n:
        return
    f = [-1] * n
    used = [False] * C.n
    ordered = A.order is not None
    has_graph = A.adjacency is not None

    def ok(a: int, y: int) -> bool:
        for b in range(a):
            z = f[b]
            if ordered and (A.order[b] < A.order[a]) != (C.order[z] < C.order[y]):
                return False
            if has_graph and A.has_edge(a, b) != C.has_edge(y, z):
                return False
        return True

    def rec(a: int):
        if a == n:
            yield tuple(f)
            return
        cands = [fixed[a]] if a in fixed else range(C.n)
        for y in cands:
            if used[y] or not ok(a, y):
                continue
            f[a] = y
            used[y] = True
            yield from rec(a + 1)
            used[y] = False
        f[a] = -1

    yield from rec(0)


def _boolean(A: FinStructure, C: FinStructure) -> Iterator[tuple[int, ...]]:
    ma, mc = A.m, C.m
    if ma > mc:
        return
    ordered = A.order is not None
    for labels in itertools.product(range(ma), repeat=mc):
        blocks = [0] * ma
        for atom, lab in enumerate(labels):
            blocks[lab] |= 1 << atom
        if not all(blocks):
            continue
        f = []
        for s in range(1 << ma):
            v = 0
            for i in range(ma):
                if s >> i & 1:
                    v |= blocks[i]
            f.append(v)
        if ordered and not _order_ok(A, C, f, range(A.n)):
            continue
        yield tuple(f)


def _order_ok(A: FinStructure, C: FinStructure, f, elements) -> bool:
    els = sorted(elements, key=lambda x: A.order[x])
    ranks = [C.order[f[x]] for x in els]
    return all(r < s for r, s in zip(ranks, ranks[1:]))


def _vector(A: FinStructure, C: FinStructure) -> Iterator[tuple[int, ...]]:
    da, p = A.d, A.p
    if da > C.d:
        return
    _, add_c, scal_c = vs_tables(C.d, p)
    digits_a, _, _ = vs_tables(da, p)
    ordered = A.order is not None
    images: list[int] = []

    def build(k: int) -> list[int]:
        """Images of the elements of A lying in the span of the first k basis vectors."""
        out = []
        for x in range(p ** k):
            v = 0
            for j in range(k):
                c = digits_a[x][j] if j < da else 0
                if c:
                    v = add_c[v][scal_c[c][images[j]]]
            out.append(v)
        return out

    def rec(j: int):
        if j == da:
            yield tuple(build(da))
            return
        span = vs_span(C.d, p, images)
        for v in range(C.n):
            if v in span:
                continue
            images.append(v)
            if ordered:
                f = build(j + 1)
                if not _order_ok(A, C, f, range(p ** (j + 1))):
                    images.pop()
                    continue
            yield from rec(j + 1)
            images.pop()

    yield from rec(0)


def enumerate_embeddings(A: FinStructure, C: FinStructure) -> list[Embedding]:
    maps = sorted(iter_embedding_maps(A, C))
    return [Embedding(A, C, f) for f in maps]


def enumerate_copies(A: FinStructure, C: FinStructure) -> CopySet:
    """Distinct images of embeddings of A into C, lexicographically sorted.

    For unordered set, Boolean and vector kinds every subuniverse of the right
    size is a copy, so those are listed directly from the subuniverse
    enumerator; other kinds go through the embeddings.
    """
    _check_kinds(A, C)
    k = A.kind
    if k is StructKind.SET:
        imgs = set(itertools.combinations(range(C.n), A.n))
    elif k in (StructKind.BOOLALG, StructKind.VECSPACE):
        imgs = {tuple(sorted(u)) for u in subuniverses(C) if len(u) == A.n}
    else:
        imgs = {tuple(sorted(f)) for f in iter_embedding_maps(A, C)}
    return CopySet(C, A, tuple(sorted(imgs)))


def copies_via_embeddings(A: FinStructure, C: FinStructure) -> CopySet:
    """Copies computed from embedding images only (slow path, for cross-checks)."""
    imgs = {tuple(sorted(f)) for f in iter_embedding_maps(A, C)}
    return CopySet(C, A, tuple(sorted(imgs)))


def automorphism_group(S: FinStructure) -> PermGroup:
    els = sorted(iter_embedding_maps(S, S))
    if not els:
        els = [identity(S.n)]
    return PermGroup(S.n, elements=els)
