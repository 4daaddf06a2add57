"""Finite structures of the supported kinds, with a fixed element coding.

Universes are always ``0..n-1``:

* relational kinds (sets, chains, graphs and their ordered versions) use the
  element numbers directly;
* Boolean algebras with ``m`` atoms code an element as the bitmask of the
  atoms below it, so ``0`` is bottom, ``2**m - 1`` is top and atom ``i`` is
  ``1 << i``;
* vector spaces ``F_p^d`` code a vector by its base-``p`` digits, least
  significant digit first: element ``x`` has coordinate ``j`` equal to
  ``(x // p**j) % p``.

Orders are stored as rankings: ``order[x]`` is the position of ``x``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Iterator, Sequence

from .errors import InvalidDescriptor

Ranking = tuple[int, ...]


class StructKind(enum.Enum):
    SET = "Set"
    LINORDER = "LinOrder"
    GRAPH = "Graph"
    ORDERED_GRAPH = "OrderedGraph"
    BOOLALG = "BoolAlg"
    ORDERED_BOOLALG = "OrderedBoolAlg"
    VECSPACE = "VecSpace"
    ORDERED_VECSPACE = "OrderedVecSpace"

    @property
    def code(self) -> int:
        return _KIND_CODES[self]

    @property
    def is_ordered(self) -> bool:
        return self in _ORDERED_TO_BASE

    @property
    def base(self) -> "StructKind":
        """The kind obtained by forgetting the order."""
        return _ORDERED_TO_BASE.get(self, self)

    @property
    def ordered(self) -> "StructKind":
        """The kind obtained by adding a linear order."""
        if self.is_ordered:
            return self
        return _BASE_TO_ORDERED[self]

    @property
    def family(self) -> str:
        b = self.base
        if b is StructKind.BOOLALG:
            return "boolean"
        if b is StructKind.VECSPACE:
            return "vector"
        return "relational"

    @property
    def has_graph(self) -> bool:
        return self.base is StructKind.GRAPH

    @classmethod
    def parse(cls, text: str) -> "StructKind":
        key = text.replace("-", "").replace("_", "").lower()
        for k in cls:
            if k.value.lower() == key or k.name.replace("_", "").lower() == key:
                return k
        aliases = {"chain": cls.LINORDER, "linearorder": cls.LINORDER, "ba": cls.BOOLALG,
                   "vs": cls.VECSPACE, "orderedba": cls.ORDERED_BOOLALG,
                   "orderedvs": cls.ORDERED_VECSPACE}
        if key in aliases:
            return aliases[key]
        raise InvalidDescriptor(f"unknown structure kind {text!r}")


_KIND_CODES = {k: i + 1 for i, k in enumerate(StructKind)}
_ORDERED_TO_BASE = {
    StructKind.LINORDER: StructKind.SET,
    StructKind.ORDERED_GRAPH: StructKind.GRAPH,
    StructKind.ORDERED_BOOLALG: StructKind.BOOLALG,
    StructKind.ORDERED_VECSPACE: StructKind.VECSPACE,
}
_BASE_TO_ORDERED = {v: k for k, v in _ORDERED_TO_BASE.items()}


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, int(p ** 0.5) + 1))


@dataclass(frozen=True)
class FinStructure:
    kind: StructKind
    n: int
    m: int | None = None
    d: int | None = None
    p: int | None = None
    adjacency: tuple[int, ...] | None = None
    order: Ranking | None = None
    _hash: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        _validate(self)
        object.__setattr__(self, "_hash", hash((self.kind, self.n, self.m, self.d, self.p,
                                                 self.adjacency, self.order)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def params(self) -> dict[str, int]:
        if self.kind.family == "boolean":
            return {"m": self.m}
        if self.kind.family == "vector":
            return {"d": self.d, "p": self.p}
        return {"n": self.n}

    @property
    def size(self) -> int:
        """Size in the unit used for class bounds: elements, atoms, or dimension."""
        if self.kind.family == "boolean":
            return self.m
        if self.kind.family == "vector":
            return self.d
        return self.n

    @property
    def universe(self) -> range:
        return range(self.n)

    def has_edge(self, a: int, b: int) -> bool:
        return bool(self.adjacency[a] >> b & 1)

    def edges(self) -> list[tuple[int, int]]:
        if self.adjacency is None:
            return []
        return [(a, b) for a in range(self.n) for b in range(a + 1, self.n) if self.has_edge(a, b)]

    def less(self, a: int, b: int) -> bool:
        return self.order[a] < self.order[b]

    def sorted_by_order(self) -> list[int]:
        """Elements listed from least to greatest."""
        out = [0] * self.n
        for x, r in enumerate(self.order):
            out[r] = x
        return out

    def reduct(self) -> "FinStructure":
        """Forget the linear order."""
        if not self.kind.is_ordered:
            return self
        return FinStructure(self.kind.base, self.n, self.m, self.d, self.p, self.adjacency, None)

    def with_order(self, ranking: Sequence[int]) -> "FinStructure":
        """Expand (or re-expand) by the given ranking."""
        return FinStructure(self.kind.ordered, self.n, self.m, self.d, self.p,
                            self.adjacency, tuple(ranking))

    def describe(self) -> str:
        p = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.kind.value}({p})"

    def to_json(self) -> dict[str, Any]:
        rel: dict[str, Any] = {}
        if self.adjacency is not None:
            rel["adjacency"] = [format(row, "x") for row in self.adjacency]
        if self.order is not None:
            rel["order"] = list(self.order)
        return {"kind": self.kind.value, "params": self.params, "relations": rel}


def _validate(s: FinStructure) -> None:
    k = s.kind
    if s.n < 0:
        raise InvalidDescriptor("element count must be non-negative")
    if k.family == "boolean":
        if s.m is None or s.m < 1:
            raise InvalidDescriptor("Boolean algebra needs m >= 1 atoms")
        if s.n != 1 << s.m:
            raise InvalidDescriptor(f"Boolean algebra with {s.m} atoms has 2^{s.m} elements")
    elif k.family == "vector":
        if s.p is None or not is_prime(s.p):
            raise InvalidDescriptor(f"field order p={s.p} is not prime")
        if s.d is None or s.d < 0:
            raise InvalidDescriptor("dimension must be non-negative")
        if s.n != s.p ** s.d:
            raise InvalidDescriptor(f"F_{s.p}^{s.d} has {s.p ** s.d} elements")
    if k.has_graph:
        adj = s.adjacency
        if adj is None or len(adj) != s.n:
            raise InvalidDescriptor("graph adjacency must be square")
        for a in range(s.n):
            if adj[a] >> a & 1:
                raise InvalidDescriptor("graph adjacency must be irreflexive")
            if adj[a] >> s.n:
                raise InvalidDescriptor("adjacency row has bits beyond the universe")
            for b in range(s.n):
                if (adj[a] >> b & 1) != (adj[b] >> a & 1):
                    raise InvalidDescriptor("graph adjacency must be symmetric")
    elif s.adjacency is not None:
        raise InvalidDescriptor(f"{k.value} carries no adjacency")
    if k.is_ordered:
        if s.order is None or sorted(s.order) != list(range(s.n)):
            raise InvalidDescriptor("order must be a total ranking of all elements")
    elif s.order is not None:
        raise InvalidDescriptor(f"{k.value} carries no order")


# --- constructors -----------------------------------------------------------

def pure_set(n: int) -> FinStructure:
    return FinStructure(StructKind.SET, n)


def chain(n: int, ranking: Sequence[int] | None = None) -> FinStructure:
    return FinStructure(StructKind.LINORDER, n, order=tuple(ranking) if ranking is not None else tuple(range(n)))


def _adjacency(n: int, edges: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    rows = [0] * n
    for a, b in edges:
        if not (0 <= a < n and 0 <= b < n):
            raise InvalidDescriptor(f"edge {(a, b)} outside universe")
        rows[a] |= 1 << b
        rows[b] |= 1 << a
    return tuple(rows)


def graph(n: int, edges: Iterable[tuple[int, int]] = ()) -> FinStructure:
    return FinStructure(StructKind.GRAPH, n, adjacency=_adjacency(n, edges))


def ordered_graph(n: int, edges: Iterable[tuple[int, int]] = (),
                  ranking: Sequence[int] | None = None) -> FinStructure:
    order = tuple(ranking) if ranking is not None else tuple(range(n))
    return FinStructure(StructKind.ORDERED_GRAPH, n, adjacency=_adjacency(n, edges), order=order)


def boolean_algebra(m: int, ranking: Sequence[int] | None = None) -> FinStructure:
    if m < 1:
        raise InvalidDescriptor("Boolean algebra needs m >= 1 atoms")
    if ranking is None:
        return FinStructure(StructKind.BOOLALG, 1 << m, m=m)
    return FinStructure(StructKind.ORDERED_BOOLALG, 1 << m, m=m, order=tuple(ranking))


def vector_space(d: int, p: int, ranking: Sequence[int] | None = None) -> FinStructure:
    if not is_prime(p):
        raise InvalidDescriptor(f"field order p={p} is not prime")
    if d < 0:
        raise InvalidDescriptor("dimension must be non-negative")
    if ranking is None:
        return FinStructure(StructKind.VECSPACE, p ** d, d=d, p=p)
    return FinStructure(StructKind.ORDERED_VECSPACE, p ** d, d=d, p=p, order=tuple(ranking))


def standard(kind: StructKind, size: int, p: int = 2) -> FinStructure:
    """The standard member of ``kind`` of the given size.

    Ordered algebraic kinds get the natural order for the standard atom order
    or basis, which in the fixed coding is the integer order.
    """
    if kind is StructKind.SET:
        return pure_set(size)
    if kind is StructKind.LINORDER:
        return chain(size)
    if kind is StructKind.BOOLALG:
        return boolean_algebra(size)
    if kind is StructKind.ORDERED_BOOLALG:
        return boolean_algebra(size, range(1 << size))
    if kind is StructKind.VECSPACE:
        return vector_space(size, p)
    if kind is StructKind.ORDERED_VECSPACE:
        return vector_space(size, p, range(p ** size))
    if kind is StructKind.GRAPH:
        return graph(size)
    if kind is StructKind.ORDERED_GRAPH:
        return ordered_graph(size)
    raise InvalidDescriptor(f"no standard member for {kind}")


def build_structure(desc: dict[str, Any]) -> FinStructure:
    """Build and validate a structure from its JSON descriptor.

    ``{"kind": ..., "params": {...}, "relations": {"adjacency": [hex rows],
    "order": [ranking]}}``. For graphs, ``relations.edges`` (pairs) is also
    accepted in place of ``adjacency``.
    """
    if not isinstance(desc, dict) or "kind" not in desc:
        raise InvalidDescriptor("descriptor needs a 'kind'")
    kind = StructKind.parse(str(desc["kind"]))
    params = dict(desc.get("params") or {})
    rel = dict(desc.get("relations") or {})
    order = rel.get("order")
    if order is not None:
        order = tuple(int(x) for x in order)
    if kind.is_ordered and order is None:
        raise InvalidDescriptor(f"{kind.value} needs relations.order")
    try:
        if kind.family == "boolean":
            m = int(params["m"])
            if m < 1:
                raise InvalidDescriptor("Boolean algebra needs m >= 1 atoms")
            return FinStructure(kind, 1 << m, m=m, order=order)
        if kind.family == "vector":
            d, p = int(params["d"]), int(params["p"])
            if not is_prime(p):
                raise InvalidDescriptor(f"field order p={p} is not prime")
            if d < 0:
                raise InvalidDescriptor("dimension must be non-negative")
            return FinStructure(kind, p ** d, d=d, p=p, order=order)
        n = int(params["n"])
    except KeyError as exc:
        raise InvalidDescriptor(f"missing parameter {exc.args[0]!r} for {kind.value}") from None
    except (TypeError, ValueError):
        raise InvalidDescriptor("parameters must be integers") from None
    adjacency = None
    if kind.has_graph:
        if "adjacency" in rel:
            adjacency = tuple(int(str(row), 16) for row in rel["adjacency"])
        else:
            adjacency = _adjacency(n, [tuple(e) for e in rel.get("edges", [])])
    return FinStructure(kind, n, adjacency=adjacency, order=order)


# --- vector space arithmetic --------------------------------------------------

@lru_cache(maxsize=None)
def vs_tables(d: int, p: int) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    """(digits, addition table, scalar table) for F_p^d in the fixed coding."""
    n = p ** d
    digits = tuple(tuple((x // p ** j) % p for j in range(d)) for x in range(n))

    def code(vec):
        return sum(c * p ** j for j, c in enumerate(vec))

    add = tuple(tuple(code((a + b) % p for a, b in zip(digits[x], digits[y])) for y in range(n))
                for x in range(n))
    scal = tuple(tuple(code((c * a) % p for a in digits[x]) for x in range(n)) for c in range(p))
    return digits, add, scal


def vs_span(d: int, p: int, vectors: Iterable[int]) -> frozenset[int]:
    _, add, scal = vs_tables(d, p)
    cur = {0}
    for v in vectors:
        if v in cur:
            continue
        mults = [scal[c][v] for c in range(p)]
        cur = {add[x][w] for x in cur for w in mults}
    return frozenset(cur)


def vs_greedy_basis(d: int, p: int, elements: Iterable[int]) -> list[int]:
    """Basis of the span of ``elements`` built by scanning them in the given order."""
    basis: list[int] = []
    span = frozenset({0})
    for x in elements:
        if x not in span:
            basis.append(x)
            span = vs_span(d, p, basis)
    return basis


def vs_combination(d: int, p: int, basis: Sequence[int], coeff_code: int) -> int:
    """Element ``sum c_j * basis[j]`` where ``c_j`` are the base-p digits of coeff_code."""
    _, add, scal = vs_tables(d, p)
    out = 0
    for b in basis:
        c = coeff_code % p
        coeff_code //= p
        if c:
            out = add[out][scal[c][b]]
    return out


# --- substructures ------------------------------------------------------------

def generated(S: FinStructure, seed: Iterable[int]) -> frozenset[int]:
    """The subuniverse generated by ``seed``.

    Boolean algebras: the subalgebra whose atoms are the nonempty cells of the
    partition of S's atoms by membership in the seed elements. Vector spaces:
    the span. Relational kinds: the seed itself.
    """
    seed = list(seed)
    for x in seed:
        if not 0 <= x < S.n:
            raise InvalidDescriptor(f"seed element {x} outside universe")
    fam = S.kind.family
    if fam == "relational":
        return frozenset(seed)
    if fam == "vector":
        return vs_span(S.d, S.p, seed)
    blocks: dict[tuple[int, ...], int] = {}
    for a in range(S.m):
        sig = tuple(x >> a & 1 for x in seed)
        blocks[sig] = blocks.get(sig, 0) | (1 << a)
    return _unions(list(blocks.values()))


def _unions(blocks: Sequence[int]) -> frozenset[int]:
    out = {0}
    for b in blocks:
        out |= {x | b for x in out}
    return frozenset(out)


def set_partitions(items: Sequence[int]) -> Iterator[list[list[int]]]:
    """All set partitions, via restricted growth strings (deterministic order)."""
    n = len(items)
    if n == 0:
        yield []
        return
    labels = [0] * n

    def rec(i: int, top: int):
        if i == n:
            blocks: list[list[int]] = [[] for _ in range(top + 1)]
            for it, lab in zip(items, labels):
                blocks[lab].append(it)
            yield blocks
            return
        for lab in range(top + 2):
            labels[i] = lab
            yield from rec(i + 1, max(top, lab))

    labels[0] = 0
    yield from rec(1, 0)


def subuniverses(S: FinStructure) -> list[frozenset[int]]:
    """Every distinct generated subuniverse, sorted by size then elements."""
    fam = S.kind.family
    if fam == "relational":
        out = [frozenset(c) for r in range(S.n + 1) for c in itertools.combinations(range(S.n), r)]
    elif fam == "boolean":
        out = [_unions([sum(1 << a for a in blk) for blk in part])
               for part in set_partitions(list(range(S.m)))]
    else:
        out = _subspaces(S.d, S.p)
    return sorted(set(out), key=lambda u: (len(u), sorted(u)))


@lru_cache(maxsize=None)
def _subspaces(d: int, p: int) -> list[frozenset[int]]:
    n = p ** d
    seen = {frozenset({0})}
    frontier = [frozenset({0})]
    while frontier:
        nxt = []
        for W in frontier:
            for v in range(n):
                if v not in W:
                    U = vs_span(d, p, vs_greedy_basis(d, p, sorted(W)) + [v])
                    if U not in seen:
                        seen.add(U)
                        nxt.append(U)
        frontier = nxt
    return list(seen)


def atoms_of(S: FinStructure, universe: Iterable[int]) -> list[int]:
    """Atoms of a Boolean subalgebra given by its element set, ascending."""
    u = sorted(universe)
    nonzero = [x for x in u if x]
    return [x for x in nonzero if not any(y != x and y & x == y for y in nonzero)]


def induced(S: FinStructure, universe: Iterable[int]) -> tuple[FinStructure, tuple[int, ...]]:
    """The substructure on a subuniverse, relabelled into the fixed coding.

    Returns ``(A, inclusion)`` where ``inclusion[i]`` is the element of S that
    element ``i`` of A stands for. ``universe`` must already be closed.
    """
    u = sorted(set(universe))
    fam = S.kind.family
    if fam == "relational":
        incl = tuple(u)
        adjacency = None
        if S.kind.has_graph:
            adjacency = tuple(sum(1 << j for j, b in enumerate(incl) if S.has_edge(a, b)) for a in incl)
        A = FinStructure(S.kind, len(incl), adjacency=adjacency,
                         order=_restrict_ranking(S.order, incl) if S.order is not None else None)
        return A, incl
    if fam == "boolean":
        at = atoms_of(S, u)
        k = len(at)
        if k == 0 or len(u) != 1 << k:
            raise InvalidDescriptor("subset is not a Boolean subalgebra")
        incl = tuple(_or_of(at, s) for s in range(1 << k))
        if set(incl) != set(u) or incl[-1] != (1 << S.m) - 1:
            raise InvalidDescriptor("subset is not a Boolean subalgebra")
        order = _restrict_ranking(S.order, incl) if S.order is not None else None
        return FinStructure(S.kind, 1 << k, m=k, order=order), incl
    basis = vs_greedy_basis(S.d, S.p, u)
    k = len(basis)
    if len(u) != S.p ** k:
        raise InvalidDescriptor("subset is not a subspace")
    incl = tuple(vs_combination(S.d, S.p, basis, c) for c in range(S.p ** k))
    if set(incl) != set(u):
        raise InvalidDescriptor("subset is not a subspace")
    order = _restrict_ranking(S.order, incl) if S.order is not None else None
    return FinStructure(S.kind, S.p ** k, d=k, p=S.p, order=order), incl


def _or_of(atoms: Sequence[int], s: int) -> int:
    out = 0
    for i, a in enumerate(atoms):
        if s >> i & 1:
            out |= a
    return out


def _restrict_ranking(ranking: Sequence[int], elements: Sequence[int]) -> Ranking:
    ranks = [ranking[x] for x in elements]
    pos = {r: i for i, r in enumerate(sorted(ranks))}
    return tuple(pos[r] for r in ranks)


def restrict_ranking(ranking: Sequence[int], elements: Sequence[int]) -> Ranking:
    """Ranking induced on ``elements`` (listed in the sub-universe's own numbering)."""
    return _restrict_ranking(ranking, elements)


def substructure_generated(S: FinStructure, seed: Iterable[int]):
    """Smallest substructure containing ``seed``, with its inclusion embedding."""
    from .embeddings import Embedding

    A, incl = induced(S, generated(S, seed))
    return A, Embedding(A, S, incl)
