"""Finite Ramsey arrows ``C -> (B)^A_k`` with checkable certificates.

The search colours the copies of A in C one at a time (in the branching
order) and backtracks as soon as some copy of B has all its A-subcopies
coloured alike. Two symmetries are broken:

* colours: a colour is used only after every smaller colour has appeared;
* Aut(C): a partial colouring is dropped when some automorphism, followed by
  renaming colours by first appearance, produces a colouring that is already
  smaller on the positions both determine.

A dropped colouring always has a smaller bad colouring in its orbit, and
orbit leaders are never dropped, so the first bad colouring reached is the
least one in the branching order. That colouring is the Negative certificate.

For reproducibility the search is split at a fixed frontier depth regardless
of the worker count. Statistics add up the prefix nodes plus the subtrees up
to the deciding one, so they do not depend on how many workers ran.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

from .canon import canonical_form
from .embeddings import CopySet, automorphism_group, enumerate_copies, iter_embedding_maps
from .errors import BoundTooLarge, KindMismatch, PreconditionFailed, ResourceCap, ShapeMismatch
from .structures import FinStructure

MAX_COLORS = 8
DEFAULT_NODE_BUDGET = 20_000_000
FRONTIER_DEPTH = 6


@dataclass(frozen=True)
class Coloring:
    copyset: CopySet
    colors: tuple[int, ...]
    k: int

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(self.colors))
        if len(self.colors) != len(self.copyset):
            raise ShapeMismatch(f"{len(self.colors)} colours for {len(self.copyset)} copies")
        if self.k < 1 or any(not 0 <= c < self.k for c in self.colors):
            raise ShapeMismatch(f"colours must lie in 0..{self.k - 1}")

    def color_of(self, copy: Sequence[int]) -> int:
        return self.colors[self.copyset.index()[tuple(copy)]]


@dataclass
class SearchStats:
    nodes: int = 0
    symmetry_reductions: int = 0
    elapsed: float = 0.0

    def to_json(self) -> dict[str, int]:
        # wall time is kept out of the serialized form so output is reproducible
        return {"nodes": self.nodes, "symmetry_reductions": self.symmetry_reductions}


@dataclass
class ArrowCertificate:
    A: FinStructure
    B: FinStructure
    C: FinStructure
    k: int
    verdict: str  # "Positive" | "Negative"
    bad_coloring: Coloring | None = None
    stats: SearchStats = field(default_factory=SearchStats)
    complete: bool = True
    attested_by: str | None = None

    @property
    def positive(self) -> bool:
        return self.verdict == "Positive"

    def revalidate(self) -> bool:
        """Negative: the colouring really has no monochromatic B-copy."""
        if self.positive:
            return self.bad_coloring is None
        return find_monochromatic_copy(self.C, self.B, self.A, self.bad_coloring) is None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "instance": {
                "A": canonical_form(self.A).hex,
                "B": canonical_form(self.B).hex,
                "C": canonical_form(self.C).hex,
                "k": self.k,
            },
            "verdict": self.verdict,
            "stats": self.stats.to_json(),
        }
        if self.positive:
            out["completeness"] = {"exhaustive": self.complete,
                                   "symmetry": "lex-leader under Aut(C) and colour renaming",
                                   "attested_by": self.attested_by}
        else:
            out["bad_coloring"] = {"copies": [list(c) for c in self.bad_coloring.copyset.copies],
                                   "colors": list(self.bad_coloring.colors)}
        return out


# --- validator (independent of the search) --------------------------------------

def b_copies_with_subcopies(C: FinStructure, B: FinStructure, A: FinStructure):
    """Each copy of B in C (sorted) with the A-copies it contains.

    One embedding per image is enough: the A-copies of B form an
    Aut(B)-invariant family, so every embedding onto the same image sends them
    to the same sets.
    """
    a_in_b = enumerate_copies(A, B).copies
    seen: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for f in iter_embedding_maps(B, C):
        img = tuple(sorted(f))
        if img not in seen:
            seen[img] = sorted({tuple(sorted(f[x] for x in a)) for a in a_in_b})
    return [(img, seen[img]) for img in sorted(seen)]


def find_monochromatic_copy(C: FinStructure, B: FinStructure, A: FinStructure,
                            coloring: Coloring) -> tuple[tuple[int, ...], int | None] | None:
    """First copy of B in C whose A-subcopies all share a colour, with that colour.

    A copy of B containing no copy of A is monochromatic vacuously; its colour
    is reported as None.
    """
    cs = coloring.copyset
    if cs.base != C or cs.pattern != A:
        raise ShapeMismatch("colouring is not defined on the copies of A in C")
    if cs.copies != enumerate_copies(A, C).copies:
        raise ShapeMismatch("colouring copy list differs from the copies of A in C")
    idx = cs.index()
    for img, subs in b_copies_with_subcopies(C, B, A):
        colors = {coloring.colors[idx[s]] for s in subs}
        if len(colors) <= 1:
            return img, colors.pop() if colors else None
    return None


# --- search --------------------------------------------------------------------

@dataclass
class _Problem:
    m: int
    k: int
    closing: list[list[tuple[int, ...]]]   # closing[t]: other positions of hyperedges whose last position is t
    perms: list[tuple[int, ...]]           # inverse position permutations of Aut(C), identity excluded
    budget: int


class _Capped(Exception):
    pass


def _is_leader(perms: list[tuple[int, ...]], c: list[int], t: int) -> bool:
    """No automorphism image of ``c[0..t]``, colours renamed by first appearance,
    is smaller on the positions both determine."""
    for inv in perms:
        relabel: dict[int, int] = {}
        for y in range(t + 1):
            x = inv[y]
            if x > t:
                break
            r = relabel.get(c[x])
            if r is None:
                r = relabel[c[x]] = len(relabel)
            if r < c[y]:
                return False
            if r > c[y]:
                break
    return True


def _search(prob: _Problem, prefix: Sequence[int]):
    """Depth-first search below ``prefix``. Returns (bad colouring or None, nodes, reductions)."""
    m, k = prob.m, prob.k
    c = list(prefix) + [-1] * (m - len(prefix))
    nodes = 0
    reductions = 0
    closing, perms, budget = prob.closing, prob.perms, prob.budget

    def rec(t: int, used: int):
        nonlocal nodes, reductions
        if t == m:
            return list(c)
        for col in range(min(k, used + 1)):
            nodes += 1
            if nodes > budget:
                raise _Capped
            if any(all(c[q] == col for q in others) for others in closing[t]):
                continue
            c[t] = col
            if perms and not _is_leader(perms, c, t):
                reductions += 1
                c[t] = -1
                continue
            found = rec(t + 1, max(used, col + 1))
            if found is not None:
                return found
            c[t] = -1
        return None

    used = max(prefix, default=-1) + 1
    return rec(len(prefix), used), nodes, reductions


def _frontier(prob: _Problem, depth: int):
    """Prefixes of length ``depth`` that survive pruning, in search order."""
    out: list[tuple[int, ...]] = []
    nodes = reductions = 0
    k, closing, perms = prob.k, prob.closing, prob.perms
    c = [-1] * prob.m

    def rec(t: int, used: int):
        nonlocal nodes, reductions
        if t == depth:
            out.append(tuple(c[:depth]))
            return
        for col in range(min(k, used + 1)):
            nodes += 1
            if any(all(c[q] == col for q in others) for others in closing[t]):
                continue
            c[t] = col
            if perms and not _is_leader(perms, c, t):
                reductions += 1
                c[t] = -1
                continue
            rec(t + 1, max(used, col + 1))
            c[t] = -1

    rec(0, 0)
    return out, nodes, reductions


_WORKER_PROBLEM: _Problem | None = None


def _init_worker(prob: _Problem) -> None:
    global _WORKER_PROBLEM
    _WORKER_PROBLEM = prob


def _run_prefix(prefix: tuple[int, ...]):
    try:
        return _search(_WORKER_PROBLEM, prefix)
    except _Capped:
        return "capped", _WORKER_PROBLEM.budget + 1, 0


def arrow_holds(C: FinStructure, B: FinStructure, A: FinStructure, k: int, *,
                node_budget: int = DEFAULT_NODE_BUDGET, time_budget: float | None = None,
                workers: int = 1, branching: str = "forward", symmetry: bool = True,
                attest: bool = False) -> ArrowCertificate:
    """Decide ``C -> (B)^A_k`` by complete search.

    ``branching`` is ``"forward"`` (copy order) or ``"reverse"``. With
    ``attest=True`` a Positive verdict is re-derived in the other branching
    order and the certificate records it.
    """
    if not (A.kind is B.kind is C.kind):
        raise KindMismatch("A, B and C must have the same kind")
    if k < 1:
        raise PreconditionFailed("k must be at least 1")
    if k > MAX_COLORS:
        raise BoundTooLarge(f"k={k} exceeds the cap of {MAX_COLORS} colours")
    started = time.monotonic()
    copyset = enumerate_copies(A, C)
    if len(copyset) == 0:
        raise PreconditionFailed("A has no copies in C")
    idx = copyset.index()
    hyper = [tuple(sorted({idx[s] for s in subs})) for _, subs in b_copies_with_subcopies(C, B, A)]
    m = len(copyset)

    order = list(range(m)) if branching == "forward" else list(range(m - 1, -1, -1))
    if branching not in ("forward", "reverse"):
        raise PreconditionFailed(f"unknown branching order {branching!r}")
    pos = {copy_i: t for t, copy_i in enumerate(order)}

    closing: list[list[tuple[int, ...]]] = [[] for _ in range(m)]
    if any(not h for h in hyper):
        # a B-copy without A-copies is monochromatic under every colouring
        stats = SearchStats(elapsed=time.monotonic() - started)
        return ArrowCertificate(A, B, C, k, "Positive", None, stats)
    for h in hyper:
        ps = sorted(pos[x] for x in h)
        closing[ps[-1]].append(tuple(ps[:-1]))

    perms: list[tuple[int, ...]] = []
    if symmetry:
        for g in automorphism_group(C).elements[1:]:
            # position permutation: position of copy x -> position of g(x)
            fwd = [0] * m
            for x, cp in enumerate(copyset.copies):
                fwd[pos[x]] = pos[idx[tuple(sorted(g[e] for e in cp))]]
            inv = [0] * m
            for a, b in enumerate(fwd):
                inv[b] = a
            perms.append(tuple(inv))
        perms = sorted(set(perms) - {tuple(range(m))})

    stats = SearchStats()
    prob = _Problem(m, k, closing, perms, node_budget)
    depth = min(FRONTIER_DEPTH, m)
    prefixes, stats.nodes, stats.symmetry_reductions = _frontier(prob, depth)

    bad = None
    if depth == m:
        # every surviving prefix is already a complete bad colouring
        bad = list(prefixes[0]) if prefixes else None
    else:
        results = _map_prefixes(prob, prefixes, workers, time_budget, started)
        for res, n_nodes, n_red in results:
            stats.nodes += n_nodes
            stats.symmetry_reductions += n_red
            if res == "capped" or stats.nodes > node_budget:
                raise ResourceCap(f"node budget {node_budget} exceeded")
            if res is not None:
                bad = res
                break
    stats.elapsed = time.monotonic() - started

    if bad is None:
        cert = ArrowCertificate(A, B, C, k, "Positive", None, stats)
        if attest:
            other = "reverse" if branching == "forward" else "forward"
            again = arrow_holds(C, B, A, k, node_budget=node_budget, time_budget=time_budget,
                                workers=workers, branching=other, symmetry=symmetry)
            if not again.positive:
                from .errors import InternalCheckFailed
                raise InternalCheckFailed("branching orders disagree on the verdict")
            cert.attested_by = other
        return cert
    colors = [0] * m
    for t, copy_i in enumerate(order):
        colors[copy_i] = bad[t]
    return ArrowCertificate(A, B, C, k, "Negative", Coloring(copyset, tuple(colors), k), stats)


def _map_prefixes(prob, prefixes, workers, time_budget, started):
    """Yield subtree results in prefix order, stopping after the first bad colouring."""
    if workers <= 1 or len(prefixes) < 2:
        _init_worker(prob)
        for pre in prefixes:
            if time_budget is not None and time.monotonic() - started > time_budget:
                raise ResourceCap(f"time budget {time_budget}s exceeded")
            res = _run_prefix(pre)
            yield res
            if res[0] is not None:
                return
        return
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(prob,)) as ex:
        for res in ex.map(_run_prefix, prefixes, chunksize=max(1, len(prefixes) // (4 * workers))):
            if time_budget is not None and time.monotonic() - started > time_budget:
                ex.shutdown(cancel_futures=True)
                raise ResourceCap(f"time budget {time_budget}s exceeded")
            yield res
            if res[0] is not None:
                ex.shutdown(cancel_futures=True)
                return


def brute_force_arrow(C: FinStructure, B: FinStructure, A: FinStructure, k: int,
                      limit: int = 1 << 20) -> Coloring | None:
    """Least bad colouring by plain enumeration of all ``k^copies`` colourings, or None."""
    import itertools

    copyset = enumerate_copies(A, C)
    m = len(copyset)
    if k ** m > limit:
        raise BoundTooLarge(f"{k}^{m} colourings exceed the limit {limit}")
    for colors in itertools.product(range(k), repeat=m):
        col = Coloring(copyset, colors, k)
        if find_monochromatic_copy(C, B, A, col) is None:
            return col
    return None


def minimal_arrow_witness(K, B: FinStructure, A: FinStructure, k: int, bound: int | None = None,
                          **search_opts) -> FinStructure | None:
    """The first member C of K (enumeration order, size <= bound) with ``C -> (B)^A_k``."""
    if not (K.contains(A) and K.contains(B)):
        from .errors import MembershipError
        raise MembershipError("A and B must belong to the class")
    if next(iter_embedding_maps(A, B), None) is None:
        raise PreconditionFailed("A does not embed in B")
    bound = K.size_bound if bound is None else bound
    for C in K.members(bound):
        if C.size < B.size or next(iter_embedding_maps(B, C), None) is None:
            continue
        if arrow_holds(C, B, A, k, **search_opts).positive:
            return C
    return None
