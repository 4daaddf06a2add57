"""Finite permutation groups given by generators, with enumerated elements.

Permutations are tuples in one-line notation: ``p[i]`` is the image of ``i``.
Products compose right to left, ``mul(g, h)(x) == g(h(x))``, so groups act
on the left. Elements are kept sorted lexicographically; that order is the
fixed total order used for transversals and certificates, and puts the
identity at index 0.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from functools import cached_property

import numpy as np

from .errors import NotASubgroup, ValidationError

Perm = tuple[int, ...]

ELEMENT_CAP = 50_000


def identity(n: int) -> Perm:
    return tuple(range(n))


def mul(g: Sequence[int], h: Sequence[int]) -> Perm:
    return tuple(g[x] for x in h)


def inverse(g: Sequence[int]) -> Perm:
    out = [0] * len(g)
    for i, gi in enumerate(g):
        out[gi] = i
    return tuple(out)


def is_perm(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


def cycle_perm(n: int, *cycles: Sequence[int]) -> Perm:
    """Build a permutation of degree n from disjoint cycles."""
    out = list(range(n))
    for cyc in cycles:
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            out[a] = b
    return tuple(out)


def image(g: Sequence[int], points: Iterable[int]) -> frozenset[int]:
    return frozenset(g[x] for x in points)


def closure(degree: int, generators: Iterable[Sequence[int]], cap: int = ELEMENT_CAP) -> list[Perm]:
    """All products of the generators, by breadth-first search."""
    gens = [tuple(g) for g in generators]
    for g in gens:
        if len(g) != degree or not is_perm(g):
            raise ValidationError(f"not a permutation of degree {degree}: {g}")
    e = identity(degree)
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        raise ValidationError(f"group order exceeds cap {cap}")
        frontier = nxt
    return sorted(seen)


class PermGroup:
    """A permutation group of fixed degree.

    Either ``generators`` or ``elements`` (or both) may be given. When only
    elements are supplied they are trusted to form a group; call
    :meth:`check_closed` to verify.
    """

    def __init__(self, degree: int, generators: Iterable[Sequence[int]] = (),
                 elements: Iterable[Sequence[int]] | None = None):
        self.degree = degree
        gens = [tuple(g) for g in generators]
        if elements is not None:
            els = sorted({tuple(e) for e in elements})
            if not els or els[0] != identity(degree):
                raise ValidationError("element list must contain the identity")
            self._elements: tuple[Perm, ...] | None = tuple(els)
            if not gens:
                gens = _greedy_generators(degree, els)
        else:
            self._elements = None
        self.generators: tuple[Perm, ...] = tuple(gens)

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, order={self.order})"

    @property
    def elements(self) -> tuple[Perm, ...]:
        if self._elements is None:
            self._elements = tuple(closure(self.degree, self.generators))
        return self._elements

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def index(self) -> dict[Perm, int]:
        return {g: i for i, g in enumerate(self.elements)}

    def __contains__(self, g) -> bool:
        return tuple(g) in self.index

    def __len__(self) -> int:
        return self.order

    def __iter__(self):
        return iter(self.elements)

    def element_set(self) -> frozenset[Perm]:
        return frozenset(self.elements)

    def is_trivial(self) -> bool:
        return self.order == 1

    @cached_property
    def mult_table(self) -> np.ndarray:
        """``table[a, b]`` is the index of ``elements[a] * elements[b]``."""
        n = self.degree
        E = np.array(self.elements, dtype=np.int64).reshape(self.order, n)
        if n == 0:
            return np.zeros((1, 1), dtype=np.int64)
        weights = n ** np.arange(n - 1, -1, -1, dtype=np.int64)
        codes = E @ weights
        prod = E[:, E]  # prod[a, b, i] = E[a, E[b, i]]
        prod_codes = prod @ weights
        table = np.searchsorted(codes, prod_codes)
        if not np.array_equal(codes[table], prod_codes):
            raise ValidationError("element list is not closed under multiplication")
        return table

    @cached_property
    def inverse_index(self) -> list[int]:
        idx = self.index
        return [idx[inverse(g)] for g in self.elements]

    def check_closed(self) -> None:
        self.mult_table  # raises if not closed
        for g in self.elements:
            if inverse(g) not in self.index:
                raise ValidationError("element list is not closed under inverse")

    def subgroup(self, elements: Iterable[Sequence[int]]) -> "PermGroup":
        els = [tuple(e) for e in elements]
        for e in els:
            if e not in self.index:
                raise NotASubgroup(f"{e} is not an element of the group")
        return PermGroup(self.degree, elements=els)

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return self.degree == other.degree and all(g in other.index for g in self.elements)


def _greedy_generators(degree: int, elements: Sequence[Perm]) -> list[Perm]:
    """A small generating set: scan elements in order, keep those not yet generated."""
    gens: list[Perm] = []
    span = {identity(degree)}
    for g in elements:
        if g in span:
            continue
        gens.append(g)
        span = set(closure(degree, gens))
        if len(span) == len(elements):
            break
    return gens


def symmetric_group(n: int) -> PermGroup:
    if n <= 1:
        return PermGroup(n, elements=[identity(n)])
    gens = [cycle_perm(n, [0, 1])]
    if n > 2:
        gens.append(cycle_perm(n, list(range(n))))
    return PermGroup(n, gens)


def cyclic_group(n: int) -> PermGroup:
    if n <= 1:
        return PermGroup(max(n, 1), elements=[identity(max(n, 1))])
    return PermGroup(n, [cycle_perm(n, list(range(n)))])
