"""The checked-in catalog of small groups and their subgroup families.

A family is valid when it contains G, is closed under conjugation and is
downward directed. A finite directed family contains its own intersection K
(some member lies below every member), and conjugation closure makes K
normal. The valid families are therefore exactly ``{G, K}`` together with any
union of conjugacy classes of subgroups strictly between K and G, for K
normal.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from itertools import combinations

from .perm import PermGroup, closure, inverse, mul

Subgroup = frozenset  # of element indices


@lru_cache(maxsize=None)
def load_catalog() -> tuple[tuple[str, PermGroup], ...]:
    text = resources.files("finflow").joinpath("data/catalog.json").read_text()
    data = json.loads(text)
    return tuple((g["name"], PermGroup(g["degree"], g["generators"])) for g in data["groups"])


def catalog_group(name: str) -> PermGroup:
    for n, G in load_catalog():
        if n == name:
            return G
    raise KeyError(f"no catalog group named {name!r}")


def subgroups(G: PermGroup) -> list[Subgroup]:
    """All subgroups as index sets, sorted by (order, elements).

    Every subgroup of a group this small is generated by at most three
    elements, but the loop below closes under joins until nothing new
    appears, so no such assumption is needed.
    """
    idx = G.index
    found: set[Subgroup] = set()
    for g in G.elements:
        found.add(frozenset(idx[x] for x in closure(G.degree, [g])))
    frontier = set(found)
    while frontier:
        new = set()
        for A in frontier:
            for B in list(found):
                gens = [G.elements[i] for i in A | B]
                J = frozenset(idx[x] for x in closure(G.degree, gens))
                if J not in found and J not in new:
                    new.add(J)
        found |= new
        frontier = new
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def conjugate(G: PermGroup, V: Subgroup, g: int) -> Subgroup:
    el, idx = G.elements, G.index
    gi = inverse(el[g])
    return frozenset(idx[mul(mul(el[g], el[v]), gi)] for v in V)


def is_normal(G: PermGroup, V: Subgroup) -> bool:
    return all(conjugate(G, V, g) == V for g in range(G.order))


def conjugacy_classes(G: PermGroup, subs: list[Subgroup]) -> list[list[Subgroup]]:
    seen: set[Subgroup] = set()
    out = []
    for V in subs:
        if V in seen:
            continue
        cls = sorted({conjugate(G, V, g) for g in range(G.order)}, key=lambda s: (len(s), sorted(s)))
        seen.update(cls)
        out.append(cls)
    return out


def valid_families(G: PermGroup) -> list[tuple[Subgroup, ...]]:
    """Every conjugation-closed, downward-directed subgroup family containing G."""
    subs = subgroups(G)
    whole = frozenset(range(G.order))
    classes = conjugacy_classes(G, subs)
    out = []
    for K in subs:
        if not is_normal(G, K):
            continue
        between = [cls for cls in classes if cls[0] != K and cls[0] != whole and K < cls[0]]
        for r in range(len(between) + 1):
            for chosen in combinations(between, r):
                members = {whole, K}
                for cls in chosen:
                    members.update(cls)
                out.append(tuple(sorted(members, key=lambda s: (len(s), sorted(s)))))
    return sorted(set(out), key=lambda fam: [(len(s), sorted(s)) for s in fam])


def catalog_instances(max_order: int = 12):
    """(name, G, family) for every catalog group up to ``max_order`` and every valid family."""
    for name, G in load_catalog():
        if G.order > max_order:
            continue
        for fam in valid_families(G):
            yield name, G, fam
