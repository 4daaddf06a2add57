"""Finite shadows of the Samuel compactification.

Everything lives on the carrier ``0..|G|-1`` (indices into ``G.elements``),
with subsets stored as integer bitmasks. For a valid family N with least
member K (normal), ``L = {VA}`` is the algebra of unions of cosets of K. Its
Stone space is the set of atoms (cosets), and the ultrafilter product is
computed from its defining membership condition. The
quotient group G/K is computed separately for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .dynamics import GroupAction, is_minimal, syndetic_bound
from .errors import (
    CorrespondenceFailed,
    EquivalenceViolated,
    InternalCheckFailed,
    InvalidFamily,
    NoSuchAtom,
)
from .catalog import conjugate
from .perm import PermGroup, mul

Mask = int


def _mask(items: Iterable[int]) -> Mask:
    m = 0
    for i in items:
        m |= 1 << i
    return m


def _members(mask: Mask) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


# --- subgroup families ---------------------------------------------------------

@dataclass(frozen=True)
class SubgroupFamily:
    group: PermGroup
    members: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(frozenset(V) for V in self.members))
        self.validate()

    @classmethod
    def from_elements(cls, G: PermGroup, members: Sequence[Iterable[Sequence[int]]]) -> "SubgroupFamily":
        idx = G.index
        return cls(G, tuple(frozenset(idx[tuple(g)] for g in V) for V in members))

    def validate(self) -> None:
        G = self.group
        n = G.order
        whole = frozenset(range(n))
        M = G.mult_table
        fam = set(self.members)
        if whole not in fam:
            raise InvalidFamily("the family must contain G")
        for V in fam:
            if 0 not in V or any(int(M[a, b]) not in V for a in V for b in V):
                raise InvalidFamily(f"{sorted(V)} is not a subgroup")
        for V in fam:
            for W in fam:
                if not any(U <= (V & W) for U in fam):
                    raise InvalidFamily("the family is not downward directed")
        for V in fam:
            for g in range(n):
                if conjugate(G, V, g) not in fam:
                    raise InvalidFamily("the family is not closed under conjugation")

    @property
    def core(self) -> frozenset[int]:
        """K, the intersection of the family (itself a member)."""
        out = frozenset(range(self.group.order))
        for V in self.members:
            out &= V
        return out

    def to_json(self) -> dict[str, Any]:
        return {"group": [list(g) for g in self.group.generators], "order": self.group.order,
                "members": [sorted(V) for V in sorted(self.members, key=lambda s: (len(s), sorted(s)))]}


# --- set-family algebras -------------------------------------------------------

@dataclass
class SetFamilyAlgebra:
    """A finite Boolean algebra of subsets of the carrier, given by its atoms."""

    n: int
    atoms: tuple[Mask, ...]
    tags: dict[Mask, tuple[int, Mask]] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.atoms = tuple(sorted(self.atoms, key=lambda m: (m & -m).bit_length()))
        union = 0
        for a in self.atoms:
            if a == 0 or union & a:
                raise InternalCheckFailed("atoms must be nonempty and disjoint")
            union |= a
        if union != (1 << self.n) - 1:
            raise InternalCheckFailed("atoms must cover the carrier")

    @property
    def size(self) -> int:
        return 1 << len(self.atoms)

    def sets(self) -> list[Mask]:
        out = []
        for s in range(1 << len(self.atoms)):
            out.append(_mask_union(self.atoms, s))
        return sorted(out)

    def contains(self, B: Mask) -> bool:
        return all(a & B in (0, a) for a in self.atoms)

    def atom_of(self, x: int) -> int:
        for i, a in enumerate(self.atoms):
            if a >> x & 1:
                return i
        raise NoSuchAtom(f"no atom contains {x}")

    def is_subalgebra_of(self, other: "SetFamilyAlgebra") -> bool:
        return all(other.contains(a) for a in self.atoms)

    def to_json(self) -> dict[str, Any]:
        return {"carrier": self.n, "atoms": [_members(a) for a in self.atoms], "size": self.size}


def _mask_union(atoms: Sequence[Mask], selector: int) -> Mask:
    out = 0
    for i, a in enumerate(atoms):
        if selector >> i & 1:
            out |= a
    return out


def left_translate_mask(G: PermGroup, g: int, B: Mask) -> Mask:
    row = G.mult_table[g]
    return _mask(int(row[x]) for x in _members(B))


def _product_mask(G: PermGroup, V: Iterable[int], B: Mask) -> Mask:
    """``VB = {v b}``."""
    M = G.mult_table
    bs = _members(B)
    return _mask(int(M[v, b]) for v in V for b in bs)


def build_L(G: PermGroup, N: SubgroupFamily, verify: bool = True) -> SetFamilyAlgebra:
    """``L = {VB : B ⊆ G, V ∈ N}`` through its atoms, the right cosets ``Kg`` of the core.

    With ``verify`` (and |G| ≤ 14) the family ``{VB}`` is also enumerated
    directly and compared, and each set is tagged with its least witness
    ``(V, B)``.
    """
    if N.group is not G:
        N = SubgroupFamily(G, N.members)
    K = sorted(N.core)
    M = G.mult_table
    atoms: list[Mask] = []
    covered = 0
    for g in range(G.order):
        if covered >> g & 1:
            continue
        coset = _mask(int(M[k, g]) for k in K)
        atoms.append(coset)
        covered |= coset
    L = SetFamilyAlgebra(G.order, tuple(atoms))
    if verify and G.order <= 14:
        members = sorted(N.members, key=lambda s: (len(s), sorted(s)))
        n = G.order
        all_B = _all_subsets(n)                       # row B: membership vector
        inv = G.inverse_index
        direct: dict[Mask, tuple[int, Mask]] = {}
        for vi, V in enumerate(members):
            VB = np.zeros_like(all_B)
            for v in V:
                # (vB)[y] = B[v⁻¹y]
                VB |= all_B[:, M[inv[v]]]
            for B, row in enumerate(_pack_rows(VB)):
                direct.setdefault(row, (vi, B))
        if sorted(direct) != L.sets():
            raise EquivalenceViolated("{VB} differs from the unions of cosets of the core")
        L.tags = direct
    _check_boolean(L)
    return L


def _all_subsets(n: int) -> np.ndarray:
    """Boolean matrix whose row B is the membership vector of the bitmask B."""
    codes = np.arange(1 << n, dtype=np.int64)[:, None]
    return (codes >> np.arange(n, dtype=np.int64)) & 1 == 1


def _pack_rows(rows: np.ndarray) -> list[Mask]:
    weights = 1 << np.arange(rows.shape[1], dtype=np.int64)
    return [int(x) for x in rows.astype(np.int64) @ weights]


def _check_boolean(L: SetFamilyAlgebra) -> None:
    """Closure under complement and union, checked on the listed sets when small."""
    sets = L.sets()
    if len(sets) > 4096:
        return
    full = (1 << L.n) - 1
    present = set(sets)
    if 0 not in present or full not in present:
        raise InternalCheckFailed("algebra lacks the empty set or the carrier")
    for B in sets:
        if full ^ B not in present:
            raise InternalCheckFailed("algebra not closed under complement")
    atoms = L.atoms
    for B in sets:
        for a in atoms:
            if B | a not in present:
                raise InternalCheckFailed("algebra not closed under union")


def is_left_invariant(B: SetFamilyAlgebra, G: PermGroup) -> bool:
    return all(B.contains(left_translate_mask(G, g, a)) for g in range(G.order) for a in B.atoms)


# --- Stone space and the product ------------------------------------------------

def stone_space(L: SetFamilyAlgebra, G: PermGroup) -> tuple[list[int], GroupAction]:
    """Atoms as points; ``g·x`` is the atom holding ``g`` times any element of x.

    Checked against the ultrafilter image ``{gB : B ∈ x}``: the translate of
    the atom must itself be an atom.
    """
    points = list(range(len(L.atoms)))
    table = []
    for g in range(G.order):
        row = []
        for a in L.atoms:
            image = left_translate_mask(G, g, a)
            target = L.atom_of(int(G.mult_table[g, _members(a)[0]]))
            if L.atoms[target] != image:
                raise InternalCheckFailed("a translate of an atom is not an atom")
            row.append(target)
        table.append(row)
    return points, GroupAction(G, points, table)


def _atom_action(L: SetFamilyAlgebra, G: PermGroup) -> list[list[int]]:
    """``act[g][x]``: the atom equal to the left translate of atom x by g."""
    cached = getattr(L, "_act", None)
    if cached is not None and cached[0] is G:
        return cached[1]
    act = []
    for g in range(G.order):
        row = []
        for a in L.atoms:
            t = left_translate_mask(G, g, a)
            if t not in L.atoms:
                raise InternalCheckFailed("a translate of an atom is not an atom")
            row.append(L.atoms.index(t))
        act.append(row)
    L._act = (G, act)
    return act


def _product_condition(L: SetFamilyAlgebra, G: PermGroup, u: int, v: int, B: Mask) -> bool:
    """``{g : g⁻¹B ∈ v} ∈ u`` with ultrafilters represented by atoms.

    ``g⁻¹B ∈ v`` means the atom ``v`` lies inside ``g⁻¹B``, i.e. the atom
    ``g·v`` lies inside B; the set of such g must contain the atom ``u``.
    """
    act = _atom_action(L, G)
    atoms = L.atoms
    return all(atoms[act[g][v]] & B == atoms[act[g][v]] for g in _members(atoms[u]))


def semigroup_mul(u: int, v: int, L: SetFamilyAlgebra, G: PermGroup) -> int:
    """The atom w with ``w ⊆ B`` iff the membership condition holds, tested on
    every atom and every atom complement."""
    full = (1 << L.n) - 1
    hits = [w for w, a in enumerate(L.atoms) if _product_condition(L, G, u, v, a)]
    if len(hits) != 1:
        raise NoSuchAtom(f"product of atoms {u}, {v} is not an ultrafilter ({len(hits)} atoms qualify)")
    w = hits[0]
    for x, a in enumerate(L.atoms):
        if _product_condition(L, G, u, v, full ^ a) != (x != w):
            raise NoSuchAtom("membership condition is not an ultrafilter")
    return w


def multiplication_table(L: SetFamilyAlgebra, G: PermGroup) -> list[list[int]]:
    k = len(L.atoms)
    return [[semigroup_mul(u, v, L, G) for v in range(k)] for u in range(k)]


def is_associative(table: Sequence[Sequence[int]]) -> bool:
    k = len(table)
    return all(table[table[a][b]][c] == table[a][table[b][c]]
               for a in range(k) for b in range(k) for c in range(k))


def quotient_group(G: PermGroup, K: Iterable[Sequence[int]]) -> tuple[list[frozenset], list[list[int]]]:
    """Cosets of a normal subgroup (by element tuples, ordered by least element)
    and their multiplication through representatives."""
    K = [tuple(k) for k in K]
    cosets: list[frozenset] = []
    seen: set = set()
    for g in G.elements:
        if g in seen:
            continue
        c = frozenset(mul(k, g) for k in K)
        cosets.append(c)
        seen |= c
    where = {g: i for i, c in enumerate(cosets) for g in c}
    reps = [min(c) for c in cosets]
    table = [[where[mul(a, b)] for b in reps] for a in reps]
    return cosets, table


def compare_with_quotient(L: SetFamilyAlgebra, G: PermGroup, N: SubgroupFamily) -> bool:
    """The atom product equals the multiplication of G/K, with atoms matched to cosets."""
    table = multiplication_table(L, G)
    cosets, qtable = quotient_group(G, [G.elements[i] for i in sorted(N.core)])
    idx = G.index
    match = []
    for c in cosets:
        m = _mask(idx[g] for g in c)
        if m not in L.atoms:
            return False
        match.append(L.atoms.index(m))
    return all(table[match[a]][match[b]] == match[qtable[a][b]]
               for a in range(len(cosets)) for b in range(len(cosets)))


# --- ideals and syndetic subalgebras -------------------------------------------

def minimal_left_ideals(points: Sequence[int], table: Sequence[Sequence[int]],
                        action: GroupAction | None = None) -> list[frozenset[int]]:
    """All minimal left ideals ``S·x`` of the finite semigroup given by ``table``."""
    if not is_associative(table):
        raise InternalCheckFailed("multiplication is not associative")
    principal = {frozenset(table[s][x] for s in points) for x in points}
    minimal = sorted((I for I in principal if not any(J < I for J in principal)), key=sorted)
    if action is not None:
        for I in minimal:
            sub = _subflow(action, I)
            if not is_minimal(sub).verdict:
                raise InternalCheckFailed("a minimal left ideal is not a minimal subflow")
        for I in minimal[1:]:
            if _flow_isomorphism(action, minimal[0], I) is None:
                raise InternalCheckFailed("minimal left ideals are not isomorphic flows")
    return minimal


def _subflow(action: GroupAction, I: frozenset[int]) -> GroupAction:
    pts = sorted(I)
    pos = {x: i for i, x in enumerate(pts)}
    table = [[pos[int(action.table[g, x])] for x in pts] for g in range(action.group.order)]
    return GroupAction(action.group, pts, table)


def _flow_isomorphism(action: GroupAction, I: frozenset[int], J: frozenset[int]) -> dict[int, int] | None:
    """A bijection I -> J commuting with the action, for transitive subflows."""
    x0 = min(I)
    T = action.table
    for y in sorted(J):
        phi: dict[int, int] = {}
        ok = True
        for g in range(action.group.order):
            a, b = int(T[g, x0]), int(T[g, y])
            if phi.setdefault(a, b) != b:
                ok = False
                break
        if ok and set(phi) == set(I) and sorted(phi.values()) == sorted(J):
            return phi
    return None


def is_syndetic_subalgebra(B: SetFamilyAlgebra, G: PermGroup) -> bool:
    """Left-invariant, and every nonempty member has a finite translate cover."""
    if not is_left_invariant(B, G):
        return False
    # unions of syndetic sets are syndetic, so the atoms decide
    return all(syndetic_bound(G, _members(a)) is not None for a in B.atoms)


def _generated_by_translates(G: PermGroup, X: Mask, n: int) -> tuple[Mask, ...]:
    """Atoms of the algebra generated by the left translates of X."""
    translates = sorted({left_translate_mask(G, g, X) for g in range(G.order)})
    blocks: dict[tuple[bool, ...], Mask] = {}
    for x in range(n):
        sig = tuple(bool(t >> x & 1) for t in translates)
        blocks[sig] = blocks.get(sig, 0) | (1 << x)
    return tuple(sorted(blocks.values()))


def _generated_partitions(G: PermGroup, sets: Sequence[Mask], n: int) -> list[tuple[Mask, ...]]:
    """:func:`_generated_by_translates` for many sets at once.

    Element x lies in ``gX`` iff ``g⁻¹x ∈ X``, so the signature of x is the
    row ``X[g⁻¹x]`` over g; elements with equal signatures form the atoms.
    """
    M = G.mult_table
    inv = np.array(G.inverse_index)
    P = M[inv][:, np.arange(n)].T                 # P[x, g] = g⁻¹x
    X = _all_subsets(n)[np.array(sets, dtype=np.int64)] if len(sets) else np.zeros((0, n), bool)
    sig = X[:, P]                                 # (sets, x, g)
    weights = 1 << np.arange(G.order, dtype=np.int64)
    codes = sig.astype(np.int64) @ weights        # (sets, x)
    out = []
    for row in codes:
        blocks: dict[int, Mask] = {}
        for x, c in enumerate(row.tolist()):
            blocks[c] = blocks.get(c, 0) | (1 << x)
        out.append(tuple(sorted(blocks.values())))
    return out


def invariant_subalgebras(L: SetFamilyAlgebra, G: PermGroup) -> list[SetFamilyAlgebra]:
    """Every left-invariant subalgebra of L.

    The atoms of such an algebra are permuted transitively by G, so the
    algebra is generated by the translates of its atom through the identity;
    generating from each member of L therefore reaches all of them.
    """
    found: dict[tuple[Mask, ...], None] = {}
    for atoms in _generated_partitions(G, L.sets(), L.n):
        found.setdefault(atoms, None)
    out = [SetFamilyAlgebra(L.n, atoms) for atoms in found]
    return sorted(out, key=lambda B: (len(B.atoms), B.atoms))


def maximal_syndetic_subalgebra(L: SetFamilyAlgebra, G: PermGroup) -> SetFamilyAlgebra:
    """A syndetic subalgebra of L maximal under inclusion (least atoms-first among ties).

    All maximal ones are checked to be isomorphic (same number of atoms and
    isomorphic Stone flows).
    """
    syndetic = [B for B in invariant_subalgebras(L, G) if is_syndetic_subalgebra(B, G)]
    maximal = [B for B in syndetic if not any(B is not C and B.is_subalgebra_of(C) and B.atoms != C.atoms
                                               for C in syndetic)]
    first = maximal[0]
    _, act0 = stone_space(first, G)
    for B in maximal[1:]:
        _, act = stone_space(B, G)
        if len(B.atoms) != len(first.atoms) or _cross_iso(act0, act) is None:
            raise InternalCheckFailed("maximal syndetic subalgebras are not isomorphic")
    return first


def _cross_iso(a: GroupAction, b: GroupAction) -> dict[int, int] | None:
    x0 = 0
    for y in range(len(b.points)):
        phi: dict[int, int] = {}
        if all(phi.setdefault(int(a.table[g, x0]), int(b.table[g, y])) == int(b.table[g, y])
               for g in range(a.group.order)) and len(set(phi.values())) == len(a.points) == len(phi):
            return phi
    return None


@dataclass
class RetReport:
    ideal: list[int]
    base_point: int
    ret_family: list[list[int]]
    syndetic_family: list[list[int]]
    equal: bool

    def to_json(self) -> dict[str, Any]:
        return self.__dict__.copy()


def ret_algebra_correspondence(L: SetFamilyAlgebra, G: PermGroup) -> RetReport:
    """``{ret(m, O) : O ⊆ M}`` against the maximal syndetic subalgebra, as set families."""
    points, action = stone_space(L, G)
    table = multiplication_table(L, G)
    M = minimal_left_ideals(points, table, action)[0]
    m = min(M)
    rets = set()
    Mlist = sorted(M)
    for sel in range(1 << len(Mlist)):
        O = {Mlist[i] for i in range(len(Mlist)) if sel >> i & 1}
        rets.add(_mask(g for g in range(G.order) if int(action.table[g, m]) in O))
    B = maximal_syndetic_subalgebra(L, G)
    fam_ret = sorted(rets)
    fam_b = B.sets()
    equal = fam_ret == fam_b
    if not equal:
        raise CorrespondenceFailed("return-set algebra differs from the maximal syndetic subalgebra")
    return RetReport(Mlist, m, [_members(x) for x in fam_ret], [_members(x) for x in fam_b], equal)


# --- embedding into a symmetric group ------------------------------------------

@dataclass
class SymEmbedding:
    degree: int
    translates: list[list[int]]
    images: list[tuple[int, ...]]
    homomorphism: bool
    injective: bool
    stabilizers: bool

    @property
    def ok(self) -> bool:
        return self.homomorphism and self.injective and self.stabilizers

    def to_json(self) -> dict[str, Any]:
        return {"degree": self.degree, "translates": self.translates,
                "images": [list(p) for p in self.images],
                "homomorphism": self.homomorphism, "injective": self.injective,
                "stabilizers": self.stabilizers}


def embed_into_sym(G: PermGroup, N: SubgroupFamily) -> SymEmbedding:
    """Act on the left translates ``U_i`` of the members of N: ``π_g(i) = j`` iff ``gU_i = U_j``.

    The kernel of ``g ↦ π_g`` is the core of N, so the family must separate
    points (trivial core, the finite form of a Hausdorff neighbourhood basis).
    """
    if N.group is not G:
        N = SubgroupFamily(G, N.members)
    if len(N.core) != 1:
        raise InvalidFamily(f"the family has a core of order {len(N.core)}; g -> π_g would not be injective")
    Us = sorted({left_translate_mask(G, g, _mask(V)) for V in N.members for g in range(G.order)},
                key=lambda m: (m.bit_count(), _members(m)))
    where = {U: i for i, U in enumerate(Us)}
    images = []
    for g in range(G.order):
        images.append(tuple(where[left_translate_mask(G, g, U)] for U in Us))
    Mt = G.mult_table
    hom = all(images[int(Mt[g, h])] == mul(images[g], images[h])
              for g in range(G.order) for h in range(G.order))
    inj = len(set(images)) == G.order
    stab = True
    for V in N.members:
        i = where[_mask(V)]
        fixing = {images[g] for g in range(G.order) if images[g][i] == i}
        if fixing != {images[g] for g in V}:
            stab = False
    return SymEmbedding(len(Us), [_members(U) for U in Us], images, hom, inj, stab)


# --- one-call verification -----------------------------------------------------

def verify_instance(G: PermGroup, N: SubgroupFamily) -> dict[str, Any]:
    """Run every check on one (G, N) instance and summarise."""
    L = build_L(G, N)
    points, action = stone_space(L, G)
    table = multiplication_table(L, G)
    assoc = is_associative(table)
    quotient = compare_with_quotient(L, G, N)
    ideals = minimal_left_ideals(points, table, action)
    B = maximal_syndetic_subalgebra(L, G)
    _, b_action = stone_space(B, G)
    ideal_flow = _subflow(action, ideals[0])
    theorem = _cross_iso(b_action, ideal_flow) is not None and len(B.atoms) == len(ideals[0])
    ret = ret_algebra_correspondence(L, G)
    emb = embed_into_sym(G, N) if len(N.core) == 1 else None
    return {
        "group_order": G.order,
        "family": [sorted(V) for V in sorted(N.members, key=lambda s: (len(s), sorted(s)))],
        "L_size": L.size,
        "boolean": True,
        "left_invariant": is_left_invariant(L, G),
        "associative": assoc,
        "matches_quotient": quotient,
        "minimal_left_ideals": [sorted(I) for I in ideals],
        "maximal_syndetic_atoms": len(B.atoms),
        "stone_of_maximal_is_ideal": theorem,
        "ret_correspondence": ret.equal,
        "embedding_degree": emb.degree if emb else None,
        "embedding_ok": emb.ok if emb else None,
    }
