"""String C-group test and the combinatorics of the resulting regular polytopes."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from math import factorial
from typing import Sequence

import numpy as np

from .fp import FpMatrix
from .matgroup import (DEFAULT_ELEMENT_LIMIT, BsgsGroup, evaluate_word, graph_subgroup_order,
                       intersection_array, parse_word)

SELF_DUAL_BUDGET = 10 ** 7


class NotPolyhedral(ValueError):
    pass


class NotInvolution(ValueError):
    pass


class NotStringGroup(ValueError):
    pass


def element_order(m: FpMatrix, limit: int | None = None) -> int:
    if limit is None:
        limit = m.p ** m.n
    k, cur = 1, m
    while not cur.is_identity():
        cur = cur @ m
        k += 1
        if k > limit:
            raise ValueError("element order exceeds limit")
    return k


def schlafli_realized(gens: Sequence[FpMatrix]) -> list[int]:
    """Orders of consecutive products g_i g_(i+1)."""
    return [element_order(a @ b) for a, b in zip(gens, gens[1:])]


# orders of finite irreducible string Coxeter groups
def _component_order(branches: tuple[int, ...]) -> int | None:
    k = len(branches) + 1
    if k == 1:
        return 2
    if k == 2:
        return None if branches[0] == float("inf") else 2 * branches[0]
    if all(b == 3 for b in branches):
        return factorial(k + 1)
    if branches in ((4,) + (3,) * (k - 2), (3,) * (k - 2) + (4,)):
        return 2 ** k * factorial(k)
    return {(3, 4, 3): 1152, (5, 3): 120, (3, 5): 120, (5, 3, 3): 14400, (3, 3, 5): 14400}.get(branches)


def coxeter_order(branches: Sequence[int]) -> int | None:
    """Order of the string Coxeter group [b1,...,bk], or None if infinite."""
    total, comp = 1, []
    for b in list(branches) + [2]:
        if b == 2:
            o = _component_order(tuple(comp))
            if o is None:
                return None
            total *= o
            comp = []
        else:
            comp.append(b)
    return total


@dataclass(frozen=True)
class CGroupReport:
    is_cgroup: bool
    failing_level: int | None = None
    failing_range: tuple[int, int] | None = None
    witness: FpMatrix | None = None
    intersection_order: int | None = None
    middle_order: int | None = None

    def __bool__(self):
        return self.is_cgroup


class SubgroupCache:
    """BSGS objects for subgroups generated by subsets of a fixed generator tuple."""

    def __init__(self, gens: Sequence[FpMatrix]):
        self.gens = list(gens)
        self._cache: dict[tuple[int, ...], BsgsGroup] = {}

    def __call__(self, idx) -> BsgsGroup:
        key = tuple(sorted(idx))
        if key not in self._cache:
            n, p = self.gens[0].n, self.gens[0].p
            chosen = [self.gens[i] for i in key] or [FpMatrix.identity(n, p)]
            self._cache[key] = BsgsGroup(chosen, p)
        return self._cache[key]


def check_far_commutation(gens: Sequence[FpMatrix]) -> None:
    for g in gens:
        if not (g @ g).is_identity() or g.is_identity():
            raise NotInvolution("generators must be involutions")
    for i in range(len(gens)):
        for j in range(i + 2, len(gens)):
            if not ((gens[i] @ gens[j]) ** 2).is_identity():
                raise NotStringGroup(f"generators {i} and {j} do not commute")


def is_string_cgroup(gens: Sequence[FpMatrix], *, limit: int = DEFAULT_ELEMENT_LIMIT,
                     spherical_shortcut: bool = True, cache: SubgroupCache | None = None) -> CGroupReport:
    """Decide the intersection property for a string group generated by involutions.

    Works on consecutive generator ranges: a range is accepted when both
    sub-ranges one shorter are, and the two corresponding subgroups meet
    exactly in the subgroup of the common middle.  A range whose group has
    the order of a finite Coxeter group of its realized type is accepted
    directly.
    """
    gens = list(gens)
    check_far_commutation(gens)
    sub = cache or SubgroupCache(gens)
    done: dict[tuple[int, int], CGroupReport | None] = {}

    def visit(a: int, b: int) -> CGroupReport | None:
        if (a, b) in done:
            return done[(a, b)]
        res = None
        if b - a >= 2 and not (spherical_shortcut and _spherical(a, b)):
            res = visit(a + 1, b)
            if res is None:
                res = visit(a, b - 1)
            if res is None:
                res = _intersection_check(a, b)
        done[(a, b)] = res
        return res

    def _spherical(a, b) -> bool:
        order = coxeter_order(schlafli_realized(gens[a:b + 1]))
        return order is not None and sub(range(a, b + 1)).order == order

    def _intersection_check(a, b) -> CGroupReport | None:
        left, right, mid = sub(range(a + 1, b + 1)), sub(range(a, b)), sub(range(a + 1, b))
        inter = intersection_array(left, right, limit)
        if len(inter) == mid.order:
            return None
        outside = ~mid.contains_batch(inter)
        w = inter[int(np.argmax(outside))]
        return CGroupReport(False, b - a + 1, (a, b), FpMatrix(w.tolist(), gens[0].p),
                            len(inter), mid.order)

    res = visit(0, len(gens) - 1)
    return res if res is not None else CGroupReport(True)


def face_counts(gens: Sequence[FpMatrix], cache: SubgroupCache | None = None) -> list[int]:
    """Number of i-faces: index of the subgroup omitting generator i."""
    sub = cache or SubgroupCache(gens)
    n = len(gens)
    total = sub(range(n)).order
    return [total // sub([j for j in range(n) if j != i]).order for i in range(n)]


@dataclass(frozen=True)
class MapInvariants:
    type: tuple[int, int]
    order: int
    petrie: int
    hole: int
    V: int
    E: int
    F: int
    orientable: bool
    genus: int

    @property
    def euler(self) -> int:
        return self.V - self.E + self.F


def map_invariants(gens: Sequence[FpMatrix], check: bool = True) -> MapInvariants:
    """Invariants of the regular map with automorphism group <s0, s1, s2>.

    ``genus`` is the orientable genus when the map is orientable and the
    non-orientable genus (crosscap number) otherwise.
    """
    if len(gens) != 3:
        raise ValueError("map invariants need exactly three generators")
    s0, s1, s2 = gens
    if check and not is_string_cgroup(gens):
        raise NotPolyhedral("generators do not satisfy the intersection property")
    sub = SubgroupCache(gens)
    order = sub((0, 1, 2)).order
    V = order // sub((1, 2)).order
    E = order // sub((0, 2)).order
    F = order // sub((0, 1)).order
    rot = BsgsGroup([s0 @ s1, s1 @ s2], s0.p).order
    orientable = 2 * rot == order
    chi = V - E + F
    genus = (2 - chi) // 2 if orientable else 2 - chi
    k, l = schlafli_realized(gens)
    return MapInvariants((k, l), order, element_order(s0 @ s1 @ s2), element_order(s0 @ s1 @ s2 @ s1),
                         V, E, F, orientable, genus)


def petrial(gens: Sequence[FpMatrix]) -> tuple[FpMatrix, FpMatrix, FpMatrix]:
    s0, s1, s2 = gens
    return (s0 @ s2, s1, s2)


def dual(gens: Sequence[FpMatrix]) -> tuple[FpMatrix, ...]:
    return tuple(reversed(gens))


def _reversal_conjugates(gens: Sequence[FpMatrix]) -> bool:
    """True if reversing the coordinate order carries g_i to g_(n-1-i)."""
    n = gens[0].n
    if n != len(gens):
        return False
    for i, g in enumerate(gens):
        h = gens[len(gens) - 1 - i]
        if any(g[n - 1 - r, n - 1 - c] != h[r, c] for r in range(n) for c in range(n)):
            return False
    return True


def self_dual(gens: Sequence[FpMatrix], *, method: str = "auto", order: int | None = None,
              budget: int = SELF_DUAL_BUDGET) -> bool | None:
    """Whether g_i -> g_(n-1-i) extends to an automorphism; None when over budget.

    method: "auto" tries the coordinate-reversal symmetry first, "fast" uses
    only that (None if it does not apply), "graph" uses only the
    block-diagonal subgroup order.
    """
    if method in ("auto", "fast") and _reversal_conjugates(gens):
        return True
    if method == "fast":
        return None
    if order is None:
        order = BsgsGroup(gens, gens[0].p).order
    if order > budget:
        return None
    return graph_subgroup_order(gens, list(reversed(gens)), stop_above=order) == order


@dataclass(frozen=True)
class MixingResult:
    gens: tuple[FpMatrix, ...]
    order: int
    index: int


def mixing(gens: Sequence[FpMatrix], recipe: Sequence) -> MixingResult:
    """Replace the generators by words in them, e.g. recipe (0, "101", 2, 3)."""
    new = []
    for item in recipe:
        word = (item,) if isinstance(item, int) else parse_word(str(item))
        g = evaluate_word(gens, word)
        if g.is_identity() or not (g @ g).is_identity():
            raise NotInvolution(f"word {item!r} does not evaluate to an involution")
        new.append(g)
    full = BsgsGroup(gens, gens[0].p).order
    order = BsgsGroup(new, gens[0].p).order
    return MixingResult(tuple(new), order, full // order)


# map catalog ----------------------------------------------------------------

@dataclass(frozen=True)
class CatalogMap:
    name: str
    k: int
    l: int
    order: int
    petrie: int
    genus: int
    hole: int
    orientable: bool
    source: str
    provenance: str


@lru_cache(maxsize=1)
def map_catalog() -> tuple[CatalogMap, ...]:
    text = resources.files(__package__).joinpath("data/map_catalog.tsv").read_text()
    rows = [line for line in text.splitlines() if line and not line.startswith("#")]
    out = []
    for r in csv.DictReader(rows, delimiter="\t"):
        out.append(CatalogMap(r["name"], int(r["k"]), int(r["l"]), int(r["order"]), int(r["petrie"]),
                              int(r["genus"]), int(r["hole"]), r["orientable"] == "yes", r["source"],
                              r["provenance"]))
    return tuple(out)


def source_generators(source: str) -> tuple[FpMatrix, ...]:
    """Generators for a catalog source such as ``[6,6]@1,3,1 p=3 petrial``."""
    from .diagram import parse_system, reflection_generators
    from .fp import FieldCtx

    system, prime, *ops = source.split()
    gens = tuple(reflection_generators(parse_system(system), FieldCtx(int(prime.removeprefix("p=")))))
    for op in ops:
        gens = {"dual": dual, "petrial": petrial}[op](gens)
    return gens


def identify_map(inv: MapInvariants, gens: Sequence[FpMatrix] | None = None) -> str | None:
    """Catalog name of a map.

    Entries are matched on their invariants.  When several entries share them
    (a map and its Petrial can), the generators decide: the catalog source
    must be isomorphic to ``gens`` via s_i -> s'_i.
    """
    key = (inv.type, inv.order, inv.petrie, inv.hole, inv.orientable, inv.genus)
    hits = [m for m in map_catalog() if ((m.k, m.l), m.order, m.petrie, m.hole, m.orientable, m.genus) == key]
    if len(hits) <= 1 or gens is None:
        return hits[0].name if len(hits) == 1 else None
    for m in hits:
        ref = source_generators(m.source)
        if graph_subgroup_order(gens, ref, stop_above=inv.order) == inv.order:
            return m.name
    return None


def describe_map(inv: MapInvariants, gens: Sequence[FpMatrix] | None = None) -> str:
    """Catalog name, or a generic label built from the invariants."""
    name = identify_map(inv, gens)
    if name:
        return name
    k, l = inv.type
    return f"{{{k},{l}}}_{inv.petrie}#{inv.order}"


@dataclass(frozen=True)
class PolytopeReport:
    schlafli_realized: tuple[int, ...]
    face_counts: tuple[int, ...]
    petrie: tuple[int, ...]
    self_dual: bool | None
    facet_invariants: MapInvariants | None = None
    vertexfig_invariants: MapInvariants | None = None
    facet_id: str | None = None
    vfig_id: str | None = None


def polytope_report(gens: Sequence[FpMatrix], order: int | None = None,
                    cache: SubgroupCache | None = None) -> PolytopeReport:
    """Combinatorics of the polytope of a string C-group (verify that first).

    Facet and vertex-figure maps are filled in for rank 4 only.
    """
    gens = list(gens)
    sub = cache or SubgroupCache(gens)
    if order is None:
        order = sub(range(len(gens))).order
    facet = vfig = None
    fid = vid = None
    if len(gens) == 4:
        facet = map_invariants(gens[:3], check=False)
        vfig = map_invariants(gens[1:], check=False)
        fid, vid = describe_map(facet, gens[:3]), describe_map(vfig, gens[1:])
    petrie = tuple(element_order(a @ b @ c) for a, b, c in zip(gens, gens[1:], gens[2:]))
    return PolytopeReport(tuple(schlafli_realized(gens)), tuple(face_counts(gens, sub)), petrie,
                          self_dual(gens, order=order), facet, vfig, fid, vid)
