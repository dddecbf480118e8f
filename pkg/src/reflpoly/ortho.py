"""Naming reduced reflection groups: orthogonal families and spherical Coxeter groups."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from math import prod

from .diagram import BasicSystem
from .fp import FieldCtx, FormInvariants, QuadClass, quadratic_character


class BadEpsilon(ValueError):
    pass


def order_orthogonal(n: int, p: int, epsilon: int) -> int:
    """|O(n, p, epsilon)|; the reflection subgroups O1 and O2 have half this order."""
    if n < 1:
        raise ValueError("dimension must be positive")
    if n % 2:
        if epsilon != 0:
            raise BadEpsilon(f"odd dimension {n} needs epsilon 0, got {epsilon}")
        m = (n - 1) // 2
        return 2 * p ** (m * m) * prod(p ** (2 * i) - 1 for i in range(1, m + 1))
    if epsilon not in (1, -1):
        raise BadEpsilon(f"even dimension {n} needs epsilon +-1, got {epsilon}")
    m = n // 2
    return 2 * p ** (m * (m - 1)) * (p ** m - epsilon) * prod(p ** (2 * i) - 1 for i in range(1, m))


def order_singular(n: int, p: int, rad_dim: int, epsilon: int) -> int:
    """Isometries acting trivially on an r-dimensional radical: p^(r(n-r)) |O(n-r, p, eps)|."""
    if not 0 <= rad_dim < n:
        raise ValueError("radical dimension must satisfy 0 <= r < n")
    return p ** (rad_dim * (n - rad_dim)) * order_orthogonal(n - rad_dim, p, epsilon)


SpinorProfile = tuple  # tuple[QuadClass, ...], one entry per generator


def spinor_profile(system: BasicSystem, ctx: FieldCtx) -> SpinorProfile:
    """Square class of each root norm; this is the spinor norm of the reflection."""
    return tuple(quadratic_character(c, ctx) for c in system.labels)


@lru_cache(maxsize=1)
def spherical_catalog() -> tuple[tuple[str, int, int], ...]:
    text = resources.files(__package__).joinpath("data/spherical_catalog.tsv").read_text()
    rows = [line for line in text.splitlines() if line and not line.startswith("#")]
    return tuple((r["name"], int(r["rank"]), int(r["order"])) for r in csv.DictReader(rows, delimiter="\t"))


def catalog_matches(rank: int, order: int) -> list[str]:
    return [name for name, r, o in spherical_catalog() if r == rank and o == order]


@dataclass(frozen=True)
class NamedGroup:
    family: str  # O, O1, O2, O-hat, O1-hat, spherical, unidentified
    params: tuple
    order: int
    notes: tuple[str, ...] = field(default=())

    def __str__(self):
        if self.family == "spherical":
            return self.params[0]
        if self.family == "unidentified":
            return "unidentified"
        name = {"O-hat": "Ohat", "O1-hat": "O1hat"}.get(self.family, self.family)
        eps = self.params[-1]
        head = ",".join(str(x) for x in self.params[:-1])
        return f"{name}({head},{eps:+d})" if eps else f"{name}({head},0)"


def _exception_notes(family: str, n: int, p: int, eps: int, disc: QuadClass) -> tuple[str, ...]:
    key = (family, n, p, eps)
    if key in {("O1", 3, 3, 0), ("O2", 3, 5, 0), ("O2", 5, 3, 0)} and disc == QuadClass.SQUARE:
        return ("excluded case of the orthogonal classification",)
    if family in ("O1", "O2") and (n, p, eps) == (4, 3, -1):
        return ("excluded case of the orthogonal classification",)
    return ()


def identify(group_order: int, inv: FormInvariants, profile: SpinorProfile, p: int) -> NamedGroup:
    """Name the group from its order, the form invariants and the generator spinor norms.

    Anything the order formulas cannot pin down is reported as unidentified.
    """
    n, r, eps = inv.dim, inv.rad_dim, inv.epsilon
    catalog = tuple(catalog_matches(n, group_order))
    notes = tuple(f"catalog order {c}" for c in catalog)
    if r == 0:
        full = order_orthogonal(n, p, eps)
        params = (n, p, eps)
        if group_order == full:
            return NamedGroup("O", params, group_order, notes)
        if 2 * group_order == full:
            classes = set(profile)
            if classes == {QuadClass.SQUARE}:
                fam = "O1"
            elif classes == {QuadClass.NONSQUARE}:
                fam = "O2"
            else:
                fam = None
            if fam:
                return NamedGroup(fam, params, group_order,
                                  notes + _exception_notes(fam, n, p, eps, inv.disc))
    elif r < n:
        full = order_singular(n, p, r, eps)
        params = (n, p, r, eps)
        if group_order == full:
            return NamedGroup("O-hat", params, group_order, notes)
        if 2 * group_order == full:
            return NamedGroup("O1-hat", params, group_order, notes)
    if catalog:
        return NamedGroup("spherical", (catalog[0],), group_order, tuple(f"also {c}" for c in catalog[1:]))
    return NamedGroup("unidentified", (), group_order)
