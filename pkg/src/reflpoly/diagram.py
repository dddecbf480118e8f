"""String Coxeter diagrams with basic systems (root normalisations).

A branch labelled ``m`` between nodes i and i+1 has ``lam = 4 cos^2(pi/m)``,
which is an integer exactly for the crystallographic labels 2, 3, 4, 6, inf.
With node labels ``c_i = b_i . b_i`` the off-diagonal Gram entry is
``-sqrt(lam c_i c_{i+1}) / 2``; we keep ``s = sqrt(lam c_i c_{i+1})`` integral
and store twice the Gram matrix over the integers.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

from .fp import FieldCtx, FpMatrix, nullspace

INF = math.inf
LAMBDA = {2: 0, 3: 1, 4: 2, 6: 3, INF: 4}

# accepted c_{i+1}/c_i ratios per branch label; label 2 accepts anything
RATIOS = {
    3: (Fraction(1),),
    4: (Fraction(2), Fraction(1, 2)),
    6: (Fraction(3), Fraction(1, 3)),
    INF: (Fraction(4), Fraction(1, 4)),
}


class DiagramError(ValueError):
    pass


class BadBranchLabel(DiagramError):
    pass


class NonCrystallographic(DiagramError):
    pass


class Unresolved(RuntimeError):
    """A randomized search could not decide the question."""


def format_label(b) -> str:
    return "inf" if b == INF else str(b)


@dataclass(frozen=True)
class StringDiagram:
    branches: tuple

    def __post_init__(self):
        br = tuple(INF if b == INF else int(b) for b in self.branches)
        for b in br:
            if b not in LAMBDA:
                raise BadBranchLabel(f"branch label {format_label(b)} is not crystallographic")
        object.__setattr__(self, "branches", br)

    @property
    def rank(self) -> int:
        return len(self.branches) + 1

    def reversed(self) -> "StringDiagram":
        return StringDiagram(self.branches[::-1])

    def __str__(self):
        return "[" + ",".join(format_label(b) for b in self.branches) + "]"


@dataclass(frozen=True)
class BasicSystem:
    diagram: StringDiagram
    labels: tuple[int, ...]

    @property
    def rank(self) -> int:
        return self.diagram.rank

    def reversed(self) -> "BasicSystem":
        return BasicSystem(self.diagram.reversed(), self.labels[::-1])

    def __str__(self):
        return f"{self.diagram}@{','.join(map(str, self.labels))}"


def _branch_s(lam: int, ci: int, cj: int) -> int | None:
    """Integral sqrt(lam*ci*cj) if both Cartan integers are integral, else None."""
    s2 = lam * ci * cj
    s = math.isqrt(s2)
    if s * s != s2 or s % ci or s % cj:
        return None
    return s


def canonical_labels(labels: Sequence[int]) -> tuple[int, ...]:
    g = reduce(math.gcd, labels)
    return tuple(c // g for c in labels)


def validate(diagram: StringDiagram | Sequence, labels: Sequence[int]) -> BasicSystem:
    if not isinstance(diagram, StringDiagram):
        diagram = StringDiagram(tuple(diagram))
    labels = tuple(int(c) for c in labels)
    if len(labels) != diagram.rank:
        raise DiagramError(f"{diagram} needs {diagram.rank} node labels, got {len(labels)}")
    if any(c <= 0 for c in labels):
        raise DiagramError("node labels must be positive")
    for i, b in enumerate(diagram.branches):
        if _branch_s(LAMBDA[b], labels[i], labels[i + 1]) is None:
            raise NonCrystallographic(
                f"branch {i}-{i + 1} labelled {format_label(b)} has no integral Cartan pair "
                f"for node labels {labels[i]}, {labels[i + 1]}")
    return BasicSystem(diagram, canonical_labels(labels))


def cartan(system: BasicSystem) -> tuple[tuple[int, ...], ...]:
    """Cartan integers M[i][j] = 2 (b_i . b_j) / (b_j . b_j)."""
    n, c = system.rank, system.labels
    M = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i, b in enumerate(system.diagram.branches):
        s = _branch_s(LAMBDA[b], c[i], c[i + 1])
        M[i][i + 1] = -s // c[i + 1]
        M[i + 1][i] = -s // c[i]
    return tuple(map(tuple, M))


def gram2(system: BasicSystem) -> tuple[tuple[int, ...], ...]:
    """Twice the Gram matrix, as integers."""
    n, c = system.rank, system.labels
    G = [[0] * n for _ in range(n)]
    for i in range(n):
        G[i][i] = 2 * c[i]
    for i, b in enumerate(system.diagram.branches):
        s = _branch_s(LAMBDA[b], c[i], c[i + 1])
        G[i][i + 1] = G[i + 1][i] = -s
    return tuple(map(tuple, G))


def gram_mod_p(system: BasicSystem, ctx: FieldCtx) -> FpMatrix:
    return FpMatrix([[x * ctx.inv2 for x in r] for r in gram2(system)], ctx.p)


def sub_gram_mod_p(system: BasicSystem, ctx: FieldCtx, nodes: Sequence[int]) -> FpMatrix:
    """Gram matrix of the span of the roots b_i, i in nodes."""
    return gram_mod_p(system, ctx).submatrix(list(nodes))


def reflection_generators(system: BasicSystem, ctx: FieldCtx) -> list[FpMatrix]:
    """R_i(b_j) = b_j - M[j][i] b_i, acting on column vectors."""
    M = cartan(system)
    n = system.rank
    gens = []
    for i in range(n):
        rows = [[int(r == j) for j in range(n)] for r in range(n)]
        rows[i] = [int(i == j) - M[j][i] for j in range(n)]
        gens.append(FpMatrix(rows, ctx.p))
    return gens


def _is_palindromic(branches) -> bool:
    return tuple(branches) == tuple(branches)[::-1]


def enumerate_basic_systems(diagram: StringDiagram | Sequence, identify_reversal: bool = False,
                            infinity_ratio_one: bool = False) -> list[BasicSystem]:
    """All basic systems up to global scaling, deduplicated by Cartan matrix.

    With ``identify_reversal`` a system and its index-reversed mirror count
    once (only meaningful for palindromic branch lists).
    """
    if not isinstance(diagram, StringDiagram):
        diagram = StringDiagram(tuple(diagram))
    choices = []
    for b in diagram.branches:
        if b == 2:
            choices.append((Fraction(1),))
        elif b == INF and infinity_ratio_one:
            choices.append(RATIOS[INF] + (Fraction(1),))
        else:
            choices.append(RATIOS[b])
    seen: dict = {}
    for ratios in itertools.product(*choices):
        vals = [Fraction(1)]
        for r in ratios:
            vals.append(vals[-1] * r)
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (v.denominator for v in vals))
        system = validate(diagram, [int(v * den) for v in vals])
        key = cartan(system)
        if identify_reversal and _is_palindromic(diagram.branches):
            rkey = cartan(system.reversed())
            key = min(key, rkey)
        if key not in seen or system.labels < seen[key].labels:
            seen[key] = system
    return sorted(seen.values(), key=lambda s: s.labels)


_DIAGRAM_RE = re.compile(r"^\[([^\]]*)\]@(.*)$")


class ParseError(DiagramError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def parse_diagram(text: str) -> tuple[StringDiagram, tuple[int, ...]]:
    """Parse ``[b1,...,bk]@c0,...,ck``; whitespace is ignored."""
    compact = re.sub(r"\s+", "", text)
    m = _DIAGRAM_RE.match(compact)
    if not m:
        pos = compact.find("@")
        raise ParseError("expected '[b1,...,bk]@c0,...,ck'", max(pos, 0))
    branches = []
    offset = 1
    for tok in m.group(1).split(",") if m.group(1) else []:
        if tok.lower() in ("inf", "oo", "∞"):
            branches.append(INF)
        elif tok.isdigit():
            b = int(tok)
            if b not in LAMBDA:
                raise BadBranchLabel(f"branch label {b} is not crystallographic (at position {offset})")
            branches.append(b)
        else:
            raise ParseError(f"bad branch label {tok!r}", offset)
        offset += len(tok) + 1
    labels = []
    offset = m.start(2)
    for tok in m.group(2).split(","):
        if not tok.isdigit():
            raise ParseError(f"bad node label {tok!r}", offset)
        labels.append(int(tok))
        offset += len(tok) + 1
    if len(labels) != len(branches) + 1:
        raise ParseError(f"expected {len(branches) + 1} node labels, got {len(labels)}", m.start(2))
    return StringDiagram(tuple(branches)), tuple(labels)


def parse_system(text: str) -> BasicSystem:
    diagram, labels = parse_diagram(text)
    return validate(diagram, labels)


def parse_schlafli(text: str) -> StringDiagram:
    """Parse a bare branch list such as ``[6,inf,6]`` or ``6,inf,6``."""
    body = re.sub(r"\s+", "", text).strip("[]")
    out = []
    for tok in body.split(","):
        if tok.lower() in ("inf", "oo", "∞"):
            out.append(INF)
        elif tok.isdigit():
            out.append(int(tok))
        else:
            raise ParseError(f"bad branch label {tok!r}", 0)
    return StringDiagram(tuple(out))


@dataclass(frozen=True)
class GenericityReport:
    generic: bool
    zero_labels_mod_p: tuple[int, ...]


def is_generic(system: BasicSystem, ctx: FieldCtx) -> GenericityReport:
    zeros = tuple(i for i, c in enumerate(system.labels) if c % ctx.p == 0)
    generic = ctx.p >= 5 or 6 not in system.diagram.branches
    return GenericityReport(generic, zeros)


def intertwiner_basis(gens_a: Sequence[FpMatrix], gens_b: Sequence[FpMatrix], p: int) -> list[FpMatrix]:
    """Basis of {X : X A_i = B_i X for all i}."""
    n = gens_a[0].n
    eqs = []
    # unknown X[r][c] has index r*n + c
    for A, B in zip(gens_a, gens_b):
        for r in range(n):
            for c in range(n):
                row = [0] * (n * n)
                for k in range(n):
                    row[r * n + k] += A[k, c]
                    row[k * n + c] -= B[r, k]
                eqs.append([x % p for x in row])
    return [FpMatrix([v[r * n:(r + 1) * n] for r in range(n)], p) for v in nullspace(eqs, p, n * n)]


def _combine(basis: Sequence[FpMatrix], coeffs: Sequence[int], p: int) -> FpMatrix:
    n = basis[0].n
    rows = [[sum(k * X[r, c] for k, X in zip(coeffs, basis)) for c in range(n)] for r in range(n)]
    return FpMatrix(rows, p)


def conjugator(gens_a: Sequence[FpMatrix], gens_b: Sequence[FpMatrix], p: int,
               exhaustive_dim: int = 4, trials: int = 1000, seed: int = 0) -> FpMatrix | None:
    """An invertible X with X A_i X^-1 = B_i for all i, or None.

    Raises Unresolved when the solution space is too large to search
    exhaustively and random sampling found nothing.
    """
    basis = intertwiner_basis(gens_a, gens_b, p)
    d = len(basis)
    if d == 0:
        return None
    if d <= exhaustive_dim:
        # projective enumeration: first nonzero coefficient is 1
        for lead in range(d):
            for tail in itertools.product(range(p), repeat=d - lead - 1):
                coeffs = [0] * lead + [1] + list(tail)
                X = _combine(basis, coeffs, p)
                if X.det():
                    return X
        return None
    rng = random.Random(seed)
    for _ in range(trials):
        X = _combine(basis, [rng.randrange(p) for _ in range(d)], p)
        if X.det():
            return X
    raise Unresolved(f"intertwiner space of dimension {d}: no invertible element in {trials} samples")


def equivalent_mod_p(sys_a: BasicSystem, sys_b: BasicSystem, ctx: FieldCtx) -> bool:
    """True iff the reflection tuples are simultaneously conjugate in GL(n, p)."""
    if sys_a.diagram != sys_b.diagram:
        raise DiagramError("systems must share a diagram")
    ga = reflection_generators(sys_a, ctx)
    gb = reflection_generators(sys_b, ctx)
    return conjugator(ga, gb, ctx.p) is not None
