"""Single-system analysis and multi-system census runs."""

from __future__ import annotations

import csv
import io
import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Iterable, Sequence

from .diagram import (INF, BasicSystem, StringDiagram, Unresolved, enumerate_basic_systems, equivalent_mod_p,
                      format_label, gram_mod_p, is_generic, reflection_generators)
from .fp import FieldCtx, form_invariants, is_prime
from .ortho import identify, spinor_profile
from .polytope import SubgroupCache, is_string_cgroup, polytope_report

TSV_COLUMNS = ("schlafli", "labels", "p", "generic", "rad_dim", "epsilon", "order", "named", "cgroup",
               "self_dual", "f0", "f1", "f2", "f3", "facet_id", "vfig_id", "error")

CRYSTALLOGRAPHIC_BRANCHES = (3, 4, 6, INF)


def _branch_key(b) -> int:
    return 10 ** 6 if b == INF else int(b)


def diagram_key(d: StringDiagram) -> tuple[int, ...]:
    return tuple(_branch_key(b) for b in d.branches)


def all_rank4_diagrams() -> list[StringDiagram]:
    """Every string diagram on three non-2 crystallographic branches, one per reversal pair."""
    out = set()
    for branches in itertools.product(CRYSTALLOGRAPHIC_BRANCHES, repeat=3):
        d = StringDiagram(branches)
        out.add(min(d, d.reversed(), key=diagram_key))
    return sorted(out, key=diagram_key)


# analysis --------------------------------------------------------------------

def _plain(obj):
    """JSON-friendly copy: tuples become lists, infinity becomes "inf"."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, float) and obj == INF:
        return "inf"
    if hasattr(obj, "rows") and hasattr(obj, "p"):
        return [list(r) for r in obj.rows]
    if isinstance(obj, int) and not isinstance(obj, bool):
        return int(obj)
    return obj


@dataclass
class AnalysisReport:
    """Everything ``analyze`` learns about one system at one prime, in a fixed field order.

    All fields are JSON types so ``from_dict(json.loads(json.dumps(r.to_dict())))``
    reproduces the report exactly.
    """
    system: str
    schlafli: list
    labels: list
    p: int
    genericity: dict
    form: dict
    order: int | None
    named: dict | None
    cgroup: dict | None
    polytope: dict | None
    timing: float
    error: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        return cls(**{f: d[f] for f in cls.__dataclass_fields__})


def analyze(system: BasicSystem, p: int, *, check_cgroup: bool = True) -> AnalysisReport:
    """Order, name, intersection property and polytope data of the reduction mod p."""
    if p < 3 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    t0 = time.perf_counter()
    ctx = FieldCtx(p)
    gens = reflection_generators(system, ctx)
    gen = is_generic(system, ctx)
    inv = form_invariants(gram_mod_p(system, ctx), ctx)
    base = dict(system=str(system), schlafli=_plain(system.diagram.branches), labels=list(system.labels), p=p,
                genericity=_plain(asdict(gen)),
                form=dict(dim=inv.dim, rad_dim=inv.rad_dim, disc=int(inv.disc), epsilon=inv.epsilon))
    try:
        cache = SubgroupCache(gens)
        order = cache(range(len(gens))).order
        named = identify(order, inv, spinor_profile(system, ctx), p)
        named_d = dict(name=str(named), family=named.family, params=_plain(named.params), notes=list(named.notes))
        cg = poly = None
        if check_cgroup:
            rep = is_string_cgroup(gens, cache=cache)
            cg = _plain(asdict(rep))
            if rep.is_cgroup:
                poly = _plain(asdict(polytope_report(gens, order, cache)))
        return AnalysisReport(**base, order=order, named=named_d, cgroup=cg, polytope=poly,
                              timing=round(time.perf_counter() - t0, 6))
    except (ArithmeticError, MemoryError, RuntimeError, ValueError) as exc:
        return AnalysisReport(**base, order=None, named=None, cgroup=None, polytope=None,
                              timing=round(time.perf_counter() - t0, 6), error=f"{type(exc).__name__}: {exc}")


# census ---------------------------------------------------------------------

def census_classes(systems: Sequence[BasicSystem], p: int) -> list[list[BasicSystem]]:
    """Group systems whose reflection tuples are conjugate in GL(n, p).

    For a palindromic diagram a system is also matched against the reversal
    of each other system.  Classes come out sorted, smallest labels first.
    """
    ctx = FieldCtx(p)
    parent = list(range(len(systems)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in itertools.combinations(range(len(systems)), 2):
        if find(i) == find(j):
            continue
        a, b = systems[i], systems[j]
        candidates = [b]
        if b.diagram.reversed() == b.diagram:
            candidates.append(b.reversed())
        if any(equivalent_mod_p(a, c, ctx) for c in candidates):
            parent[find(j)] = find(i)
    groups: dict[int, list[BasicSystem]] = {}
    for i, s in enumerate(systems):
        groups.setdefault(find(i), []).append(s)
    classes = [sorted(g, key=lambda s: s.labels) for g in groups.values()]
    return sorted(classes, key=lambda g: g[0].labels)


@dataclass
class CensusRow:
    report: AnalysisReport
    members: list = field(default_factory=list)  # label tuples in this row's class

    def tsv_fields(self) -> list[str]:
        r = self.report
        poly = r.polytope or {}
        counts = list(poly.get("face_counts") or [])
        counts += [""] * (4 - len(counts))
        if not poly:
            sd = ""
        else:
            sd = "unresolved" if poly["self_dual"] is None else _yn(poly["self_dual"])
        return [
            "[" + ",".join(format_label(INF if b == "inf" else b) for b in r.schlafli) + "]",
            ",".join(map(str, r.labels)),
            str(r.p),
            _yn(r.genericity["generic"]),
            str(r.form["rad_dim"]),
            str(r.form["epsilon"]),
            "" if r.order is None else str(r.order),
            r.named["name"] if r.named else "",
            "" if r.cgroup is None else _yn(r.cgroup["is_cgroup"]),
            sd,
            *map(str, counts[:4]),
            poly.get("facet_id") or "",
            poly.get("vfig_id") or "",
            r.error or "",
        ]

    def to_dict(self) -> dict:
        d = dict(zip(TSV_COLUMNS, self.tsv_fields()))
        d["members"] = [",".join(map(str, m)) for m in self.members]
        return d


def _yn(flag) -> str:
    return "yes" if flag else "no"


def _census_job(diagram: StringDiagram, p: int, per_class: bool, infinity_ratio_one: bool) -> list[CensusRow]:
    systems = enumerate_basic_systems(diagram, infinity_ratio_one=infinity_ratio_one)
    try:
        classes = census_classes(systems, p) if per_class else [[s] for s in systems]
    except Unresolved as exc:
        classes = [[s] for s in systems]
        note = f"Unresolved: {exc}"
    else:
        note = None
    rows = []
    for cls in classes:
        rep = analyze(cls[0], p)
        if note and not rep.error:
            rep.error = note
        rows.append(CensusRow(rep, [list(s.labels) for s in cls]))
    return rows


def run_census(diagrams: Iterable[StringDiagram], primes: Iterable[int], *, threads: int | None = None,
               per_class: bool = True, infinity_ratio_one: bool = False) -> list[CensusRow]:
    """One row per census class (or per basic system) and prime, in a fixed order.

    Rows are sorted by diagram, labels and prime, so the output does not
    depend on ``threads``.
    """
    primes = sorted(set(primes))
    for p in primes:
        if p < 3 or not is_prime(p):
            raise ValueError(f"{p} is not an odd prime")
    jobs = [(d, p) for d in diagrams for p in primes]
    threads = threads or os.cpu_count() or 1
    if threads == 1:
        results = [_census_job(d, p, per_class, infinity_ratio_one) for d, p in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: _census_job(*job, per_class, infinity_ratio_one), jobs))
    rows = [row for chunk in results for row in chunk]
    rows.sort(key=lambda r: (tuple(_branch_key(INF if b == "inf" else b) for b in r.report.schlafli),
                             tuple(r.report.labels), r.report.p))
    return rows


def census_tsv(rows: Sequence[CensusRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(TSV_COLUMNS)
    for row in rows:
        w.writerow(row.tsv_fields())
    return buf.getvalue()


# golden tables ----------------------------------------------------------------

GOLDEN_VERSION = "v1"


def _golden_rows(name: str) -> list[dict]:
    text = resources.files(__package__).joinpath(f"data/golden/{GOLDEN_VERSION}/{name}").read_text()
    lines = [line for line in text.splitlines() if line and not line.startswith("#")]
    return list(csv.DictReader(lines, delimiter="\t"))


def golden_systems() -> list[dict]:
    """Expected census cells for individual systems; blank cells are not checked."""
    return _golden_rows("systems.tsv")


def golden_families() -> list[dict]:
    """Expected multiset of group orders over the census classes of a diagram."""
    return _golden_rows("families.tsv")
