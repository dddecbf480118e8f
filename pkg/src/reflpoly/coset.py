"""Todd-Coxeter coset enumeration (HLT strategy with lookahead).

Words are tuples of letters: ``g`` for generator g and ``-(g + 1)`` for its
inverse.  Involutory generators share a single table column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

DEFAULT_MAX_COSETS = 10 ** 7


class Overflow(RuntimeError):
    pass


class PresentationSyntaxError(ValueError):
    pass


def inverse_letter(x: int) -> int:
    return -x - 1


def _gen(x: int) -> int:
    return x if x >= 0 else -x - 1


def free_reduce(word: Sequence[int], involutory: Sequence[bool] = ()) -> tuple[int, ...]:
    def norm(x):
        g = _gen(x)
        return g if g < len(involutory) and involutory[g] else x

    out: list[int] = []
    for x in map(norm, word):
        if out and out[-1] == norm(inverse_letter(x)):
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class Presentation:
    ngens: int
    involutory: tuple[bool, ...]
    relators: tuple[tuple[int, ...], ...]
    subgroup: tuple[tuple[int, ...], ...] = ()
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        inv = tuple(self.involutory) + (False,) * (self.ngens - len(self.involutory))
        object.__setattr__(self, "involutory", inv)
        rels = [free_reduce(r, inv) for r in self.relators]
        for g in range(self.ngens):
            if inv[g] and (g, g) not in rels:
                rels.insert(0, (g, g))
        for w in list(rels) + list(self.subgroup):
            for x in w:
                if not 0 <= _gen(x) < self.ngens:
                    raise ValueError(f"letter {x} out of range")
        object.__setattr__(self, "relators", tuple(r for r in rels if r))
        object.__setattr__(self, "subgroup", tuple(free_reduce(w, inv) for w in self.subgroup))

    def with_subgroup(self, words: Iterable[Sequence[int]]) -> "Presentation":
        return Presentation(self.ngens, self.involutory, self.relators, tuple(tuple(w) for w in words), self.meta)


def coxeter_presentation(branches: Sequence, extra: Iterable[Sequence[int]] = ()) -> Presentation:
    """Coxeter group of a string diagram (an infinite branch adds no relator) plus extra relators."""
    n = len(branches) + 1
    rels = []
    for i, b in enumerate(branches):
        if b != float("inf"):
            rels.append((i, i + 1) * int(b))
    for i in range(n):
        for j in range(i + 2, n):
            rels.append((i, j) * 2)
    rels.extend(tuple(r) for r in extra)
    return Presentation(n, (True,) * n, tuple(rels))


# file format -----------------------------------------------------------------

_GROUP_RE = re.compile(r"\(([^)]*)\)(?:\^(-?\d+))?|(\d+)('?)")


def parse_word_text(text: str) -> tuple[int, ...]:
    """``(0 1 2 1)^3 0`` -> letters; ``^-e`` inverts the bracket, ``3'`` is an inverse letter."""
    out: list[int] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _GROUP_RE.match(text, pos)
        if not m:
            raise PresentationSyntaxError(f"cannot parse word at {pos}: {text!r}")
        if m.group(3) is not None:
            g = int(m.group(3))
            out.append(inverse_letter(g) if m.group(4) else g)
        else:
            body = parse_word_text(m.group(1)) if m.group(1).strip() else ()
            e = int(m.group(2) or 1)
            if e < 0:
                body = tuple(inverse_letter(x) for x in reversed(body))
            out.extend(body * abs(e))
        pos = m.end()
    return tuple(out)


def format_word(word: Sequence[int]) -> str:
    return " ".join(str(x) if x >= 0 else f"{-x - 1}'" for x in word)


def parse_presentation(text: str) -> Presentation:
    ngens = None
    inv: set[int] = set()
    rels, subs, meta = [], [], {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.match(r"#\s*(\w+)\s*:\s*(.*)$", line)
            if m:
                meta[m.group(1)] = m.group(2).strip()
            continue
        key, _, rest = line.partition(" ")
        try:
            if key == "gens":
                ngens = int(rest)
            elif key == "inv":
                inv.update(int(t) for t in rest.split())
            elif key == "rel":
                rels.append(parse_word_text(rest))
            elif key == "sub":
                subs.append(parse_word_text(rest))
            else:
                raise PresentationSyntaxError(f"line {lineno}: unknown keyword {key!r}")
        except ValueError as exc:
            raise PresentationSyntaxError(f"line {lineno}: {exc}") from exc
    if ngens is None:
        raise PresentationSyntaxError("missing 'gens N' line")
    return Presentation(ngens, tuple(g in inv for g in range(ngens)), tuple(rels), tuple(subs), meta)


def format_presentation(pres: Presentation) -> str:
    lines = [f"# {k}: {v}" for k, v in pres.meta.items()]
    lines.append(f"gens {pres.ngens}")
    lines += [f"inv {g}" for g in range(pres.ngens) if pres.involutory[g]]
    lines += [f"rel ({format_word(r)})" for r in pres.relators
              if not (len(r) == 2 and r[0] == r[1] and pres.involutory[r[0]])]
    lines += [f"sub ({format_word(w)})" for w in pres.subgroup]
    return "\n".join(lines) + "\n"


def load_presentation(path) -> Presentation:
    return parse_presentation(Path(path).read_text())


def shipped_presentations() -> dict[str, Presentation]:
    root = resources.files(__package__).joinpath("data/presentations")
    out = {}
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".pres"):
            out[entry.name.removesuffix(".pres")] = parse_presentation(entry.read_text())
    return out


# enumeration ----------------------------------------------------------------

@dataclass(frozen=True)
class CosetTable:
    """Standardized complete table; column c acts by letter ``letters[c]``."""
    letters: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]

    @property
    def index(self) -> int:
        return len(self.rows)

    def act(self, coset: int, word: Sequence[int]) -> int:
        col = {x: c for c, x in enumerate(self.letters)}
        for x in word:
            if x in col:
                coset = self.rows[coset][col[x]]
            else:
                # inverse of a non-involutory letter: search the forward column
                c = col[inverse_letter(x)]
                coset = next(i for i, r in enumerate(self.rows) if r[c] == coset)
        return coset


class _Enumerator:
    def __init__(self, pres: Presentation, max_cosets: int):
        self.max = max_cosets
        self.col_of: dict[int, int] = {}
        letters = []
        for g in range(pres.ngens):
            self.col_of[g] = len(letters)
            letters.append(g)
            if pres.involutory[g]:
                self.col_of[inverse_letter(g)] = self.col_of[g]
            else:
                self.col_of[inverse_letter(g)] = len(letters)
                letters.append(inverse_letter(g))
        self.letters = letters
        self.ncols = len(letters)
        self.inv = [self.col_of[inverse_letter(x)] for x in letters]
        self.relators = [[self.col_of[x] for x in r] for r in pres.relators]
        self.subgroup = [[self.col_of[x] for x in w] for w in pres.subgroup]
        self.table: list[list[int]] = [[-1] * self.ncols]
        self.parent = [0]
        self.nlive = 1
        self.queue: list[int] = []

    def find(self, c: int) -> int:
        root = c
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[c] != root:
            self.parent[c], c = root, self.parent[c]
        return root

    def define(self, c: int, x: int) -> None:
        if self.nlive >= self.max:
            raise _Full
        new = len(self.table)
        self.table.append([-1] * self.ncols)
        self.parent.append(new)
        self.nlive += 1
        self.table[c][x] = new
        self.table[new][self.inv[x]] = c

    def _merge(self, k: int, l: int) -> None:
        k, l = self.find(k), self.find(l)
        if k == l:
            return
        if l < k:
            k, l = l, k
        self.parent[l] = k
        self.nlive -= 1
        self.queue.append(l)

    def coincidence(self, a: int, b: int) -> None:
        self.queue = []
        self._merge(a, b)
        i = 0
        while i < len(self.queue):
            e = self.queue[i]
            i += 1
            row = self.table[e]
            for x in range(self.ncols):
                f = row[x]
                if f < 0:
                    continue
                ix = self.inv[x]
                if self.table[f][ix] == e:
                    self.table[f][ix] = -1
                e1, f1 = self.find(e), self.find(f)
                if self.table[e1][x] >= 0:
                    self._merge(f1, self.table[e1][x])
                elif self.table[f1][ix] >= 0:
                    self._merge(e1, self.table[f1][ix])
                else:
                    self.table[e1][x] = f1
                    self.table[f1][ix] = e1

    def scan(self, c: int, w: Sequence[int], fill: bool) -> None:
        t = self.table
        f, b = c, c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and t[f][w[i]] >= 0:
                f = t[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and t[b][self.inv[w[j]]] >= 0:
                b = t[b][self.inv[w[j]]]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                t[f][w[i]] = b
                t[b][self.inv[w[i]]] = f
                return
            if not fill:
                return
            self.define(f, w[i])

    def live(self, c: int) -> bool:
        return self.parent[c] == c

    def lookahead(self) -> None:
        for c in range(len(self.table)):
            for r in self.relators:
                if not self.live(c):
                    break
                self.scan(c, r, fill=False)

    def run(self) -> None:
        for w in self.subgroup:
            self._retry(lambda: self.scan(0, w, fill=True))
        c = 0
        while c < len(self.table):
            if self.live(c):
                for r in self.relators:
                    if not self.live(c):
                        break
                    self._retry(lambda: self.scan(c, r, fill=True))
                for x in range(self.ncols):
                    if self.live(c) and self.table[c][x] < 0:
                        self._retry(lambda: self.define(c, x))
            c += 1

    def _retry(self, action) -> None:
        # a lookahead pass must free a real share of the table, else give up
        while True:
            try:
                action()
                return
            except _Full:
                before = self.nlive
                self.lookahead()
                if before - self.nlive < max(1, self.max // 100):
                    raise Overflow(f"coset limit {self.max} reached") from None

    def standardized(self) -> CosetTable:
        order = {0: 0}
        seq = [0]
        k = 0
        while k < len(seq):
            c = seq[k]
            k += 1
            for x in range(self.ncols):
                d = self.find(self.table[c][x])
                if d not in order:
                    order[d] = len(seq)
                    seq.append(d)
        rows = tuple(tuple(order[self.find(self.table[c][x])] for x in range(self.ncols)) for c in seq)
        return CosetTable(tuple(self.letters), rows)


class _Full(Exception):
    pass


def coset_table(pres: Presentation, subgroup_words: Iterable[Sequence[int]] | None = None,
                max_cosets: int = DEFAULT_MAX_COSETS) -> CosetTable:
    if subgroup_words is not None:
        pres = pres.with_subgroup(subgroup_words)
    en = _Enumerator(pres, max_cosets)
    en.run()
    return en.standardized()


def enumerate_cosets(pres: Presentation, subgroup_words: Iterable[Sequence[int]] | None = None,
                     max_cosets: int = DEFAULT_MAX_COSETS) -> int:
    """Index of the subgroup; raises Overflow rather than return a wrong answer."""
    return coset_table(pres, subgroup_words, max_cosets).index


def table_closes(pres: Presentation, table: CosetTable) -> bool:
    """Every relator fixes every coset and every subgroup word fixes coset 0."""
    ok = all(table.act(c, r) == c for c in range(table.index) for r in pres.relators)
    return ok and all(table.act(0, w) == 0 for w in pres.subgroup)


def validate_against_matrix(pres: Presentation, system, ctx, max_cosets: int = DEFAULT_MAX_COSETS) -> bool:
    """True iff the presented group has the order of the reduced reflection group."""
    from .diagram import reflection_generators
    from .matgroup import BsgsGroup

    index = enumerate_cosets(pres, (), max_cosets)
    return index == BsgsGroup(reflection_generators(system, ctx), ctx.p).order
