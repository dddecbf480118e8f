"""Finite matrix groups over GF(p) via a deterministic Schreier-Sims algorithm.

The group acts on column vectors of GF(p)^n.  Base points are standard basis
vectors (a linear map fixing a basis is the identity), chosen in the order
they are first needed.  Schreier generators are produced and sifted in numpy
batches, which keeps the pure-Python overhead per level roughly constant.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np

from .fp import INT64_SAFE_MODULUS, FpMatrix, rref

DEFAULT_ELEMENT_LIMIT = 2_000_000
DEFAULT_MEMORY_LIMIT = 4 << 30
_CHUNK = 1 << 16


class TooLarge(RuntimeError):
    pass


class DimensionMismatch(ValueError):
    pass


class NotInvariant(ValueError):
    pass


Word = tuple  # sequence of generator indices


def parse_word(text: str) -> Word:
    """Parse ``101``, ``1 0 1`` or ``(0 1 2 1)^3 2`` into a tuple of letters."""
    import re

    text = text.strip()
    if re.fullmatch(r"\d+", text):
        return tuple(int(ch) for ch in text)
    out: list[int] = []
    for m in re.finditer(r"\(([^)]*)\)(?:\^(\d+))?|(\d+)", text):
        if m.group(3) is not None:
            out.append(int(m.group(3)))
        else:
            body = [int(t) for t in m.group(1).replace(",", " ").split()]
            out.extend(body * int(m.group(2) or 1))
    return tuple(out)


def evaluate_word(gens: Sequence[FpMatrix], word: Iterable[int]) -> FpMatrix:
    """Product of the generator matrices, read left to right."""
    result = FpMatrix.identity(gens[0].n, gens[0].p)
    for letter in word:
        if not 0 <= letter < len(gens):
            raise IndexError(f"letter {letter} out of range")
        result = result @ gens[letter]
    return result


class _Arith:
    def __init__(self, p: int, n: int):
        self.p, self.n = p, n
        self.dtype = np.int64 if p < INT64_SAFE_MODULUS else object
        big_codes = p ** n >= (1 << 62) or self.dtype is object
        self.weights = np.array([p ** k for k in range(n)], dtype=object if big_codes else np.int64)
        self.identity = np.eye(n, dtype=self.dtype)

    def asarray(self, m) -> np.ndarray:
        if isinstance(m, FpMatrix):
            return m.to_array().astype(self.dtype)
        return np.asarray(m, dtype=self.dtype) % self.p

    def codes(self, vecs: np.ndarray) -> np.ndarray:
        if self.weights.dtype == object:
            return vecs.astype(object) @ self.weights
        return vecs @ self.weights

    def mul(self, a, b) -> np.ndarray:
        return np.matmul(a, b) % self.p

    def inverse(self, a: np.ndarray) -> np.ndarray:
        return self.asarray(FpMatrix(a.tolist(), self.p).inverse().rows)


class _Level:
    __slots__ = ("beta", "points", "trans", "tinv", "_sorted", "_perm")

    def __init__(self, beta, points, trans, tinv, codes):
        self.beta, self.points, self.trans, self.tinv = beta, points, trans, tinv
        self._perm = np.argsort(codes, kind="stable")
        self._sorted = codes[self._perm]

    def __len__(self):
        return len(self.points)

    def lookup(self, codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        pos = np.searchsorted(self._sorted, codes)
        pos = np.minimum(pos, len(self._sorted) - 1)
        found = self._sorted[pos] == codes
        return self._perm[pos], np.asarray(found, dtype=bool)


class BsgsGroup:
    """Base and strong generating set for a matrix group over GF(p).

    ``stop_above``: abandon the construction once the group is known to be
    larger than this; ``order`` is then only a lower bound and ``truncated``
    is set.
    """

    def __init__(self, gens: Sequence, p: int | None = None, *, stop_above: int | None = None,
                 memory_limit: int = DEFAULT_MEMORY_LIMIT):
        gens = list(gens)
        if p is None:
            if not gens or not isinstance(gens[0], FpMatrix):
                raise ValueError("p is required when generators are not FpMatrix instances")
            p = gens[0].p
        dims = {np.shape(g.rows if isinstance(g, FpMatrix) else g) for g in gens}
        if len(dims) > 1:
            raise DimensionMismatch(f"generators of different shapes: {sorted(dims)}")
        if gens and isinstance(gens[0], FpMatrix) and any(g.p != p for g in gens):
            raise DimensionMismatch("generators over different fields")
        n = dims.pop()[0] if dims else 0
        self.p, self.n = p, n
        self._ar = _Arith(p, n)
        self.generators = tuple(g if isinstance(g, FpMatrix) else FpMatrix(np.asarray(g).tolist(), p)
                                for g in gens)
        self.stop_above = stop_above
        self.memory_limit = memory_limit
        self.truncated = False
        self._levels: list[_Level] = []
        self._strong: list[tuple[np.ndarray, np.ndarray]] = []
        arrays = [self._ar.asarray(g) for g in self.generators]
        for a in arrays:
            if not np.array_equal(a, self._ar.identity):
                inv = self._ar.inverse(a)
                if not any(np.array_equal(a, s) for s, _ in self._strong):
                    self._strong.append((a, inv))
        if self._strong:
            self._schreier_sims()

    # construction ---------------------------------------------------------

    def _first_moved(self, g: np.ndarray) -> np.ndarray:
        for k in range(self.n):
            if not np.array_equal(g[:, k], self._ar.identity[:, k]):
                return self._ar.identity[:, k].copy()
        raise AssertionError("identity has no moved basis vector")

    def _level_gens(self, level: int) -> list[tuple[np.ndarray, np.ndarray]]:
        betas = [L.beta for L in self._levels[:level]]
        return [(s, si) for s, si in self._strong
                if all(np.array_equal(self._ar.mul(s, b), b) for b in betas)]

    def _stored_bytes(self) -> int:
        return sum(3 * len(L) * self.n * self.n * 8 for L in self._levels)

    def _orbit(self, beta: np.ndarray, gens) -> _Level:
        ar, p = self._ar, self.p
        pts = [beta[None, :]]
        trans = [ar.identity[None]]
        tinv = [ar.identity[None]]
        seen = {ar.codes(beta[None, :])[0]}
        fp, ft, fti = pts[0], trans[0], tinv[0]
        budget = self.memory_limit - self._stored_bytes()
        count = 1
        while len(fp):
            nps, nts, ntis = [], [], []
            for s, si in gens:
                img = np.matmul(fp, s.T) % p
                cds = ar.codes(img)
                _, first = np.unique(cds, return_index=True)
                first.sort()
                keep = np.fromiter((c not in seen for c in cds[first].tolist()), dtype=bool, count=len(first))
                sel = first[keep]
                if not len(sel):
                    continue
                seen.update(cds[sel].tolist())
                nps.append(img[sel])
                nts.append(ar.mul(s, ft[sel]))
                ntis.append(ar.mul(fti[sel], si))
                count += len(sel)
                if 3 * count * self.n * self.n * 8 > budget:
                    raise TooLarge(f"orbit exceeds memory budget of {self.memory_limit} bytes")
            if not nps:
                break
            fp, ft, fti = np.concatenate(nps), np.concatenate(nts), np.concatenate(ntis)
            pts.append(fp)
            trans.append(ft)
            tinv.append(fti)
        points = np.concatenate(pts)
        return _Level(beta, points, np.concatenate(trans), np.concatenate(tinv), ar.codes(points))

    def _sift_batch(self, H: np.ndarray, start: int):
        """Sift a batch; return (residue, level) of the earliest failure, or None."""
        ar = self._ar
        alive = np.arange(len(H))
        best = None
        for j in range(start, len(self._levels)):
            if not len(H):
                break
            L = self._levels[j]
            img = np.matmul(H, L.beta) % self.p
            idx, found = L.lookup(ar.codes(img))
            if not found.all():
                f = int(np.argmin(found))
                if best is None or alive[f] < best[0]:
                    best = (alive[f], H[f].copy(), j)
            H = ar.mul(L.tinv[idx[found]], H[found])
            alive = alive[found]
        if len(H):
            nonid = (H != ar.identity).reshape(len(H), -1).any(axis=1)
            if nonid.any():
                f = int(np.argmax(nonid))
                if best is None or alive[f] < best[0]:
                    best = (alive[f], H[f].copy(), len(self._levels))
        return None if best is None else best[1:]

    def _check_level(self, i: int):
        ar = self._ar
        L = self._levels[i]
        for s, _ in self._level_gens(i):
            for lo in range(0, len(L), _CHUNK):
                hi = min(lo + _CHUNK, len(L))
                img = np.matmul(L.points[lo:hi], s.T) % self.p
                b, found = L.lookup(ar.codes(img))
                assert found.all(), "orbit not closed"
                H = ar.mul(L.tinv[b], ar.mul(s, L.trans[lo:hi]))
                res = self._sift_batch(H, i + 1)
                if res is not None:
                    return res
        return None

    def _bound_exceeded(self) -> bool:
        if self.stop_above is None:
            return False
        if self.order > self.stop_above:
            self.truncated = True
            return True
        return False

    def _schreier_sims(self):
        s0 = self._strong[0][0]
        beta = next(self._first_moved(s) for s, _ in self._strong)
        del s0
        self._levels.append(self._orbit(beta, self._strong))
        if self._bound_exceeded():
            return
        i = len(self._levels) - 1
        while i >= 0:
            res = self._check_level(i)
            if res is None:
                i -= 1
                continue
            h, j = res
            self._strong.append((h, self._ar.inverse(h)))
            if j == len(self._levels):
                self._levels.append(None)
                beta = self._first_moved(h)
                self._levels[j] = _Level(beta, beta[None, :], self._ar.identity[None],
                                         self._ar.identity[None], self._ar.codes(beta[None, :]))
            for lvl in range(i + 1, j + 1):
                self._levels[lvl] = self._orbit(self._levels[lvl].beta, self._level_gens(lvl))
            if self._bound_exceeded():
                return
            i = j

    # queries --------------------------------------------------------------

    @property
    def order(self) -> int:
        out = 1
        for L in self._levels:
            out *= len(L)
        return out

    def __len__(self):
        return self.order

    @property
    def base(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in L.beta) for L in self._levels]

    @property
    def transversal_sizes(self) -> list[int]:
        return [len(L) for L in self._levels]

    @property
    def strong_generators(self) -> list[FpMatrix]:
        return [FpMatrix(s.tolist(), self.p) for s, _ in self._strong]

    def contains_batch(self, H: np.ndarray) -> np.ndarray:
        """Membership mask for a stack of matrices."""
        ar = self._ar
        H = np.asarray(H, dtype=ar.dtype) % self.p
        ok = np.ones(len(H), dtype=bool)
        alive = np.arange(len(H))
        for L in self._levels:
            img = np.matmul(H, L.beta) % self.p
            idx, found = L.lookup(ar.codes(img))
            ok[alive[~found]] = False
            H = ar.mul(L.tinv[idx[found]], H[found])
            alive = alive[found]
        if len(H):
            nonid = (H != ar.identity).reshape(len(H), -1).any(axis=1)
            ok[alive[nonid]] = False
        return ok

    def contains(self, m) -> bool:
        a = self._ar.asarray(m)
        if a.shape != (self.n, self.n):
            raise DimensionMismatch("matrix has the wrong dimension")
        return bool(self.contains_batch(a[None])[0])

    def element_blocks(self, limit: int = DEFAULT_ELEMENT_LIMIT) -> Iterator[np.ndarray]:
        """All elements as stacked arrays, in a fixed order."""
        if self.order > limit:
            raise TooLarge(f"group of order {self.order} exceeds element limit {limit}")
        ar = self._ar
        if not self._levels:
            yield ar.identity[None].copy()
            return
        suffix = ar.identity[None]
        for L in reversed(self._levels[1:]):
            suffix = ar.mul(L.trans[:, None], suffix[None]).reshape(-1, self.n, self.n)
        top = self._levels[0].trans
        step = max(1, _CHUNK // len(suffix))
        for lo in range(0, len(top), step):
            blk = ar.mul(top[lo:lo + step, None], suffix[None])
            yield blk.reshape(-1, self.n, self.n)

    def elements(self, limit: int = DEFAULT_ELEMENT_LIMIT) -> Iterator[FpMatrix]:
        for blk in self.element_blocks(limit):
            for m in blk:
                yield FpMatrix(m.tolist(), self.p)


def build_bsgs(gens: Sequence, p: int | None = None, **kw) -> BsgsGroup:
    return BsgsGroup(gens, p, **kw)


def subgroup(gens: Sequence[FpMatrix], subset: Iterable, **kw) -> BsgsGroup:
    """Subgroup generated by generator indices and/or words."""
    chosen = []
    for item in subset:
        if isinstance(item, int):
            chosen.append(gens[item])
        else:
            chosen.append(evaluate_word(gens, item))
    if not chosen:
        return _trivial(gens[0].n, gens[0].p)
    return BsgsGroup(chosen, gens[0].p, **kw)


def _trivial(n: int, p: int) -> BsgsGroup:
    return BsgsGroup([FpMatrix.identity(n, p)], p)


def intersection_array(A: BsgsGroup, B: BsgsGroup, limit: int = DEFAULT_ELEMENT_LIMIT) -> np.ndarray:
    small, other = (A, B) if A.order <= B.order else (B, A)
    if small.order > limit:
        raise TooLarge(f"both groups exceed the element limit {limit}")
    parts = [blk[other.contains_batch(blk)] for blk in small.element_blocks(limit)]
    return np.concatenate(parts)


def intersect_small(A: BsgsGroup, B: BsgsGroup, limit: int = DEFAULT_ELEMENT_LIMIT) -> list[FpMatrix]:
    """Elements of A n B, enumerating the smaller group and sifting through the other."""
    return [FpMatrix(m.tolist(), A.p) for m in intersection_array(A, B, limit)]


def block_diagonal(a: FpMatrix, b: FpMatrix) -> FpMatrix:
    n, m = a.n, b.n
    rows = [list(r) + [0] * m for r in a.rows] + [[0] * n + list(r) for r in b.rows]
    return FpMatrix(rows, a.p)


def graph_subgroup_order(gens_a: Sequence[FpMatrix], gens_b: Sequence[FpMatrix],
                         stop_above: int | None = None) -> int:
    """Order of <(a_i, b_i)> acting block-diagonally on GF(p)^(2n).

    With ``stop_above`` the result is exact up to that bound and otherwise
    merely some lower bound exceeding it.
    """
    if len(gens_a) != len(gens_b):
        raise DimensionMismatch("generator tuples differ in length")
    pairs = [block_diagonal(a, b) for a, b in zip(gens_a, gens_b)]
    return BsgsGroup(pairs, gens_a[0].p, stop_above=stop_above).order


def restrict_action(gens: Sequence[FpMatrix], basis: Sequence[Sequence[int]]) -> list[FpMatrix]:
    """Matrices of the action on span(basis), in that basis (columns = images)."""
    p = gens[0].p
    k = len(basis)
    n = gens[0].n
    out = []
    for g in gens:
        images = [g.apply(w) for w in basis]
        # solve W x = image for each image via one row reduction of [W | images]
        aug = [[basis[c][r] for c in range(k)] + [img[r] for img in images] for r in range(n)]
        red, pivots = rref(aug, p)
        if any(pc >= k for pc in pivots) or pivots != list(range(k)):
            raise NotInvariant("subspace is not invariant under the generators")
        out.append(FpMatrix([row[k:] for row in red[:k]], p))
    return out
