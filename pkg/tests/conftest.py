import numpy as np

from reflpoly.diagram import parse_system, reflection_generators
from reflpoly.fp import FieldCtx, FpMatrix


def gens_of(text: str, p: int) -> list[FpMatrix]:
    return reflection_generators(parse_system(text), FieldCtx(p))


def closure(gens, cap=10 ** 5) -> np.ndarray:
    """Brute-force BFS closure under right multiplication; the independent oracle for group orders.

    Returns an (order, n, n) int64 array.
    """
    n, p = gens[0].n, gens[0].p
    G = [np.array(g.rows, dtype=np.int64) for g in gens]
    ident = np.eye(n, dtype=np.int64)
    seen = {ident.tobytes()}
    found = [ident[None]]
    frontier = ident[None]
    while len(frontier):
        fresh = []
        for g in G:
            prod = (frontier @ g) % p
            for m in prod:
                key = m.tobytes()
                if key not in seen:
                    seen.add(key)
                    fresh.append(m)
        if len(seen) > cap:
            raise OverflowError("closure cap exceeded")
        frontier = np.array(fresh, dtype=np.int64).reshape(-1, n, n)
        found.append(frontier)
    return np.concatenate(found)
