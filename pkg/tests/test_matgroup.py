import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import closure, gens_of
from reflpoly.diagram import enumerate_basic_systems, gram_mod_p, parse_schlafli, parse_system, reflection_generators
from reflpoly.fp import FieldCtx, FpMatrix
from reflpoly.matgroup import (BsgsGroup, NotInvariant, TooLarge, build_bsgs, evaluate_word, graph_subgroup_order,
                               intersect_small, parse_word, restrict_action, subgroup)


def test_orders():
    assert build_bsgs(gens_of("[4,4,3]@1,2,1,1", 3)).order == 1440
    assert build_bsgs(gens_of("[6,6,6]@3,1,3,1", 3)).order == 432
    assert build_bsgs(gens_of("[4,6,4]@2,1,3,6", 3)).order == 5184
    assert build_bsgs(gens_of("[6,inf,6]@1,3,12,4", 3)).order == 1944
    assert build_bsgs([FpMatrix.identity(3, 5)]).order == 1
    r = gens_of("[3]@1,1", 7)[0]
    assert build_bsgs([r]).order == 2


def test_large_order():
    # frozen from this engine, cross-checked against |O1(4,41,+1)|
    assert build_bsgs(gens_of("[4,4,3]@1,2,1,1", 41)).order == 4744454400


def test_stop_above_and_memory_cap():
    g = BsgsGroup(gens_of("[4,4,3]@1,2,1,1", 13), stop_above=1000)
    assert g.truncated
    with pytest.raises(TooLarge):
        BsgsGroup(gens_of("[4,4,3]@1,2,1,1", 13), memory_limit=10_000)


def test_membership():
    gens = gens_of("[6,3,inf]@3,1,1,4", 5)
    G = build_bsgs(gens)
    assert G.contains(FpMatrix.identity(4, 5))
    assert all(G.contains(g) for g in gens)
    # reflection with root b1 + 2 b2: r1 g with g = (r0r1)^3 t(0,-2)
    ell = 1  # 3 * ell = -2 mod 5
    g = evaluate_word(gens, (0, 1) * 3 + (1, 2, 1, 0, 1, 0) * ell + (2, 1, 0, 1, 0, 1) * ell)
    r = gens[1] @ g
    assert (r @ r).is_identity() and r.det() == 4
    assert not subgroup(gens, [1, 2, 3]).contains(r)
    assert G.contains(r)


def test_words():
    gens = gens_of("[4,4,3]@1,2,1,1", 3)
    assert evaluate_word(gens, ()).is_identity()
    assert parse_word("101") == (1, 0, 1)
    assert parse_word("(0 1 2 1)^3 2") == (0, 1, 2, 1) * 3 + (2,)
    assert evaluate_word(gens, parse_word("(0 1 2 1)^3")).is_identity()


def test_translation_matrices():
    gens = gens_of("[6,3,inf]@3,1,1,4", 7)
    basis = [(0, 1, 0, 0), (0, 0, 1, 0), (1, 2, 1, 0)]
    (m,) = restrict_action([evaluate_word(gens, parse_word("2 1 (0 1)^2"))], basis)
    assert m.rows == ((1, 0, 0), (0, 1, 0), (6, 2, 1))  # M(-1, 2)
    (m,) = restrict_action([evaluate_word(gens, parse_word("1 2 (1 0)^2"))], basis)
    assert m.rows == ((1, 0, 0), (0, 1, 0), (1, 1, 1))  # M(1, 1)


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_636_relation(p):
    gens = gens_of("[6,3,6]@3,1,1,3", p)
    ell = (-2 * pow(3, -1, p)) % p
    lhs = evaluate_word(gens, (0, 1) * 3 + (1, 2, 1, 0, 1, 0) * ell + (2, 1, 0, 1, 0, 1) * ell)
    rhs = evaluate_word(gens, (3, 2) * 3 + (2, 1, 2, 3, 2, 3) * ell + (1, 2, 3, 2, 3, 2) * ell)
    assert lhs == rhs


def test_subgroups():
    gens = gens_of("[4,4,3]@1,2,1,1", 3)
    assert subgroup(gens, [1, 2, 3]).order == 48
    assert subgroup(gens, [0, 1, 2]).order == 72
    assert subgroup(gens, []).order == 1
    assert subgroup(gens_of("[6,3,3]@3,1,1,1", 3), [0, 1, 2]).order == 108


def test_intersections():
    gens = gens_of("[6,3,6]@1,3,3,1", 5)
    G0, G3 = subgroup(gens, [1, 2, 3]), subgroup(gens, [0, 1, 2])
    assert len(intersect_small(G0, G3)) == 12
    assert subgroup(gens, [1, 2]).order == 6
    gens = gens_of("[4,4,3]@1,2,1,1", 5)
    inter = intersect_small(subgroup(gens, [1, 2, 3]), subgroup(gens, [0, 1, 2]))
    assert len(inter) == 8 == subgroup(gens, [1, 2]).order
    A = subgroup(gens, [0, 1])
    assert {m.tobytes() for m in intersect_small(A, A)} == {m.tobytes() for m in A.elements()}


def test_intersection_closed():
    gens = gens_of("[6,3,6]@1,3,3,1", 5)
    inter = intersect_small(subgroup(gens, [1, 2, 3]), subgroup(gens, [0, 1, 2]))
    keys = {m.tobytes() for m in inter}
    assert all((a @ b).tobytes() in keys for a in inter for b in inter)
    for sub in ([1, 2, 3], [0, 1, 2]):  # |A cap B| divides both orders
        assert subgroup(gens, sub).order % len(inter) == 0


def test_graph_subgroup():
    gens = gens_of("[6,3,6]@1,3,3,1", 3)
    order = build_bsgs(gens).order
    assert graph_subgroup_order(gens, gens) == order
    assert graph_subgroup_order(gens, gens[::-1]) == order
    gens = gens_of("[6,3,6]@1,3,3,9", 3)
    order = build_bsgs(gens).order
    assert graph_subgroup_order(gens, gens[::-1]) > order


def test_restrict_action():
    gens = gens_of("[4,4,3]@1,2,1,1", 5)
    basis = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)]
    restricted = restrict_action(gens[:3], basis)
    assert restricted == reflection_generators(parse_system("[4,4]@1,2,1"), FieldCtx(5))
    full = [tuple(int(i == j) for j in range(4)) for i in range(4)]
    assert restrict_action(gens, full) == gens
    with pytest.raises(NotInvariant):
        restrict_action(gens[2:], basis)
    gens = gens_of("[4,3,6]@2,1,1,3", 3)
    assert subgroup(gens, [1, 2, 3]).order == 108
    v0 = [(0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
    assert build_bsgs(restrict_action(gens[1:], v0)).order == 36


SMALL = [(s, p) for d in ("[3,3,3]", "[4,3,3]", "[4,4,3]", "[6,3,3]", "[3,inf,3]", "[6,6,3]", "[4,3,4]", "[6,3,6]")
         for s in enumerate_basic_systems(parse_schlafli(d)) for p in (3, 5)]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SMALL), st.sets(st.integers(0, 3), min_size=1))
def test_bsgs_matches_closure(case, subset):
    system, p = case
    gens = reflection_generators(system, FieldCtx(p))
    chosen = [gens[i] for i in sorted(subset)]
    G = build_bsgs(chosen)
    if G.order > 10 ** 5:
        return
    elems = closure(chosen)
    assert G.order == len(elems)
    assert G.contains_batch(elems).all()
    assert build_bsgs(gens).order % G.order == 0


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(SMALL), st.integers(0, 10 ** 6))
def test_nonisometry_rejected(case, seed):
    import random
    system, p = case
    ctx = FieldCtx(p)
    gens = reflection_generators(system, ctx)
    B = gram_mod_p(system, ctx)
    G = build_bsgs(gens)
    rng = random.Random(seed)
    m = FpMatrix([[rng.randrange(p) for _ in range(4)] for _ in range(4)], p)
    if m.transpose() @ B @ m != B:
        assert not G.contains(m)
    assert graph_subgroup_order(gens, gens) == G.order
