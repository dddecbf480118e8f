import pytest

from conftest import gens_of
from reflpoly.census import all_rank4_diagrams
from reflpoly.diagram import enumerate_basic_systems, gram_mod_p, parse_system
from reflpoly.fp import FieldCtx, QuadClass, form_invariants
from reflpoly.matgroup import build_bsgs
from reflpoly.ortho import BadEpsilon, catalog_matches, identify, order_orthogonal, order_singular, spinor_profile


def test_orthogonal_orders():
    assert order_orthogonal(4, 3, -1) == 1440
    assert order_orthogonal(4, 7, -1) == 235200 == 2 * 7 ** 2 * (7 ** 4 - 1)
    assert order_orthogonal(3, 3, 0) == 48
    with pytest.raises(BadEpsilon):
        order_orthogonal(3, 5, 1)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_epsilon_branches(p):
    prod = order_orthogonal(4, p, 1) * order_orthogonal(4, p, -1)
    assert prod % (4 * p ** 4 * (p * p - 1) ** 2) == 0
    for n in range(1, 7):
        for eps in ((0,) if n % 2 else (1, -1)):
            assert order_singular(n, p, 0, eps) == order_orthogonal(n, p, eps)


def test_singular_orders():
    assert order_singular(4, 3, 1, 0) == 1296
    assert order_singular(3, 3, 1, -1) == 72
    for p in (5, 7):
        assert order_singular(3, p, 1, 1) == p ** 2 * 2 * (p - 1)
        assert order_singular(3, p, 1, -1) == p ** 2 * 2 * (p + 1)


def test_spinor_profiles():
    S, N, Z = QuadClass.SQUARE, QuadClass.NONSQUARE, QuadClass.ZERO
    for p in (3, 5, 7):
        assert spinor_profile(parse_system("[3,inf,3]@1,1,4,4"), FieldCtx(p)) == (S, S, S, S)
    assert spinor_profile(parse_system("[6,3,inf]@3,1,1,4"), FieldCtx(5))[0] == N
    assert spinor_profile(parse_system("[6,3,3]@3,1,1,1"), FieldCtx(3))[0] == Z


def _identify(text, p):
    s, ctx = parse_system(text), FieldCtx(p)
    order = build_bsgs(gens_of(text, p)).order
    return identify(order, form_invariants(gram_mod_p(s, ctx), ctx), spinor_profile(s, ctx), p)


def test_identify_examples():
    g = _identify("[4,4,3]@1,2,1,1", 5)
    assert str(g) == "O(4,5,+1)" and g.order == 28800
    g = _identify("[inf,4,inf]@4,1,2,8", 3)
    assert str(g) == "O(4,3,+1)" and g.order == 1152 and "catalog order F4" in g.notes
    g = _identify("[inf,3,3]@4,1,1,1", 3)
    assert g.family == "spherical" and str(g) == "A4" and g.order == 120
    assert str(_identify("[6,3,3]@3,1,1,1", 3)) == "Ohat(4,3,1,0)"
    assert str(_identify("[3,inf,3]@1,1,4,4", 5)) == "O1(4,5,-1)"
    g = _identify("[4,4,3]@1,2,1,1", 7)
    assert g.family == "O1"


def test_exclusion_annotation():
    # index-2 subgroup at (4,3,-1) with square spinor norms
    from reflpoly.fp import FormInvariants
    g = identify(720, FormInvariants(4, 0, QuadClass.NONSQUARE, -1), (QuadClass.SQUARE,) * 4, 3)
    assert g.family == "O1" and g.notes == ("excluded case of the orthogonal classification",)


def test_catalog():
    assert catalog_matches(4, 1152) == ["F4"]
    assert catalog_matches(4, 14400) == ["H4"]
    assert "A4" in catalog_matches(4, 120)


def test_census_identifications_consistent():
    """Doubling an O1/O2 order gives |O|; O orders agree with the formula; all-square labels never give O2."""
    seen_pairs = {}
    for d in all_rank4_diagrams()[::3]:
        for s in enumerate_basic_systems(d):
            for p in (5, 7):
                ctx = FieldCtx(p)
                inv = form_invariants(gram_mod_p(s, ctx), ctx)
                prof = spinor_profile(s, ctx)
                order = build_bsgs(gens_of(str(s), p)).order
                g = identify(order, inv, prof, p)
                if g.family in ("O", "O1", "O2"):
                    full = order_orthogonal(4, p, inv.epsilon)
                    assert order * (1 if g.family == "O" else 2) == full
                    seen_pairs.setdefault((p, inv.epsilon), set()).add((g.family, order))
                if g.family == "O2":
                    assert set(prof) != {QuadClass.SQUARE}
    for fams in seen_pairs.values():
        orders = dict(fams)
        if "O" in orders and "O1" in orders:
            assert orders["O"] == 2 * orders["O1"]
