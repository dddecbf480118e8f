import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reflpoly.coset import (Overflow, Presentation, PresentationSyntaxError, coset_table, coxeter_presentation,
                            enumerate_cosets, format_presentation, parse_presentation, parse_word_text,
                            shipped_presentations, table_closes, validate_against_matrix)
from reflpoly.diagram import parse_system
from reflpoly.fp import FieldCtx
from reflpoly.matgroup import build_bsgs, subgroup
from conftest import gens_of

S3 = Presentation(2, (True, True), ((0, 1) * 3,))
LT443 = coxeter_presentation([4, 4, 3], [(0, 1, 2, 1) * 3])
TOR44 = coxeter_presentation([4, 4], [(0, 1, 2, 1) * 3])


def test_small_indices():
    assert enumerate_cosets(S3) == 6
    assert enumerate_cosets(LT443) == 1440
    assert enumerate_cosets(LT443, [(1,), (2,), (3,)]) == 30
    assert enumerate_cosets(Presentation(1, (False,), ((0,) * 5,))) == 5


def test_validation_examples():
    system, ctx = parse_system("[4,4]@1,2,1"), FieldCtx(3)
    assert validate_against_matrix(TOR44, system, ctx)
    assert subgroup(gens_of("[4,4,3]@1,2,1,1", 3), [0, 1, 2]).order == 72
    wrong = coxeter_presentation([4, 4], [(0, 1, 2, 1) * 2])
    assert not validate_against_matrix(wrong, system, ctx)
    assert validate_against_matrix(coxeter_presentation([3, 3, 3]), parse_system("[3,3,3]@1,1,1,1"), FieldCtx(7))


def test_overflow_never_wrong():
    with pytest.raises(Overflow):
        enumerate_cosets(LT443, max_cosets=100)
    with pytest.raises(Overflow):
        enumerate_cosets(coxeter_presentation([3, 6]), max_cosets=5000)


def test_table_closure_and_standardization():
    t = coset_table(LT443)
    assert table_closes(LT443, t)
    assert t.rows == coset_table(LT443).rows
    seen = [0]
    for row in t.rows:
        for c in row:
            if c not in seen:
                assert c == len(seen)
                seen.append(c)


def test_index_times_subgroup_order():
    sub = coxeter_presentation([4, 3])
    assert enumerate_cosets(LT443, [(1,), (2,), (3,)]) * enumerate_cosets(sub) == enumerate_cosets(LT443)
    pres = coxeter_presentation([7, 3], [(0, 1, 2) * 8])
    assert enumerate_cosets(pres) == 336
    assert enumerate_cosets(pres, [(0,), (1,)]) == 336 // 14


def test_word_syntax():
    assert parse_word_text("(0 1 2 1)^3") == (0, 1, 2, 1) * 3
    assert parse_word_text("(0 1)^-1 2") == (-2, -1, 2)
    assert parse_word_text("3'") == (-4,)
    with pytest.raises(PresentationSyntaxError):
        parse_word_text("(0 x)")


def test_file_roundtrip():
    text = "# name: demo\ngens 3\ninv 0\ninv 1 2\nrel (0 1)^4\nrel (1 2)^4\nrel (0 2)^2\nrel (0 1 2 1)^3\nsub (1)\n"
    pres = parse_presentation(text)
    assert pres.meta == {"name": "demo"}
    again = parse_presentation(format_presentation(pres))
    assert again == pres
    assert enumerate_cosets(pres) == 72 // 2
    with pytest.raises(PresentationSyntaxError):
        parse_presentation("inv 0\n")
    with pytest.raises(PresentationSyntaxError):
        parse_presentation("gens 2\nfoo 1\n")


def test_relators_freely_reduced():
    pres = Presentation(2, (True, False), ((0, 0, 1, -2, 1),))
    assert (0, 0) in pres.relators
    assert (1,) in pres.relators


@pytest.mark.parametrize("name", sorted(shipped_presentations()))
def test_shipped_presentations_certified(name):
    pres = shipped_presentations()[name]
    assert pres.meta["status"] == "certified"
    matrix_order = build_bsgs(gens_of(pres.meta["system"], int(pres.meta["p"]))).order
    assert enumerate_cosets(pres) == int(pres.meta["order"]) == matrix_order


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(3, 3), (4, 3), (3, 4), (5, 3), (3, 5), (2, 6)]), st.sets(st.integers(0, 2)))
def test_finite_coxeter_indices(branches, sub):
    pres = coxeter_presentation(list(branches))
    words = [(i,) for i in sorted(sub)]
    t = coset_table(pres, words)
    assert table_closes(pres.with_subgroup(words), t)
    assert enumerate_cosets(pres) % t.index == 0
