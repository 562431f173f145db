import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from syndetic.errors import InvalidExpr
from syndetic.groups import FreeGroup, IntegerGroup, reduce_word, symmetric_group
from syndetic.sets import (All, Complement, Cylinder, Empty, FiniteNF, FiniteWords, FreeGroupNF, Interval,
                           Intersection, NotNormalizable, PeriodicNF, PowersOfTwoComplement, Residue, Translate,
                           Union as SetUnion, coverage, emptiness, finite_support, from_json, indicator, load_set,
                           member, multiples, normalize, parse_compact, subset, to_json, translate_nf)

Z = IntegerGroup()
F2 = FreeGroup(2)

words = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=6).map(reduce_word)
short_words = st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=3).map(reduce_word).filter(bool)

free_leaves = st.one_of(
    short_words.map(Cylinder),
    st.frozensets(words, max_size=3).map(FiniteWords),
)
free_exprs = st.recursive(
    free_leaves,
    lambda inner: st.one_of(
        inner.map(Complement),
        st.tuples(inner, inner).map(SetUnion),
        st.tuples(inner, inner).map(Intersection),
        st.tuples(short_words, inner).map(lambda p: Translate(p[0], p[1])),
    ),
    max_leaves=5,
)

residues = st.integers(1, 8).flatmap(
    lambda m: st.frozensets(st.integers(0, m - 1)).map(lambda r: Residue(m, r)))
periodic_exprs = st.recursive(
    residues,
    lambda inner: st.one_of(
        inner.map(Complement),
        st.tuples(inner, inner).map(SetUnion),
        st.tuples(inner, inner).map(Intersection),
        st.tuples(st.integers(-9, 9), inner).map(lambda p: Translate(p[0], p[1])),
    ),
    max_leaves=4,
)


def test_periodic_normal_form_uses_minimal_period():
    assert normalize(Residue(4, frozenset({0, 2})), Z) == PeriodicNF(2, 1)
    assert normalize(multiples(2), Z).translate(1).residues == (1,)
    assert normalize(All(), Z).is_full
    assert normalize(Empty(), Z).is_empty


def test_aperiodic_sets_do_not_normalize():
    assert isinstance(normalize(PowersOfTwoComplement(), Z), NotNormalizable)
    assert isinstance(normalize(Interval(0, None), Z), NotNormalizable)
    # an absorbing part settles the value
    assert normalize(SetUnion((PowersOfTwoComplement(), All())), Z).is_full


@given(periodic_exprs, st.integers(-40, 40))
def test_periodic_normal_form_agrees_with_membership(A, x):
    assert normalize(A, Z).contains(x) == member(A, x, Z)


@given(periodic_exprs)
def test_indicator_agrees_with_membership(A):
    inside = indicator(A, -12, 12)
    assert inside.tolist() == [member(A, x, Z) for x in range(-12, 13)]


@given(free_exprs, words)
def test_free_normal_form_agrees_with_membership(A, g):
    assert normalize(A, F2).contains(g) == member(A, g, F2)


@given(free_exprs, short_words, words)
def test_free_translate_is_left_multiplication(A, h, g):
    nf = normalize(A, F2)
    assert nf.translate(h).contains(F2.multiply(h, g)) == nf.contains(g)


def test_cylinder_complement():
    nf = normalize(Complement(Cylinder((1,))), F2)
    assert nf.words == ((),)
    assert nf.cylinders == ((-1,), (2,), (-2,))
    assert nf.describe() == "e ∪ B_A ∪ B_b ∪ B_B"


def test_translate_cancelling_a_whole_cylinder():
    # a·B_A is everything outside B_a
    nf = normalize(Translate((1,), Cylinder((-1,))), F2)
    assert nf == normalize(Complement(Cylinder((1,))), F2)


def test_subset_and_finiteness():
    a = normalize(Cylinder((1,)), F2)
    ab = normalize(Cylinder((1, 2)), F2)
    assert subset(ab, a)
    assert not subset(a, ab)
    assert normalize(FiniteWords(frozenset({(1,), (2,)})), F2).is_finite


def test_finite_group_normal_form():
    s3 = symmetric_group(3)
    nf = normalize(FiniteWords(frozenset({0, 1})), s3)
    assert isinstance(nf, FiniteNF)
    assert nf.elements == (0, 1)
    assert nf.complement().elements == (2, 3, 4, 5)
    assert nf.translate(1, s3).contains(s3.multiply(1, 1))


def test_group_mismatch_is_rejected():
    with pytest.raises(InvalidExpr):
        normalize(Cylinder((1,)), Z)
    with pytest.raises(InvalidExpr):
        normalize(Residue(2, frozenset({0})), F2)


def test_parse_compact():
    assert parse_compact("residue:3:exclude0", Z) == Residue(3, frozenset({1, 2}))
    assert parse_compact("residue:4:0,1", Z) == Residue(4, frozenset({0, 1}))
    assert parse_compact("not:even", Z) == Complement(Residue(2, frozenset({0})))
    assert parse_compact("translate:1:even", Z) == Translate(1, Residue(2, frozenset({0})))
    assert parse_compact("interval:0:", Z) == Interval(0, None)
    assert parse_compact("cylinder:aB", F2) == Cylinder((1, -2))
    assert parse_compact("words:e,a", F2) == FiniteWords(frozenset({(), (1,)}))
    with pytest.raises(InvalidExpr):
        parse_compact("spiral:3", Z)


def test_json_form_is_stable():
    A = SetUnion((Cylinder((1, 2)), FiniteWords(frozenset({(-1,), ()}))))
    obj = to_json(A, F2)
    assert obj == {"op": "union", "args": [{"op": "cylinder", "args": ["ab"]},
                                           {"op": "words", "args": ["e", "A"]}]}
    assert normalize(from_json(obj, F2), F2) == normalize(A, F2)


def test_load_set():
    text = json.dumps({"group": "z", "expr": {"op": "residue", "args": [3, [0]]}})
    group, A = load_set(text)
    assert group == Z
    assert A == Residue(3, frozenset({0}))
    with pytest.raises(InvalidExpr):
        load_set(text, F2)
    assert load_set("cylinder:a", F2) == (F2, Cylinder((1,)))
    with pytest.raises(InvalidExpr):
        load_set("powers2c")


def test_load_set_from_file(tmp_path):
    path = tmp_path / "set.json"
    path.write_text(json.dumps({"group": "f2", "expr": {"op": "cylinder", "args": ["b"]}}))
    group, A = load_set(str(path))
    assert group.spec == "f2"
    assert A == Cylinder((2,))


def test_finite_support():
    assert finite_support(Interval(3, 5), Z) == frozenset({3, 4, 5})
    assert finite_support(SetUnion((FiniteWords(frozenset({1})), Interval(2, 3))), Z) == frozenset({1, 2, 3})
    assert finite_support(Residue(2, frozenset({0})), Z) is None
    assert finite_support(Cylinder((1,)), F2) is None


def test_powers_of_two_complement_indicator():
    inside = indicator(PowersOfTwoComplement(), 1, 20)
    assert int((~inside).sum()) == 4
    assert not inside[np.array([1, 3, 7, 15])].any()


def test_emptiness_and_coverage_of_translates():
    even = normalize(multiples(2), Z)
    assert translate_nf(1, even, Z) == even.complement()
    assert emptiness(even.intersection(translate_nf(1, even, Z)))
    assert coverage(even.union(translate_nf(3, even, Z)))
