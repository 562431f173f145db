import pytest
from hypothesis import given, strategies as st

from syndetic.errors import InvalidElement, InvalidGroup, ScaleExceeded
from syndetic.groups import (FreeGroup, IntegerGroup, cyclic_group, dihedral_group, parse_group, quaternion_group,
                             read_cayley_table, reduce_word, symmetric_group, write_cayley_table)

F2 = FreeGroup(2)
words = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=8).map(reduce_word)
fixtures = [cyclic_group(n) for n in range(2, 9)] + [symmetric_group(3), dihedral_group(4), quaternion_group()]


def test_parse_and_format_words():
    assert F2.parse("aB") == (1, -2)
    assert F2.parse("a^2b") == (1, 1, 2)
    assert F2.parse("ab^-1") == (1, -2)
    assert F2.parse("aA") == ()
    assert F2.format(()) == "e"
    assert F2.format((1, -2, -2)) == "aBB"


def test_bad_letters_are_rejected():
    with pytest.raises(InvalidElement):
        F2.parse("ac")
    with pytest.raises(InvalidElement):
        F2.validate((1, -1))


def test_multiply_reduces():
    assert F2.multiply(F2.parse("ab"), F2.parse("Ba")) == (1, 1)
    assert F2.invert(F2.parse("ab")) == F2.parse("BA")


@given(words, words, words)
def test_free_group_is_associative(g, h, k):
    assert F2.multiply(F2.multiply(g, h), k) == F2.multiply(g, F2.multiply(h, k))


@given(words)
def test_free_group_inverses(g):
    assert F2.multiply(g, F2.invert(g)) == ()
    assert F2.multiply(F2.invert(g), g) == ()


@given(words)
def test_format_parse_round_trip(g):
    assert F2.parse(F2.format(g)) == g


def test_ball_sizes():
    assert len(F2.ball(2)) == 17 == F2.ball_size(2)
    assert list(IntegerGroup().ball(2)) == [0, 1, -1, 2, -2]
    with pytest.raises(ScaleExceeded):
        F2.ball(20, cap=1000)


@pytest.mark.parametrize("group", fixtures, ids=lambda g: g.spec)
def test_fixture_tables_are_groups(group):
    for g in range(group.order):
        assert group.multiply(g, group.invert(g)) == 0
        assert group.multiply(0, g) == g


def test_fixture_orders():
    assert symmetric_group(3).order == 6
    assert dihedral_group(4).order == 8
    assert quaternion_group().order == 8
    assert cyclic_group(5).multiply(3, 4) == 2


def test_parse_group():
    assert parse_group("z") == IntegerGroup()
    assert parse_group("free:3").rank == 3
    assert parse_group("f2").spec == "f2"
    assert parse_group("z6").order == 6
    assert parse_group("q8").order == 8
    with pytest.raises(InvalidGroup):
        parse_group("heisenberg")
    with pytest.raises(InvalidGroup):
        FreeGroup(1)


def test_cayley_table_round_trip(tmp_path):
    path = tmp_path / "s3.txt"
    s3 = symmetric_group(3)
    write_cayley_table(s3, str(path))
    again = read_cayley_table(str(path))
    assert again.table == s3.table
    assert parse_group(f"finite:{path}").order == 6


def test_non_group_table_is_rejected(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2\n0 1\n0 1\n")
    with pytest.raises(InvalidGroup):
        read_cayley_table(str(path))
