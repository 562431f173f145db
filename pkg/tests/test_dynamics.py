import pytest
from hypothesis import given, strategies as st

from syndetic.dynamics import (amenability_witness, f_avoidance, periodic_candidates, replay_patterns,
                               strong_amenability_witness, subshift_intersection_check, subshift_patterns,
                               subshift_union_check, witness_shift_check)
from syndetic.engine import decide_n_syndetic
from syndetic.errors import InvalidExpr, InvalidGroup
from syndetic.groups import FreeGroup, IntegerGroup, cyclic_group
from syndetic.reports import TranslateTuple, Verdict
from syndetic.sets import (Complement, Cylinder, PowersOfTwoComplement, Residue, Translate, multiples,
                           non_multiples)
from syndetic.strong import replay_multiset_witness, verify_scs_certificate

Z = IntegerGroup()
F2 = FreeGroup(2)


def test_patterns_of_even_numbers(config):
    model = subshift_patterns(multiples(2), [0, 1, 2, 3], 2, Z, config)
    assert {p.bits for p in model.patterns} == {"1010", "0101"}
    assert replay_patterns(model, multiples(2), Z)


def test_tampered_patterns_do_not_replay(config):
    model = subshift_patterns(multiples(2), [0, 1, 2, 3], 2, Z, config)
    model.patterns[0].bits = model.patterns[0].bits[::-1]
    assert not replay_patterns(model, multiples(2), Z)


def test_translate_meets(config):
    # two translates of 2Z are disjoint
    report = subshift_intersection_check(multiples(2), 2, Z, 4, config=config)
    assert report.verdict == Verdict.REFUTED
    assert report.scope.kind == "exact"
    assert isinstance(report.certificate, TranslateTuple)
    assert len(report.certificate.translates) == 2
    assert set(report.certificate.model_dump()) == {"kind", "translates", "window_radius"}

    # any two 2-element residue sets mod 3 meet, three translates do not
    assert subshift_intersection_check(non_multiples(3), 2, Z, 4, config=config).verdict == Verdict.PROVED
    assert subshift_intersection_check(non_multiples(3), 3, Z, 4, config=config).verdict == Verdict.REFUTED


def test_translate_unions(config):
    assert subshift_union_check(multiples(2), 2, Z, 4, config=config).verdict == Verdict.REFUTED
    assert subshift_union_check(multiples(2), 1, Z, 4, config=config).verdict == Verdict.PROVED


def test_free_meets_are_windowed(config):
    report = subshift_intersection_check(Cylinder((1,)), 2, F2, 2, config=config)
    assert report.verdict == Verdict.PROVED
    assert report.scope.kind == "window"


def test_f_avoidance(config):
    assert f_avoidance(multiples(2), [1], Z, config) == {"holds": True, "exact": True}
    hit = f_avoidance(multiples(2), [2], Z, config)
    assert not hit["holds"] and hit["exact"]
    # the powers of two never sit next to each other
    powers = f_avoidance(Complement(PowersOfTwoComplement()), [1], Z, config.replace(z_window=200))
    assert powers == {"holds": True, "exact": False, "window": [-200, 200]}


def test_cylinder_witness_shift(config):
    F = [F2.parse("b"), F2.parse("B")]
    report = witness_shift_check(Cylinder((1,)), F, F2, 2, config=config)
    assert report.verdict == Verdict.PROVED
    assert report.scope.kind == "window"
    assert report.evidence["avoidance"]["holds"]


def test_even_numbers_have_no_witness_shift(config):
    report = witness_shift_check(multiples(2), [1], Z, 4, config=config)
    assert report.evidence["avoidance"]["holds"]
    assert report.verdict == Verdict.REFUTED
    assert report.evidence["two_syndetic"] == "refuted"
    assert len(report.evidence["disjoint_translates"]) == 2


def test_witness_shift_needs_translates(config):
    with pytest.raises(InvalidExpr):
        witness_shift_check(multiples(2), [], Z, 2, config=config)


def test_free_amenability_pair(config):
    report = amenability_witness(F2, config)
    assert report.verdict == Verdict.PROVED
    assert report.evidence["complement_contains_second_set"]
    assert len(report.certificate.certificates) == 2
    assert all(verify_scs_certificate(cert).ok for cert in report.certificate.certificates)


def test_periodic_candidates():
    candidates = periodic_candidates(4)
    assert len(candidates) == 20
    assert candidates[0] == multiples(2)


def test_integer_sweep_falsifies_every_pair(config):
    report = amenability_witness(Z, config, max_modulus=4)
    assert report.verdict == Verdict.UNDECIDED
    outcomes = report.certificate.candidates
    assert len(outcomes) == 20
    assert all(o.outcome != "survived" for o in outcomes)
    assert outcomes[0].outcome == "set falsified"
    assert replay_multiset_witness(outcomes[0].witness, multiples(2), Z)


def test_amenability_rejects_finite_groups(config):
    with pytest.raises(InvalidGroup):
        amenability_witness(cyclic_group(4), config)


def test_strong_witness_in_free_group(config):
    report = strong_amenability_witness(F2, [F2.parse("a")], config)
    assert report.verdict == Verdict.PROVED
    assert report.set["expr"] == {"op": "cylinder", "args": ["b"]}


def test_strong_witness_absent_in_integers(config):
    # avoiding shift 1 forbids difference 1, which 2-syndeticity needs
    report = strong_amenability_witness(Z, [1], config)
    assert report.verdict == Verdict.UNDECIDED
    assert "FC-hypercentral" in report.evidence["note"]


def test_strong_witness_rejects_identity(config):
    with pytest.raises(InvalidExpr):
        strong_amenability_witness(Z, [0], config)


@pytest.mark.parametrize("m", range(1, 7))
def test_translate_meets_match_the_engine(m, config):
    # ball(3) holds every residue mod m, so the search is exact
    for mask in range(1 << m):
        A = Residue(m, frozenset(r for r in range(m) if mask >> r & 1))
        for n in (1, 2, 3):
            meets = subshift_intersection_check(A, n, Z, 6, translate_radius=3, config=config)
            assert meets.scope.kind == "exact"
            assert meets.verdict == decide_n_syndetic(A, n, Z, config).verdict


@given(st.integers(1, 8).flatmap(lambda m: st.tuples(
    st.just(m), st.integers(0, (1 << m) - 1), st.integers(-9, 9), st.sets(st.integers(1, 9), min_size=1))))
def test_avoidance_is_translation_invariant(case):
    m, mask, g, F = case
    A = Residue(m, frozenset(r for r in range(m) if mask >> r & 1))
    F = sorted(F)
    assert f_avoidance(Translate(g, A), F, Z)["holds"] == f_avoidance(A, F, Z)["holds"]
