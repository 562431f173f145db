import random

import pytest
from hypothesis import given, settings, strategies as st

from syndetic.engine import (check_witness, complement_transfer, decide_fractionally_thick, decide_n_syndetic,
                             direct_cover, gap_bound, intersection_criterion, intersection_for_all, inverse_set,
                             partition_criterion, product_syndetic_thick, verify_syndetic_witness,
                             verify_thick_refutation)
from syndetic.errors import ScaleExceeded
from syndetic.groups import FreeGroup, IntegerGroup, cyclic_group, symmetric_group
from syndetic.reports import Scope, SyndeticWitness, ThickRefutation, Verdict
from syndetic.sets import (Complement, Cylinder, Empty, FiniteWords, Interval, PowersOfTwoComplement, Residue,
                           multiples, non_multiples)

Z = IntegerGroup()
F2 = FreeGroup(2)
SMALL_GROUPS = [cyclic_group(n) for n in range(2, 7)] + [symmetric_group(3)]


def periodic(m, mask):
    return Residue(m, frozenset(r for r in range(m) if mask >> r & 1))


# --- worked integer examples ------------------------------------------------------

def test_even_numbers_are_syndetic_but_not_two_syndetic(config):
    one = decide_n_syndetic(multiples(2), 1, Z, config)
    assert one.verdict == Verdict.PROVED
    assert one.certificate.F == [0, 1]
    two = decide_n_syndetic(multiples(2), 2, Z, config)
    assert two.verdict == Verdict.REFUTED
    assert two.scope.kind == "exact"
    assert isinstance(two.certificate, ThickRefutation)
    assert verify_thick_refutation(multiples(2), Z, two.certificate, config)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_non_multiples_are_one_short_of_n_syndetic(n, config):
    A = non_multiples(n)
    proved = decide_n_syndetic(A, n - 1, Z, config)
    assert proved.verdict == Verdict.PROVED
    assert proved.certificate.F == list(range(n))
    refuted = decide_n_syndetic(A, n, Z, config)
    assert refuted.verdict == Verdict.REFUTED
    assert verify_thick_refutation(A, Z, refuted.certificate, config)


def test_witnesses_replay(config):
    report = decide_n_syndetic(non_multiples(3), 2, Z, config)
    assert verify_syndetic_witness(non_multiples(3), Z, report.certificate, config)
    bad = SyndeticWitness(n=2, F=[0, 1])
    assert not verify_syndetic_witness(non_multiples(3), Z, bad, config)


def test_finite_sets_are_not_syndetic(config):
    report = decide_n_syndetic(Interval(-3, 5), 1, Z, config)
    assert report.verdict == Verdict.REFUTED
    assert report.scope.kind == "exact"
    assert verify_thick_refutation(Interval(-3, 5), Z, report.certificate, config)
    assert decide_n_syndetic(Empty(), 1, Z, config).verdict == Verdict.REFUTED


def test_powers_of_two_complement_on_a_window(config):
    report = decide_n_syndetic(PowersOfTwoComplement(), 2, Z, config, window=(1, 2 ** 12))
    assert report.verdict == Verdict.PROVED
    assert report.scope == Scope.interval(1, 2 ** 12)
    assert report.certificate.F == [0, 1, 2, 3, 4]


def test_aperiodic_failure_is_undecided(config):
    # the positive integers miss everything left of the window origin
    report = decide_n_syndetic(Interval(1, None), 1, Z, config, window=(-100, 100))
    assert report.verdict == Verdict.UNDECIDED
    assert isinstance(report.certificate, ThickRefutation)
    assert verify_thick_refutation(Interval(1, None), Z, report.certificate, config)


def test_gap_bound_values(config):
    assert gap_bound(PowersOfTwoComplement(), 1, 1, 2 ** 12, 60, config).k_star == 1
    bound = gap_bound(PowersOfTwoComplement(), 2, 1, 2 ** 12, 60, config)
    assert bound.k_star == 4
    assert bound.to_dict()["stated_2^(n-1)+1"] == 3
    assert bound.to_dict()["alternative_2^n+1"] == 5


def test_decisions_are_deterministic(config):
    first = decide_n_syndetic(non_multiples(4), 3, Z, config)
    second = decide_n_syndetic(non_multiples(4), 3, Z, config)
    assert first.canonical_json() == second.canonical_json()


# --- criteria equivalence ---------------------------------------------------------

@settings(max_examples=200)
@given(st.integers(1, 8).flatmap(lambda m: st.tuples(
    st.just(m), st.integers(0, (1 << m) - 1), st.sets(st.integers(0, m - 1), min_size=1), st.integers(1, 3))))
def test_periodic_criteria_agree(case):
    m, mask, F, n = case
    A = periodic(m, mask)
    F = sorted(F)
    witness = check_witness(A, n, F, Z)
    assert intersection_for_all(A, n, F, Z) == witness
    cover = direct_cover(A, n, F, Z)
    assert partition_criterion(A, n, F, Z) == cover
    assert check_witness(A, n, inverse_set(F, Z), Z) == cover


@settings(max_examples=200)
@given(st.sampled_from(SMALL_GROUPS).flatmap(lambda G: st.tuples(
    st.just(G), st.integers(0, (1 << G.order) - 1), st.sets(st.integers(0, G.order - 1), min_size=1),
    st.integers(1, 2))))
def test_finite_group_criteria_agree(case):
    G, mask, F, n = case
    A = FiniteWords(frozenset(g for g in range(G.order) if mask >> g & 1))
    F = sorted(F)
    witness = check_witness(A, n, F, G)
    assert intersection_for_all(A, n, F, G) == witness
    cover = direct_cover(A, n, F, G)
    assert partition_criterion(A, n, F, G) == cover
    assert check_witness(A, n, inverse_set(F, G), G) == cover


def test_intersection_criterion_single_tuple():
    # 0 - 1 and 0 - 2 are both nonzero mod 3
    assert intersection_criterion(non_multiples(3), 2, [0], [1, 2], Z)
    assert not intersection_criterion(non_multiples(3), 2, [0], [0, 1], Z)


def test_partition_cap(config):
    with pytest.raises(ScaleExceeded):
        partition_criterion(multiples(2), 3, list(range(20)), Z, config.replace(partition_cap=100))


# --- duality ---------------------------------------------------------------------

def test_duality_on_random_periodic_sets(config):
    rng = random.Random(0)
    for _ in range(1000):
        m = rng.randint(1, 8)
        A = periodic(m, rng.randrange(1 << m))
        n = rng.randint(1, 3)
        syndetic = decide_n_syndetic(A, n, Z, config)
        thick = decide_fractionally_thick(Complement(A), n, Z, config)
        assert (syndetic.verdict == Verdict.PROVED) == (thick.verdict == Verdict.REFUTED)
        assert thick.evidence["direct_search"] == "agrees"


def test_thickness_of_odd_numbers(config):
    # the complement 2Z is syndetic, so the odd numbers are not thick
    assert decide_fractionally_thick(Residue(2, frozenset({1})), 1, Z, config).verdict == Verdict.REFUTED
    # 2Z is not 2-syndetic, so the odd numbers are 1/2-thick
    assert decide_fractionally_thick(Residue(2, frozenset({1})), 2, Z, config).verdict == Verdict.PROVED


# --- monotonicity ----------------------------------------------------------------

@given(st.integers(1, 8).flatmap(lambda m: st.tuples(
    st.just(m), st.integers(0, (1 << m) - 1), st.integers(0, (1 << m) - 1), st.integers(1, 3))))
def test_supersets_stay_syndetic(case):
    m, mask, extra, n = case
    if decide_n_syndetic(periodic(m, mask), n, Z).verdict == Verdict.PROVED:
        assert decide_n_syndetic(periodic(m, mask | extra), n, Z).verdict == Verdict.PROVED


@given(st.integers(1, 8).flatmap(lambda m: st.tuples(st.just(m), st.integers(0, (1 << m) - 1), st.integers(1, 2))))
def test_higher_order_implies_lower_order(case):
    m, mask, n = case
    A = periodic(m, mask)
    if decide_n_syndetic(A, n + 1, Z).verdict == Verdict.PROVED:
        assert decide_n_syndetic(A, n, Z).verdict == Verdict.PROVED


# --- free groups -----------------------------------------------------------------

def test_cylinders_are_completely_syndetic(config):
    for n in (1, 2, 3):
        report = decide_n_syndetic(Cylinder((1, 2)), n, F2, config)
        assert report.verdict == Verdict.PROVED
        assert report.scope.kind == "exact"
        assert verify_syndetic_witness(Cylinder((1, 2)), F2, report.certificate, config.replace(radius=3))


def test_finite_free_sets_are_refuted(config):
    A = FiniteWords(frozenset({(), (1,), (1, 2)}))
    report = decide_n_syndetic(A, 2, F2, config)
    assert report.verdict == Verdict.REFUTED
    assert verify_thick_refutation(A, F2, report.certificate, config)


def test_complement_transfer(config):
    # 2Z + 1 misses 2Z, so its witness shifts to one for the odd numbers
    report = complement_transfer(multiples(2), 1, 1, Z, config)
    assert report.verdict == Verdict.PROVED
    assert report.certificate.F == [1, 2]
    assert complement_transfer(multiples(2), 2, 1, Z, config).verdict == Verdict.UNDECIDED


def test_product_of_syndetic_and_thick(config):
    report = product_syndetic_thick(multiples(3), Interval(0, 2), [1, 2, 3], -200, 200, config)
    assert report.verdict == Verdict.PROVED
    assert report.evidence["k_star"] == {"1": 0, "2": 0, "3": 0}
