from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from syndetic.errors import InvalidExpr
from syndetic.groups import FreeGroup, IntegerGroup
from syndetic.reports import ScsCertificate, Verdict
from syndetic.sets import Cylinder, Residue, multiples
from syndetic.strong import (Multiset, adjudicate, build_scs_certificate, literal_instances, order_for_epsilon,
                             parse_epsilon, replay_multiset_witness, scs_falsify, scs_implies_completely_syndetic,
                             verify_scs_certificate)

Z = IntegerGroup()
F2 = FreeGroup(2)


def test_epsilon_parsing():
    assert parse_epsilon("1/4") == Fraction(1, 4)
    assert parse_epsilon(0.25) == Fraction(1, 4)
    assert order_for_epsilon(Fraction(1, 4)) == 2
    assert order_for_epsilon(Fraction(1, 5)) == 3
    with pytest.raises(ValueError):
        parse_epsilon("3/2")


@pytest.mark.parametrize("eps, cells", [("1/4", 4), ("1/6", 6)])
def test_certificates_verify(eps, cells, config):
    cert = build_scs_certificate(2, eps, config=config)
    assert cert.n == order_for_epsilon(Fraction(eps))
    assert len(cert.cells) == cells
    assert cert.cells[0] == ["a"]
    assert verify_scs_certificate(cert).ok
    # a certificate at ε also holds at any looser ε
    assert verify_scs_certificate(cert, "1/2").ok
    assert not verify_scs_certificate(cert, "1/100").ok


@pytest.mark.parametrize("eps", ["1/4", "1/6"])
def test_falsifier_finds_nothing_against_certificates(eps, config):
    cert = build_scs_certificate(2, eps, config=config)
    F = [F2.parse(f) for f in cert.F]
    assert scs_falsify(Cylinder((1,)), eps, F, F2, 4, 12, 4, config) is None


def test_certificate_for_other_letters_and_ranks(config):
    cert = build_scs_certificate(3, "1/4", target="B", config=config)
    assert cert.rank == 3
    assert cert.target == "B"
    assert verify_scs_certificate(cert).ok
    with pytest.raises(InvalidExpr):
        build_scs_certificate(2, "1/4", target="ab", config=config)


def test_tampered_certificate_is_rejected(config):
    cert = build_scs_certificate(2, "1/4", config=config)
    data = cert.model_dump()
    data["assignment"] = [cert.assignment[1]] + cert.assignment[1:]
    check = verify_scs_certificate(ScsCertificate.model_validate(data))
    assert not check.ok
    assert check.reason == "translate escapes the target"

    data = cert.model_dump()
    data["cells"] = data["cells"][:-1]
    data["assignment"] = data["assignment"][:-1]
    assert not verify_scs_certificate(ScsCertificate.model_validate(data)).ok


def test_even_numbers_are_falsified(config):
    witness = scs_falsify(multiples(2), "1/4", [0, 1], Z, 2, 12, 4, config)
    assert witness is not None
    assert witness.size == 2
    assert replay_multiset_witness(witness, multiples(2), Z)


def test_multiset_merges_entries():
    K = Multiset(((0, 1), (1, 2), (0, 2)))
    assert K.size == 5
    assert K.count_inside(lambda g: g % 2 == 0, Z, 0) == 3
    with pytest.raises(ValueError):
        Multiset(((0, 0),))


def test_literal_two_cell_instance_is_rejected():
    cells, remainder, F = literal_instances(F2)["n=2, F={a, ab}"]
    verdict = adjudicate(F2, cells, remainder, F)
    assert not verdict.accepted
    assert verdict.failures[0]["cell"] == 0


def test_adjudication_accepts_the_built_translates(config):
    cert = build_scs_certificate(2, "1/4", config=config)
    cells = [[F2.parse(w) for w in cell] for cell in cert.cells]
    remainder = [F2.parse(w) for w in cert.remainder]
    verdict = adjudicate(F2, cells, remainder, [F2.parse(f) for f in cert.F])
    assert verdict.accepted
    assert verdict.failures == []


def test_certificate_implies_complete_syndeticity(config):
    cert = build_scs_certificate(2, "1/4", config=config)
    report = scs_implies_completely_syndetic(cert, 3, config)
    assert report.verdict == Verdict.PROVED
    assert report.certificate.n == 2
    assert report.scope.kind == "window"


def test_translates_that_miss_the_cylinder_leave_it_undecided(config):
    cert = build_scs_certificate(2, "1/4", config=config)
    # b·e = b already lies outside the cylinder of a
    report = scs_implies_completely_syndetic(cert.model_copy(update={"F": ["b"]}), 2, config)
    assert report.verdict == Verdict.UNDECIDED
    assert report.scope.kind == "window"
    assert report.certificate.kind == "thick-refutation"
    assert report.certificate.F == ["b"]


@settings(max_examples=30)
@given(st.integers(2, 6).flatmap(lambda m: st.tuples(
    st.just(m), st.integers(0, (1 << m) - 1), st.integers(0, (1 << m) - 1),
    st.sets(st.integers(0, m - 1), min_size=1))))
def test_falsifier_witness_survives_shrinking_the_set(case):
    m, mask, extra, F = case
    A = Residue(m, frozenset(r for r in range(m) if mask >> r & 1))
    bigger = Residue(m, frozenset(r for r in range(m) if (mask | extra) >> r & 1))
    witness = scs_falsify(bigger, "1/4", sorted(F), Z, m, 8, 3)
    if witness is not None:
        assert replay_multiset_witness(witness, A, Z)
