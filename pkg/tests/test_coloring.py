import dataclasses

import pytest

from syndetic.coloring import Coloring, coloring_to_set, set_to_coloring, verify_coloring
from syndetic.engine import decide_n_syndetic
from syndetic.errors import NoCoveringTranslate, NotAvoiding
from syndetic.groups import FreeGroup, IntegerGroup
from syndetic.reports import SyndeticWitness, Verdict
from syndetic.sets import Cylinder, multiples, non_multiples, normalize, subset

Z = IntegerGroup()
F2 = FreeGroup(2)


@pytest.fixture
def cylinder_coloring(config):
    A = Cylinder((1,))
    witness = decide_n_syndetic(A, 2, F2, config).certificate
    return set_to_coloring(A, 2, [F2.parse("b")], witness, F2, 2, config)


def test_cylinder_coloring_has_no_conflict(cylinder_coloring):
    assert verify_coloring(cylinder_coloring, F2) is None
    # every 2-subset of ball(2)
    assert len(cylinder_coloring.table) == 17 * 16 // 2


def test_coloring_gives_back_an_avoiding_set(cylinder_coloring):
    A, report = coloring_to_set(cylinder_coloring, F2)
    assert report.verdict == Verdict.PROVED
    assert report.scope.kind == "window"
    assert report.evidence["avoiding"]
    assert report.evidence["each_subset_covered"]
    assert subset(normalize(A, F2), normalize(Cylinder((1,)), F2))


def test_coloring_model_round_trip(cylinder_coloring):
    model = cylinder_coloring.to_model(F2)
    assert model.table[0].k in model.K
    assert Coloring.from_model(model, F2) == cylinder_coloring


def test_clashing_coloring_is_flagged():
    c = Coloring(n=1, F=(1,), K=(0, 1), window_radius=1, table=(((0,), 0), ((1,), 0)))
    assert verify_coloring(c, Z) is not None
    _, report = coloring_to_set(c, Z)
    assert report.verdict == Verdict.REFUTED
    assert report.evidence["clash"] == {"f": 1, "element": 0}


def test_non_avoiding_set_is_rejected(config):
    witness = decide_n_syndetic(multiples(2), 1, Z, config).certificate
    with pytest.raises(NotAvoiding):
        set_to_coloring(multiples(2), 1, [2], witness, Z, 2, config)


def test_bad_witness_leaves_a_subset_uncovered(config):
    with pytest.raises(NoCoveringTranslate):
        set_to_coloring(non_multiples(3), 2, [], SyndeticWitness(n=2, F=[0, 1]), Z, 1, config)


def test_truncated_table_is_not_covering(cylinder_coloring):
    short = dataclasses.replace(cylinder_coloring, table=cylinder_coloring.table[:-1])
    _, report = coloring_to_set(short, F2)
    assert report.verdict == Verdict.REFUTED
    assert not report.evidence["each_subset_covered"]
    assert report.evidence["uncovered"] == [F2.format(e) for e in cylinder_coloring.table[-1][0]]
