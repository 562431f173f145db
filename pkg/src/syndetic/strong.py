"""Strong complete syndeticity: multiset falsification and partition certificates.

A set A is strongly completely syndetic when for every ε > 0 some finite F makes every
finite multiset K satisfy |fK ∩ A| ≥ (1 - ε)|K| for at least one f ∈ F.

Certificates cover first-letter cylinders B_l of a free group. The group is cut into
c ≥ 2n cells (cells[0] = B_l) plus finitely many remainder words, and every cell i gets a
translate f_i carrying all other cells and all remainder words into B_l. Any multiset
puts weight ≤ |K|/c on some cell i, so f_i keeps at least (1 - 1/c)|K| of it inside B_l.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import RunConfig
from .errors import ConstructionFailed, InvalidExpr
from .groups import Element, FreeGroup, Group, Word
from .logger import strong_logger
from .reports import (DecisionReport, MultisetEntry, MultisetWitness, ScsCertificate, Scope,
                      SyndeticWitness, ThickRefutation, Verdict)
from .sets import (Cylinder, FreeGroupNF, SetExpr, encode_element, escaping_element, membership,
                   subset, to_json)
from .windows import escaping_tuple

Epsilon = Union[Fraction, float, int, str]


def parse_epsilon(value: Epsilon) -> Fraction:
    eps = Fraction(value).limit_denominator(10**6) if isinstance(value, float) else Fraction(value)
    if not 0 < eps < 1:
        raise ValueError(f"ε must lie strictly between 0 and 1, got {eps}")
    return eps


def order_for_epsilon(eps: Fraction) -> int:
    """Smallest n with 1/(2n) ≤ ε"""
    return max(1, math.ceil(1 / (2 * eps)))


# --- multisets ------------------------------------------------------------

@dataclass(frozen=True)
class Multiset:
    entries: Tuple[Tuple[Element, int], ...]

    def __post_init__(self):
        merged: Dict[Element, int] = {}
        for g, k in self.entries:
            if k < 1:
                raise ValueError(f"Multiplicity of {g!r} must be positive, got {k}")
            merged[g] = merged.get(g, 0) + k
        object.__setattr__(self, "entries", tuple(merged.items()))

    @property
    def size(self) -> int:
        return sum(k for _, k in self.entries)

    def count_inside(self, contains, group: Group, f: Element) -> int:
        """|fK ∩ A| counted with multiplicity"""
        return sum(k for g, k in self.entries if contains(group.multiply(f, g)))


def _weight_vectors(s: int, max_mult: int, max_size: int) -> np.ndarray:
    vectors = [v for v in itertools.product(range(1, max_mult + 1), repeat=s) if sum(v) <= max_size]
    vectors.sort(key=lambda v: (sum(v), v))
    return np.array(vectors, dtype=np.int64).reshape(len(vectors), s)


def _minimal_columns(matrix: np.ndarray) -> List[int]:
    """Indices of column types worth using: no all-ones column, and no column whose
    ones strictly contain another column's ones"""
    types: Dict[bytes, int] = {}
    for j in range(matrix.shape[1]):
        col = matrix[:, j]
        if col.all():
            continue
        types.setdefault(col.tobytes(), j)
    keys = list(types.values())
    kept = []
    for j in keys:
        cj = matrix[:, j]
        dominated = any(k != j and np.all(matrix[:, k] <= cj) and not np.array_equal(matrix[:, k], cj)
                        for k in keys)
        if not dominated:
            kept.append(j)
    return kept


def scs_falsify(A: SetExpr, eps: Epsilon, F: Sequence[Element], group: Group, support_radius: int,
                max_size: int, max_mult: int, config: Optional[RunConfig] = None,
                support_limit: int = 4) -> Optional[MultisetWitness]:
    """Search a multiset K on ball(support_radius) with |fK ∩ A| < (1 - ε)|K| for all f ∈ F"""
    config = config or RunConfig()
    eps = parse_epsilon(eps)
    if not F:
        raise ValueError("F must be nonempty")
    contains = membership(A, group)
    support = list(group.ball(support_radius, config.ball_cap))
    matrix = np.array([[contains(group.multiply(f, x)) for x in support] for f in F], dtype=np.int64)
    columns = _minimal_columns(matrix)
    strong_logger.info(f"Falsifier: {len(support)} support points reduce to {len(columns)} column types")
    if not columns:
        return None

    num, den = eps.numerator, eps.denominator
    sub = matrix[:, columns]

    def failing(weights: np.ndarray, cols: Sequence[int]) -> np.ndarray:
        # count_f < (1 - ε)|K|  <=>  den * count_f < (den - num) * |K|
        counts = weights @ sub[:, list(cols)].T
        sizes = weights.sum(axis=1)
        return np.all(den * counts < (den - num) * sizes[:, None], axis=1)

    budget = config.scs_exhaustive_cap
    for s in range(1, min(support_limit, len(columns), max_size) + 1):
        vectors = _weight_vectors(s, max_mult, max_size)
        if len(vectors) == 0:
            continue
        for combo in itertools.combinations(range(len(columns)), s):
            budget -= len(vectors)
            if budget < 0:
                strong_logger.info("Exhaustive multiset budget spent, switching to seeded hill climbing")
                return _hill_climb(sub, num, den, columns, support, F, group, eps, max_size, max_mult, config)
            hits = np.nonzero(failing(vectors, combo))[0]
            if len(hits):
                weights = vectors[hits[0]]
                return _witness(sub, columns, combo, weights, support, F, group, eps)
    if len(columns) > support_limit:
        return _hill_climb(sub, num, den, columns, support, F, group, eps, max_size, max_mult, config)
    return None


def _witness(sub: np.ndarray, columns: Sequence[int], combo: Sequence[int], weights: np.ndarray,
             support: Sequence[Element], F: Sequence[Element], group: Group, eps: Fraction) -> MultisetWitness:
    entries = [(support[columns[c]], int(w)) for c, w in zip(combo, weights) if w > 0]
    counts = [int(x) for x in sub[:, list(combo)] @ weights]
    return MultisetWitness(
        epsilon=str(eps),
        F=[encode_element(f, group) for f in F],
        multiset=[MultisetEntry(element=encode_element(g, group), multiplicity=k) for g, k in entries],
        counts=counts,
        size=int(weights.sum()),
    )


def _hill_climb(sub: np.ndarray, num: int, den: int, columns: Sequence[int], support: Sequence[Element],
                F: Sequence[Element], group: Group, eps: Fraction, max_size: int, max_mult: int,
                config: RunConfig) -> Optional[MultisetWitness]:
    rng = np.random.default_rng(config.seed)
    t = len(columns)

    def score(w: np.ndarray) -> int:
        size = int(w.sum())
        if size == 0:
            return 1 << 30
        return int(np.max(den * (sub @ w) - (den - num) * size))

    for _ in range(config.scs_restarts):
        w = np.zeros(t, dtype=np.int64)
        for j in rng.choice(t, size=min(t, max(1, max_size // 2)), replace=False):
            w[j] = rng.integers(1, max_mult + 1)
        while w.sum() > max_size:
            w[rng.choice(np.nonzero(w)[0])] -= 1
        current = score(w)
        improved = True
        while current >= 0 and improved:
            improved = False
            for j in range(t):
                for delta in (1, -1):
                    if not 0 <= w[j] + delta <= max_mult or w.sum() + delta > max_size:
                        continue
                    w[j] += delta
                    trial = score(w)
                    if trial < current:
                        current, improved = trial, True
                        break
                    w[j] -= delta
                if improved:
                    break
        if current < 0:
            combo = [j for j in range(t) if w[j] > 0]
            return _witness(sub, columns, combo, w[combo], support, F, group, eps)
    return None


def replay_multiset_witness(witness: MultisetWitness, A: SetExpr, group: Group) -> bool:
    """Recount the witness through membership alone"""
    contains = membership(A, group)
    eps = Fraction(witness.epsilon)
    K = Multiset(tuple((group.parse(e.element), e.multiplicity) for e in witness.multiset))
    for f_text in witness.F:
        f = group.parse(f_text)
        if Fraction(K.count_inside(contains, group, f)) >= (1 - eps) * K.size:
            return False
    return True


# --- partition certificates -----------------------------------------------

@dataclass
class CertificateCheck:
    ok: bool
    reason: str = ""
    cell: Optional[int] = None
    other: Optional[Union[int, str]] = None
    element: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "reason": self.reason, "cell": self.cell, "other": self.other,
                "element": self.element}


def _cell_nf(group: FreeGroup, cell: Sequence[Word]) -> FreeGroupNF:
    return FreeGroupNF.make(group, cylinders=cell)


def _parse_cells(cert: ScsCertificate, group: FreeGroup) -> Tuple[List[List[Word]], List[Word], Word]:
    cells = [[group.parse(w) for w in cell] for cell in cert.cells]
    remainder = [group.parse(w) for w in cert.remainder]
    return cells, remainder, group.parse(cert.target)


def check_partition(group: FreeGroup, cells: Sequence[Sequence[Word]], remainder: Sequence[Word]) -> CertificateCheck:
    nfs = [_cell_nf(group, c) for c in cells]
    for j, w in enumerate(remainder):
        nfs.append(FreeGroupNF.make(group, words=[w]))
    total = FreeGroupNF.make(group)
    for i, a in enumerate(nfs):
        overlap = total.intersection(a)
        if not overlap.is_empty:
            return CertificateCheck(False, "cells overlap", cell=i, element=group.format(overlap.shortest()))
        total = total.union(a)
    if not total.is_full:
        missing = total.complement().shortest()
        return CertificateCheck(False, "cells do not cover the group", element=group.format(missing))
    return CertificateCheck(True)


def _translate_fails(group: FreeGroup, f: Word, cells: Sequence[FreeGroupNF], remainder: Sequence[Word],
                     target: FreeGroupNF, skip: int) -> Optional[Tuple[Union[int, str], Word]]:
    """First (cell or remainder index, escaping element) for translate f, or None"""
    for j, nf in enumerate(cells):
        if j == skip:
            continue
        image = nf.translate(f)
        if not subset(image, target):
            return j, escaping_element(image, target)
    for k, w in enumerate(remainder):
        image = group.multiply(f, w)
        if not target.contains(image):
            return f"r{k}", image
    return None


def verify_scs_certificate(cert: ScsCertificate, epsilon: Optional[Epsilon] = None) -> CertificateCheck:
    """Symbolic check of a partition certificate, optionally at a looser ε"""
    try:
        group = FreeGroup(cert.rank)
        cells, remainder, target = _parse_cells(cert, group)
        F = [group.parse(f) for f in cert.F]
        assignment = [group.parse(f) for f in cert.assignment]
    except Exception as e:
        return CertificateCheck(False, f"malformed certificate: {e}")

    eps = parse_epsilon(epsilon if epsilon is not None else cert.epsilon)
    if epsilon is not None and eps < cert.epsilon_fraction:
        return CertificateCheck(False, f"ε={eps} is tighter than the certified ε={cert.epsilon}")
    if Fraction(1, 2 * cert.n) > eps:
        return CertificateCheck(False, f"1/(2n) = 1/{2 * cert.n} exceeds ε = {eps}")
    if len(cells) < 2 * cert.n:
        return CertificateCheck(False, f"{len(cells)} cells, at least {2 * cert.n} needed")
    if len(assignment) != len(cells):
        return CertificateCheck(False, f"{len(assignment)} assignments for {len(cells)} cells")
    if cells[0] != [target] or len(target) == 0:
        return CertificateCheck(False, "cells[0] must be the target cylinder alone")
    for i, f in enumerate(assignment):
        if f not in F:
            return CertificateCheck(False, "assigned translate not in F", cell=i, element=group.format(f))

    partition = check_partition(group, cells, remainder)
    if not partition.ok:
        return partition

    target_nf = _cell_nf(group, [target])
    cell_nfs = [_cell_nf(group, c) for c in cells]
    for i, f in enumerate(assignment):
        failure = _translate_fails(group, f, cell_nfs, remainder, target_nf, skip=i)
        if failure is not None:
            j, element = failure
            return CertificateCheck(False, "translate escapes the target", cell=i, other=j,
                                    element=group.format(element))
    return CertificateCheck(True)


def _split_cells(group: FreeGroup, target: Word, needed: int) -> Tuple[List[List[Word]], List[Word]]:
    """Non-target cells and remainder words: first letters, then repeated splitting of the
    length-lex-first single-cylinder cell, then merging of surplus cells at the tail"""
    cells = [[(l,)] for l in group.letters if (l,) != target]
    remainder: List[Word] = [()]
    while len(cells) < needed:
        singles = [c for c in cells if len(c) == 1]
        w = min((c[0] for c in singles), key=group.sort_key)
        cells.remove([w])
        remainder.append(w)
        cells.extend([w + (l,)] for l in group.allowed_after(w[-1]))
    cells.sort(key=lambda c: group.sort_key(c[0]))
    while len(cells) > needed:
        tail = cells.pop()
        cells[-1] = cells[-1] + tail
    return cells, sorted(remainder, key=group.sort_key)


def build_scs_certificate(rank: int, eps: Epsilon, target: str = "a",
                          config: Optional[RunConfig] = None) -> ScsCertificate:
    """Certificate that B_target is strongly completely syndetic at ε in F_rank"""
    config = config or RunConfig()
    eps = parse_epsilon(eps)
    group = FreeGroup(rank)
    t = group.parse(target)
    if len(t) != 1:
        raise InvalidExpr(f"Certificate targets are single letters, got {target!r}")
    n = order_for_epsilon(eps)
    others, remainder = _split_cells(group, t, 2 * n - 1)
    cells = [[t]] + others

    depth = max(len(w) for cell in cells for w in cell)
    pool = list(group.ball(depth + 2, config.ball_cap))
    target_nf = _cell_nf(group, [t])
    cell_nfs = [_cell_nf(group, c) for c in cells]

    assignment: List[Word] = []
    for i in range(len(cells)):
        found = next((f for f in pool
                      if _translate_fails(group, f, cell_nfs, remainder, target_nf, skip=i) is None), None)
        if found is None:
            raise ConstructionFailed(f"No translate in ball({depth + 2}) works for cell {i}",
                                     {"cell": [group.format(w) for w in cells[i]]})
        assignment.append(found)

    F = group.sorted(assignment)
    cert = ScsCertificate(
        epsilon=str(eps), n=n, rank=rank, target=group.format(t),
        cells=[[group.format(w) for w in cell] for cell in cells],
        remainder=[group.format(w) for w in remainder],
        F=[group.format(f) for f in F],
        assignment=[group.format(f) for f in assignment],
    )
    check = verify_scs_certificate(cert)
    if not check.ok:
        raise ConstructionFailed(f"Built certificate failed verification: {check.reason}", check.to_dict())
    strong_logger.info(f"Built certificate for B_{cert.target} in F_{rank}: ε={eps}, {len(cells)} cells, F={cert.F}")
    return cert


@dataclass
class Adjudication:
    accepted: bool
    assignment: List[Optional[str]]
    failures: List[Dict[str, Any]]


def adjudicate(group: FreeGroup, cells: Sequence[Sequence[Word]], remainder: Sequence[Word],
               pool: Sequence[Word], target: Optional[Word] = None) -> Adjudication:
    """Assign each cell the first pool translate that works, recording every cell none fits"""
    target = target or cells[0][0]
    partition = check_partition(group, cells, remainder)
    if not partition.ok:
        return Adjudication(False, [], [partition.to_dict()])
    target_nf = _cell_nf(group, [target])
    cell_nfs = [_cell_nf(group, c) for c in cells]
    assignment: List[Optional[str]] = []
    failures: List[Dict[str, Any]] = []
    for i in range(len(cells)):
        attempts = {}
        chosen = None
        for f in pool:
            failure = _translate_fails(group, f, cell_nfs, remainder, target_nf, skip=i)
            if failure is None:
                chosen = f
                break
            attempts[group.format(f)] = {"other": failure[0], "element": group.format(failure[1])}
        assignment.append(group.format(chosen) if chosen is not None else None)
        if chosen is None:
            failures.append({"cell": i, "words": [group.format(w) for w in cells[i]], "attempts": attempts})
    return Adjudication(not failures, assignment, failures)


def literal_instances(group: FreeGroup) -> Dict[str, Tuple[List[List[Word]], List[Word], List[Word]]]:
    """Worked instances stated for B_a: (cells, remainder, F)"""
    p = group.parse
    return {
        "n=2, F={a, ab}": ([[p("a")], [p("A")], [p("b")], [p("B")]], [p("e")], [p("a"), p("ab")]),
        "n=3, F={a^2, ab}": ([[p("a")], [p("AA")], [p("Ab")], [p("AB")], [p("b")], [p("B")]],
                             [p("e"), p("A")], [p("aa"), p("ab")]),
    }


def scs_implies_completely_syndetic(cert: ScsCertificate, radius: int,
                                    config: Optional[RunConfig] = None) -> DecisionReport:
    """Windowed replay: the certified cylinder is n-syndetic with the certificate's F"""
    config = config or RunConfig()
    group = FreeGroup(cert.rank)
    A = Cylinder(group.parse(cert.target))
    F = [group.parse(f) for f in cert.F]
    contains = membership(A, group)
    window = list(group.ball(radius, config.ball_cap))
    hit = escaping_tuple(contains, group, cert.n, F, window, config.search_cap)
    question = f"{cert.n}-syndetic"
    scale = {"radius": radius, "search_cap": config.search_cap}
    if hit is None:
        return DecisionReport(group=group.spec, set={"group": group.spec, "expr": to_json(A, group)},
                              question=question, verdict=Verdict.PROVED, scope=Scope.ball(radius),
                              certificate=SyndeticWitness(n=cert.n, F=cert.F, scope=Scope.ball(radius),
                                                          note="translates from a partition certificate"),
                              scale=scale)
    # an escaping tuple only shows these translates fail; the cylinder itself is not refuted
    return DecisionReport(group=group.spec, set={"group": group.spec, "expr": to_json(A, group)},
                          question=question, verdict=Verdict.UNDECIDED, scope=Scope.ball(radius),
                          evidence={"note": "the certificate's translates miss A on the window"},
                          certificate=ThickRefutation(n=cert.n, radius=radius, F=cert.F,
                                                      tuple=[group.format(h) for h in hit],
                                                      scope=Scope.ball(radius)),
                          scale=scale)
