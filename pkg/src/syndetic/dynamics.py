"""Finite-window views of the subshift generated by a set, witness shifts and the
amenability harnesses.

The subshift of A is the orbit closure of A under right translation, A·g = {w : w g⁻¹ ∈ A}.
On a window W a point of it is seen as the bit pattern of A·g restricted to W.
"""

import itertools
import math
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .config import RunConfig
from .engine import decide_n_syndetic, set_spec
from .errors import InvalidExpr, InvalidGroup, ScaleExceeded
from .groups import Element, FiniteGroup, FreeGroup, Group, IntegerGroup, Word
from .logger import dynamics_logger
from .reports import (AmenabilityBundle, CandidateOutcome, DecisionReport, PatternEntry, PatternSetModel, Scope,
                      SyndeticWitness, TranslateTuple, Verdict)
from .sets import (Complement, Cylinder, FreeGroupNF, NotNormalizable, PeriodicNF, Residue, SetExpr,
                   encode_element, indicator, membership, normalize, subset, to_json)
from .strong import build_scs_certificate, scs_falsify
from .windows import distinct_maximal, find_cover


def _patterns(A: SetExpr, group: Group, window: Sequence[Element], translates: Sequence[Element],
              config: RunConfig) -> List[Tuple[Element, int]]:
    """(g, bits of A·g on the window) for every translate, bit i standing for window[i]"""
    if len(window) * len(translates) > config.grid_cap:
        raise ScaleExceeded(f"{len(translates)} translates over a window of {len(window)} exceed {config.grid_cap}",
                            {"window": len(window), "translates": len(translates)})
    contains = membership(A, group)
    result = []
    for g in translates:
        inverse = group.invert(g)
        bits = 0
        for i, w in enumerate(window):
            if contains(group.multiply(w, inverse)):
                bits |= 1 << i
        result.append((g, bits))
    return result


def subshift_patterns(A: SetExpr, window: Sequence[Element], radius: int, group: Group,
                      config: Optional[RunConfig] = None) -> PatternSetModel:
    """Distinct patterns (A·g)|_W over g ∈ ball(radius), each with the first g producing it"""
    config = config or RunConfig()
    translates = list(group.ball(radius, config.ball_cap))
    first: Dict[int, Element] = {}
    for g, bits in _patterns(A, group, window, translates, config):
        first.setdefault(bits, g)
    patterns = [PatternEntry(bits="".join("1" if bits >> i & 1 else "0" for i in range(len(window))),
                             translate=encode_element(g, group))
                for bits, g in first.items()]
    dynamics_logger.info(f"{len(patterns)} distinct patterns on a window of {len(window)} from ball({radius})")
    return PatternSetModel(window=[encode_element(w, group) for w in window], patterns=patterns)


def replay_patterns(model: PatternSetModel, A: SetExpr, group: Group) -> bool:
    """Every recorded pattern is re-derived from its translate"""
    window = [group.parse(w) for w in model.window]
    contains = membership(A, group)
    for entry in model.patterns:
        inverse = group.invert(group.parse(entry.translate))
        bits = "".join("1" if contains(group.multiply(w, inverse)) else "0" for w in window)
        if bits != entry.bits:
            return False
    return len({e.bits for e in model.patterns}) == len(model.patterns)


def _window_is_exact(A: SetExpr, group: Group, radius: int, translate_radius: int) -> bool:
    """Whether window and translate pool see every translate of A in full"""
    if isinstance(group, FiniteGroup):
        return True
    nf = normalize(A, group)
    return isinstance(nf, PeriodicNF) and 2 * min(radius, translate_radius) + 1 >= nf.modulus


def _translate_search(A: SetExpr, n: int, group: Group, radius: int, translate_radius: Optional[int],
                      config: RunConfig, union: bool) -> DecisionReport:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    translate_radius = max(1, radius // 2) if translate_radius is None else translate_radius
    window = list(group.ball(radius, config.ball_cap))
    translates = list(group.ball(translate_radius, config.ball_cap))
    full = (1 << len(window)) - 1
    patterns = _patterns(A, group, window, translates, config)
    if union:
        labelled = distinct_maximal(patterns)
    else:
        labelled = distinct_maximal((g, full & ~bits) for g, bits in patterns)
    cover = find_cover(labelled, len(window), n, config.search_cap)
    exact = _window_is_exact(A, group, radius, translate_radius)
    scope = Scope.exact() if exact else Scope.ball(radius)
    question = f"complement {n}-syndetic (unions of translates)" if union else f"{n}-syndetic (meets of translates)"
    base = dict(group=group.spec, set=set_spec(A, group), question=question, scope=scope,
                scale={"radius": radius, "translate_radius": translate_radius, "search_cap": config.search_cap})
    if cover is None:
        return DecisionReport(**base, verdict=Verdict.PROVED,
                              evidence={"reason": f"no {n} translates from ball({translate_radius}) "
                                                  f"{'cover' if union else 'have an empty meet on'} ball({radius})"})
    cover = group.sorted(cover)
    cover = cover + [cover[-1]] * (n - len(cover))
    return DecisionReport(**base, verdict=Verdict.REFUTED if exact else Verdict.UNDECIDED,
                          certificate=TranslateTuple(translates=[encode_element(g, group) for g in cover],
                                                     window_radius=radius))


def subshift_intersection_check(A: SetExpr, n: int, group: Group, radius: int,
                                translate_radius: Optional[int] = None,
                                config: Optional[RunConfig] = None) -> DecisionReport:
    """Search n right translates of A whose meet misses ball(radius)"""
    return _translate_search(A, n, group, radius, translate_radius, config or RunConfig(), union=False)


def subshift_union_check(A: SetExpr, n: int, group: Group, radius: int, translate_radius: Optional[int] = None,
                         config: Optional[RunConfig] = None) -> DecisionReport:
    """Search n right translates of A whose union covers ball(radius); a hit refutes A^c being n-syndetic"""
    return _translate_search(A, n, group, radius, translate_radius, config or RunConfig(), union=True)


# --- F-avoidance and witness shifts ---------------------------------------------

def f_avoidance(A: SetExpr, F: Sequence[Element], group: Group,
                config: Optional[RunConfig] = None) -> Dict:
    """Whether FA ∩ A = ∅; exact through normal forms, otherwise on the ℤ window"""
    config = config or RunConfig()
    nf = normalize(A, group)
    if not isinstance(nf, NotNormalizable):
        for f in F:
            meet = nf.translate(f, group).intersection(nf)
            if not meet.is_empty:
                return {"holds": False, "exact": True, "f": encode_element(f, group),
                        "element": encode_element(meet.shortest(), group)}
        return {"holds": True, "exact": True}
    lo, hi = -config.z_window, config.z_window
    inside = indicator(A, lo, hi)
    for f in F:
        both = inside & indicator(A, lo - f, hi - f)
        if both.any():
            x = lo + int(both.argmax())
            return {"holds": False, "exact": True, "f": f, "element": x}
    return {"holds": True, "exact": False, "window": [lo, hi]}


def witness_shift_check(A: SetExpr, F: Sequence[Element], group: Group, radius: int, symmetric: bool = False,
                        config: Optional[RunConfig] = None) -> DecisionReport:
    """F-avoidance of every translate (equivalent to FA ∩ A = ∅) and pairwise meets on ball(radius)"""
    config = config or RunConfig()
    if not F:
        raise InvalidExpr("F must be nonempty")
    if symmetric:
        F = group.sorted(set(F) | {group.invert(f) for f in F})
    avoidance = f_avoidance(A, F, group, config)
    pairwise = subshift_intersection_check(A, 2, group, radius, config=config)
    two = decide_n_syndetic(A, 2, group, config)
    evidence = {"F": [encode_element(f, group) for f in F], "avoidance": avoidance,
                "pairwise": pairwise.verdict.value, "two_syndetic": two.verdict.value}
    if isinstance(pairwise.certificate, TranslateTuple):
        evidence["disjoint_translates"] = pairwise.certificate.translates
    base = dict(group=group.spec, set=set_spec(A, group), question="F-witness shift", evidence=evidence,
                scale={"radius": radius})
    if not avoidance["holds"]:
        return DecisionReport(**base, verdict=Verdict.REFUTED if avoidance["exact"] else Verdict.UNDECIDED,
                              scope=Scope.exact() if avoidance["exact"] else Scope.interval(*avoidance["window"]))
    if pairwise.verdict != Verdict.PROVED:
        return DecisionReport(**base, verdict=pairwise.verdict, scope=pairwise.scope,
                              certificate=pairwise.certificate)
    scope = pairwise.scope if avoidance["exact"] else Scope.interval(*avoidance["window"])
    return DecisionReport(**base, verdict=Verdict.PROVED, scope=scope)


# --- amenability harnesses -------------------------------------------------------

def amenability_witness(group: Group, config: Optional[RunConfig] = None, epsilon: str = "1/4",
                        max_modulus: int = 6) -> DecisionReport:
    """Sets A with A and A^c both strongly completely syndetic, or a falsification sweep in ℤ"""
    config = config or RunConfig()
    if isinstance(group, FreeGroup):
        return _free_pair(group, config, epsilon)
    if isinstance(group, IntegerGroup):
        return _periodic_sweep(group, config, epsilon, max_modulus)
    raise InvalidGroup(f"Amenability witnesses are searched in ℤ and free groups, not {group.spec}")


def _free_pair(group: FreeGroup, config: RunConfig, epsilon: str) -> DecisionReport:
    A, B = Cylinder(group.parse("a")), Cylinder(group.parse("b"))
    inside = subset(normalize(B, group), normalize(Complement(A), group))
    certificates = [build_scs_certificate(group.rank, epsilon, target="a", config=config),
                    build_scs_certificate(group.rank, epsilon, target="b", config=config)]
    bundle = AmenabilityBundle(sets=[set_spec(A, group), set_spec(B, group)], certificates=certificates)
    return DecisionReport(group=group.spec, set=set_spec(A, group), question="non-amenability witness",
                          verdict=Verdict.PROVED if inside else Verdict.UNDECIDED, certificate=bundle,
                          evidence={"complement_contains_second_set": inside,
                                    "reason": "A and a subset of A^c are strongly completely syndetic; "
                                              "supersets inherit the property"})


def periodic_candidates(max_modulus: int) -> List[Residue]:
    """Nonempty proper residue sets by minimal modulus, then by residue mask"""
    out = []
    for m in range(2, max_modulus + 1):
        for mask in range(1, (1 << m) - 1):
            if PeriodicNF.make(m, mask).modulus == m:
                out.append(Residue(m, frozenset(r for r in range(m) if mask >> r & 1)))
    return out


def _periodic_sweep(group: IntegerGroup, config: RunConfig, epsilon: str, max_modulus: int) -> DecisionReport:
    outcomes = []
    survivors = 0
    for A in periodic_candidates(max_modulus):
        # shifts modulo the period exhaust every finite F
        F = list(range(A.modulus))
        complement = Residue(A.modulus, frozenset(set(range(A.modulus)) - set(A.residues)))
        witness = scs_falsify(A, epsilon, F, group, A.modulus, 12, 4, config)
        outcome = "set falsified"
        if witness is None:
            witness = scs_falsify(complement, epsilon, F, group, A.modulus, 12, 4, config)
            outcome = "complement falsified"
        if witness is None:
            outcome = "survived"
            survivors += 1
        outcomes.append(CandidateOutcome(set=set_spec(A, group), outcome=outcome, witness=witness))
    dynamics_logger.info(f"Periodic sweep up to modulus {max_modulus}: {len(outcomes) - survivors} of "
                         f"{len(outcomes)} candidate pairs falsified")
    note = ("every periodic candidate pair is falsified, consistent with amenability of ℤ; not a proof"
            if not survivors else f"{survivors} candidate pairs survived the falsifier")
    return DecisionReport(group=group.spec, question="non-amenability witness", verdict=Verdict.UNDECIDED,
                          certificate=AmenabilityBundle(candidates=outcomes),
                          evidence={"epsilon": str(Fraction(epsilon)), "max_modulus": max_modulus, "note": note},
                          scale={"support": "ball(modulus)", "max_size": 12, "max_mult": 4})


def cylinder_candidates(group: FreeGroup, max_depth: int, max_cells: int) -> Iterator[Tuple[Word, ...]]:
    """Unions of at most ``max_cells`` cylinders of depth ≤ max_depth, none inside another"""
    cells = [w for w in group.ball(max_depth) if w]
    for k in range(1, max_cells + 1):
        for combo in itertools.combinations(cells, k):
            if any(a != b and b[:len(a)] == a for a in combo for b in combo):
                continue
            yield combo


def _candidate_count(group: FreeGroup, max_depth: int, max_cells: int) -> int:
    cells = group.ball_size(max_depth) - 1
    return sum(math.comb(cells, k) for k in range(1, max_cells + 1))


def strong_amenability_witness(group: Group, F: Sequence[Element], config: Optional[RunConfig] = None,
                               max_modulus: int = 8, max_depth: int = 3, max_cells: int = 4) -> DecisionReport:
    """Search an F-avoiding completely syndetic set among cylinder unions or residue sets"""
    config = config or RunConfig()
    if not F or any(f == group.identity for f in F):
        raise InvalidExpr("F must be a nonempty set of non-identity elements")
    encoded = [encode_element(f, group) for f in F]
    if isinstance(group, FreeGroup):
        count = _candidate_count(group, max_depth, max_cells)
        candidates = (FreeGroupNF.make(group, cylinders=c).to_expr()
                      for c in cylinder_candidates(group, max_depth, max_cells))
        scale = {"max_depth": max_depth, "max_cells": max_cells}
    elif isinstance(group, IntegerGroup):
        candidates = periodic_candidates(max_modulus)
        count = len(candidates)
        scale = {"max_modulus": max_modulus}
    else:
        raise InvalidGroup(f"Strong amenability witnesses are searched in ℤ and free groups, not {group.spec}")
    if count > config.search_cap:
        raise ScaleExceeded(f"{count} candidates exceed {config.search_cap}", {"candidates": count})

    for A in candidates:
        if not f_avoidance(A, F, group, config)["holds"]:
            continue
        report = decide_n_syndetic(A, 2, group, config)
        if report.verdict == Verdict.PROVED:
            dynamics_logger.info(f"F-avoiding 2-syndetic candidate found: {to_json(A, group)}")
            certificate = report.certificate if isinstance(report.certificate, SyndeticWitness) else None
            return DecisionReport(group=group.spec, set=set_spec(A, group), question="F-avoiding 2-syndetic set",
                                  verdict=Verdict.PROVED, scope=report.scope, certificate=certificate,
                                  evidence={"F": encoded, "avoidance": "exact", "candidates_tried": scale},
                                  scale=scale)
    note = "no candidate within the class is F-avoiding and 2-syndetic; exhaustive within class only"
    if isinstance(group, IntegerGroup):
        note += "; ℤ is abelian, hence FC-hypercentral"
    return DecisionReport(group=group.spec, question="F-avoiding 2-syndetic set", verdict=Verdict.UNDECIDED,
                          evidence={"F": encoded, "note": note}, scale=scale)
