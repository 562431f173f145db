"""Decision procedures for n-syndeticity and 1/n-thickness.

Orientation used throughout: ``check_witness(A, n, F)`` asks that every n-tuple K admit
some f ∈ F with fK ⊆ A. The cover form F·A^n = G^n (``direct_cover``) and the partition
form (``partition_criterion``) hold for F exactly when ``check_witness`` holds for F⁻¹;
``intersection_criterion`` for all K holds exactly when ``check_witness`` holds for F.

Periodic ℤ-sets and subsets of finite groups are decided exactly. Free-group normal
forms are decided exactly as well: a set containing a cylinder is completely syndetic
through a partition certificate, and a finite set is never syndetic. Aperiodic ℤ-sets
are checked on a finite window.
"""

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import RunConfig
from .errors import CriteriaMismatch, InvalidExpr, ScaleExceeded
from .groups import Element, FiniteGroup, FreeGroup, Group, IntegerGroup
from .logger import engine_logger
from .reports import DecisionReport, Scope, SyndeticWitness, ThickRefutation, Verdict
from .sets import (Complement, FiniteNF, FreeGroupNF, NotNormalizable, PeriodicNF, SetExpr,
                   Translate, encode_element, finite_support, indicator, member, membership,
                   normalize, to_json, translate_nf)
from .strong import build_scs_certificate
from .windows import (deterministic_first, distinct_maximal, escaping_tuple, escaping_tuple_z, find_cover,
                      tuple_escapes, z_prefix_scan)

NEGATED = {Verdict.PROVED: Verdict.REFUTED, Verdict.REFUTED: Verdict.PROVED, Verdict.UNDECIDED: Verdict.UNDECIDED}


def set_spec(A: SetExpr, group: Group) -> Dict:
    return {"group": group.spec, "expr": to_json(A, group)}


def _encode(elements: Sequence[Element], group: Group) -> List:
    return [encode_element(g, group) for g in elements]


def _z_window(config: RunConfig, window: Optional[Tuple[int, int]]) -> Tuple[int, int]:
    return window if window is not None else (-config.z_window, config.z_window)


# --- exact tuple search -----------------------------------------------------

def _domain(nf, group: Group) -> List[Element]:
    """Representatives of the points a tuple can take: 1..m for periodic sets"""
    if isinstance(nf, PeriodicNF):
        return list(range(1, nf.modulus + 1))
    return list(range(group.order))


def _exact_escape(contains: Callable[[Element], bool], nf, group: Group, n: int, F: Sequence[Element],
                  node_cap: int) -> Optional[Tuple[Element, ...]]:
    """Exact escaping n-tuple against F for a periodic or finite-group set"""
    if isinstance(nf, PeriodicNF):
        F = sorted({f % nf.modulus for f in F})
    labelled = []
    for x in _domain(nf, group):
        mask = 0
        for j, f in enumerate(F):
            if not contains(group.multiply(f, x)):
                mask |= 1 << j
        labelled.append((x, mask))
    cover = find_cover(distinct_maximal(labelled), len(F), n, node_cap)
    if cover is None:
        return None
    cover = sorted(cover, key=group.sort_key) if not isinstance(nf, PeriodicNF) else sorted(cover)
    return tuple(cover + [cover[-1]] * (n - len(cover)))


def check_witness(A: SetExpr, n: int, F: Sequence[Element], group: Group, config: Optional[RunConfig] = None,
                  radius: Optional[int] = None, window: Optional[Tuple[int, int]] = None) -> bool:
    """Every n-tuple K has some f ∈ F with fK ⊆ A (exact where a normal form allows)"""
    config = config or RunConfig()
    if n < 1 or not F:
        raise ValueError("n must be positive and F nonempty")
    nf = normalize(A, group)
    if isinstance(nf, (PeriodicNF, FiniteNF)):
        return _exact_escape(nf.contains, nf, group, n, F, config.search_cap) is None
    if isinstance(group, IntegerGroup):
        lo, hi = _z_window(config, window)
        return escaping_tuple_z(A, n, list(F), lo, hi, config.search_cap) is None
    radius = config.radius if radius is None else radius
    candidates = list(group.ball(radius, config.ball_cap))
    return escaping_tuple(membership(A, group), group, n, F, candidates, config.search_cap) is None


def direct_cover(A: SetExpr, n: int, F: Sequence[Element], group: Group, config: Optional[RunConfig] = None) -> bool:
    """F·A^n = G^n, evaluated on (ℤ/m)^n or G^n"""
    config = config or RunConfig()
    nf = normalize(A, group)
    if isinstance(nf, PeriodicNF):
        size = nf.modulus
        vectors = [np.array([nf.contains(x - f) for x in range(size)]) for f in F]
    elif isinstance(nf, FiniteNF):
        size = group.order
        vectors = [np.array([nf.contains(group.multiply(group.invert(f), x)) for x in range(size)]) for f in F]
    else:
        raise InvalidExpr("The direct cover oracle needs a periodic or finite-group set")
    if size ** n > config.grid_cap:
        raise ScaleExceeded(f"Grid of {size}^{n} cells exceeds {config.grid_cap}", {"cells": size ** n})
    covered = np.zeros((size,) * n, dtype=bool)
    for v in vectors:
        block = v
        for _ in range(n - 1):
            block = np.logical_and.outer(block, v)
        covered |= block
    return bool(covered.all())


def partition_criterion(A: SetExpr, n: int, F: Sequence[Element], group: Group,
                        config: Optional[RunConfig] = None) -> bool:
    """Every split of F into n parts has a part F_i with F_i·A = G"""
    config = config or RunConfig()
    nf = normalize(A, group)
    if isinstance(nf, NotNormalizable):
        raise InvalidExpr(f"Coverage is undecidable here: {nf.reason}")
    if n ** len(F) > config.partition_cap:
        raise ScaleExceeded(f"{n}^{len(F)} partitions exceed {config.partition_cap}", {"partitions": n ** len(F)})
    translates = [translate_nf(f, nf, group) for f in F]
    covers: Dict[int, bool] = {}

    def part_covers(mask: int) -> bool:
        if mask not in covers:
            union = None
            for j, t in enumerate(translates):
                if mask >> j & 1:
                    union = t if union is None else union.union(t)
            covers[mask] = union is not None and union.is_full
        return covers[mask]

    for labels in itertools.product(range(n), repeat=len(F)):
        parts = [0] * n
        for j, label in enumerate(labels):
            parts[label] |= 1 << j
        if not any(part_covers(p) for p in parts):
            return False
    return True


def intersection_criterion(A: SetExpr, n: int, F: Sequence[Element], K: Sequence[Element], group: Group) -> bool:
    """Some f ∈ F lies in every right translate A·k, k ∈ K"""
    if len(K) != n:
        raise ValueError(f"K must have {n} entries, got {len(K)}")
    contains = membership(A, group)
    return any(all(contains(group.multiply(f, group.invert(k))) for k in K) for f in F)


def intersection_for_all(A: SetExpr, n: int, F: Sequence[Element], group: Group,
                         config: Optional[RunConfig] = None) -> bool:
    """intersection_criterion for every n-tuple K of the exact domain"""
    config = config or RunConfig()
    nf = normalize(A, group)
    if not isinstance(nf, (PeriodicNF, FiniteNF)):
        raise InvalidExpr("Tuple enumeration needs a periodic or finite-group set")
    domain = list(range(nf.modulus)) if isinstance(nf, PeriodicNF) else list(range(group.order))
    if len(domain) ** n > config.grid_cap:
        raise ScaleExceeded(f"{len(domain)}^{n} tuples exceed {config.grid_cap}")
    return all(intersection_criterion(A, n, F, K, group) for K in itertools.product(domain, repeat=n))


def inverse_set(F: Sequence[Element], group: Group) -> List[Element]:
    return [group.invert(f) for f in F]


# --- decisions ------------------------------------------------------------

def _far_tuple(group: Group, support, n: int, radius: int) -> Tuple[Element, ...]:
    """A point that every f in ball(radius) moves outside the finite set ``support``"""
    if isinstance(group, IntegerGroup):
        h = max((abs(x) for x in support), default=0) + radius + 1
    else:
        depth = max((len(w) for w in support), default=0)
        h = (1,) * (depth + radius + 1)
    return (h,) * n


def decide_n_syndetic(A: SetExpr, n: int, group: Group, config: Optional[RunConfig] = None,
                      window: Optional[Tuple[int, int]] = None) -> DecisionReport:
    config = config or RunConfig()
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    start = time.perf_counter()
    report = _decide(A, n, group, config, window)
    report.wall_time = time.perf_counter() - start
    engine_logger.info(f"{n}-syndetic over {group.spec}: {report.verdict.value} ({report.scope.describe()})")
    return report


def _decide(A: SetExpr, n: int, group: Group, config: RunConfig,
            window: Optional[Tuple[int, int]]) -> DecisionReport:
    nf = normalize(A, group)
    question = f"{n}-syndetic"
    base = dict(group=group.spec, set=set_spec(A, group), question=question)

    if isinstance(nf, (PeriodicNF, FiniteNF)):
        size = nf.modulus if isinstance(nf, PeriodicNF) else group.order
        prefixes = [list(range(k + 1)) for k in range(size)]
        found = deterministic_first(
            prefixes, lambda F: _exact_escape(nf.contains, nf, group, n, F, config.search_cap) is None,
            config.parallelism)
        scale = {"modulus" if isinstance(nf, PeriodicNF) else "order": size, "search_cap": config.search_cap}
        if found is not None:
            return DecisionReport(**base, verdict=Verdict.PROVED, scope=Scope.exact(), scale=scale,
                                  certificate=SyndeticWitness(n=n, F=_encode(found, group)))
        everything = list(range(size))
        escape = _exact_escape(nf.contains, nf, group, n, everything, config.search_cap)
        return DecisionReport(**base, verdict=Verdict.REFUTED, scope=Scope.exact(), scale=scale,
                              certificate=ThickRefutation(n=n, F=_encode(everything, group),
                                                          tuple=_encode(escape, group)))

    if isinstance(nf, FreeGroupNF):
        scale = {"radius": config.radius}
        if nf.is_empty or nf.is_finite:
            far = _far_tuple(group, nf.words, n, config.radius)
            return DecisionReport(**base, verdict=Verdict.REFUTED, scope=Scope.exact(), scale=scale,
                                  evidence={"reason": "finite sets are not syndetic in an infinite group"},
                                  certificate=ThickRefutation(n=n, radius=config.radius, tuple=_encode(far, group)))
        return _free_group_proof(nf, n, group, base, config)

    # aperiodic subsets of ℤ
    support = finite_support(A, group)
    if support is not None:
        far = _far_tuple(group, support, n, config.radius)
        return DecisionReport(**base, verdict=Verdict.REFUTED, scope=Scope.exact(),
                              scale={"radius": config.radius},
                              evidence={"reason": "finite sets are not syndetic in an infinite group"},
                              certificate=ThickRefutation(n=n, radius=config.radius, tuple=list(far)))
    lo, hi = _z_window(config, window)
    kmax = min(config.max_shift, 62)
    k, escape = z_prefix_scan(indicator(A, lo, hi + kmax), lo, hi, n, kmax, config.search_cap)
    scope = Scope.interval(lo, hi)
    scale = {"window": [lo, hi], "max_shift": kmax, "search_cap": config.search_cap}
    if k is not None:
        return DecisionReport(**base, verdict=Verdict.PROVED, scope=scope, scale=scale,
                              evidence={"reason": nf.reason},
                              certificate=SyndeticWitness(n=n, F=list(range(k + 1)), scope=scope))
    return DecisionReport(**base, verdict=Verdict.UNDECIDED, scope=scope, scale=scale,
                          evidence={"reason": nf.reason},
                          certificate=ThickRefutation(n=n, F=list(range(kmax + 1)), tuple=list(escape), scope=scope))


def _free_group_proof(nf: FreeGroupNF, n: int, group: FreeGroup, base: Dict, config: RunConfig) -> DecisionReport:
    """A ⊇ B_w = w'·B_l: translate the certificate for B_l by w'"""
    w = nf.cylinders[0]
    scale = {"radius": config.radius}
    if not w:
        return DecisionReport(**base, verdict=Verdict.PROVED, scope=Scope.exact(), scale=scale,
                              certificate=SyndeticWitness(n=n, F=[group.format(())]))
    prefix, letter = w[:-1], (w[-1],)
    cert = build_scs_certificate(group.rank, Fraction(1, 2 * n), target=group.format(letter), config=config)
    F = [group.multiply(prefix, group.parse(f)) for f in cert.F]
    note = f"B_{group.format(w)} = {group.format(prefix)}·B_{cert.target}; F translated from its partition certificate"
    return DecisionReport(**base, verdict=Verdict.PROVED, scope=Scope.exact(), scale=scale,
                          evidence={"cylinder": group.format(w), "partition_certificate": cert.model_dump(mode="json")},
                          certificate=SyndeticWitness(n=n, F=_encode(group.sorted(F), group), note=note))


def decide_fractionally_thick(B: SetExpr, n: int, group: Group, config: Optional[RunConfig] = None,
                              window: Optional[Tuple[int, int]] = None) -> DecisionReport:
    """B is 1/n-thick iff B^c is not n-syndetic; a direct tuple search must agree"""
    config = config or RunConfig()
    start = time.perf_counter()
    dual = _decide(Complement(B), n, group, config, window)
    verdict = NEGATED[dual.verdict]
    direct = _direct_thickness(B, n, group, dual, config, window)
    if direct is not None and verdict != Verdict.UNDECIDED and direct != (verdict == Verdict.PROVED):
        raise CriteriaMismatch(f"Duality says {verdict.value} but the direct tuple search says "
                               f"{'thick' if direct else 'not thick'}", {"dual": dual.verdict.value})
    report = DecisionReport(group=group.spec, set=set_spec(B, group), question=f"1/{n}-thick", verdict=verdict,
                            scope=dual.scope, certificate=dual.certificate, scale=dual.scale,
                            evidence={"dual_question": f"complement {n}-syndetic", "dual_verdict": dual.verdict.value,
                                      "direct_search": "agrees" if direct is not None else "not applicable",
                                      **dual.evidence})
    report.wall_time = time.perf_counter() - start
    return report


def _direct_thickness(B: SetExpr, n: int, group: Group, dual: DecisionReport, config: RunConfig,
                      window: Optional[Tuple[int, int]]) -> Optional[bool]:
    """Tuples placing some coordinate of every fh in B; None when only the dual path applies"""
    nf = normalize(B, group)
    contains = membership(B, group)
    if isinstance(nf, (PeriodicNF, FiniteNF)):
        size = nf.modulus if isinstance(nf, PeriodicNF) else group.order
        labelled = []
        for x in _domain(nf, group):
            mask = 0
            for f in range(size):
                if contains(group.multiply(f, x)):
                    mask |= 1 << f
            labelled.append((x, mask))
        return find_cover(distinct_maximal(labelled), size, n, config.search_cap) is not None

    cert = dual.certificate
    if isinstance(cert, SyndeticWitness):
        # a tuple landing in B under every f of the complement's witness would contradict it
        F = [group.parse(f) for f in cert.F]
        if isinstance(group, IntegerGroup):
            lo, hi = _z_window(config, window)
            labelled = _thick_masks_z(B, F, lo, hi)
        else:
            candidates = list(group.ball(config.radius, config.ball_cap))
            labelled = distinct_maximal(
                (x, sum(1 << j for j, f in enumerate(F) if contains(group.multiply(f, x)))) for x in candidates)
        return find_cover(labelled, len(F), n, config.search_cap) is not None
    if isinstance(cert, ThickRefutation):
        F = [group.parse(f) for f in cert.F] if cert.F is not None else list(group.ball(cert.radius, config.ball_cap))
        K = [group.parse(h) for h in cert.tuple]
        return all(any(contains(group.multiply(f, h)) for h in K) for f in F)
    return None


def _thick_masks_z(B: SetExpr, F: Sequence[int], lo: int, hi: int) -> List[Tuple[int, int]]:
    inside = indicator(B, lo + min(F), hi + max(F))
    masks: Dict[int, int] = {}
    for x in range(lo, hi + 1):
        m = 0
        for j, f in enumerate(F):
            if inside[x + f - lo - min(F)]:
                m |= 1 << j
        if m and m not in masks:
            masks[m] = x
    return distinct_maximal((x, m) for m, x in sorted(masks.items(), key=lambda p: p[1]))


# --- supplements --------------------------------------------------------------

@dataclass
class GapBound:
    n: int
    k_star: Optional[int]
    stated: int
    doubled: int
    window: Tuple[int, int]

    def to_dict(self) -> Dict:
        return {"n": self.n, "k_star": self.k_star, "stated_2^(n-1)+1": self.stated,
                "alternative_2^n+1": self.doubled, "window": list(self.window)}


def gap_bound(A: SetExpr, n: int, lo: int, hi: int, kmax: int, config: Optional[RunConfig] = None,
              kmin: int = 0) -> GapBound:
    """Least k with F = {0..k} passing the windowed n-syndetic check on lo..hi; starts at kmin"""
    config = config or RunConfig()
    kmax = min(kmax, 62)
    k, _ = z_prefix_scan(indicator(A, lo, hi + kmax), lo, hi, n, kmax, config.search_cap, kmin=kmin)
    return GapBound(n=n, k_star=k, stated=2 ** (n - 1) + 1, doubled=2 ** n + 1, window=(lo, hi))


def product_syndetic_thick(A: SetExpr, B: SetExpr, ns: Sequence[int], lo: int, hi: int,
                           config: Optional[RunConfig] = None) -> DecisionReport:
    """Windowed check that the sumset A + B is n-syndetic for each requested n"""
    config = config or RunConfig()
    group = IntegerGroup()
    kmax = min(config.max_shift, 62)
    reach = hi - lo + 1 + kmax
    a_lo, a_hi = lo - reach, hi + kmax + reach
    ia = indicator(A, a_lo, a_hi).astype(np.int64)
    ib = indicator(B, -reach, reach).astype(np.int64)
    sums = np.convolve(ia, ib)
    # index t of ``sums`` is the integer a_lo - reach + t
    offset = lo - (a_lo - reach)
    inside = sums[offset: offset + (hi + kmax - lo + 1)] > 0

    found: Dict[str, Optional[int]] = {}
    for n in ns:
        k, _ = z_prefix_scan(inside, lo, hi, n, kmax, config.search_cap)
        found[str(n)] = k
    scope = Scope.interval(lo, hi)
    ok = all(k is not None for k in found.values())
    top = max(ns)
    certificate = SyndeticWitness(n=top, F=list(range(found[str(top)] + 1)), scope=scope,
                                  note="sumset truncated to the window") if ok else None
    return DecisionReport(group=group.spec, set=None, question=f"A+B n-syndetic for n in {list(ns)}",
                          verdict=Verdict.PROVED if ok else Verdict.UNDECIDED, scope=scope, certificate=certificate,
                          evidence={"A": set_spec(A, group), "B": set_spec(B, group), "k_star": found},
                          scale={"window": [lo, hi], "max_shift": kmax})


def complement_transfer(A: SetExpr, g: Element, n: int, group: Group, config: Optional[RunConfig] = None) -> DecisionReport:
    """A n-syndetic and gA ∩ A = ∅ make A^c ⊇ gA n-syndetic with witness g·F"""
    config = config or RunConfig()
    inner = _decide(A, n, group, config, None)
    nf = normalize(A, group)
    disjoint = None
    if not isinstance(nf, NotNormalizable):
        disjoint = nf.translate(g, group).intersection(nf).is_empty
    base = dict(group=group.spec, set=set_spec(Complement(A), group), question=f"{n}-syndetic")
    evidence = {"source": inner.verdict.value, "translate": encode_element(g, group), "disjoint": disjoint}
    if inner.verdict == Verdict.PROVED and disjoint and isinstance(inner.certificate, SyndeticWitness):
        F = [group.multiply(g, group.parse(f)) for f in inner.certificate.F]
        return DecisionReport(**base, verdict=Verdict.PROVED, scope=inner.scope, evidence=evidence,
                              certificate=SyndeticWitness(n=n, F=_encode(group.sorted(F), group), scope=inner.scope,
                                                          note=f"translate of the witness for A by {group.format(g)}"))
    return DecisionReport(**base, verdict=Verdict.UNDECIDED, scope=inner.scope, evidence=evidence)


# --- replay -------------------------------------------------------------------

def verify_syndetic_witness(A: SetExpr, group: Group, witness: SyndeticWitness,
                            config: Optional[RunConfig] = None) -> bool:
    """Replay a witness through plain membership queries"""
    config = config or RunConfig()
    contains = lambda g: member(A, g, group)
    F = [group.parse(f) for f in witness.F]
    nf = normalize(A, group)
    scope = witness.scope
    if scope.kind == "exact" and isinstance(nf, (PeriodicNF, FiniteNF)):
        return _exact_escape(contains, nf, group, witness.n, F, config.search_cap) is None
    if isinstance(group, IntegerGroup):
        lo, hi = (scope.lo, scope.hi) if scope.lo is not None else _z_window(config, None)
        return escaping_tuple_z(A, witness.n, F, lo, hi, config.search_cap) is None
    radius = scope.radius if scope.radius is not None else config.radius
    return escaping_tuple(contains, group, witness.n, F, list(group.ball(radius, config.ball_cap)),
                          config.search_cap) is None


def verify_thick_refutation(A: SetExpr, group: Group, refutation: ThickRefutation,
                            config: Optional[RunConfig] = None) -> bool:
    config = config or RunConfig()
    contains = lambda g: member(A, g, group)
    if refutation.F is not None:
        F = [group.parse(f) for f in refutation.F]
    else:
        F = list(group.ball(refutation.radius or 0, config.ball_cap))
    K = [group.parse(h) for h in refutation.tuple]
    return len(K) == refutation.n and tuple_escapes(contains, group, F, K)
