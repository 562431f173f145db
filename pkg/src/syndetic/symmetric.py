"""Symmetric syndeticity and dense orbit sets.

A set A is symmetrically syndetic when it is syndetic and every meet

    (∩_{f∈F1} f⁻¹A) ∩ (∩_{f∈F2} f⁻¹A^c)

is syndetic or empty (``closure`` method, meets over arbitrary F1, F2), equivalently when
every such meet with F1 ⊆ A and F2 ⊆ A^c is syndetic (``reduction`` method; those meets
contain the identity). The completely and strongly completely variants ask the same of
complete and strong complete syndeticity.

A is a dense orbit set exactly when A^c contains no symmetrically syndetic subset.
"""

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import RunConfig
from .engine import decide_n_syndetic, set_spec
from .errors import InvalidExpr, ScaleExceeded
from .groups import Element, FiniteGroup, FreeGroup, Group, IntegerGroup
from .logger import symmetric_logger
from .reports import (DecisionReport, DenseOrbitReport, DenseOrbitWitness, Scope, SymmetricPair, SymmetricReport,
                      Verdict)
from .sets import (Complement, FiniteNF, FiniteWords, FreeGroupNF, NotNormalizable, PeriodicNF, Residue, SetExpr,
                   encode_element, finite_support, indicator, member, normalize)
from .windows import z_prefix_scan

VARIANTS = ("plain", "completely", "strongly-completely")
METHODS = ("closure", "reduction")

# windowed ℤ meets are checked for n-syndeticity up to this order in the complete variants
WINDOW_ORDER = {"plain": 1, "completely": 3, "strongly-completely": 3}


@dataclass(frozen=True)
class TranslateTable:
    """The translates f⁻¹A of a periodic or finite-group set as bitmasks over one period"""
    size: int
    pool: Tuple[int, ...]
    inside: Dict[int, int]
    members: Dict[int, bool]
    describe: Callable[[int], str]

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def side(self, f: int, in_a: bool) -> int:
        return self.inside[f] if in_a else self.full & ~self.inside[f]


def translate_table(nf, group: Group) -> TranslateTable:
    if isinstance(nf, PeriodicNF):
        m = nf.modulus
        return TranslateTable(m, tuple(range(m)), {f: nf.translate(-f).mask for f in range(m)},
                              {f: nf.contains(f) for f in range(m)},
                              lambda mask: PeriodicNF(m, mask).describe())
    order = group.order

    def describe(mask: int) -> str:
        return "{" + ", ".join(group.format(x) for x in FiniteNF(order, mask).elements) + "}"

    return TranslateTable(order, tuple(range(order)),
                          {f: nf.translate(group.invert(f), group).mask for f in range(order)},
                          {f: nf.contains(f) for f in range(order)}, describe)


def _exact_ok(variant: str, full: int) -> Callable[[int], bool]:
    # in finite groups and for periodic sets, complete syndeticity of a meet means the meet is everything
    if variant == "plain":
        return lambda mask: mask != 0
    return lambda mask: mask == full


def _closure_failure(table: TranslateTable, ok: Callable[[int], bool],
                     cap: int) -> Optional[Tuple[int, Tuple[int, ...], Tuple[int, ...]]]:
    """Breadth-first over meets; the first nonempty meet failing ``ok``, with a shortest label"""
    seen: Dict[int, Tuple[Tuple[int, ...], Tuple[int, ...]]] = {table.full: ((), ())}
    queue = deque([table.full])
    while queue:
        mask = queue.popleft()
        F1, F2 = seen[mask]
        for f in table.pool:
            for in_a in (True, False):
                meet = mask & table.side(f, in_a)
                if meet in seen:
                    continue
                label = (F1 + (f,), F2) if in_a else (F1, F2 + (f,))
                if meet and not ok(meet):
                    return meet, label[0], label[1]
                seen[meet] = label
                if len(seen) > cap:
                    raise ScaleExceeded(f"More than {cap} distinct meets of translates", {"cap": cap})
                queue.append(meet)
    return None


def _reduction_failure(table: TranslateTable, ok: Callable[[int], bool],
                       cap: int) -> Optional[Tuple[int, Tuple[int, ...], Tuple[int, ...]]]:
    """Meets over F1 ⊆ A and F2 ⊆ A^c shrink as the sets grow, so the full pair decides"""
    def meet_of(S: Sequence[int]) -> int:
        mask = table.full
        for f in S:
            mask &= table.side(f, table.members[f])
        return mask

    def split(S: Sequence[int]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        return tuple(f for f in S if table.members[f]), tuple(f for f in S if not table.members[f])

    if ok(meet_of(table.pool)):
        return None
    if len(table.pool) <= cap:
        for size in range(len(table.pool) + 1):
            for S in itertools.combinations(table.pool, size):
                mask = meet_of(S)
                if not ok(mask):
                    return (mask,) + split(S)
    return (meet_of(table.pool),) + split(table.pool)


def _pair(variant: str, F1, F2, group: Group, meet: str, evidence: str) -> SymmetricPair:
    return SymmetricPair(variant=variant, F1=[encode_element(f, group) for f in F1],
                         F2=[encode_element(f, group) for f in F2], meet=meet, evidence=evidence)


def symmetric_syndetic(A: SetExpr, variant: str, group: Group, config: Optional[RunConfig] = None,
                       method: str = "reduction", radius: int = 2, max_size: int = 2) -> SymmetricReport:
    """Decide (plain, completely or strongly completely) symmetric syndeticity of A.

    Exact for subsets of finite groups and periodic ℤ-sets. For free-group normal forms a
    nonempty finite meet refutes exactly and a search over translates in ball(radius) with
    at most ``max_size`` of them otherwise reports a windowed pass. Other ℤ-sets are
    checked on the configured window.
    """
    config = config or RunConfig()
    if variant not in VARIANTS:
        raise InvalidExpr(f"Unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}")
    if method not in METHODS:
        raise InvalidExpr(f"Unknown method {method!r}; expected one of {', '.join(METHODS)}")
    nf = normalize(A, group)
    if not isinstance(nf, NotNormalizable) and nf.is_empty:
        return SymmetricReport(variant=variant, verdict=Verdict.REFUTED, note="the empty set is not syndetic")

    if isinstance(nf, (PeriodicNF, FiniteNF)):
        report = _exact(nf, variant, group, config, method)
    elif isinstance(nf, FreeGroupNF):
        report = _free(nf, variant, group, method, radius, max_size)
    else:
        report = _windowed(A, variant, group, config, method, max_size)
    symmetric_logger.info(f"{variant} symmetric syndeticity over {group.spec} ({method}): {report.verdict.value}")
    return report


def _exact(nf, variant: str, group: Group, config: RunConfig, method: str) -> SymmetricReport:
    table = translate_table(nf, group)
    ok = _exact_ok(variant, table.full)
    if method == "closure":
        if table.size > config.finite_subset_cap:
            raise ScaleExceeded(f"Meet closure over {table.size} points exceeds the cap {config.finite_subset_cap}",
                                {"size": table.size})
        failure = _closure_failure(table, ok, config.partition_cap)
    else:
        failure = _reduction_failure(table, ok, config.finite_subset_cap)
    if failure is None:
        return SymmetricReport(variant=variant, verdict=Verdict.PROVED,
                               note=f"every meet of translates over one period passes ({method})")
    mask, F1, F2 = failure
    evidence = "empty" if mask == 0 else ("not syndetic" if variant == "plain" else "nonempty proper subset")
    return SymmetricReport(variant=variant, verdict=Verdict.REFUTED,
                           pair=_pair(variant, F1, F2, group, table.describe(mask), evidence))


def _free(nf: FreeGroupNF, variant: str, group: FreeGroup, method: str, radius: int,
          max_size: int) -> SymmetricReport:
    # in a free group every variant of syndeticity of a normal form means it contains a cylinder
    if nf.is_finite:
        return SymmetricReport(variant=variant, verdict=Verdict.REFUTED, note="finite sets are not syndetic")
    pool = list(group.ball(radius))
    complement = nf.complement()
    inside = {f: nf.translate(group.invert(f)) for f in pool}
    outside = {f: complement.translate(group.invert(f)) for f in pool}
    everything = FreeGroupNF.make(group, cylinders=[()])
    for size in range(1, max_size + 1):
        for S in itertools.combinations(pool, size):
            sides = [tuple(nf.contains(f) for f in S)] if method == "reduction" else \
                itertools.product((True, False), repeat=size)
            for choice in sides:
                meet = everything
                for f, in_a in zip(S, choice):
                    meet = meet.intersection(inside[f] if in_a else outside[f])
                    if meet.is_empty:
                        break
                if not meet.is_empty and meet.is_finite:
                    F1 = [f for f, in_a in zip(S, choice) if in_a]
                    F2 = [f for f, in_a in zip(S, choice) if not in_a]
                    return SymmetricReport(variant=variant, verdict=Verdict.REFUTED,
                                           pair=_pair(variant, F1, F2, group, meet.describe(), "finite nonempty"))
    return SymmetricReport(variant=variant, verdict=Verdict.PROVED, scope=Scope.ball(radius),
                           note=f"no finite nonempty meet of at most {max_size} translates from ball({radius})")


def _window_meet(A: SetExpr, F1: Sequence[int], F2: Sequence[int], lo: int, hi: int) -> np.ndarray:
    """Membership of the meet on lo..hi: x ∈ f⁻¹A iff x + f ∈ A"""
    shifts = list(F1) + list(F2)
    base = lo + min(shifts, default=0)
    inside = indicator(A, base, hi + max(shifts, default=0))
    meet = np.ones(hi - lo + 1, dtype=bool)
    length = hi - lo + 1
    for f in F1:
        meet &= inside[lo + f - base: lo + f - base + length]
    for f in F2:
        meet &= ~inside[lo + f - base: lo + f - base + length]
    return meet


def describe_window_meet(meet: np.ndarray, lo: int) -> str:
    points = np.flatnonzero(meet)
    if not len(points):
        return f"empty on [{lo}, {lo + len(meet) - 1}]"
    gap = int(np.diff(points).max()) if len(points) > 1 else 0
    return f"{len(points)} members on [{lo}, {lo + len(meet) - 1}], first {lo + int(points[0])}, largest gap {gap}"


def _windowed(A: SetExpr, variant: str, group: IntegerGroup, config: RunConfig, method: str,
              max_size: int) -> SymmetricReport:
    n = WINDOW_ORDER[variant]
    lo, hi = -config.z_window, config.z_window
    kmax = min(config.max_shift, 62)
    base = decide_n_syndetic(A, n, group, config)
    if base.verdict != Verdict.PROVED:
        return SymmetricReport(variant=variant, verdict=base.verdict, scope=base.scope,
                               note=f"A itself is {base.verdict.value} as a {n}-syndetic set")
    scope = Scope.interval(lo, hi)
    pool = list(range(-config.radius, config.radius + 1))
    for size in range(1, max_size + 1):
        for S in itertools.combinations(pool, size):
            sides = [tuple(member(A, f, group) for f in S)] if method == "reduction" else \
                itertools.product((True, False), repeat=size)
            for choice in sides:
                F1 = [f for f, in_a in zip(S, choice) if in_a]
                F2 = [f for f, in_a in zip(S, choice) if not in_a]
                meet = _window_meet(A, F1, F2, lo, hi + kmax)
                if not meet.any():
                    continue
                k, _ = z_prefix_scan(meet, lo, hi, n, kmax, config.search_cap)
                if k is None:
                    evidence = f"not {n}-syndetic with shifts up to {kmax}"
                    return SymmetricReport(variant=variant, verdict=Verdict.UNDECIDED, scope=scope,
                                           pair=_pair(variant, F1, F2, group, describe_window_meet(meet, lo), evidence),
                                           note="the meet fails on the window only")
    return SymmetricReport(variant=variant, verdict=Verdict.PROVED, scope=scope,
                           note=f"meets of at most {max_size} translates from [-{config.radius}, {config.radius}] pass")


def replay_pair(A: SetExpr, group: Group, pair: SymmetricPair, config: Optional[RunConfig] = None) -> bool:
    """Recompute the meet of a failing pair and compare it with the recorded description"""
    config = config or RunConfig()
    F1 = [group.parse(f) for f in pair.F1]
    F2 = [group.parse(f) for f in pair.F2]
    nf = normalize(A, group)
    if isinstance(nf, (PeriodicNF, FiniteNF)):
        table = translate_table(nf, group)
        mask = table.full
        for f in F1:
            mask &= table.side(f % table.size if isinstance(nf, PeriodicNF) else f, True)
        for f in F2:
            mask &= table.side(f % table.size if isinstance(nf, PeriodicNF) else f, False)
        return table.describe(mask) == pair.meet
    if isinstance(nf, FreeGroupNF):
        meet = FreeGroupNF.make(group, cylinders=[()])
        for f in F1:
            meet = meet.intersection(nf.translate(group.invert(f)))
        for f in F2:
            meet = meet.intersection(nf.complement().translate(group.invert(f)))
        return meet.describe() == pair.meet
    lo, hi = -config.z_window, config.z_window + min(config.max_shift, 62)
    return describe_window_meet(_window_meet(A, F1, F2, lo, hi), lo) == pair.meet


# --- dense orbit sets ---------------------------------------------------------

def subgroups(group: FiniteGroup) -> List[Tuple[int, ...]]:
    """All subgroups, grown from the trivial one by adjoining one element at a time"""
    trivial = tuple(group.closure([]))
    found = {trivial}
    queue = deque([trivial])
    while queue:
        H = queue.popleft()
        members = set(H)
        for g in range(group.order):
            if g in members:
                continue
            K = tuple(group.closure(H + (g,)))
            if K not in found:
                found.add(K)
                queue.append(K)
    return sorted(found, key=lambda H: (len(H), H))


def dense_orbit_finite_exact(A: SetExpr, group: FiniteGroup, config: Optional[RunConfig] = None) -> DenseOrbitReport:
    """A is a dense orbit set iff A·gH = G for every subgroup H and every g"""
    config = config or RunConfig()
    if not isinstance(group, FiniteGroup):
        raise InvalidExpr("The subgroup oracle needs a finite group")
    if group.order > config.finite_subset_cap:
        raise ScaleExceeded(f"Group of order {group.order} exceeds the cap {config.finite_subset_cap}")
    elements = normalize(A, group).elements
    for H in subgroups(group):
        seen = set()
        for g in range(group.order):
            if g in seen:
                continue
            coset = {group.multiply(g, h) for h in H}
            seen |= coset
            hit = {group.multiply(a, x) for a in elements for x in coset}
            if len(hit) < group.order:
                return DenseOrbitReport(verdict=Verdict.REFUTED, method="subgroup-oracle",
                                        witness=DenseOrbitWitness(method="subgroup-oracle", subgroup=list(H), coset=g),
                                        note=f"A·{group.format(g)}H misses part of the group")
    return DenseOrbitReport(verdict=Verdict.PROVED, method="subgroup-oracle",
                            note="A·gH covers the group for every subgroup H")


def record_gaps(inside: np.ndarray) -> List[int]:
    """Successive record gaps between consecutive members"""
    gaps = np.diff(np.flatnonzero(inside))
    records: List[int] = []
    for g in gaps.tolist():
        if not records or g > records[-1]:
            records.append(g)
    return records


def dense_orbit_via_symmetric(A: SetExpr, group: Group, config: Optional[RunConfig] = None,
                              window: Optional[Tuple[int, int]] = None) -> DenseOrbitReport:
    """A is a dense orbit set iff A^c contains no symmetrically syndetic subset"""
    config = config or RunConfig()
    nf = normalize(A, group)
    if isinstance(group, FiniteGroup):
        return _dense_finite(nf, group, config)
    if isinstance(nf, PeriodicNF):
        if nf.is_full:
            return DenseOrbitReport(verdict=Verdict.PROVED, method="symmetric-subset-oracle", note="A^c is empty")
        r = nf.complement().residues[0]
        B = Residue(nf.modulus, frozenset([r]))
        return _dense_no(B, group, config, Scope.exact())
    if isinstance(nf, FreeGroupNF):
        complement = nf.complement()
        if complement.is_full:
            B = complement.to_expr()
            return DenseOrbitReport(verdict=Verdict.REFUTED, method="symmetric-subset-oracle",
                                    witness=DenseOrbitWitness(method="symmetric-subset-oracle",
                                                              subset=set_spec(B, group)),
                                    note="A is empty and the whole group is symmetrically syndetic")
        if complement.is_finite:
            return DenseOrbitReport(verdict=Verdict.PROVED, method="symmetric-subset-oracle",
                                    note="A^c is finite, so it has no syndetic subset")
        B = FreeGroupNF.make(group, cylinders=[complement.cylinders[0]]).to_expr()
        report = symmetric_syndetic(B, "plain", group, config)
        return DenseOrbitReport(verdict=Verdict.REFUTED if report.verdict == Verdict.PROVED and report.scope.kind == "exact"
                                else Verdict.UNDECIDED,
                                method="symmetric-subset-oracle", scope=report.scope,
                                witness=DenseOrbitWitness(method="symmetric-subset-oracle", subset=set_spec(B, group)),
                                note=f"cylinder of A^c is {report.verdict.value} as a symmetrically syndetic set "
                                     f"({report.scope.describe()})")
    return _dense_integers(A, group, config, window)


def _dense_no(B: SetExpr, group: Group, config: RunConfig, scope: Scope) -> DenseOrbitReport:
    report = symmetric_syndetic(B, "plain", group, config)
    if report.verdict != Verdict.PROVED:
        return DenseOrbitReport(verdict=Verdict.UNDECIDED, method="symmetric-subset-oracle", scope=scope,
                                note="candidate subset of A^c is not symmetrically syndetic")
    return DenseOrbitReport(verdict=Verdict.REFUTED, method="symmetric-subset-oracle", scope=scope,
                            witness=DenseOrbitWitness(method="symmetric-subset-oracle", subset=set_spec(B, group)),
                            note="A^c contains a symmetrically syndetic subset")


def _dense_finite(nf: FiniteNF, group: FiniteGroup, config: RunConfig) -> DenseOrbitReport:
    outside = nf.complement().elements
    if len(outside) > config.finite_subset_cap:
        raise ScaleExceeded(f"|A^c| = {len(outside)} exceeds the cap {config.finite_subset_cap}")
    for size in range(1, len(outside) + 1):
        for B in itertools.combinations(outside, size):
            subset = FiniteWords(frozenset(B))
            if symmetric_syndetic(subset, "plain", group, config).verdict == Verdict.PROVED:
                return DenseOrbitReport(verdict=Verdict.REFUTED, method="symmetric-subset-oracle",
                                        witness=DenseOrbitWitness(method="symmetric-subset-oracle",
                                                                  subset=set_spec(subset, group)),
                                        note="A^c contains a symmetrically syndetic subset")
    return DenseOrbitReport(verdict=Verdict.PROVED, method="symmetric-subset-oracle",
                            note="no subset of A^c is symmetrically syndetic")


def _dense_integers(A: SetExpr, group: IntegerGroup, config: RunConfig,
                    window: Optional[Tuple[int, int]]) -> DenseOrbitReport:
    lo, hi = window if window is not None else (-config.z_window, config.z_window)
    scope = Scope.interval(lo, hi)
    outside = ~indicator(A, lo, hi)
    dual = decide_n_syndetic(Complement(A), 1, group, config, (lo, hi))
    if dual.verdict != Verdict.PROVED:
        return DenseOrbitReport(verdict=Verdict.PROVED, method="gap-sufficiency",
                                scope=dual.scope,
                                witness=DenseOrbitWitness(method="gap-sufficiency", gaps=record_gaps(outside)),
                                note="A^c is not syndetic, so no subset of it is symmetrically syndetic")
    support = finite_support(A, group)
    # a residue class inside A^c on the window is the candidate symmetrically syndetic subset
    for m in range(1, config.periodic_cap + 1):
        for r in range(m):
            if not outside[(r - lo) % m::m].all():
                continue
            B = Residue(m, frozenset([r]))
            if support is not None:
                if all(s % m != r for s in support):
                    return _dense_no(B, group, config, Scope.exact())
                continue
            return DenseOrbitReport(verdict=Verdict.UNDECIDED, method="symmetric-subset-oracle", scope=scope,
                                    witness=DenseOrbitWitness(method="symmetric-subset-oracle",
                                                              subset=set_spec(B, group)),
                                    note=f"{r} mod {m} lies in A^c on the window only")
    return DenseOrbitReport(verdict=Verdict.UNDECIDED, method="symmetric-subset-oracle", scope=scope,
                            note=f"A^c is syndetic on the window and holds no residue class of modulus "
                                 f"at most {config.periodic_cap}")


def as_decision_report(report, A: SetExpr, group: Group, question: str) -> DecisionReport:
    """Wrap a symmetric or dense-orbit report in the common report format"""
    if isinstance(report, SymmetricReport):
        certificate = report.pair
    else:
        certificate = report.witness
    return DecisionReport(group=group.spec, set=set_spec(A, group), question=question, verdict=report.verdict,
                          scope=report.scope, certificate=certificate, evidence={"note": report.note})
