"""(F, n)-colorings: k(E) ∈ K for every n-subset E with F·k(E₁)E₁ ∩ k(E₂)E₂ = ∅.

An F-avoiding n-syndetic set yields a coloring by sending E to the first witness translate
k with kE ⊆ A, and a coloring yields back the F-avoiding set ⋃ k(E)E. Both directions are
taken over the n-subsets of a ball, so every coloring records its window radius.
"""

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .config import RunConfig
from .dynamics import f_avoidance
from .engine import set_spec
from .errors import NoCoveringTranslate, NotAvoiding
from .groups import Element, Group
from .logger import dynamics_logger
from .reports import ColoringEntry, ColoringModel, DecisionReport, Scope, SyndeticWitness, Verdict
from .sets import FiniteWords, SetExpr, encode_element, membership


@dataclass(frozen=True)
class Coloring:
    n: int
    F: Tuple[Element, ...]
    K: Tuple[Element, ...]
    window_radius: int
    table: Tuple[Tuple[Tuple[Element, ...], Element], ...]

    def to_model(self, group: Group) -> ColoringModel:
        enc = lambda g: encode_element(g, group)
        return ColoringModel(n=self.n, F=[enc(f) for f in self.F], K=[enc(k) for k in self.K],
                             window_radius=self.window_radius,
                             table=[ColoringEntry(subset=[enc(e) for e in E], k=enc(k)) for E, k in self.table])

    @staticmethod
    def from_model(model: ColoringModel, group: Group) -> "Coloring":
        dec = group.parse
        return Coloring(n=model.n, F=tuple(dec(f) for f in model.F), K=tuple(dec(k) for k in model.K),
                        window_radius=model.window_radius,
                        table=tuple((tuple(dec(e) for e in entry.subset), dec(entry.k)) for entry in model.table))


def n_subsets(group: Group, n: int, radius: int, config: Optional[RunConfig] = None) -> List[Tuple[Element, ...]]:
    """n-subsets of ball(radius), length-lex in each coordinate then lexicographic"""
    config = config or RunConfig()
    return list(itertools.combinations(list(group.ball(radius, config.ball_cap)), n))


def set_to_coloring(A: SetExpr, n: int, F: Sequence[Element], witness: SyndeticWitness, group: Group,
                    window_radius: int, config: Optional[RunConfig] = None) -> Coloring:
    """Color each n-subset E of the window by the first witness translate k with kE ⊆ A"""
    config = config or RunConfig()
    if F:
        avoidance = f_avoidance(A, F, group, config)
        if not avoidance["holds"]:
            raise NotAvoiding("FA ∩ A is not empty", avoidance)
    K = [group.parse(k) for k in witness.F]
    contains = membership(A, group)
    table = []
    for E in n_subsets(group, n, window_radius, config):
        k = next((k for k in K if all(contains(group.multiply(k, e)) for e in E)), None)
        if k is None:
            raise NoCoveringTranslate(f"{[group.format(e) for e in E]} escapes every witness translate",
                                      {"subset": [encode_element(e, group) for e in E]})
        table.append((E, k))
    dynamics_logger.info(f"Colored {len(table)} {n}-subsets of ball({window_radius}) with {len(K)} translates")
    return Coloring(n=n, F=tuple(F), K=tuple(K), window_radius=window_radius, table=tuple(table))


def verify_coloring(c: Coloring, group: Group) -> Optional[Dict]:
    """First pair of entries breaking F·k(E₁)E₁ ∩ k(E₂)E₂ = ∅, or None"""
    owner: Dict[Element, int] = {}
    for j, (E, k) in enumerate(c.table):
        for e in E:
            owner.setdefault(group.multiply(k, e), j)
    for i, (E, k) in enumerate(c.table):
        for f in c.F:
            for e in E:
                x = group.multiply(f, group.multiply(k, e))
                if x in owner:
                    j = owner[x]
                    return {"first": i, "second": j, "f": encode_element(f, group),
                            "element": encode_element(x, group)}
    return None


def coloring_to_set(c: Coloring, group: Group) -> Tuple[SetExpr, DecisionReport]:
    """The union of k(E)E over the table, with an avoidance and coverage report on the window"""
    points = {group.multiply(k, e) for E, k in c.table for e in E}
    A = FiniteWords(frozenset(points))
    clash = next(((f, x) for f in c.F for x in group.sorted(points) if group.multiply(f, x) in points), None)
    conflict = verify_coloring(c, group)
    colored = {E for E, _ in c.table}
    uncovered = [E for E in n_subsets(group, c.n, c.window_radius) if E not in colored]
    evidence = {"points": len(points), "subsets": len(c.table), "avoiding": clash is None,
                "each_subset_covered": not uncovered}
    if clash is not None:
        evidence["clash"] = {"f": encode_element(clash[0], group), "element": encode_element(clash[1], group)}
    if conflict is not None:
        evidence["conflict"] = conflict
    if uncovered:
        evidence["uncovered"] = [encode_element(e, group) for e in uncovered[0]]
    ok = clash is None and conflict is None and not uncovered
    report = DecisionReport(group=group.spec, set=set_spec(A, group), question=f"F-avoiding {c.n}-coloring set",
                            verdict=Verdict.PROVED if ok else Verdict.REFUTED, scope=Scope.ball(c.window_radius),
                            evidence=evidence)
    return A, report
