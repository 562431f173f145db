"""Deterministic reproduction bundle: membership grids, verdicts, the gap-bound table and
the adjudication of the worked free-group instances."""

import csv
import json
import os
from typing import Dict, List, Optional, Tuple

import numpy as np

from .config import RunConfig
from .engine import decide_n_syndetic, gap_bound
from .groups import FreeGroup, IntegerGroup
from .logger import logger
from .sets import PowersOfTwoComplement, SetExpr, indicator, multiples, non_multiples
from .strong import adjudicate, literal_instances

GRID = (1, 20)
POWERS_WINDOW = (1, 2 ** 20)

FIGURES = [
    ("fig1", "2Z", multiples(2), [1, 2]),
    ("fig2", "Z minus 3Z", non_multiples(3), [2, 3]),
    ("fig3", "complement of the powers of two", PowersOfTwoComplement(), [2]),
]


def membership_grid(A: SetExpr, lo: int, hi: int) -> np.ndarray:
    """(i, j) marked iff both i and j lie in A"""
    inside = indicator(A, lo, hi)
    return np.logical_and.outer(inside, inside)


def write_grid(grid: np.ndarray, lo: int, path: str) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["i\\j"] + [lo + j for j in range(grid.shape[1])])
        for i, row in enumerate(grid):
            writer.writerow([lo + i] + [int(v) for v in row])


def k_star_table(ns: List[int], window: Tuple[int, int], config: RunConfig) -> List[Dict]:
    rows = []
    kmin = 0
    for n in ns:
        bound = gap_bound(PowersOfTwoComplement(), n, window[0], window[1], config.max_shift, config, kmin=kmin)
        rows.append(bound.to_dict())
        if bound.k_star is not None:
            kmin = bound.k_star
    return rows


def adjudication_table() -> Dict[str, Dict]:
    group = FreeGroup(2)
    result = {}
    for name, (cells, remainder, F) in literal_instances(group).items():
        verdict = adjudicate(group, cells, remainder, F)
        result[name] = {"accepted": verdict.accepted, "assignment": verdict.assignment, "failures": verdict.failures}
    return result


def repro_figures(out_dir: str, config: Optional[RunConfig] = None,
                  powers_window: Tuple[int, int] = POWERS_WINDOW, ns: Tuple[int, ...] = (1, 2, 3, 4, 5)) -> Dict:
    """Write the grids, verdicts, k* table and adjudication under out_dir and return the bundle"""
    config = config or RunConfig()
    os.makedirs(out_dir, exist_ok=True)
    group = IntegerGroup()
    bundle: Dict = {"figures": []}
    for name, title, A, orders in FIGURES:
        grid = membership_grid(A, *GRID)
        write_grid(grid, GRID[0], os.path.join(out_dir, f"{name}.csv"))
        window = powers_window if isinstance(A, PowersOfTwoComplement) else None
        verdicts = {}
        for n in orders:
            report = decide_n_syndetic(A, n, group, config, window)
            verdicts[str(n)] = {"verdict": report.verdict.value, "scope": report.scope.describe(),
                                "certificate": report.certificate.model_dump(mode="json") if report.certificate else None}
        bundle["figures"].append({"name": name, "set": title, "marked": int(grid.sum()), "verdicts": verdicts})
        logger.info(f"{name}: {int(grid.sum())} marked cells")

    bundle["k_star"] = k_star_table(list(ns), powers_window, config)
    with open(os.path.join(out_dir, "kstar.csv"), "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=["n", "k_star", "stated_2^(n-1)+1", "alternative_2^n+1"])
        writer.writeheader()
        for row in bundle["k_star"]:
            writer.writerow({k: row[k] for k in writer.fieldnames})

    bundle["adjudication"] = adjudication_table()
    with open(os.path.join(out_dir, "bundle.json"), "w", encoding="utf-8") as f:
        json.dump(bundle, f, indent=2, sort_keys=True, ensure_ascii=False)
    return bundle
