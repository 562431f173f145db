"""Finite-window search shared by the decision modules.

The central object is the kill mask of a candidate point x relative to a finite
translate set F = (f_0, ..., f_{m-1}) and a set A:

    mask(x) = { j : f_j · x ∉ A }      (bit j set)

An n-tuple K = (k_1, ..., k_n) escapes every translate (no f ∈ F with fK ⊆ A) exactly
when mask(k_1) | ... | mask(k_n) covers all of F.  Deciding the windowed n-syndetic
condition therefore reduces to a set-cover question of depth n over the distinct
masks that occur in the window.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from .errors import ScaleExceeded
from .groups import Element, Group
from .logger import windows_logger
from .sets import SetExpr, indicator

T = TypeVar("T")


def chunk_bounds(n: int, workers: int) -> List[Tuple[int, int]]:
    return [((i * n) // workers, ((i + 1) * n) // workers) for i in range(workers)]


def deterministic_first(items: Sequence[T], predicate: Callable[[T], bool], parallelism: int = 1) -> Optional[T]:
    """First item (in sequence order) satisfying predicate, regardless of worker schedule"""
    if parallelism <= 1 or len(items) < 2 * parallelism:
        for item in items:
            if predicate(item):
                return item
        return None

    def scan(bounds: Tuple[int, int]) -> Optional[int]:
        for i in range(*bounds):
            if predicate(items[i]):
                return i
        return None

    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        hits = [i for i in pool.map(scan, chunk_bounds(len(items), parallelism)) if i is not None]
    return items[min(hits)] if hits else None


def z_kill_masks(A: SetExpr, F: Sequence[int], lo: int, hi: int) -> np.ndarray:
    """Kill masks for every x in lo..hi (F is a list of integer shifts)"""
    fmin, fmax = min(F), max(F)
    return masks_from_indicator(indicator(A, lo + fmin, hi + fmax), F, hi - lo + 1)


def masks_from_indicator(inside: np.ndarray, F: Sequence[int], length: int) -> np.ndarray:
    """Kill masks from a membership array whose entry 0 is the point lo + min(F)"""
    fmin = min(F)
    missing = ~inside
    if len(F) <= 63:
        masks = np.zeros(length, dtype=np.uint64)
        for j, f in enumerate(F):
            masks |= missing[f - fmin: f - fmin + length].astype(np.uint64) << np.uint64(j)
        return masks
    masks = np.zeros(length, dtype=object)
    for j, f in enumerate(F):
        col = missing[f - fmin: f - fmin + length]
        masks[col] = masks[col] + (1 << j)
    return masks


def kill_masks(contains: Callable[[Element], bool], group: Group, F: Sequence[Element],
               candidates: Iterable[Element]) -> Dict[Element, int]:
    """Kill mask of each candidate, by membership queries"""
    result: Dict[Element, int] = {}
    for x in candidates:
        mask = 0
        for j, f in enumerate(F):
            if not contains(group.multiply(f, x)):
                mask |= 1 << j
        result[x] = mask
    return result


def distinct_maximal(labelled: Iterable[Tuple[Element, int]]) -> List[Tuple[Element, int]]:
    """Keep the first label of each distinct nonzero mask, then drop masks strictly
    contained in another"""
    first: Dict[int, Element] = {}
    for x, m in labelled:
        m = int(m)
        if m and m not in first:
            first[m] = x
    masks = sorted(first, key=lambda m: (-bin(m).count("1"), m))
    kept: List[int] = []
    for m in masks:
        if not any(m | k == k for k in kept):
            kept.append(m)
    return [(first[m], m) for m in kept]


def find_cover(labelled: Sequence[Tuple[Element, int]], width: int, n: int, node_cap: int) -> Optional[List[Element]]:
    """Labels of at most n masks whose union has all ``width`` bits set, or None.

    Depth-first on the lowest uncovered bit; raises ScaleExceeded past ``node_cap`` nodes.
    """
    full = (1 << width) - 1
    if width == 0:
        return []
    if n <= 0 or not labelled:
        return None
    best = max(bin(m).count("1") for _, m in labelled)
    failed: Dict[int, int] = {}
    nodes = 0

    def dfs(covered: int, left: int) -> Optional[List[Element]]:
        nonlocal nodes
        if covered == full:
            return []
        if left == 0:
            return None
        if bin(full & ~covered).count("1") > left * best:
            return None
        if failed.get(covered, -1) >= left:
            return None
        nodes += 1
        if nodes > node_cap:
            raise ScaleExceeded(f"Cover search exceeded {node_cap} nodes", {"nodes": nodes, "cap": node_cap})
        uncovered = full & ~covered
        bit = uncovered & -uncovered
        for x, m in labelled:
            if m & bit:
                rest = dfs(covered | m, left - 1)
                if rest is not None:
                    return [x] + rest
        failed[covered] = max(failed.get(covered, -1), left)
        return None

    return dfs(0, n)


def _labelled(masks: np.ndarray, lo: int) -> List[Tuple[int, int]]:
    """Distinct maximal masks of a window array, labelled by their first point"""
    values, first = np.unique(masks, return_index=True)
    return distinct_maximal((lo + int(i), int(v)) for v, i in sorted(zip(values, first), key=lambda p: p[1]))


def escaping_tuple_z(A: SetExpr, n: int, F: Sequence[int], lo: int, hi: int,
                     node_cap: int) -> Optional[Tuple[int, ...]]:
    """An n-tuple in lo..hi escaping every translate f + A, f ∈ F, or None"""
    labelled = _labelled(z_kill_masks(A, F, lo, hi), lo)
    windows_logger.info(f"{len(labelled)} maximal kill masks in [{lo}, {hi}]")
    cover = find_cover(labelled, len(F), n, node_cap)
    return None if cover is None else _pad(sorted(cover), n)


def z_prefix_scan(inside: np.ndarray, lo: int, hi: int, n: int, kmax: int, node_cap: int,
                  kmin: int = 0) -> Tuple[Optional[int], Optional[Tuple[int, ...]]]:
    """Least k in kmin..kmax such that no n-tuple in lo..hi escapes F = {0..k}.

    ``inside`` is the membership array of lo..hi+kmax. Returns (k, None) on success and
    (None, escaping tuple for {0..kmax}) otherwise.
    """
    masks = masks_from_indicator(inside, list(range(kmax + 1)), hi - lo + 1)
    escape: Optional[Tuple[int, ...]] = None
    for k in range(kmin, kmax + 1):
        keep = (1 << (k + 1)) - 1
        truncated = masks & (np.uint64(keep) if masks.dtype == np.uint64 else keep)
        cover = find_cover(_labelled(truncated, lo), k + 1, n, node_cap)
        if cover is None:
            windows_logger.info(f"No escaping {n}-tuple against {{0..{k}}} in [{lo}, {hi}]")
            return k, None
        escape = _pad(sorted(cover), n)
    return None, escape


def escaping_tuple(contains: Callable[[Element], bool], group: Group, n: int, F: Sequence[Element],
                   candidates: Sequence[Element], node_cap: int) -> Optional[Tuple[Element, ...]]:
    """An n-tuple from ``candidates`` escaping every translate fA, f ∈ F, or None"""
    masks = kill_masks(contains, group, F, candidates)
    labelled = distinct_maximal((x, masks[x]) for x in candidates)
    cover = find_cover(labelled, len(F), n, node_cap)
    if cover is None:
        return None
    return _pad(sorted(cover, key=group.sort_key), n)


def _pad(cover: List[Element], n: int) -> Tuple[Element, ...]:
    # a shorter cover still yields an n-tuple by repeating its last entry
    return tuple(cover + [cover[-1]] * (n - len(cover))) if cover else tuple()


def tuple_escapes(contains: Callable[[Element], bool], group: Group, F: Iterable[Element],
                  K: Sequence[Element]) -> bool:
    """True iff every f ∈ F sends some k ∈ K outside A"""
    return all(any(not contains(group.multiply(f, k)) for k in K) for f in F)

