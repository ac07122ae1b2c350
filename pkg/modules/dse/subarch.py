"""
Resource-minimal sub-architecture search.

Sizes are explored from one PE upwards. Each strategy proposes candidate
sub-architectures of the current size, every candidate is mapped with the
greedy heuristic and evaluated, and the search stops after the first size
whose best cost meets the deadline.
"""
from __future__ import annotations

import itertools
import logging
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..archgraph import ArchitectureGraph, canonical_graph_form, induced_subgraph
from ..grp import PermutationGroup
from ..mapping import TaskGraph
from .cost import CostEvaluator, CostModel, greedy_mapping
from .results import ExplorationResult, SizeStats, TrialRecord

logger = logging.getLogger(__name__)

MAX_BITMASK_PES = 24

SubArchitecture = Tuple[int, ...]


class Strategy(str, Enum):
    SIMPLE = "simple"
    GROUPS = "groups"
    INV_SEMI = "inv-semi"
    BRUTE_FORCE = "brute-force"


def _masks(n: int) -> np.ndarray:
    if n > MAX_BITMASK_PES:
        raise ValueError(f"Subset enumeration supports at most {MAX_BITMASK_PES} PEs, got {n}")
    return np.arange(1 << n, dtype=np.int64)


def _rank_order(n: int) -> np.ndarray:
    """rank[mask] orders subsets by size, then by their sorted point sequence."""
    masks = _masks(n)
    sizes = np.zeros_like(masks)
    reversed_bits = np.zeros_like(masks)
    for bit in range(n):
        present = (masks >> bit) & 1
        sizes += present
        reversed_bits |= present << (n - 1 - bit)
    order = np.lexsort((-reversed_bits, sizes))
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    return rank


def _image_masks(code: bytes, masks: np.ndarray) -> np.ndarray:
    image = np.zeros_like(masks)
    for point, target in enumerate(code):
        image |= ((masks >> point) & 1) << target
    return image


def _to_subset(mask: int) -> SubArchitecture:
    return tuple(i for i in range(mask.bit_length()) if (mask >> i) & 1)


def subset_orbit_representatives(group: PermutationGroup, max_size: Optional[int] = None) -> List[SubArchitecture]:
    """Least member of every orbit of non-empty subsets, in (size, lexicographic) order."""
    n = group.degree
    masks = _masks(n)
    rank = _rank_order(n)
    root = masks.copy()
    images = [_image_masks(g.code, masks) for g in group.generators if not g.is_identity()]
    while True:
        before = root.copy()
        for image in images:
            pulled = root[image]
            root = np.where(rank[pulled] < rank[root], pulled, root)
            pushed = np.empty_like(root)
            pushed[image] = root
            root = np.where(rank[pushed] < rank[root], pushed, root)
        root = root[root]
        if np.array_equal(root, before):
            break
    representatives = np.flatnonzero((root == masks) & (masks != 0))
    representatives = representatives[np.argsort(rank[representatives])]
    result = [_to_subset(int(m)) for m in representatives]
    if max_size is not None:
        result = [w for w in result if len(w) <= max_size]
    return result


def burnside_subset_classes(group: PermutationGroup, max_size: Optional[int] = None) -> int:
    """Number of non-empty subset orbits, from fixed-subset counts of every element."""
    n = group.degree
    limit = n if max_size is None else max_size
    total = np.zeros(limit + 1, dtype=object)
    for element in group.elements():
        poly = np.zeros(limit + 1, dtype=object)
        poly[0] = 1
        for cycle_length in [len(c) for c in element.cycles()] + [1] * (n - len(element.support())):
            shifted = np.zeros(limit + 1, dtype=object)
            shifted[cycle_length:] = poly[: limit + 1 - cycle_length] if cycle_length <= limit else 0
            poly = poly + shifted
        total = total + poly
    return int(sum(total[1:])) // group.order()


def all_subsets(n: int, max_size: Optional[int] = None) -> List[SubArchitecture]:
    limit = n if max_size is None else min(max_size, n)
    return [w for size in range(1, limit + 1) for w in itertools.combinations(range(n), size)]


def enumerate_subarch_classes(
    arch: ArchitectureGraph,
    method: str,
    *,
    group: Optional[PermutationGroup] = None,
    max_size: Optional[int] = None,
) -> List[SubArchitecture]:
    """One representative per equivalence class, ordered by size then lexicographically."""
    method = Strategy(method)
    if method is Strategy.BRUTE_FORCE:
        return all_subsets(arch.n, max_size)
    if method not in (Strategy.GROUPS, Strategy.INV_SEMI):
        raise ValueError(f"Class enumeration supports groups, inv-semi and brute-force, not {method.value}")
    if group is None:
        from ..autos import automorphism_group

        group = automorphism_group(arch)
    representatives = subset_orbit_representatives(group, max_size)
    if method is Strategy.GROUPS:
        logger.info("%d subset classes under a group of order %d", len(representatives), group.order())
        return representatives
    seen = set()
    unique = []
    for subset in representatives:
        certificate = canonical_graph_form(induced_subgraph(arch, subset))
        if certificate not in seen:
            seen.add(certificate)
            unique.append(subset)
    logger.info("%d induced-subgraph classes from %d group classes", len(unique), len(representatives))
    return unique


def _simple_candidates(n: int, seed: int) -> Dict[int, List[SubArchitecture]]:
    rng = np.random.default_rng(seed)
    chosen: List[int] = []
    unused = list(range(n))
    plan = {}
    while unused:
        pe = unused.pop(int(rng.integers(0, len(unused))))
        chosen.append(pe)
        plan[len(chosen)] = [tuple(sorted(chosen))]
    return plan


def _candidates_by_size(
    strategy: Strategy,
    arch: ArchitectureGraph,
    seed: int,
    group: Optional[PermutationGroup],
    max_size: Optional[int],
) -> Dict[int, List[SubArchitecture]]:
    if strategy is Strategy.SIMPLE:
        plan = _simple_candidates(arch.n, seed)
        if max_size is not None:
            plan = {s: c for s, c in plan.items() if s <= max_size}
        return plan
    plan: Dict[int, List[SubArchitecture]] = {}
    for subset in enumerate_subarch_classes(arch, strategy.value, group=group, max_size=max_size):
        plan.setdefault(len(subset), []).append(subset)
    return plan


def subarch_explore(
    strategy: str,
    task_graph: TaskGraph,
    arch: ArchitectureGraph,
    model: CostModel,
    deadline: Optional[int] = None,
    seed: int = 0,
    *,
    group: Optional[PermutationGroup] = None,
    max_size: Optional[int] = None,
) -> ExplorationResult:
    """Grow sub-architectures until one meets the deadline (all sizes when no deadline)."""
    strategy = Strategy(strategy)
    evaluate = CostEvaluator(model, task_graph, arch)
    result = ExplorationResult(mode=strategy.value, deadline=deadline)
    plan = _candidates_by_size(strategy, arch, seed, group, max_size)

    for size in sorted(plan):
        stats = SizeStats(size=size)
        for subset in plan[size]:
            mapping = greedy_mapping(model, task_graph, arch, subset)
            record = TrialRecord(
                index=len(result.records),
                mapping=mapping,
                cost=evaluate(mapping),
                size=size,
                subarch=subset,
            )
            result.records.append(record)
            stats.offer(record, deadline)
        result.best_per_size[size] = stats
        logger.info(
            "%s size %d: %d trials, best cost %s", strategy.value, size, stats.trials, stats.best_cost
        )
        if stats.deadline_met:
            break

    result.evaluations = len(result.records)
    if deadline is not None:
        result.deadline_met = any(s.deadline_met for s in result.best_per_size.values())
        if not result.deadline_met:
            logger.warning("Deadline %d was not met even on the full architecture", deadline)
    result.check_counters()
    return result
