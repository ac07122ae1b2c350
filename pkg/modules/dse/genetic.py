"""
mu+lambda evolution of mappings with an evaluation cache.

The cache key is the raw mapping when the symmetry cache is off and the
canonical mapping under the configured symmetry scope when it is on. Caching
never changes the trajectory: children are drawn from per-individual random
streams and survivors are picked by cost, which is identical either way.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..archgraph import ArchitectureGraph
from ..grp import PermutationGroup
from ..mapping import MappingCanonicalizer, TaskGraph
from .cost import CostEvaluator, CostModel, CostModelError
from .results import HIT_EXACT, HIT_SYMMETRY, ExplorationResult, TrialRecord

logger = logging.getLogger(__name__)

SCOPES = ("full", "tasks", "architecture")


class CacheInconsistency(RuntimeError):
    """An audited cache hit disagrees with a fresh evaluation."""


@dataclass(frozen=True)
class GAConfig:
    population: int = 20
    children: int = 20
    generations: int = 50
    mutation_rate: float = 0.1
    seed: int = 0
    symmetry_cache: bool = True
    symmetry_scope: str = "full"
    audit_rate: float = 0.1
    workers: int = 1

    def __post_init__(self) -> None:
        if self.population < 1 or self.children < 1:
            raise ValueError("Population and children counts must be at least 1")
        if self.generations < 0:
            raise ValueError("Generation count must be non-negative")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError(f"Mutation rate must lie in [0, 1], got {self.mutation_rate}")
        if self.symmetry_scope not in SCOPES:
            raise ValueError(f"Symmetry scope must be one of {SCOPES}, got {self.symmetry_scope!r}")
        if not 0.0 <= self.audit_rate <= 1.0:
            raise ValueError(f"Audit rate must lie in [0, 1], got {self.audit_rate}")
        if self.workers < 1:
            raise ValueError("At least one worker is required")


def _stream(seed: int, generation: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(generation, index)))


class _EvaluationCache:
    def __init__(self, cfg: GAConfig, key: Callable[[bytes], bytes], evaluate: Callable[[Sequence[int]], int]):
        self.cfg = cfg
        self.key = key
        self.evaluate = evaluate
        self.costs: Dict[bytes, int] = {}
        self.seen: set = set()
        self.evaluations = 0
        self.audits = 0
        self._symmetry_hits = 0

    def _audit(self, raw: bytes, cost: int) -> None:
        self._symmetry_hits += 1
        # audits so far track floor(hits * rate)
        if int(self._symmetry_hits * self.cfg.audit_rate + 1e-9) <= self.audits:
            return
        self.audits += 1
        fresh = self.evaluate(tuple(raw))
        if fresh != cost:
            raise CacheInconsistency(
                f"Cached cost {cost} for {tuple(raw)} differs from fresh evaluation {fresh}"
            )
        logger.debug("Audited symmetry hit for %s", tuple(raw))

    def resolve(self, batch: List[Tuple[int, ...]]) -> List[Tuple[int, bool, Optional[str]]]:
        """Costs and hit flags for a batch, identical to evaluating it in index order."""
        pending: Dict[bytes, Tuple[int, ...]] = {}
        plan: List[Tuple[bytes, bool, Optional[str]]] = []
        for mapping in batch:
            raw = bytes(mapping)
            key = self.key(raw)
            if key in self.costs or key in pending:
                kind = HIT_EXACT if raw in self.seen else HIT_SYMMETRY
                plan.append((key, True, kind))
            else:
                pending[key] = mapping
                plan.append((key, False, None))
            self.seen.add(raw)

        mappings = list(pending.values())
        if self.cfg.workers > 1 and len(mappings) > 1:
            with ThreadPoolExecutor(max_workers=self.cfg.workers) as pool:
                costs = list(pool.map(self.evaluate, mappings))
        else:
            costs = [self.evaluate(m) for m in mappings]
        self.evaluations += len(mappings)
        self.costs.update(zip(pending.keys(), costs))

        results = []
        for mapping, (key, hit, kind) in zip(batch, plan):
            cost = self.costs[key]
            if kind == HIT_SYMMETRY:
                self._audit(bytes(mapping), cost)
            results.append((cost, hit, kind))
        return results


def _placement_table(
    model: CostModel, task_graph: TaskGraph, arch: ArchitectureGraph
) -> Tuple[np.ndarray, np.ndarray]:
    """Compatible PEs per task, padded into rows, and the row lengths."""
    allowed = CostEvaluator(model, task_graph, arch).allowed_pes()
    for task, pes in enumerate(allowed):
        if not len(pes):
            raise CostModelError(f"Task {task} has no compatible PE on this architecture")
    sizes = np.array([len(pes) for pes in allowed], dtype=np.int64)
    table = np.zeros((len(allowed), int(sizes.max())), dtype=np.int64)
    for task, pes in enumerate(allowed):
        table[task, : len(pes)] = pes
    return table, sizes


def _cache_key(cfg: GAConfig, arch_group: PermutationGroup, task_group: PermutationGroup) -> Callable[[bytes], bytes]:
    if not cfg.symmetry_cache:
        return lambda raw: raw
    if cfg.symmetry_scope == "tasks":
        arch_group = PermutationGroup.trivial(arch_group.degree)
    elif cfg.symmetry_scope == "architecture":
        task_group = PermutationGroup.trivial(task_group.degree)
    canonicalizer = MappingCanonicalizer(arch_group, task_group)
    return canonicalizer.key


def ga_explore(
    cfg: GAConfig,
    task_graph: TaskGraph,
    arch: ArchitectureGraph,
    arch_group: PermutationGroup,
    task_group: PermutationGroup,
    model: CostModel,
    *,
    evaluator: Optional[Callable[[Sequence[int]], int]] = None,
) -> ExplorationResult:
    """Run the evolution; fitness is the negated cost."""
    evaluate = evaluator or CostEvaluator(model, task_graph, arch)
    cache = _EvaluationCache(cfg, _cache_key(cfg, arch_group, task_group), evaluate)
    result = ExplorationResult(mode="ga")
    num_tasks = task_graph.size
    table, sizes = _placement_table(model, task_graph, arch)
    tasks = np.arange(num_tasks)

    def draw(rng: np.random.Generator) -> np.ndarray:
        return table[tasks, rng.integers(0, sizes)]

    def record(generation: int, batch: List[Tuple[int, ...]]) -> List[int]:
        costs = []
        for mapping, (cost, hit, kind) in zip(batch, cache.resolve(batch)):
            result.records.append(
                TrialRecord(
                    index=len(result.records),
                    mapping=mapping,
                    cost=cost,
                    cache_hit=hit,
                    hit_kind=kind,
                    generation=generation,
                )
            )
            costs.append(cost)
        return costs

    population = [
        tuple(int(v) for v in draw(_stream(cfg.seed, 0, k)))
        for k in range(cfg.population)
    ]
    costs = record(0, population)
    result.best_per_generation.append(min(costs))

    for generation in range(1, cfg.generations + 1):
        children = []
        for k in range(cfg.children):
            rng = _stream(cfg.seed, generation, k)
            first, second = rng.integers(0, len(population), size=2)
            mask = rng.random(num_tasks) < 0.5
            genes = np.where(mask, population[first], population[second])
            mutate = rng.random(num_tasks) < cfg.mutation_rate
            genes = np.where(mutate, draw(rng), genes)
            children.append(tuple(int(v) for v in genes))
        child_costs = record(generation, children)

        pool = list(zip(costs + child_costs, range(len(population) + len(children)), population + children))
        pool.sort(key=lambda item: (item[0], item[1]))
        survivors = pool[: cfg.population]
        population = [m for _, _, m in survivors]
        costs = [c for c, _, _ in survivors]
        result.best_per_generation.append(costs[0])
        logger.debug("Generation %d: best cost %d", generation, costs[0])

    result.evaluations = cache.evaluations
    result.audits = cache.audits
    result.check_counters()
    logger.info(
        "GA finished: %d trials, %d evaluations, %d symmetry hits",
        len(result.records),
        result.evaluations,
        result.symmetry_hits,
    )
    return result
