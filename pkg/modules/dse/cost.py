"""Synthetic cost model and the greedy mapping heuristic."""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from typing import Dict, List, Mapping as MappingType, Optional, Sequence, Tuple

import numpy as np

from ..archgraph import ArchitectureGraph, canonical_labeling, induced_subgraph
from ..mapping import Mapping, MappingError, TaskGraph, validate_mapping
from ..perm import Permutation

logger = logging.getLogger(__name__)

INCOMPATIBLE = -1


class CostModelError(ValueError):
    """Raised when the cost table cannot price a placement."""


@dataclass(frozen=True)
class CostModel:
    """Per-(task, PE type) computation costs plus a per-hop communication factor.

    A ``None`` entry marks a task that cannot run on that PE type.
    """

    costs: MappingType[str, Sequence[Optional[int]]]
    comm_factor: int = 1
    tables: Dict[str, np.ndarray] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.comm_factor < 0:
            raise CostModelError("Communication factor must be non-negative")
        tables = {}
        for pe_type, row in self.costs.items():
            values = [INCOMPATIBLE if v is None else int(v) for v in row]
            if any(v < 0 and v != INCOMPATIBLE for v in values):
                raise CostModelError(f"Costs for {pe_type!r} must be non-negative")
            array = np.array(values, dtype=np.int64)
            array.setflags(write=False)
            tables[pe_type] = array
        object.__setattr__(self, "tables", tables)

    def table(self, pe_type: str, num_tasks: int) -> np.ndarray:
        try:
            row = self.tables[pe_type]
        except KeyError:
            raise CostModelError(f"PE type {pe_type!r} is missing from the cost table") from None
        if len(row) != num_tasks:
            raise CostModelError(
                f"Cost row for {pe_type!r} has {len(row)} entries for {num_tasks} tasks"
            )
        return row

    def task_cost(self, task: int, pe_type: str) -> Optional[int]:
        value = int(self.tables[pe_type][task]) if pe_type in self.tables else INCOMPATIBLE
        return None if value == INCOMPATIBLE else value

    def check_symmetry(self, h: Permutation) -> None:
        """A task symmetry must not move a task onto one with different costs."""
        image = np.frombuffer(h.code, dtype=np.uint8).astype(np.int64)
        for pe_type, row in self.tables.items():
            if not np.array_equal(row, row[image]):
                raise CostModelError(
                    f"Task symmetry {h} changes the costs of PE type {pe_type!r}"
                )


class CostEvaluator:
    """Evaluates mappings of one task graph on one architecture."""

    def __init__(self, model: CostModel, task_graph: TaskGraph, arch: ArchitectureGraph):
        self.model = model
        self.task_graph = task_graph
        self.arch = arch
        s = task_graph.size
        self.per_pe = np.stack(
            [
                self.model.table(pe_type, s) if pe_type in self.model.tables else np.full(s, INCOMPATIBLE)
                for pe_type in arch.types
            ]
        )
        self.sources = np.array([c.source for c in task_graph.channels], dtype=np.int64)
        self.targets = np.array([c.target for c in task_graph.channels], dtype=np.int64)
        self.volumes = np.array([c.volume for c in task_graph.channels], dtype=np.int64)
        self.invocations = 0
        self._lock = threading.Lock()

    def allowed_pes(self) -> List[np.ndarray]:
        """Per task, the PEs whose type has a compatible cost entry."""
        return [np.flatnonzero(self.per_pe[:, task] != INCOMPATIBLE) for task in range(self.task_graph.size)]

    def __call__(self, mapping: Sequence[int]) -> int:
        with self._lock:
            self.invocations += 1
        m = np.asarray(validate_mapping(mapping, self.arch.n, self.task_graph.size), dtype=np.int64)
        tasks = np.arange(len(m))
        compute = self.per_pe[m, tasks]
        if (compute == INCOMPATIBLE).any():
            task = int(np.flatnonzero(compute == INCOMPATIBLE)[0])
            pe_type = self.arch.types[int(m[task])]
            if pe_type not in self.model.tables:
                raise CostModelError(f"PE type {pe_type!r} is missing from the cost table")
            raise CostModelError(f"Task {task} cannot run on PE {int(m[task])} ({pe_type})")
        loads = np.zeros(self.arch.n, dtype=np.int64)
        np.add.at(loads, m, compute)
        comm = 0
        if len(self.volumes):
            hops = self.arch.hops[m[self.sources], m[self.targets]]
            if (hops < 0).any():
                raise CostModelError("A channel crosses an unreachable PE pair")
            comm = int((self.volumes * hops).sum()) * self.model.comm_factor
        return int(loads.max()) + comm


def evaluate_cost(model: CostModel, task_graph: TaskGraph, arch: ArchitectureGraph, mapping: Sequence[int]) -> int:
    """Max per-PE computation load plus volume x hops x factor over all channels."""
    return CostEvaluator(model, task_graph, arch)(mapping)


def greedy_mapping(
    model: CostModel,
    task_graph: TaskGraph,
    arch: ArchitectureGraph,
    subset: Sequence[int],
    order: Optional[Sequence[int]] = None,
) -> Mapping:
    """List-schedule tasks onto the PEs of a sub-architecture.

    Tasks go in descending cost order (their largest compatible cost on the
    sub-architecture's PE types) to the PE with the smallest resulting load.
    Ties break by position in the canonical order of the induced subgraph, so
    isomorphic sub-architectures get isomorphic mappings.
    """
    pes = sorted(set(subset))
    if order is None:
        local = canonical_labeling(induced_subgraph(arch, pes)).order
        order = [pes[i] for i in local]
    types = sorted({arch.types[p] for p in order})
    s = task_graph.size

    def weight(task: int) -> int:
        values = [model.task_cost(task, t) for t in types]
        values = [v for v in values if v is not None]
        if not values:
            raise CostModelError(f"Task {task} cannot run on any PE type in {types}")
        return max(values)

    loads: Dict[int, int] = {p: 0 for p in order}
    mapping: List[int] = [-1] * s
    for task in sorted(range(s), key=lambda t: (-weight(t), t)):
        best: Optional[Tuple[int, int, int]] = None
        for position, pe in enumerate(order):
            cost = model.task_cost(task, arch.types[pe])
            if cost is None:
                continue
            candidate = (loads[pe] + cost, position, pe)
            if best is None or candidate < best:
                best = candidate
        if best is None:
            raise CostModelError(f"Task {task} has no compatible PE in {pes}")
        new_load, _, pe = best
        loads[pe] = new_load
        mapping[task] = pe
    if -1 in mapping:
        raise MappingError("Greedy mapping left a task unassigned")
    return tuple(mapping)
