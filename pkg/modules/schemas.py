"""
JSON document schemas shared by the CLI and the workspace.

Every file the tool reads or writes is described by one pydantic model here.
Documents convert to domain objects through ``to_*`` helpers and are written
with sorted keys so repeated runs produce identical bytes.
"""
from __future__ import annotations

import json
import os
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Type, TypeVar, Union

from pydantic import BaseModel, ConfigDict, Field

from .archgraph import TopologyGraph
from .dse.cost import CostModel
from .mapping import Channel, TaskGraph, TaskSymmetry
from .perm import PartialPermutation, Permutation, PointSet

DocumentT = TypeVar("DocumentT", bound=BaseModel)


class NodeEntry(BaseModel):
    index: int = Field(ge=0)
    type: str = Field(min_length=1)


class LinkEntry(BaseModel):
    a: int = Field(ge=0)
    b: int = Field(ge=0)
    resource: str = Field(default="noc", min_length=1)
    hops: int = Field(default=1, ge=1)


class ArchitectureDocument(BaseModel):
    name: Optional[str] = None
    nodes: List[NodeEntry] = Field(min_length=1)
    links: List[LinkEntry] = Field(default_factory=list)
    allow_disconnected: bool = False

    def to_topology(self) -> TopologyGraph:
        nodes = sorted(self.nodes, key=lambda node: node.index)
        if [node.index for node in nodes] != list(range(len(nodes))):
            raise ValueError("Architecture node indices must be 0..n-1")
        return TopologyGraph.from_parts(
            [node.type for node in nodes],
            [(link.a, link.b, link.resource, link.hops) for link in self.links],
            allow_disconnected=self.allow_disconnected,
        )

    @classmethod
    def from_topology(cls, topology: TopologyGraph, name: Optional[str] = None) -> "ArchitectureDocument":
        return cls(
            name=name,
            nodes=[NodeEntry(index=i, type=t) for i, t in enumerate(topology.types)],
            links=[LinkEntry(a=a, b=b, resource=r, hops=h) for a, b, r, h in topology.links],
            allow_disconnected=topology.allow_disconnected,
        )


class TaskEntry(BaseModel):
    index: int = Field(ge=0)
    name: str = Field(min_length=1)


class ChannelEntry(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    source: int = Field(alias="from", ge=0)
    target: int = Field(alias="to", ge=0)
    volume: int = Field(default=1, ge=0)


class CostModelDocument(BaseModel):
    comm_factor: int = Field(default=1, ge=0)
    costs: Dict[str, List[Optional[int]]]

    def to_cost_model(self) -> CostModel:
        return CostModel(costs=self.costs, comm_factor=self.comm_factor)


class TaskGraphDocument(BaseModel):
    name: Optional[str] = None
    description: Optional[str] = None
    tasks: List[TaskEntry] = Field(min_length=1)
    channels: List[ChannelEntry] = Field(default_factory=list)
    symmetry: List[List[int]] = Field(default_factory=list)
    cost_model: Optional[CostModelDocument] = None

    def to_task_graph(self) -> TaskGraph:
        tasks = sorted(self.tasks, key=lambda task: task.index)
        if [task.index for task in tasks] != list(range(len(tasks))):
            raise ValueError("Task indices must be 0..s-1")
        return TaskGraph(
            names=tuple(task.name for task in tasks),
            channels=tuple(Channel(c.source, c.target, c.volume) for c in self.channels),
        )

    def to_symmetry(self, task_graph: Optional[TaskGraph] = None) -> TaskSymmetry:
        """Validated task symmetry; generators must also keep the cost table invariant."""
        task_graph = task_graph or self.to_task_graph()
        generators = [Permutation.from_image(image) for image in self.symmetry]
        symmetry = TaskSymmetry.validated(task_graph, generators)
        if self.cost_model is not None:
            model = self.cost_model.to_cost_model()
            for h in generators:
                model.check_symmetry(h)
        return symmetry

    def to_cost_model(self) -> CostModel:
        if self.cost_model is None:
            raise ValueError(f"Task graph {self.name!r} carries no cost model")
        return self.cost_model.to_cost_model()


class MappingDocument(BaseModel):
    """Entries are 0-based PE indices or display names such as ``"PE_2"``."""

    mapping: List[Union[int, str]] = Field(min_length=1)

    def to_mapping(self, points: PointSet) -> Tuple[int, ...]:
        return tuple(points.index(v) if isinstance(v, str) else int(v) for v in self.mapping)


class GeneratorSetDocument(BaseModel):
    mode: Literal["group", "semigroup"]
    certificate: str
    degree: int = Field(ge=1)
    seed_with_group: bool = True
    generators: List[List[int]] = Field(default_factory=list)
    partial_generators: List[List[Tuple[int, int]]] = Field(default_factory=list)
    order: Optional[str] = None
    elements: Optional[str] = None

    def to_permutations(self) -> List[Permutation]:
        return [Permutation.from_image(image) for image in self.generators]

    def to_partial_permutations(self) -> List[PartialPermutation]:
        return [PartialPermutation.from_pairs(self.degree, pairs) for pairs in self.partial_generators]


class GASection(BaseModel):
    population: int = Field(default=20, ge=1)
    children: int = Field(default=20, ge=1)
    generations: int = Field(default=50, ge=0)
    mutation_rate: float = Field(default=0.1, ge=0.0, le=1.0)
    symmetry_cache: bool = True
    symmetry_scope: Literal["full", "tasks", "architecture"] = "full"
    audit_rate: float = Field(default=0.1, ge=0.0, le=1.0)
    workers: int = Field(default=1, ge=1)


class SubarchSection(BaseModel):
    strategy: Literal["simple", "groups", "inv-semi", "brute-force"] = "inv-semi"
    deadline: Optional[int] = None
    max_size: Optional[int] = Field(default=None, ge=1)


class RunConfigDocument(BaseModel):
    name: str = Field(min_length=1)
    architecture: str
    taskgraph: str
    mode: Literal["ga", "subarch"]
    seed: int = 0
    ga: GASection = Field(default_factory=GASection)
    subarch: SubarchSection = Field(default_factory=SubarchSection)


class TrialRecordDocument(BaseModel):
    index: int
    mapping: List[int]
    cost: int
    cache_hit: bool = False
    hit_kind: Optional[Literal["exact", "symmetry"]] = None
    generation: Optional[int] = None
    size: Optional[int] = None
    subarch: Optional[List[int]] = None


class SizeStatsDocument(BaseModel):
    size: int
    trials: int
    trials_to_best: int
    best_cost: Optional[int] = None
    best_subarch: Optional[List[int]] = None
    best_mapping: Optional[List[int]] = None
    deadline_met: bool = False


class SummaryDocument(BaseModel):
    name: str
    mode: str
    counters: Dict[str, int]
    cached_percent: float
    symmetry_percent: float
    best_cost: Optional[int] = None
    best_per_generation: List[int] = Field(default_factory=list)
    best_per_size: List[SizeStatsDocument] = Field(default_factory=list)
    deadline: Optional[int] = None
    deadline_met: Optional[bool] = None


def load_document(path: str, model: Type[DocumentT]) -> DocumentT:
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    return model.model_validate(data)


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_document(path: str, document: Union[BaseModel, Dict[str, Any]]) -> None:
    if isinstance(document, BaseModel):
        document = document.model_dump(mode="json", by_alias=True)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dump_json(document))


def write_json_lines(path: str, rows: Sequence[Dict[str, Any]]) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True, separators=(",", ":")) + "\n")
