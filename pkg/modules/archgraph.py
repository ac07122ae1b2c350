"""
Architecture models: PE topologies and the derived complete labeled graph.

A :class:`TopologyGraph` holds PEs (typed nodes) and physical links. Deriving it
yields an :class:`ArchitectureGraph`, a complete graph whose edge label for a PE
pair is ``(hops, resource)``: the shortest-path hop count and the resource of
the direct link between the two PEs (empty when they are not directly linked).
Symmetries are always computed on the derived graph.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .perm import Permutation, PointSetMismatch

logger = logging.getLogger(__name__)

UNREACHABLE = "unreachable"
EdgeLabel = Tuple[int, str]


class TopologyError(ValueError):
    """Raised for malformed topologies and sub-architectures."""


class TopologyGraph:
    """Undirected PE topology backed by a networkx graph.

    Nodes carry a ``type`` attribute; links carry ``resource`` and ``hops``.
    """

    def __init__(self, graph: Optional[nx.Graph] = None, *, allow_disconnected: bool = False):
        self.graph = graph if graph is not None else nx.Graph()
        self.allow_disconnected = allow_disconnected

    @classmethod
    def from_parts(
        cls,
        types: Sequence[str],
        links: Iterable[Tuple[int, int, str, int]],
        *,
        allow_disconnected: bool = False,
    ) -> "TopologyGraph":
        topology = cls(allow_disconnected=allow_disconnected)
        for pe_type in types:
            topology.add_pe(pe_type)
        for a, b, resource, hops in links:
            topology.add_link(a, b, resource=resource, hops=hops)
        return topology

    @property
    def num_pes(self) -> int:
        return self.graph.number_of_nodes()

    def add_pe(self, pe_type: str) -> int:
        if not pe_type:
            raise TopologyError("PE type labels must be non-empty")
        index = self.graph.number_of_nodes()
        self.graph.add_node(index, type=pe_type)
        return index

    def add_link(self, a: int, b: int, *, resource: str = "noc", hops: int = 1) -> None:
        if a == b:
            raise TopologyError(f"Self-loop on PE {a} is not allowed")
        if a not in self.graph or b not in self.graph:
            raise TopologyError(f"Link ({a}, {b}) references an unknown PE")
        if not resource:
            raise TopologyError("Link resource labels must be non-empty")
        if int(hops) < 1:
            raise TopologyError(f"Link ({a}, {b}) needs a positive hop weight, got {hops}")
        self.graph.add_edge(a, b, resource=resource, hops=int(hops))

    @property
    def types(self) -> Tuple[str, ...]:
        return tuple(self.graph.nodes[i]["type"] for i in range(self.num_pes))

    @property
    def links(self) -> List[Tuple[int, int, str, int]]:
        return sorted(
            (min(a, b), max(a, b), data["resource"], data["hops"])
            for a, b, data in self.graph.edges(data=True)
        )

    def to_networkx(self) -> nx.Graph:
        return self.graph.copy()

    def validate(self) -> None:
        if self.num_pes == 0:
            raise TopologyError("A topology needs at least one PE")
        if sorted(self.graph.nodes) != list(range(self.num_pes)):
            raise TopologyError("PE indices must be 0..n-1")
        if nx.number_of_selfloops(self.graph):
            raise TopologyError("Self-loops are not allowed")
        if not self.allow_disconnected and not nx.is_connected(self.graph):
            raise TopologyError(
                "Topology is disconnected; set allow_disconnected to label unreachable pairs"
            )


def mesh(rows: int, cols: int, pe_type: str = "RISC", *, resource: str = "noc") -> TopologyGraph:
    """Grid NoC with row-major PE indices."""
    if rows < 1 or cols < 1:
        raise TopologyError(f"Mesh dimensions must be positive, got {rows}x{cols}")
    topology = TopologyGraph()
    for _ in range(rows * cols):
        topology.add_pe(pe_type)
    for r in range(rows):
        for c in range(cols):
            index = r * cols + c
            if c + 1 < cols:
                topology.add_link(index, index + 1, resource=resource)
            if r + 1 < rows:
                topology.add_link(index, index + cols, resource=resource)
    return topology


def ring(size: int, pe_type: str = "RISC", *, resource: str = "noc") -> TopologyGraph:
    if size < 1:
        raise TopologyError("A ring needs at least one PE")
    topology = TopologyGraph()
    for _ in range(size):
        topology.add_pe(pe_type)
    if size == 2:
        topology.add_link(0, 1, resource=resource)
    elif size > 2:
        for i in range(size):
            topology.add_link(i, (i + 1) % size, resource=resource)
    return topology


def bus(type_counts: Mapping[str, int], *, resource: str = "bus") -> TopologyGraph:
    """All PEs share one bus; PEs are numbered type by type in the given order."""
    if not type_counts:
        raise TopologyError("A bus needs at least one PE type")
    topology = TopologyGraph()
    for pe_type, count in type_counts.items():
        if count < 1:
            raise TopologyError(f"PE count for {pe_type!r} must be at least 1")
        for _ in range(count):
            topology.add_pe(pe_type)
    for a in range(topology.num_pes):
        for b in range(a + 1, topology.num_pes):
            topology.add_link(a, b, resource=resource)
    return topology


def keystone() -> TopologyGraph:
    return bus({"ARM": 4, "DSP": 8})


def parallella() -> TopologyGraph:
    return mesh(4, 4, "Epiphany")


@dataclass(frozen=True, eq=False)
class ArchitectureGraph:
    """Complete node- and edge-labeled graph over the PEs."""

    types: Tuple[str, ...]
    hops: np.ndarray
    resources: Tuple[Tuple[str, ...], ...]
    origin: Tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        n = len(self.types)
        hops = np.array(self.hops, dtype=np.int64)
        if hops.shape != (n, n):
            raise TopologyError(f"Hop matrix must be {n}x{n}, got {hops.shape}")
        if not np.array_equal(hops, hops.T):
            raise TopologyError("Hop matrix must be symmetric")
        hops.setflags(write=False)
        object.__setattr__(self, "hops", hops)
        object.__setattr__(self, "resources", tuple(tuple(row) for row in self.resources))
        if not self.origin:
            object.__setattr__(self, "origin", tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.types)

    def edge_label(self, a: int, b: int) -> EdgeLabel:
        if a == b:
            raise TopologyError("The diagonal carries no edge label")
        return int(self.hops[a, b]), self.resources[a][b]

    @cached_property
    def type_vocabulary(self) -> Tuple[str, ...]:
        return tuple(sorted(set(self.types)))

    @cached_property
    def type_codes(self) -> Tuple[int, ...]:
        rank = {t: i for i, t in enumerate(self.type_vocabulary)}
        return tuple(rank[t] for t in self.types)

    @cached_property
    def label_vocabulary(self) -> Tuple[EdgeLabel, ...]:
        return tuple(
            sorted({self.edge_label(a, b) for a in range(self.n) for b in range(a + 1, self.n)})
        )

    @cached_property
    def label_codes(self) -> Tuple[Tuple[int, ...], ...]:
        """Edge labels as ranks in the sorted vocabulary; the diagonal is -1."""
        rank = {label: i for i, label in enumerate(self.label_vocabulary)}
        return tuple(
            tuple(-1 if a == b else rank[self.edge_label(a, b)] for b in range(self.n))
            for a in range(self.n)
        )

    def relabel(self, sigma: Permutation) -> "ArchitectureGraph":
        """Graph in which node ``sigma(v)`` carries the labels of node ``v``."""
        if sigma.degree != self.n:
            raise PointSetMismatch(f"Relabeling on {sigma.degree} points for a {self.n}-node graph")
        inverse = list(sigma.inverse().code)
        return ArchitectureGraph(
            types=tuple(self.types[inverse[v]] for v in range(self.n)),
            hops=self.hops[np.ix_(inverse, inverse)],
            resources=tuple(
                tuple(self.resources[inverse[a]][inverse[b]] for b in range(self.n))
                for a in range(self.n)
            ),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ArchitectureGraph):
            return NotImplemented
        return (
            self.types == other.types
            and np.array_equal(self.hops, other.hops)
            and self.resources == other.resources
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"ArchitectureGraph(n={self.n}, types={self.type_vocabulary})"


def derive_architecture_graph(topology: TopologyGraph) -> ArchitectureGraph:
    """Complete graph labeled with shortest-path hops and direct-link resources."""
    topology.validate()
    n = topology.num_pes
    graph = topology.graph
    hops = np.full((n, n), -1, dtype=np.int64)
    for source, lengths in nx.all_pairs_dijkstra_path_length(graph, weight="hops"):
        for target, length in lengths.items():
            hops[source, target] = length
    resources = [["" for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            if hops[a, b] < 0:
                resources[a][b] = UNREACHABLE
            elif graph.has_edge(a, b):
                resources[a][b] = graph.edges[a, b]["resource"]
    logger.debug("Derived architecture graph with %d PEs", n)
    return ArchitectureGraph(topology.types, hops, tuple(tuple(r) for r in resources))


def induced_subgraph(graph: ArchitectureGraph, subset: Iterable[int]) -> ArchitectureGraph:
    nodes = sorted(set(subset))
    if not nodes:
        raise TopologyError("A sub-architecture needs at least one PE")
    if nodes[0] < 0 or nodes[-1] >= graph.n:
        raise TopologyError(f"Sub-architecture {nodes} is outside 0..{graph.n - 1}")
    return ArchitectureGraph(
        types=tuple(graph.types[v] for v in nodes),
        hops=graph.hops[np.ix_(nodes, nodes)],
        resources=tuple(tuple(graph.resources[a][b] for b in nodes) for a in nodes),
        origin=tuple(graph.origin[v] for v in nodes),
    )


# canonical labeling ---------------------------------------------------------


def refine(labels: Sequence[Sequence[int]], colors: Sequence[int]) -> List[int]:
    """Iterate edge-label signatures until the partition is equitable.

    Colors are ranks of sorted signatures, so equal inputs up to relabeling give
    equal colorings up to the same relabeling.
    """
    n = len(colors)
    colors = list(colors)
    cells = len(set(colors))
    while True:
        signatures = [
            (colors[v], tuple(sorted((labels[v][u], colors[u]) for u in range(n) if u != v)))
            for v in range(n)
        ]
        ranking = {s: i for i, s in enumerate(sorted(set(signatures)))}
        colors = [ranking[s] for s in signatures]
        if len(ranking) == cells:
            return colors
        cells = len(ranking)


def individualize(colors: Sequence[int], vertex: int) -> List[int]:
    keyed = [2 * c + (0 if u == vertex else 1) for u, c in enumerate(colors)]
    ranking = {k: i for i, k in enumerate(sorted(set(keyed)))}
    return [ranking[k] for k in keyed]


def target_cell(colors: Sequence[int]) -> Optional[List[int]]:
    """Members of the lowest-ranked non-singleton cell, or None for a discrete coloring."""
    sizes: Dict[int, int] = {}
    for c in colors:
        sizes[c] = sizes.get(c, 0) + 1
    candidates = [c for c, size in sizes.items() if size > 1]
    if not candidates:
        return None
    chosen = min(candidates)
    return [v for v, c in enumerate(colors) if c == chosen]


def twins(types: Sequence[int], labels: Sequence[Sequence[int]], u: int, v: int) -> bool:
    """True when swapping ``u`` and ``v`` is an automorphism."""
    if types[u] != types[v]:
        return False
    return all(labels[u][w] == labels[v][w] for w in range(len(types)) if w != u and w != v)


class CanonicalLabeling(NamedTuple):
    certificate: bytes
    order: Tuple[int, ...]


class _CanonicalSearch:
    def __init__(self, graph: ArchitectureGraph):
        self.graph = graph
        self.n = graph.n
        self.types = graph.type_codes
        self.labels = graph.label_codes
        self.best_key: Optional[tuple] = None
        self.best_order: Optional[List[int]] = None
        self.automorphisms: List[List[int]] = []

    def leaf_key(self, order: Sequence[int]) -> tuple:
        labels = self.labels
        return (
            tuple(self.types[v] for v in order),
            tuple(labels[order[i]][order[j]] for i in range(self.n) for j in range(i + 1, self.n)),
        )

    def run(self) -> List[int]:
        self.visit(refine(self.labels, list(self.types)), ())
        return self.best_order

    def visit(self, colors: List[int], prefix: Tuple[int, ...]) -> None:
        colors = refine(self.labels, colors)
        cell = target_cell(colors)
        if cell is None:
            order = sorted(range(self.n), key=colors.__getitem__)
            key = self.leaf_key(order)
            if self.best_key is None or key < self.best_key:
                self.best_key, self.best_order = key, order
            elif key == self.best_key:
                gamma = [0] * self.n
                for position, vertex in enumerate(self.best_order):
                    gamma[vertex] = order[position]
                self.automorphisms.append(gamma)
            return
        explored: List[int] = []
        for vertex in cell:
            if explored and self.equivalent(vertex, explored, prefix):
                continue
            self.visit(individualize(colors, vertex), prefix + (vertex,))
            explored.append(vertex)

    def equivalent(self, vertex: int, explored: List[int], prefix: Tuple[int, ...]) -> bool:
        if any(twins(self.types, self.labels, u, vertex) for u in explored):
            return True
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for gamma in self.automorphisms:
            if all(gamma[p] == p for p in prefix):
                for x, y in enumerate(gamma):
                    parent[find(x)] = find(y)
        root = find(vertex)
        return any(find(u) == root for u in explored)


def canonical_labeling(graph: ArchitectureGraph) -> CanonicalLabeling:
    """Certificate plus canonical node order (``order[i]`` is placed at position ``i``)."""
    search = _CanonicalSearch(graph)
    order = search.run()
    types, edges = search.best_key
    document = {
        "types": list(graph.type_vocabulary),
        "labels": [list(label) for label in graph.label_vocabulary],
        "nodes": list(types),
        "edges": list(edges),
    }
    certificate = json.dumps(document, separators=(",", ":"), sort_keys=True).encode("utf-8")
    return CanonicalLabeling(certificate, tuple(order))


def canonical_graph_form(graph: ArchitectureGraph) -> bytes:
    return canonical_labeling(graph).certificate
