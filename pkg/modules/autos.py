"""
Automorphisms and partial automorphisms of architecture graphs.

A partial permutation is a partial automorphism when it preserves PE types on
its domain and edge labels between every pair of domain points. The partial
automorphisms form an inverse semigroup; the search tree below grows a partial
permutation one point at a time (always by a point larger than the current
domain maximum) and never descends below a node that already breaks a label.
"""
from __future__ import annotations

import itertools
import logging
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .archgraph import ArchitectureGraph, individualize, refine, target_cell, twins
from .grp import PermutationGroup
from .isg import DEFAULT_CAP, InverseSemigroup
from .perm import UNDEFINED, PartialPermutation, Permutation, PointSetMismatch

logger = logging.getLogger(__name__)

NAIVE_NODE_LIMIT = 6


class GraphTooLarge(ValueError):
    """Raised when the exhaustive oracle is asked for a graph it cannot handle."""


def is_partial_automorphism(phi: PartialPermutation, graph: ArchitectureGraph) -> bool:
    if phi.degree != graph.n:
        raise PointSetMismatch(f"Partial permutation on {phi.degree} points for a {graph.n}-node graph")
    pairs = phi.pairs()
    types = graph.type_codes
    labels = graph.label_codes
    if any(types[x] != types[y] for x, y in pairs):
        return False
    return all(
        labels[a][b] == labels[fa][fb]
        for (a, fa), (b, fb) in itertools.combinations(pairs, 2)
    )


# automorphism group ----------------------------------------------------------


def _shape(colors: Sequence[int]) -> Tuple[int, ...]:
    sizes = [0] * (max(colors) + 1)
    for c in colors:
        sizes[c] += 1
    return tuple(sizes)


class _AutomorphismSearch:
    """Individualization-refinement search for strong generators.

    The first path fixes a base. Level by level from the bottom, every cell
    member outside the current orbit of the base point is tried: a leaf whose
    refinement trace matches the first path and whose positional map preserves
    all labels is an automorphism fixing the earlier base points.
    """

    def __init__(self, graph: ArchitectureGraph):
        self.n = graph.n
        self.types = graph.type_codes
        self.labels = graph.label_codes
        self.path: List[Tuple[List[int], List[int]]] = []
        self.shapes: List[Tuple[int, ...]] = []
        self.base: List[int] = []
        self.first_order: List[int] = []
        self.generators: List[List[int]] = []

    def _first_path(self) -> None:
        colors = list(self.types)
        while True:
            colors = refine(self.labels, colors)
            self.shapes.append(_shape(colors))
            cell = target_cell(colors)
            if cell is None:
                self.first_order = sorted(range(self.n), key=colors.__getitem__)
                return
            self.path.append((colors, cell))
            self.base.append(cell[0])
            colors = individualize(colors, cell[0])

    def _is_automorphism(self, gamma: Sequence[int]) -> bool:
        types, labels = self.types, self.labels
        if any(types[v] != types[gamma[v]] for v in range(self.n)):
            return False
        return all(
            labels[a][b] == labels[gamma[a]][gamma[b]]
            for a in range(self.n)
            for b in range(a + 1, self.n)
        )

    def _descend(self, colors: List[int], depth: int) -> Optional[List[int]]:
        colors = refine(self.labels, colors)
        if depth >= len(self.shapes) or _shape(colors) != self.shapes[depth]:
            return None
        cell = target_cell(colors)
        if cell is None:
            order = sorted(range(self.n), key=colors.__getitem__)
            gamma = [0] * self.n
            for position, vertex in enumerate(self.first_order):
                gamma[vertex] = order[position]
            return gamma if self._is_automorphism(gamma) else None
        for vertex in cell:
            found = self._descend(individualize(colors, vertex), depth + 1)
            if found is not None:
                return found
        return None

    def _orbit(self, point: int) -> set:
        orbit = {point}
        frontier = [point]
        while frontier:
            x = frontier.pop()
            for gamma in self.generators:
                y = gamma[x]
                if y not in orbit:
                    orbit.add(y)
                    frontier.append(y)
        return orbit

    def run(self) -> List[List[int]]:
        if self.n == 0:
            return []
        self._first_path()
        for level in reversed(range(len(self.base))):
            colors, cell = self.path[level]
            point = self.base[level]
            orbit = self._orbit(point)
            for vertex in cell:
                if vertex in orbit:
                    continue
                twin = next((u for u in sorted(orbit) if twins(self.types, self.labels, u, vertex)), None)
                if twin is not None:
                    gamma = list(range(self.n))
                    gamma[twin], gamma[vertex] = vertex, twin
                else:
                    gamma = self._descend(individualize(colors, vertex), level + 1)
                if gamma is not None:
                    self.generators.append(gamma)
                    orbit = self._orbit(point)
        return self.generators


def automorphism_group(graph: ArchitectureGraph) -> PermutationGroup:
    """All label-preserving permutations of the derived graph."""
    generators = _AutomorphismSearch(graph).run()
    group = PermutationGroup(graph.n, [Permutation.from_image(g) for g in generators])
    logger.info("Automorphism group of %d-node graph: order %d", graph.n, group.order())
    return group


# partial automorphisms ---------------------------------------------------------


class PartialAutomorphismTree:
    """Pruned search tree over partial automorphisms.

    Every node is a partial automorphism; children extend the domain by one point
    larger than the current maximum. Candidate images are tracked as bitmasks, so
    a child is produced only when it keeps every type and edge label.
    """

    def __init__(self, graph: ArchitectureGraph):
        self.graph = graph
        self.n = graph.n
        labels = graph.label_codes
        types = graph.type_codes
        self.labels = labels
        self.type_masks = [
            sum(1 << y for y in range(self.n) if types[y] == types[x]) for x in range(self.n)
        ]
        # by_label[y][label] = images y2 with label(y2, y) == label
        self.by_label: List[Dict[int, int]] = []
        for y in range(self.n):
            masks: Dict[int, int] = {}
            for y2 in range(self.n):
                if y2 != y:
                    masks[labels[y2][y]] = masks.get(labels[y2][y], 0) | (1 << y2)
            self.by_label.append(masks)
        self.visited = 0

    def _children(self, last: int, candidates: List[int]) -> Iterator[Tuple[int, int, List[int]]]:
        labels = self.labels
        n = self.n
        for x in range(last + 1, n):
            mask = candidates[x]
            while mask:
                low = mask & -mask
                y = low.bit_length() - 1
                mask ^= low
                row = self.by_label[y]
                narrowed = list(candidates)
                for x2 in range(x + 1, n):
                    if narrowed[x2]:
                        narrowed[x2] &= row.get(labels[x2][x], 0)
                yield x, y, narrowed

    def walk(self) -> Iterator[bytes]:
        """Codes of all partial automorphisms in depth-first order, root first."""
        self.visited = 0
        root = bytes([UNDEFINED]) * self.n
        stack = [(root, -1, list(self.type_masks))]
        while stack:
            code, last, candidates = stack.pop()
            self.visited += 1
            yield code
            children = [
                (code[:x] + bytes((y,)) + code[x + 1:], x, narrowed)
                for x, y, narrowed in self._children(last, candidates)
            ]
            stack.extend(reversed(children))

    def walk_by_rank(self) -> Iterator[bytes]:
        """All partial automorphisms, largest domains first, depth-first order within a rank."""
        buckets: List[List[bytes]] = [[] for _ in range(self.n + 1)]
        for code in self.walk():
            buckets[self.n - code.count(UNDEFINED)].append(code)
        for bucket in reversed(buckets):
            yield from bucket

    def count(self) -> int:
        total = 0
        stack = [(-1, list(self.type_masks))]
        while stack:
            last, candidates = stack.pop()
            total += 1
            for x, _, narrowed in self._children(last, candidates):
                stack.append((x, narrowed))
        self.visited = total
        return total


def count_partial_automorphisms(graph: ArchitectureGraph) -> int:
    total = PartialAutomorphismTree(graph).count()
    logger.info("Counted %d partial automorphisms on %d PEs", total, graph.n)
    return total


def _lexicographic_partial_permutations(n: int) -> Iterator[bytes]:
    """All partial permutations ordered by (domain, image sequence)."""

    def domains(start: int, prefix: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
        yield prefix
        for x in range(start, n):
            yield from domains(x + 1, prefix + (x,))

    for domain in domains(0, ()):
        for images in itertools.permutations(range(n), len(domain)):
            code = bytearray([UNDEFINED]) * n
            for x, y in zip(domain, images):
                code[x] = y
            yield bytes(code)


def partial_automorphism_generators_naive(
    graph: ArchitectureGraph, cap: int = DEFAULT_CAP
) -> List[PartialPermutation]:
    """Exhaustive generator search over every partial permutation (small graphs only)."""
    if graph.n > NAIVE_NODE_LIMIT:
        raise GraphTooLarge(
            f"The exhaustive search handles at most {NAIVE_NODE_LIMIT} nodes, got {graph.n}"
        )
    semigroup = InverseSemigroup(graph.n, (), cap)
    for code in _lexicographic_partial_permutations(graph.n):
        candidate = PartialPermutation._trusted(code)
        if is_partial_automorphism(candidate, graph) and not semigroup.contains_code(code):
            semigroup.add_generator(candidate)
    return list(semigroup.generators)


def backtrack_semigroup(
    graph: ArchitectureGraph, seed_with_group: bool = True, cap: int = DEFAULT_CAP
) -> InverseSemigroup:
    """Generators found by the pruned tree search, together with their closure.

    Nodes are tested largest domain first. Once every identity on ``n - 1``
    points is in the closure, any restriction ``f|D`` of an element already
    found equals ``id_D * f`` and never becomes a generator. Below rank
    ``n - 1`` only maximal partial automorphisms are adopted.
    """
    semigroup = InverseSemigroup(graph.n, (), cap)
    if seed_with_group:
        for g in automorphism_group(graph).generators:
            semigroup.add_generator(g.to_partial())
    seeded = len(semigroup.generators)
    tree = PartialAutomorphismTree(graph)
    for code in tree.walk_by_rank():
        if not semigroup.contains_code(code):
            semigroup.add_generator(PartialPermutation._trusted(code))
    logger.info(
        "Tree search visited %d nodes: %d seeded + %d found generators, %d elements",
        tree.visited,
        seeded,
        len(semigroup.generators) - seeded,
        semigroup.size,
    )
    return semigroup


def partial_automorphism_generators(
    graph: ArchitectureGraph, seed_with_group: bool = True, cap: int = DEFAULT_CAP
) -> List[PartialPermutation]:
    return list(backtrack_semigroup(graph, seed_with_group, cap).generators)
