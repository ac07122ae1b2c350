"""
Task graphs, task symmetries and the symmetry action on mappings.

A mapping is a tuple whose entry ``i`` is the PE running task ``i``. An
architecture symmetry ``g`` renames PEs entry by entry; a task symmetry ``h``
moves entries between positions so that the entry at ``h(i)`` is the old entry
at ``i``. With the audio-filter pipeline swap ``pi`` this turns
``(2,3,3,3,4,4,4,1)`` into ``(2,4,4,4,3,3,3,1)``.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence, Set, Tuple

from .grp import PermutationGroup, ProductGroup, direct_product
from .perm import Permutation, invert_code

logger = logging.getLogger(__name__)

Mapping = Tuple[int, ...]


class MappingError(ValueError):
    """Raised for mappings that do not fit the task graph or the architecture."""


class InvalidTaskSymmetry(ValueError):
    """Raised for task permutations that do not preserve the task graph."""


@dataclass(frozen=True)
class Channel:
    source: int
    target: int
    volume: int


@dataclass(frozen=True)
class TaskGraph:
    names: Tuple[str, ...]
    channels: Tuple[Channel, ...]

    def __post_init__(self) -> None:
        if not self.names:
            raise MappingError("A task graph needs at least one task")
        if len(set(self.names)) != len(self.names):
            raise MappingError("Task names must be unique")
        for channel in self.channels:
            if not (0 <= channel.source < self.size and 0 <= channel.target < self.size):
                raise MappingError(
                    f"Channel {channel.source}->{channel.target} references an unknown task"
                )
            if channel.volume < 0:
                raise MappingError(f"Channel {channel.source}->{channel.target} has a negative volume")

    @property
    def size(self) -> int:
        return len(self.names)

    @cached_property
    def channel_multiset(self) -> Counter:
        return Counter((c.source, c.target, c.volume) for c in self.channels)

    def preserves(self, h: Permutation) -> bool:
        if h.degree != self.size:
            return False
        moved = Counter((h(c.source), h(c.target), c.volume) for c in self.channels)
        return moved == self.channel_multiset

    def validate_symmetry(self, h: Permutation) -> None:
        if h.degree != self.size:
            raise InvalidTaskSymmetry(
                f"Task symmetry acts on {h.degree} points but the graph has {self.size} tasks"
            )
        if not self.preserves(h):
            raise InvalidTaskSymmetry(f"{h} does not map the channels onto themselves")


@dataclass(frozen=True)
class TaskSymmetry:
    """User-supplied generators of the task symmetry group."""

    degree: int
    generators: Tuple[Permutation, ...] = ()

    @classmethod
    def validated(cls, task_graph: TaskGraph, generators: Iterable[Permutation]) -> "TaskSymmetry":
        generators = tuple(generators)
        for h in generators:
            task_graph.validate_symmetry(h)
        return cls(task_graph.size, generators)

    @cached_property
    def group(self) -> PermutationGroup:
        return PermutationGroup(self.degree, self.generators)


def validate_mapping(mapping: Sequence[int], num_pes: int, num_tasks: Optional[int] = None) -> Mapping:
    mapping = tuple(int(v) for v in mapping)
    if num_tasks is not None and len(mapping) != num_tasks:
        raise MappingError(f"Mapping has {len(mapping)} entries for {num_tasks} tasks")
    for task, pe in enumerate(mapping):
        if not 0 <= pe < num_pes:
            raise MappingError(f"Task {task} is mapped to PE {pe}, outside 0..{num_pes - 1}")
    return mapping


def act_arch(g: Permutation, mapping: Sequence[int]) -> Mapping:
    """Rename PEs entry by entry: ``(g(m_1), ..., g(m_s))``."""
    mapping = validate_mapping(mapping, g.degree)
    return tuple(bytes(mapping).translate(g.table))


def act_task(h: Permutation, mapping: Sequence[int], symmetry: Optional[TaskSymmetry] = None) -> Mapping:
    """Permute positions so that the entry at ``h(i)`` is the old entry at ``i``."""
    if len(mapping) != h.degree:
        raise MappingError(f"Task permutation on {h.degree} points for a mapping of length {len(mapping)}")
    if symmetry is not None and not symmetry.group.contains(h):
        raise InvalidTaskSymmetry(f"{h} is not in the declared task symmetry group")
    inverse = invert_code(h.code)
    return tuple(mapping[j] for j in inverse)


def mapping_orbit(arch: PermutationGroup, tasks: PermutationGroup, mapping: Sequence[int]) -> Set[Mapping]:
    return direct_product(arch, tasks).orbit(mapping)


def canonical_mapping(arch: PermutationGroup, tasks: PermutationGroup, mapping: Sequence[int]) -> Mapping:
    return direct_product(arch, tasks).canonical_rep(mapping)


def encode_key(canonical: Sequence[int]) -> bytes:
    return bytes(canonical)


def cache_key(arch: PermutationGroup, tasks: PermutationGroup, mapping: Sequence[int]) -> bytes:
    """Byte key of the canonical mapping; equal exactly for equivalent mappings."""
    return encode_key(canonical_mapping(arch, tasks, mapping))


class MappingCanonicalizer:
    """Reusable ``G x H`` canonicalizer for many mappings over the same groups."""

    def __init__(self, arch: PermutationGroup, tasks: PermutationGroup):
        self.product: ProductGroup = direct_product(arch, tasks)

    def canonical(self, mapping: Sequence[int]) -> Mapping:
        return self.product.canonical_rep(mapping)

    def key(self, mapping: Sequence[int]) -> bytes:
        return encode_key(self.canonical(mapping))
