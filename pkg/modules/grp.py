"""
Finite permutation groups given by generators.

Membership and order come from a deterministic Schreier-Sims stabilizer chain.
Orbits are computed by closing an object under the generators. Objects are
points (``int``), subsets (``frozenset``) or mappings (``tuple`` of PE indices
acted on entry by entry).
"""
from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache, reduce
from typing import Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .perm import Permutation, PointSetMismatch, invert_code, permutation_table

logger = logging.getLogger(__name__)

# Groups up to this order canonicalize mappings by enumerating every element.
ENUMERATION_LIMIT = 40320


class Action(str, Enum):
    POINT = "point"
    SET = "set"
    MAPPING = "mapping"


def _mul(a: bytes, b: bytes) -> bytes:
    return a.translate(permutation_table(b))


def _first_moved(code: bytes) -> int:
    return next(x for x, y in enumerate(code) if x != y)


class StabilizerChain:
    """Base, strong generators and transversals of a permutation group.

    ``transversals[i]`` maps every point of the orbit of ``base[i]`` under the
    pointwise stabilizer of ``base[:i]`` to a group element sending ``base[i]``
    there. A requested base prefix is kept as the start of the base.
    """

    def __init__(self, degree: int, generators: Iterable[bytes], base: Sequence[int] = ()):
        self.degree = degree
        self.identity = bytes(range(degree))
        gens = [g for g in dict.fromkeys(generators) if g != self.identity]
        self.base: List[int] = list(base)
        for g in gens:
            if all(g[b] == b for b in self.base):
                self.base.append(_first_moved(g))
        self.strong: List[List[bytes]] = [
            [g for g in gens if all(g[b] == b for b in self.base[:level])]
            for level in range(len(self.base))
        ]
        self.transversals: List[Dict[int, bytes]] = [
            self._transversal(level) for level in range(len(self.base))
        ]
        self._complete()

    def _transversal(self, level: int) -> Dict[int, bytes]:
        root = self.base[level]
        transversal = {root: self.identity}
        queue = deque([root])
        while queue:
            point = queue.popleft()
            word = transversal[point]
            for s in self.strong[level]:
                image = s[point]
                if image not in transversal:
                    transversal[image] = _mul(word, s)
                    queue.append(image)
        return transversal

    def strip(self, code: bytes, start: int = 0) -> Tuple[bytes, int]:
        """Sift ``code`` through the levels from ``start``; return the residue and stop level."""
        for level in range(start, len(self.base)):
            point = code[self.base[level]]
            word = self.transversals[level].get(point)
            if word is None:
                return code, level
            code = _mul(code, invert_code(word))
        return code, len(self.base)

    def _complete(self) -> None:
        level = len(self.base) - 1
        while level >= 0:
            restarted = False
            transversal = self.transversals[level]
            for point, word in list(transversal.items()):
                for s in list(self.strong[level]):
                    schreier = _mul(_mul(word, s), invert_code(transversal[s[point]]))
                    if schreier == self.identity:
                        continue
                    residue, stop = self.strip(schreier, level + 1)
                    if stop == len(self.base) and residue == self.identity:
                        continue
                    if stop == len(self.base):
                        self.base.append(_first_moved(residue))
                        self.strong.append([])
                        self.transversals.append({})
                    for deeper in range(level + 1, stop + 1):
                        self.strong[deeper].append(residue)
                        self.transversals[deeper] = self._transversal(deeper)
                    level = stop
                    restarted = True
                    break
                if restarted:
                    break
            if not restarted:
                level -= 1

    def order(self) -> int:
        result = 1
        for transversal in self.transversals:
            result *= len(transversal)
        return result

    def contains(self, code: bytes) -> bool:
        residue, stop = self.strip(code)
        return stop == len(self.base) and residue == self.identity

    def elements(self) -> Iterator[bytes]:
        levels = [list(t.values()) for t in self.transversals]
        for words in itertools.product(*levels):
            yield reduce(_mul, reversed(words), self.identity)


class PermutationGroup:
    """A permutation group ``<S>`` on ``degree`` points."""

    def __init__(self, degree: int, generators: Sequence[Permutation] = ()):
        for g in generators:
            if g.degree != degree:
                raise PointSetMismatch(
                    f"Generator on {g.degree} points does not fit a group on {degree} points"
                )
        self.degree = degree
        self.generators: Tuple[Permutation, ...] = tuple(generators)
        self._codes = tuple(dict.fromkeys(g.code for g in self.generators if not g.is_identity()))
        self._tables = [permutation_table(c) for c in self._codes]
        self.chain = StabilizerChain(degree, self._codes)
        self._chain_for_base = lru_cache(maxsize=4096)(self._build_chain)
        self._element_tables: Optional[List[bytes]] = None
        logger.debug("Group on %d points: %d generators, order %d", degree, len(self._codes), self.order())

    @classmethod
    def trivial(cls, degree: int) -> "PermutationGroup":
        return cls(degree, ())

    def order(self) -> int:
        return self.chain.order()

    def is_trivial(self) -> bool:
        return not self._codes

    def contains(self, p: Permutation) -> bool:
        if p.degree != self.degree:
            raise PointSetMismatch(
                f"Permutation on {p.degree} points tested against a group on {self.degree} points"
            )
        return self.chain.contains(p.code)

    __contains__ = contains

    def elements(self, limit: int = 10**6) -> List[Permutation]:
        """All elements, for groups no larger than ``limit``."""
        if self.order() > limit:
            raise ValueError(f"Group of order {self.order()} is too large to enumerate (limit {limit})")
        return [Permutation._trusted(code) for code in self.chain.elements()]

    def is_abelian(self) -> bool:
        return all(
            _mul(a, b) == _mul(b, a) for a, b in itertools.combinations(self._codes, 2)
        )

    def fixes_partition(self, blocks: Iterable[Iterable[int]]) -> bool:
        """True if every element maps each block onto itself."""
        block_sets = [frozenset(b) for b in blocks]
        return all(
            frozenset(code[x] for x in block) == block
            for code in self._codes
            for block in block_sets
        )

    # orbits -----------------------------------------------------------------

    def _apply(self, code: bytes, table: bytes, x: Hashable, action: Action) -> Hashable:
        if action is Action.POINT:
            return code[x]
        if action is Action.SET:
            return frozenset(code[p] for p in x)
        return bytes(x).translate(table)

    def _normalize(self, x: Hashable, action: Action) -> Hashable:
        if action is Action.POINT:
            if not 0 <= x < self.degree:
                raise PointSetMismatch(f"Point {x} is outside 0..{self.degree - 1}")
            return x
        if action is Action.SET:
            subset = frozenset(x)
            if any(not 0 <= p < self.degree for p in subset):
                raise PointSetMismatch(f"Subset {sorted(subset)} is outside 0..{self.degree - 1}")
            return subset
        mapping = bytes(x)
        if any(v >= self.degree for v in mapping):
            raise PointSetMismatch(f"Mapping {tuple(mapping)} uses PEs outside 0..{self.degree - 1}")
        return mapping

    def orbit(self, x: Hashable, action: Action = Action.POINT) -> Set[Hashable]:
        """Close ``x`` under the generators."""
        action = Action(action)
        start = self._normalize(x, action)
        seen = {start}
        queue = deque([start])
        while queue:
            current = queue.popleft()
            for code, table in zip(self._codes, self._tables):
                image = self._apply(code, table, current, action)
                if image not in seen:
                    seen.add(image)
                    queue.append(image)
        if action is Action.MAPPING:
            return {tuple(m) for m in seen}
        return seen

    def canonical_rep(self, x: Hashable, action: Action = Action.POINT) -> Hashable:
        """Minimum of the orbit of ``x``."""
        action = Action(action)
        if action is Action.POINT:
            return min(self.orbit(x, action))
        if action is Action.SET:
            return min(self.orbit(x, action), key=lambda s: (len(s), sorted(s)))
        return tuple(self.minimal_image(self._normalize(x, action)))

    def minimal_image(self, mapping: bytes) -> bytes:
        """Lexicographically least image of a mapping under the entry-wise action."""
        if not self._codes:
            return mapping
        if self.order() <= ENUMERATION_LIMIT:
            if self._element_tables is None:
                self._element_tables = [permutation_table(c) for c in self.chain.elements()]
            return min(mapping.translate(t) for t in self._element_tables)
        prefix = tuple(dict.fromkeys(mapping))
        chain = self._chain_for_base(prefix)
        acc = self.chain.identity
        for level in range(len(prefix)):
            transversal = chain.transversals[level]
            point = min(transversal, key=acc.__getitem__)
            acc = _mul(transversal[point], acc)
        return mapping.translate(permutation_table(acc))

    def _build_chain(self, base: Tuple[int, ...]) -> StabilizerChain:
        return StabilizerChain(self.degree, self._codes, base)

    def __repr__(self) -> str:
        return f"PermutationGroup(degree={self.degree}, order={self.order()})"


def _act_tasks(inverse_code: bytes, mapping: bytes) -> bytes:
    # entry at position h(i) is the old entry at i
    return bytes(mapping[j] for j in inverse_code)


@dataclass(frozen=True)
class ProductGroup:
    """Direct product of an architecture group and a task group acting on mappings."""

    arch: PermutationGroup
    tasks: PermutationGroup

    def order(self) -> int:
        return self.arch.order() * self.tasks.order()

    def act(self, g: Permutation, h: Permutation, mapping: Sequence[int]) -> Tuple[int, ...]:
        moved = bytes(mapping).translate(g.table)
        return tuple(_act_tasks(invert_code(h.code), moved))

    def elements(self) -> Iterator[Tuple[Permutation, Permutation]]:
        return itertools.product(self.arch.elements(), self.tasks.elements())

    def _check(self, mapping: Sequence[int]) -> bytes:
        if len(mapping) != self.tasks.degree:
            raise PointSetMismatch(
                f"Mapping of length {len(mapping)} does not fit {self.tasks.degree} tasks"
            )
        return self.arch._normalize(mapping, Action.MAPPING)

    def orbit(self, mapping: Sequence[int]) -> Set[Tuple[int, ...]]:
        start = self._check(mapping)
        arch_tables = self.arch._tables
        task_inverses = [invert_code(c) for c in self.tasks._codes]
        seen = {start}
        queue = deque([start])
        while queue:
            current = queue.popleft()
            images = [current.translate(t) for t in arch_tables]
            images.extend(_act_tasks(inv, current) for inv in task_inverses)
            for image in images:
                if image not in seen:
                    seen.add(image)
                    queue.append(image)
        return {tuple(m) for m in seen}

    def canonical_rep(self, mapping: Sequence[int]) -> Tuple[int, ...]:
        start = self._check(mapping)
        if self.tasks.is_trivial():
            return tuple(self.arch.minimal_image(start))
        task_inverses = self._task_inverses()
        return tuple(
            min(self.arch.minimal_image(_act_tasks(inv, start)) for inv in task_inverses)
        )

    def _task_inverses(self) -> List[bytes]:
        cached = self.__dict__.get("_task_inverse_cache")
        if cached is None:
            cached = [invert_code(code) for code in self.tasks.chain.elements()]
            object.__setattr__(self, "_task_inverse_cache", cached)
        return cached


def group_from_generators(generators: Sequence[Permutation], degree: Optional[int] = None) -> PermutationGroup:
    if degree is None:
        if not generators:
            raise ValueError("An empty generating set needs an explicit degree")
        degree = generators[0].degree
    return PermutationGroup(degree, generators)


def contains(group: PermutationGroup, p: Permutation) -> bool:
    return group.contains(p)


def order(group: PermutationGroup) -> int:
    return group.order()


def orbit(group: PermutationGroup, x: Hashable, action: Action = Action.POINT) -> Set[Hashable]:
    return group.orbit(x, action)


def canonical_rep(group: PermutationGroup, x: Hashable, action: Action = Action.POINT) -> Hashable:
    return group.canonical_rep(x, action)


def direct_product(arch: PermutationGroup, tasks: PermutationGroup) -> ProductGroup:
    return ProductGroup(arch, tasks)
