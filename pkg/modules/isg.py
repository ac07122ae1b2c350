"""
Inverse semigroups of partial permutations.

The closure of a generating set is enumerated with a hashed worklist: every
element is multiplied on the right by every generator and generator inverse
exactly once. Adding generators later only multiplies the old elements by the
new generators, so the closure can grow incrementally during a search.
"""
from __future__ import annotations

import logging
from collections import deque
from typing import FrozenSet, Iterable, Iterator, List, Optional, Set, Union

from .perm import UNDEFINED, PartialPermutation, PointSetMismatch, invert_code, partial_table

logger = logging.getLogger(__name__)

DEFAULT_CAP = 5_000_000


class ClosureLimitExceeded(RuntimeError):
    """The closure needs more elements than the configured cap allows."""

    def __init__(self, cap: int):
        super().__init__(f"Inverse-semigroup closure exceeded the cap of {cap} elements")
        self.cap = cap


class InverseSemigroup:
    """Generating set plus the enumerated closure."""

    def __init__(self, degree: int, generators: Iterable[PartialPermutation] = (), cap: int = DEFAULT_CAP):
        if cap < 1:
            raise ValueError("Closure cap must be positive")
        self.degree = degree
        self.cap = cap
        self.generators: List[PartialPermutation] = []
        self._elements: Set[bytes] = set()
        self._order: List[bytes] = []
        self._tables: List[bytes] = []
        self._table_codes: List[bytes] = []
        self._capped = False
        self.add_generators(generators)

    @property
    def size(self) -> int:
        return len(self._order)

    def __len__(self) -> int:
        return len(self._order)

    def _insert(self, code: bytes, queue: deque) -> None:
        if code in self._elements:
            return
        if len(self._order) >= self.cap:
            self._capped = True
            raise ClosureLimitExceeded(self.cap)
        self._elements.add(code)
        self._order.append(code)
        queue.append(code)

    def add_generators(self, generators: Iterable[PartialPermutation]) -> None:
        for generator in generators:
            self.add_generator(generator)

    def add_generator(self, generator: PartialPermutation) -> None:
        if generator.degree != self.degree:
            raise PointSetMismatch(
                f"Generator on {generator.degree} points does not fit a semigroup on {self.degree} points"
            )
        if self._capped:
            raise ClosureLimitExceeded(self.cap)
        self.generators.append(generator)
        inverse = invert_code(generator.code)
        new_codes = [c for c in dict.fromkeys((generator.code, inverse)) if c not in self._table_codes]
        if not new_codes:
            return
        new_tables = [partial_table(c) for c in new_codes]

        queue: deque = deque()
        old_count = len(self._order)
        for index in range(old_count):
            element = self._order[index]
            for table in new_tables:
                self._insert(element.translate(table), queue)
        for code in new_codes:
            self._insert(code, queue)

        self._table_codes.extend(new_codes)
        self._tables.extend(new_tables)
        tables = self._tables
        while queue:
            element = queue.popleft()
            for table in tables:
                self._insert(element.translate(table), queue)
        logger.debug("Closure grew from %d to %d elements", old_count, len(self._order))

    def contains(self, t: PartialPermutation) -> bool:
        if t.degree != self.degree:
            raise PointSetMismatch(
                f"Partial permutation on {t.degree} points tested against a semigroup on {self.degree} points"
            )
        if self._capped:
            raise ClosureLimitExceeded(self.cap)
        return t.code in self._elements

    __contains__ = contains

    def contains_code(self, code: bytes) -> bool:
        if self._capped:
            raise ClosureLimitExceeded(self.cap)
        return code in self._elements

    def iter_elements(self) -> Iterator[PartialPermutation]:
        for code in self._order:
            yield PartialPermutation._trusted(code)

    def element_codes(self) -> FrozenSet[bytes]:
        return frozenset(self._elements)

    def idempotents(self) -> List[PartialPermutation]:
        return [
            PartialPermutation._trusted(code)
            for code in self._order
            if all(y == UNDEFINED or y == x for x, y in enumerate(code))
        ]

    def full_domain_elements(self) -> List[PartialPermutation]:
        return [PartialPermutation._trusted(c) for c in self._order if UNDEFINED not in c]

    def orbit(self, x: Union[int, Iterable[int]]) -> Set:
        """Points or subsets reachable through generators and their inverses.

        A subset moves under an element only when it lies inside the element's domain.
        """
        if isinstance(x, int):
            if not 0 <= x < self.degree:
                raise PointSetMismatch(f"Point {x} is outside 0..{self.degree - 1}")
            start = x

            def step(code: bytes, point: int):
                image = code[point]
                return None if image == UNDEFINED else image
        else:
            start = frozenset(x)
            if any(not 0 <= p < self.degree for p in start):
                raise PointSetMismatch(f"Subset {sorted(start)} is outside 0..{self.degree - 1}")

            def step(code: bytes, subset: FrozenSet[int]):
                images = [code[p] for p in subset]
                if UNDEFINED in images:
                    return None
                return frozenset(images)

        seen = {start}
        queue = deque([start])
        while queue:
            current = queue.popleft()
            for code in self._table_codes:
                image = step(code, current)
                if image is not None and image not in seen:
                    seen.add(image)
                    queue.append(image)
        return seen

    def __repr__(self) -> str:
        return f"InverseSemigroup(degree={self.degree}, generators={len(self.generators)}, size={self.size})"


def isg_from_generators(
    generators: Iterable[PartialPermutation], cap: int = DEFAULT_CAP, degree: Optional[int] = None
) -> InverseSemigroup:
    generators = list(generators)
    if degree is None:
        if not generators:
            raise ValueError("An empty generating set needs an explicit degree")
        degree = generators[0].degree
    return InverseSemigroup(degree, generators, cap)


def isg_contains(semigroup: InverseSemigroup, t: PartialPermutation) -> bool:
    return semigroup.contains(t)


def isg_orbit(semigroup: InverseSemigroup, x: Union[int, Iterable[int]]) -> Set:
    return semigroup.orbit(x)
