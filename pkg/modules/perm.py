"""
Permutation algebra - total and partial permutations on a finite point set.

Both element types are stored as byte strings: position ``x`` holds the image
of point ``x``. Partial permutations mark points outside their domain with
``UNDEFINED``. Composition is applied left to right everywhere in the project:
``compose(p, q)(x) == q(p(x))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

UNDEFINED = 0xFF
MAX_POINTS = 255

_PARTIAL_TAIL = bytes([UNDEFINED]) * 256


class PointSetMismatch(ValueError):
    """Raised when operands live on different point sets or an image array is invalid."""


def permutation_table(code: bytes) -> bytes:
    """Extend a permutation code to a 256-entry translation table (identity beyond the degree)."""
    return code + bytes(range(len(code), 256))


def partial_table(code: bytes) -> bytes:
    """Extend a partial permutation code to a 256-entry table (undefined beyond the degree)."""
    return code + _PARTIAL_TAIL[len(code):]


def invert_code(code: bytes) -> bytes:
    """Invert a permutation or partial permutation code."""
    inverse = bytearray([UNDEFINED]) * len(code)
    for point, image in enumerate(code):
        if image != UNDEFINED:
            inverse[image] = point
    return bytes(inverse)


def _check_degree(degree: int) -> None:
    if degree < 0 or degree > MAX_POINTS:
        raise PointSetMismatch(f"Point sets support 0..{MAX_POINTS} points, got {degree}")


@dataclass(frozen=True)
class PointSet:
    """A finite point set 0..size-1 with optional display names."""

    size: int
    names: Optional[Tuple[str, ...]] = None

    def __post_init__(self) -> None:
        if self.size < 1:
            raise PointSetMismatch("A point set needs at least one point")
        _check_degree(self.size)
        if self.names is not None:
            if len(self.names) != self.size:
                raise PointSetMismatch(
                    f"Expected {self.size} display names, got {len(self.names)}"
                )
            if len(set(self.names)) != len(self.names):
                raise PointSetMismatch("Display names must be unique")

    @property
    def points(self) -> range:
        return range(self.size)

    def name(self, index: int) -> str:
        """Display name of a point (``PE_1`` style, 1-based, unless names were given)."""
        if not 0 <= index < self.size:
            raise PointSetMismatch(f"Point {index} is outside 0..{self.size - 1}")
        if self.names is not None:
            return self.names[index]
        return f"PE_{index + 1}"

    def index(self, name: str) -> int:
        if self.names is not None:
            try:
                return self.names.index(name)
            except ValueError:
                raise PointSetMismatch(f"Unknown point name: {name}") from None
        prefix, _, number = name.partition("_")
        if prefix != "PE" or not number.isdigit() or not 1 <= int(number) <= self.size:
            raise PointSetMismatch(f"Unknown point name: {name}")
        return int(number) - 1


@dataclass(frozen=True)
class Permutation:
    """A bijection on 0..n-1."""

    code: bytes

    def __post_init__(self) -> None:
        _check_degree(len(self.code))
        if sorted(self.code) != list(range(len(self.code))):
            raise PointSetMismatch(f"Image {list(self.code)} is not a bijection")

    @classmethod
    def _trusted(cls, code: bytes) -> "Permutation":
        obj = object.__new__(cls)
        object.__setattr__(obj, "code", code)
        return obj

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        _check_degree(degree)
        return cls._trusted(bytes(range(degree)))

    @classmethod
    def from_image(cls, image: Sequence[int]) -> "Permutation":
        try:
            return cls(bytes(image))
        except ValueError as exc:
            raise PointSetMismatch(f"Invalid permutation image {list(image)}: {exc}") from None

    @classmethod
    def from_cycles(
        cls, degree: int, cycles: Iterable[Sequence[int]], *, one_based: bool = False
    ) -> "Permutation":
        """Build a permutation from disjoint cycles, e.g. ``[(0, 1), (2, 3)]``."""
        image = list(range(degree))
        offset = 1 if one_based else 0
        for cycle in cycles:
            points = [p - offset for p in cycle]
            for position, point in enumerate(points):
                if not 0 <= point < degree:
                    raise PointSetMismatch(f"Cycle point {point + offset} is out of range")
                image[point] = points[(position + 1) % len(points)]
        return cls.from_image(image)

    @property
    def degree(self) -> int:
        return len(self.code)

    @property
    def image(self) -> Tuple[int, ...]:
        return tuple(self.code)

    @cached_property
    def table(self) -> bytes:
        return permutation_table(self.code)

    def __call__(self, point: int) -> int:
        return self.code[point]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def inverse(self) -> "Permutation":
        return Permutation._trusted(invert_code(self.code))

    def power(self, exponent: int) -> "Permutation":
        base = self if exponent >= 0 else self.inverse()
        result = Permutation.identity(self.degree)
        for _ in range(abs(exponent)):
            result = compose(result, base)
        return result

    def is_identity(self) -> bool:
        return self.code == bytes(range(self.degree))

    def support(self) -> Tuple[int, ...]:
        return tuple(x for x, y in enumerate(self.code) if x != y)

    def cycles(self) -> List[Tuple[int, ...]]:
        """Non-trivial cycles in order of their smallest point."""
        seen = set()
        result = []
        for start in range(self.degree):
            if start in seen or self.code[start] == start:
                continue
            cycle = [start]
            seen.add(start)
            point = self.code[start]
            while point != start:
                cycle.append(point)
                seen.add(point)
                point = self.code[point]
            result.append(tuple(cycle))
        return result

    def to_partial(self) -> "PartialPermutation":
        return PartialPermutation._trusted(self.code)

    def __repr__(self) -> str:
        return f"Permutation({list(self.code)})"


@dataclass(frozen=True)
class PartialPermutation:
    """An injective map from a subset of 0..n-1 into 0..n-1."""

    code: bytes

    def __post_init__(self) -> None:
        _check_degree(len(self.code))
        defined = [y for y in self.code if y != UNDEFINED]
        if any(y >= len(self.code) for y in defined):
            raise PointSetMismatch("Partial permutation maps outside its point set")
        if len(set(defined)) != len(defined):
            raise PointSetMismatch("Partial permutation is not injective")

    @classmethod
    def _trusted(cls, code: bytes) -> "PartialPermutation":
        obj = object.__new__(cls)
        object.__setattr__(obj, "code", code)
        return obj

    @classmethod
    def empty(cls, degree: int) -> "PartialPermutation":
        _check_degree(degree)
        return cls._trusted(bytes([UNDEFINED]) * degree)

    @classmethod
    def from_pairs(cls, degree: int, pairs: Iterable[Sequence[int]]) -> "PartialPermutation":
        code = bytearray([UNDEFINED]) * degree
        for source, target in pairs:
            if not (0 <= source < degree and 0 <= target < degree):
                raise PointSetMismatch(f"Pair ({source}, {target}) is outside 0..{degree - 1}")
            if code[source] != UNDEFINED:
                raise PointSetMismatch(f"Point {source} is mapped twice")
            code[source] = target
        return cls(bytes(code))

    @classmethod
    def from_permutation(cls, permutation: Permutation) -> "PartialPermutation":
        return permutation.to_partial()

    @property
    def degree(self) -> int:
        return len(self.code)

    @cached_property
    def table(self) -> bytes:
        return partial_table(self.code)

    def __call__(self, point: int) -> Optional[int]:
        image = self.code[point]
        return None if image == UNDEFINED else image

    def __mul__(self, other: "PartialPermutation") -> "PartialPermutation":
        return compose_partial(self, other)

    def domain(self) -> Tuple[int, ...]:
        return tuple(x for x, y in enumerate(self.code) if y != UNDEFINED)

    def image(self) -> Tuple[int, ...]:
        return tuple(sorted(y for y in self.code if y != UNDEFINED))

    def pairs(self) -> List[Tuple[int, int]]:
        return [(x, y) for x, y in enumerate(self.code) if y != UNDEFINED]

    @property
    def rank(self) -> int:
        return self.degree - self.code.count(UNDEFINED)

    def is_empty(self) -> bool:
        return self.rank == 0

    def is_total(self) -> bool:
        return UNDEFINED not in self.code

    def to_permutation(self) -> Permutation:
        if not self.is_total():
            raise PointSetMismatch("Only a full-domain partial permutation is a permutation")
        return Permutation._trusted(self.code)

    def restrict(self, subset: Iterable[int]) -> "PartialPermutation":
        keep = set(subset)
        return PartialPermutation._trusted(
            bytes(y if x in keep else UNDEFINED for x, y in enumerate(self.code))
        )

    def inverse(self) -> "PartialPermutation":
        return inverse_partial(self)

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(self.pairs())

    def __repr__(self) -> str:
        return f"PartialPermutation({self.pairs()})"


PermutationLike = Union[Permutation, PartialPermutation]


def _require_same_degree(a: PermutationLike, b: PermutationLike) -> None:
    if a.degree != b.degree:
        raise PointSetMismatch(
            f"Operands act on different point sets ({a.degree} vs {b.degree} points)"
        )


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Return ``x -> q(p(x))``."""
    _require_same_degree(p, q)
    return Permutation._trusted(p.code.translate(q.table))


def inverse(p: Permutation) -> Permutation:
    return p.inverse()


def compose_partial(f: PartialPermutation, g: PartialPermutation) -> PartialPermutation:
    """Return ``x -> g(f(x))`` defined on ``{x in dom(f) | f(x) in dom(g)}``."""
    _require_same_degree(f, g)
    return PartialPermutation._trusted(f.code.translate(g.table))


def inverse_partial(t: PartialPermutation) -> PartialPermutation:
    return PartialPermutation._trusted(invert_code(t.code))


def partial_identity(points: Union[PointSet, int], subset: Iterable[int]) -> PartialPermutation:
    degree = points.size if isinstance(points, PointSet) else points
    return PartialPermutation.from_pairs(degree, ((x, x) for x in sorted(set(subset))))


def is_idempotent(t: PartialPermutation) -> bool:
    return all(y == UNDEFINED or y == x for x, y in enumerate(t.code))
