"""Symmetry-aware mapping modules."""

__version__ = "0.1.0"

__all__ = [
    "Permutation",
    "PartialPermutation",
    "PermutationGroup",
    "InverseSemigroup",
    "ArchitectureGraph",
    "TaskGraph",
    "Workspace",
]


def __getattr__(name):  # pragma: no cover - thin convenience wrapper
    if name == "Permutation":
        from .perm import Permutation

        return Permutation
    if name == "PartialPermutation":
        from .perm import PartialPermutation

        return PartialPermutation
    if name == "PermutationGroup":
        from .grp import PermutationGroup

        return PermutationGroup
    if name == "InverseSemigroup":
        from .isg import InverseSemigroup

        return InverseSemigroup
    if name == "ArchitectureGraph":
        from .archgraph import ArchitectureGraph

        return ArchitectureGraph
    if name == "TaskGraph":
        from .mapping import TaskGraph

        return TaskGraph
    if name == "Workspace":
        from .workspace import Workspace

        return Workspace
    raise AttributeError(name)
