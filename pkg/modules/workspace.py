"""
Workspace: cached generator sets and exploration result files.

Generator files are content-addressed by the canonical certificate of the
architecture graph, so a renamed or reordered architecture file still hits
the cache while a different graph never does. Generators are stored on
canonical positions and translated back to the caller's node numbering.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from .archgraph import CanonicalLabeling
from .config import AppConfig, resolve_cache_dir
from .dse.results import ExplorationResult
from .schemas import (
    GeneratorSetDocument,
    SummaryDocument,
    TrialRecordDocument,
    load_document,
    write_document,
    write_json_lines,
)

logger = logging.getLogger(__name__)


class StaleCacheEntry(ValueError):
    """A cache file whose stored certificate belongs to another graph."""


def _relabel(document: GeneratorSetDocument, forward: Sequence[int]) -> GeneratorSetDocument:
    """Conjugate every generator by the point renaming ``x -> forward[x]``."""
    generators = []
    for image in document.generators:
        relabeled = [0] * len(image)
        for x, y in enumerate(image):
            relabeled[forward[x]] = forward[y]
        generators.append(relabeled)
    partial = [sorted((forward[x], forward[y]) for x, y in pairs) for pairs in document.partial_generators]
    return document.model_copy(update={"generators": generators, "partial_generators": partial})


class Workspace:
    def __init__(self, root: str = ".", cache_dir: Optional[str] = None, results_dir: Optional[str] = None):
        self.root = os.path.abspath(root)
        self.cache_dir = self._under_root(cache_dir or os.path.join("cache", "generators"))
        self.results_dir = self._under_root(results_dir or "results")

    @classmethod
    def from_config(cls, config: AppConfig, cache_dir: Optional[str] = None) -> "Workspace":
        return cls(
            root=config.paths.workspace_dir,
            cache_dir=resolve_cache_dir(cache_dir, config),
            results_dir=config.paths.results_dir,
        )

    def _under_root(self, path: str) -> str:
        return path if os.path.isabs(path) else os.path.join(self.root, path)

    # ---- generator cache -------------------------------------------------

    def cache_path(self, certificate: bytes, mode: str, seed_with_group: bool = True) -> str:
        digest = hashlib.sha256(certificate).hexdigest()
        suffix = mode if mode == "group" else f"{mode}-{'seeded' if seed_with_group else 'plain'}"
        return os.path.join(self.cache_dir, f"{digest}.{suffix}.json")

    def _read_generators(self, path: str, certificate: bytes) -> GeneratorSetDocument:
        document = load_document(path, GeneratorSetDocument)
        if document.certificate != certificate.decode("utf-8"):
            raise StaleCacheEntry(f"Cached generators at {path} belong to a different graph")
        return document

    def load_generators(
        self, labeling: CanonicalLabeling, mode: str, seed_with_group: bool = True
    ) -> Optional[GeneratorSetDocument]:
        """Cached generator set in the graph's own numbering, or None when absent or unusable."""
        path = self.cache_path(labeling.certificate, mode, seed_with_group)
        if not os.path.exists(path):
            logger.debug("No cached generators at %s", path)
            return None
        try:
            document = self._read_generators(path, labeling.certificate)
        except StaleCacheEntry as exc:
            logger.warning("%s; recomputing", exc)
            return None
        except (ValidationError, json.JSONDecodeError) as exc:
            logger.warning("Unreadable cache entry %s (%s); recomputing", path, exc.__class__.__name__)
            return None
        logger.info("Generator cache hit: %s", os.path.basename(path))
        return _relabel(document, labeling.order)

    def save_generators(self, labeling: CanonicalLabeling, document: GeneratorSetDocument) -> str:
        """Store a generator set given in the graph's own numbering."""
        position = [0] * len(labeling.order)
        for i, node in enumerate(labeling.order):
            position[node] = i
        canonical = _relabel(document, position)
        path = self.cache_path(labeling.certificate, document.mode, document.seed_with_group)
        write_document(path, canonical)
        logger.info("Cached %d generators at %s", len(document.generators) + len(document.partial_generators), path)
        return path

    # ---- results ---------------------------------------------------------

    def result_paths(self, name: str) -> Tuple[str, str]:
        return (
            os.path.join(self.results_dir, f"{name}.trials.jsonl"),
            os.path.join(self.results_dir, f"{name}.summary.json"),
        )

    def write_results(self, name: str, result: ExplorationResult) -> Tuple[str, str]:
        trials_path, summary_path = self.result_paths(name)
        write_json_lines(trials_path, [record.to_dict() for record in result.records])
        summary = SummaryDocument.model_validate({"name": name, **result.summary()})
        write_document(summary_path, summary)
        return trials_path, summary_path

    def load_trials(self, path: str) -> List[TrialRecordDocument]:
        records = []
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    records.append(TrialRecordDocument.model_validate(json.loads(line)))
        return records

    def load_summary(self, path: str) -> SummaryDocument:
        return load_document(path, SummaryDocument)

    def describe(self) -> Dict[str, Any]:
        return {"root": self.root, "cache_dir": self.cache_dir, "results_dir": self.results_dir}
