"""Trial records and exploration results."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

HIT_EXACT = "exact"
HIT_SYMMETRY = "symmetry"


@dataclass
class TrialRecord:
    index: int
    mapping: Tuple[int, ...]
    cost: int
    cache_hit: bool = False
    hit_kind: Optional[str] = None
    generation: Optional[int] = None
    size: Optional[int] = None
    subarch: Optional[Tuple[int, ...]] = None

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["mapping"] = list(self.mapping)
        data["subarch"] = None if self.subarch is None else list(self.subarch)
        return data


@dataclass
class SizeStats:
    size: int
    trials: int = 0
    trials_to_best: int = 0
    best_cost: Optional[int] = None
    best_subarch: Optional[Tuple[int, ...]] = None
    best_mapping: Optional[Tuple[int, ...]] = None
    deadline_met: bool = False

    def offer(self, record: TrialRecord, deadline: Optional[int]) -> None:
        self.trials += 1
        if self.best_cost is None or record.cost < self.best_cost:
            self.best_cost = record.cost
            self.best_subarch = record.subarch
            self.best_mapping = record.mapping
            self.trials_to_best = self.trials
        self.deadline_met = deadline is not None and self.best_cost <= deadline

    def to_dict(self) -> Dict[str, Any]:
        return {
            "size": self.size,
            "trials": self.trials,
            "trials_to_best": self.trials_to_best,
            "best_cost": self.best_cost,
            "best_subarch": None if self.best_subarch is None else list(self.best_subarch),
            "best_mapping": None if self.best_mapping is None else list(self.best_mapping),
            "deadline_met": self.deadline_met,
        }


@dataclass
class ExplorationResult:
    """Everything one exploration run produced."""

    mode: str
    records: List[TrialRecord] = field(default_factory=list)
    best_per_size: Dict[int, SizeStats] = field(default_factory=dict)
    best_per_generation: List[int] = field(default_factory=list)
    evaluations: int = 0
    audits: int = 0
    deadline: Optional[int] = None
    deadline_met: Optional[bool] = None

    @property
    def cache_hits(self) -> int:
        return sum(1 for r in self.records if r.cache_hit)

    @property
    def exact_hits(self) -> int:
        return sum(1 for r in self.records if r.hit_kind == HIT_EXACT)

    @property
    def symmetry_hits(self) -> int:
        return sum(1 for r in self.records if r.hit_kind == HIT_SYMMETRY)

    @property
    def symmetry_hit_rate(self) -> float:
        return self.symmetry_hits / len(self.records) if self.records else 0.0

    @property
    def best_cost(self) -> Optional[int]:
        costs = [r.cost for r in self.records]
        return min(costs) if costs else None

    def counters(self) -> Dict[str, int]:
        return {
            "trials": len(self.records),
            "evaluations": self.evaluations,
            "cache_hits": self.cache_hits,
            "exact_hits": self.exact_hits,
            "symmetry_hits": self.symmetry_hits,
            "audits": self.audits,
        }

    def check_counters(self) -> None:
        counters = self.counters()
        if counters["trials"] != counters["evaluations"] + counters["cache_hits"]:
            raise RuntimeError(f"Inconsistent counters: {counters}")
        if counters["cache_hits"] != counters["exact_hits"] + counters["symmetry_hits"]:
            raise RuntimeError(f"Inconsistent hit breakdown: {counters}")

    def summary(self) -> Dict[str, Any]:
        trials = len(self.records)
        return {
            "mode": self.mode,
            "counters": self.counters(),
            "cached_percent": round(100.0 * self.cache_hits / trials, 4) if trials else 0.0,
            "symmetry_percent": round(100.0 * self.symmetry_hits / trials, 4) if trials else 0.0,
            "best_cost": self.best_cost,
            "best_per_generation": list(self.best_per_generation),
            "best_per_size": [self.best_per_size[s].to_dict() for s in sorted(self.best_per_size)],
            "deadline": self.deadline,
            "deadline_met": self.deadline_met,
        }
