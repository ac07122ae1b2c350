"""Command-line interface orchestration for the symmetry-aware mapper."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from modules import archgraph, autos
from modules.archgraph import ArchitectureGraph, CanonicalLabeling, TopologyGraph
from modules.config import AppConfig, load_app_config
from modules.grp import PermutationGroup
from modules.isg import ClosureLimitExceeded
from modules.schemas import (
    ArchitectureDocument,
    GeneratorSetDocument,
    MappingDocument,
    RunConfigDocument,
    TaskGraphDocument,
    load_document,
    write_document,
)
from modules.workspace import Workspace

logger = logging.getLogger(__name__)

EXIT_INPUT_ERROR = 2
EXIT_CAP_EXCEEDED = 3

PRESETS: Dict[str, Callable[[], TopologyGraph]] = {
    "parallella": archgraph.parallella,
    "keystone": archgraph.keystone,
    "mesh2x2": lambda: archgraph.mesh(2, 2),
    "mesh3x3": lambda: archgraph.mesh(3, 3),
    "mesh4x4": lambda: archgraph.mesh(4, 4),
}

BANNER = "=" * 70

_log_handler: Optional[logging.Handler] = None


def configure_logging(level: str) -> None:
    """Install one stderr handler on the root logger, replacing an earlier one."""
    global _log_handler

    root = logging.getLogger()
    if _log_handler is not None:
        root.removeHandler(_log_handler)
    _log_handler = logging.StreamHandler(sys.stderr)
    _log_handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root.addHandler(_log_handler)
    root.setLevel(level.upper())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Symmetry-aware task mapping and sub-architecture exploration")
    parser.add_argument("--config", default="config.json", help="Configuration file (defaults apply when missing)")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    autos_parser = sub.add_parser("autos", help="Compute (partial) automorphism generators of an architecture")
    autos_parser.add_argument("architecture", help=f"Architecture JSON file or preset ({', '.join(PRESETS)})")
    autos_parser.add_argument("--mode", choices=["group", "semigroup"], default="group")
    autos_parser.add_argument(
        "--seed-group",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="Seed the partial-automorphism closure with the automorphism group (default from config)",
    )
    autos_parser.add_argument("--cache-dir", default=None, help="Generator cache directory")
    autos_parser.add_argument("--cap", type=int, default=None, help="Maximum closure size")
    autos_parser.add_argument("--output", default=None, help="Also write the generator set to this file")

    canon_parser = sub.add_parser("canon", help="Canonical representative and cache key of a mapping")
    canon_parser.add_argument("architecture")
    canon_parser.add_argument("taskgraph")
    canon_parser.add_argument("mapping")
    canon_parser.add_argument("--cache-dir", default=None)

    classes_parser = sub.add_parser("classes", help="Enumerate sub-architecture equivalence classes")
    classes_parser.add_argument("architecture")
    classes_parser.add_argument("--method", choices=["groups", "inv-semi", "brute-force"], default="groups")
    classes_parser.add_argument("--max-size", type=int, default=None)
    classes_parser.add_argument("--cache-dir", default=None)
    classes_parser.add_argument("--output", default=None, help="Write the representatives to this file")

    dse_parser = sub.add_parser("dse", help="Run a GA or sub-architecture exploration from a run configuration")
    dse_parser.add_argument("run_config")
    dse_parser.add_argument("--cache-dir", default=None)

    report_parser = sub.add_parser("report", help="Export plot data from a results summary as CSV")
    report_parser.add_argument("summary", help="A <name>.summary.json file written by dse")
    report_parser.add_argument("--output", default=None, help="CSV path (defaults next to the summary)")
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def run_cli(argv: Optional[Sequence[str]] = None, workspace: Optional[Workspace] = None) -> None:
    args = parse_args(argv)
    config = load_app_config(args.config)
    configure_logging("DEBUG" if args.verbose else config.log_level)

    if workspace is None:
        workspace = Workspace.from_config(config, cache_dir=getattr(args, "cache_dir", None))

    handlers = {
        "autos": _run_autos_mode,
        "canon": _run_canon_mode,
        "classes": _run_classes_mode,
        "dse": _run_dse_mode,
        "report": _run_report_mode,
    }
    try:
        handlers[args.command](args, config, workspace)
    except ClosureLimitExceeded as exc:
        print(f"❌ {exc}", file=sys.stderr)
        raise SystemExit(EXIT_CAP_EXCEEDED) from None
    except (ValueError, ValidationError, OSError) as exc:
        # json.JSONDecodeError is a ValueError
        print(f"❌ {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT_ERROR) from None


# ---- shared loading -------------------------------------------------------


def _load_topology(ref: str) -> Tuple[str, TopologyGraph]:
    if ref in PRESETS:
        return ref, PRESETS[ref]()
    document = load_document(ref, ArchitectureDocument)
    name = document.name or os.path.splitext(os.path.basename(ref))[0]
    return name, document.to_topology()


def _load_architecture(ref: str) -> Tuple[str, ArchitectureGraph]:
    name, topology = _load_topology(ref)
    return name, archgraph.derive_architecture_graph(topology)


def _group_generators(
    workspace: Workspace, graph: ArchitectureGraph, labeling: CanonicalLabeling
) -> GeneratorSetDocument:
    cached = workspace.load_generators(labeling, "group")
    if cached is not None:
        return cached
    started = time.perf_counter()
    group = autos.automorphism_group(graph)
    logger.info("Automorphism group of order %d in %.2fs", group.order(), time.perf_counter() - started)
    document = GeneratorSetDocument(
        mode="group",
        certificate=labeling.certificate.decode("utf-8"),
        degree=graph.n,
        generators=[list(g.image) for g in group.generators],
        order=str(group.order()),
    )
    workspace.save_generators(labeling, document)
    return document


def _architecture_group(workspace: Workspace, graph: ArchitectureGraph) -> PermutationGroup:
    labeling = archgraph.canonical_labeling(graph)
    document = _group_generators(workspace, graph, labeling)
    return PermutationGroup(graph.n, document.to_permutations())


def _semigroup_generators(
    workspace: Workspace,
    graph: ArchitectureGraph,
    labeling: CanonicalLabeling,
    seed_with_group: bool,
    cap: int,
) -> GeneratorSetDocument:
    cached = workspace.load_generators(labeling, "semigroup", seed_with_group)
    if cached is not None:
        return cached
    started = time.perf_counter()
    semigroup = autos.backtrack_semigroup(graph, seed_with_group=seed_with_group, cap=cap)
    logger.info("Partial automorphism closure of %d elements in %.2fs", semigroup.size, time.perf_counter() - started)
    document = GeneratorSetDocument(
        mode="semigroup",
        certificate=labeling.certificate.decode("utf-8"),
        degree=graph.n,
        seed_with_group=seed_with_group,
        partial_generators=[t.pairs() for t in semigroup.generators],
        elements=str(semigroup.size),
    )
    workspace.save_generators(labeling, document)
    return document


def _resolve_ref(ref: str, base_dir: str) -> str:
    if ref in PRESETS or os.path.isabs(ref):
        return ref
    candidate = os.path.join(base_dir, ref)
    return candidate if os.path.exists(candidate) else ref


def _load_run_config(path: str, config: AppConfig) -> RunConfigDocument:
    with open(path, "r", encoding="utf-8") as f:
        raw = json.load(f)
    if not isinstance(raw, dict):
        raise ValueError(f"Run configuration {path} must be a JSON object")
    raw["ga"] = {**config.ga.to_dict(), **raw.get("ga", {})}
    raw["subarch"] = {**config.subarch.to_dict(), **raw.get("subarch", {})}
    return RunConfigDocument.model_validate(raw)


# ---- commands ---------------------------------------------------------------


def _run_autos_mode(args: argparse.Namespace, config: AppConfig, workspace: Workspace) -> None:
    name, graph = _load_architecture(args.architecture)
    labeling = archgraph.canonical_labeling(graph)

    print(BANNER)
    print(f"🔷 AUTOMORPHISMS: {name} ({graph.n} PEs)")
    print(BANNER)
    print(f"mode: {args.mode}")

    if args.mode == "group":
        document = _group_generators(workspace, graph, labeling)
        print(f"generators: {len(document.generators)}")
        print(f"order: {document.order}")
    else:
        seed_with_group = config.symmetry.seed_with_group if args.seed_group is None else args.seed_group
        cap = args.cap if args.cap is not None else config.symmetry.closure_cap
        document = _semigroup_generators(workspace, graph, labeling, seed_with_group, cap)
        print(f"seeded with group: {'yes' if seed_with_group else 'no'}")
        print(f"generators: {len(document.partial_generators)}")
        print(f"elements: {document.elements}")

    if args.output:
        write_document(args.output, document)
        print(f"💾 Generators written to {args.output}")


def _run_canon_mode(args: argparse.Namespace, config: AppConfig, workspace: Workspace) -> None:
    from modules.mapping import MappingCanonicalizer, validate_mapping
    from modules.perm import PointSet

    _, graph = _load_architecture(args.architecture)
    task_document = load_document(args.taskgraph, TaskGraphDocument)
    task_graph = task_document.to_task_graph()
    symmetry = task_document.to_symmetry(task_graph)

    points = PointSet(graph.n)
    raw = load_document(args.mapping, MappingDocument).to_mapping(points)
    mapping = validate_mapping(raw, graph.n, task_graph.size)

    canonicalizer = MappingCanonicalizer(_architecture_group(workspace, graph), symmetry.group)
    canonical = canonicalizer.canonical(mapping)

    print(f"mapping:   {list(mapping)}")
    print(f"canonical: {list(canonical)}")
    print(f"names:     {' '.join(points.name(pe) for pe in canonical)}")
    print(f"key: {canonicalizer.key(mapping).hex()}")


def _run_classes_mode(args: argparse.Namespace, config: AppConfig, workspace: Workspace) -> None:
    from modules.dse.subarch import burnside_subset_classes, enumerate_subarch_classes

    name, graph = _load_architecture(args.architecture)
    group = None if args.method == "brute-force" else _architecture_group(workspace, graph)
    representatives = enumerate_subarch_classes(graph, args.method, group=group, max_size=args.max_size)

    counts: Dict[int, int] = {}
    for subset in representatives:
        counts[len(subset)] = counts.get(len(subset), 0) + 1

    print(BANNER)
    print(f"🧩 SUB-ARCHITECTURE CLASSES: {name} ({args.method})")
    print(BANNER)
    print(f"{'size':>6}  {'classes':>8}")
    for size in sorted(counts):
        print(f"{size:>6}  {counts[size]:>8}")
    print(f"total: {len(representatives)}")

    if group is not None and args.method == "groups":
        expected = burnside_subset_classes(group, args.max_size)
        marker = "✅" if expected == len(representatives) else "❌"
        print(f"burnside: {expected} {marker}")

    if args.output:
        write_document(
            args.output,
            {
                "architecture": name,
                "method": args.method,
                "max_size": args.max_size,
                "counts": {str(size): counts[size] for size in sorted(counts)},
                "representatives": [list(subset) for subset in representatives],
            },
        )
        print(f"💾 Representatives written to {args.output}")


def _run_dse_mode(args: argparse.Namespace, config: AppConfig, workspace: Workspace) -> None:
    from modules.dse import GAConfig, ga_explore, subarch_explore

    run = _load_run_config(args.run_config, config)
    base_dir = os.path.dirname(os.path.abspath(args.run_config))
    _, graph = _load_architecture(_resolve_ref(run.architecture, base_dir))
    task_document = load_document(_resolve_ref(run.taskgraph, base_dir), TaskGraphDocument)
    task_graph = task_document.to_task_graph()
    model = task_document.to_cost_model()

    print(BANNER)
    print(f"🚀 EXPLORATION: {run.name} ({run.mode})")
    print(BANNER)

    started = time.perf_counter()
    arch_group = _architecture_group(workspace, graph)
    if run.mode == "ga":
        symmetry = task_document.to_symmetry(task_graph)
        ga_cfg = GAConfig(seed=run.seed, **run.ga.model_dump())
        result = ga_explore(ga_cfg, task_graph, graph, arch_group, symmetry.group, model)
    else:
        result = subarch_explore(
            run.subarch.strategy,
            task_graph,
            graph,
            model,
            deadline=run.subarch.deadline,
            seed=run.seed,
            group=arch_group,
            max_size=run.subarch.max_size,
        )
    logger.info("Exploration %s finished in %.2fs", run.name, time.perf_counter() - started)

    trials_path, summary_path = workspace.write_results(run.name, result)
    summary = result.summary()
    counters = summary["counters"]
    print(f"trials: {counters['trials']}")
    print(f"evaluations: {counters['evaluations']}")
    print(f"cache hits: {counters['cache_hits']} (exact {counters['exact_hits']}, symmetry {counters['symmetry_hits']})")
    print(f"symmetry hits: {summary['symmetry_percent']:.2f}%")
    print(f"best cost: {summary['best_cost']}")
    if result.deadline is not None:
        print(f"deadline {result.deadline}: {'✅ met' if result.deadline_met else '⚠️  not met'}")
    print(f"💾 Trials written to {trials_path}")
    print(f"💾 Summary written to {summary_path}")


def _report_rows(workspace: Workspace, summary_path: str) -> List[Dict[str, Any]]:
    summary = workspace.load_summary(summary_path)
    if summary.mode != "ga":
        return [
            {
                "strategy": summary.mode,
                "size": stats.size,
                "trials": stats.trials,
                "trials_to_best": stats.trials_to_best,
                "best_cost": stats.best_cost,
                "deadline_met": stats.deadline_met,
            }
            for stats in summary.best_per_size
        ]

    import pandas as pd

    trials_path = summary_path[: -len(".summary.json")] + ".trials.jsonl"
    frame = pd.DataFrame([record.model_dump() for record in workspace.load_trials(trials_path)])
    per_generation = frame.groupby("generation").agg(
        trials=("index", "size"),
        cache_hits=("cache_hit", "sum"),
        exact_hits=("hit_kind", lambda kinds: int((kinds == "exact").sum())),
        symmetry_hits=("hit_kind", lambda kinds: int((kinds == "symmetry").sum())),
    )
    rows = []
    for generation, best in enumerate(summary.best_per_generation):
        stats = per_generation.loc[generation]
        rows.append(
            {
                "generation": generation,
                "best_cost": best,
                "evaluations": int(stats["trials"] - stats["cache_hits"]),
                "cache_hits": int(stats["cache_hits"]),
                "exact_hits": int(stats["exact_hits"]),
                "symmetry_hits": int(stats["symmetry_hits"]),
            }
        )
    return rows


def _run_report_mode(args: argparse.Namespace, config: AppConfig, workspace: Workspace) -> None:
    import pandas as pd

    if not args.summary.endswith(".summary.json"):
        raise ValueError(f"Expected a <name>.summary.json file, got {args.summary}")
    output = args.output or args.summary[: -len(".summary.json")] + ".csv"
    frame = pd.DataFrame(_report_rows(workspace, args.summary))
    directory = os.path.dirname(output)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(output, index=False, lineterminator="\n")
    print(f"📊 {len(frame)} rows written to {output}")
