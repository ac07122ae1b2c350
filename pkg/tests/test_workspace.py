"""Unit tests for the generator cache, result files and document schemas"""
import json
import logging
import os
import sys

import numpy as np
import pytest
from pydantic import ValidationError

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from modules.archgraph import canonical_labeling, derive_architecture_graph, mesh
from modules.autos import automorphism_group, backtrack_semigroup, is_partial_automorphism
from modules.dse.genetic import GAConfig, ga_explore
from modules.grp import PermutationGroup
from modules.perm import Permutation, PointSet
from modules.schemas import (
    ArchitectureDocument,
    GeneratorSetDocument,
    MappingDocument,
    RunConfigDocument,
    TaskGraphDocument,
    load_document,
)
from modules.workspace import Workspace


def group_document(graph):
    group = automorphism_group(graph)
    return GeneratorSetDocument(
        mode="group",
        certificate=canonical_labeling(graph).certificate.decode("utf-8"),
        degree=graph.n,
        generators=[list(g.image) for g in group.generators],
        order=str(group.order()),
    )


@pytest.fixture
def workspace(tmp_path):
    return Workspace(root=str(tmp_path))


class TestGeneratorCache:
    """Content-addressed generator files"""

    def test_round_trip_in_the_same_numbering(self, workspace):
        graph = derive_architecture_graph(mesh(2, 3))
        labeling = canonical_labeling(graph)
        document = group_document(graph)
        path = workspace.save_generators(labeling, document)
        assert os.path.dirname(path) == workspace.cache_dir
        loaded = workspace.load_generators(labeling, "group")
        assert PermutationGroup(6, loaded.to_permutations()).order() == 4
        for g in loaded.to_permutations():
            assert is_partial_automorphism(g.to_partial(), graph)

    def test_reordered_graph_reuses_the_entry(self, workspace):
        graph = derive_architecture_graph(mesh(2, 3))
        workspace.save_generators(canonical_labeling(graph), group_document(graph))
        sigma = Permutation.from_image(np.random.default_rng(3).permutation(6).tolist())
        reordered = graph.relabel(sigma)
        loaded = workspace.load_generators(canonical_labeling(reordered), "group")
        assert loaded is not None
        for g in loaded.to_permutations():
            assert is_partial_automorphism(g.to_partial(), reordered)
        assert PermutationGroup(6, loaded.to_permutations()).order() == 4

    def test_semigroup_entries_are_relabeled_too(self, workspace, mesh2x2_graph):
        semigroup = backtrack_semigroup(mesh2x2_graph)
        labeling = canonical_labeling(mesh2x2_graph)
        document = GeneratorSetDocument(
            mode="semigroup",
            certificate=labeling.certificate.decode("utf-8"),
            degree=4,
            partial_generators=[t.pairs() for t in semigroup.generators],
            elements=str(semigroup.size),
        )
        workspace.save_generators(labeling, document)
        reordered = mesh2x2_graph.relabel(Permutation.from_image([3, 0, 2, 1]))
        loaded = workspace.load_generators(canonical_labeling(reordered), "semigroup")
        for t in loaded.to_partial_permutations():
            assert is_partial_automorphism(t, reordered)
        assert workspace.load_generators(canonical_labeling(reordered), "semigroup", seed_with_group=False) is None

    def test_different_graph_misses(self, workspace):
        graph = derive_architecture_graph(mesh(2, 3))
        workspace.save_generators(canonical_labeling(graph), group_document(graph))
        assert workspace.load_generators(canonical_labeling(derive_architecture_graph(mesh(1, 6))), "group") is None

    def test_stale_entry_is_ignored(self, workspace, caplog):
        graph = derive_architecture_graph(mesh(2, 3))
        labeling = canonical_labeling(graph)
        document = group_document(graph).model_copy(update={"certificate": "something else"})
        path = workspace.cache_path(labeling.certificate, "group")
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(document.model_dump_json())
        with caplog.at_level(logging.WARNING):
            assert workspace.load_generators(labeling, "group") is None
        assert "recomputing" in caplog.text

    def test_corrupt_entry_is_ignored(self, workspace):
        graph = derive_architecture_graph(mesh(2, 2))
        labeling = canonical_labeling(graph)
        path = workspace.cache_path(labeling.certificate, "group")
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write("{not json")
        assert workspace.load_generators(labeling, "group") is None


class TestResults:
    """Trial logs and summaries"""

    def test_write_and_read_back(self, workspace, taskgraph_documents, mesh2x2_graph):
        document = taskgraph_documents["sobel"]
        task_graph = document.to_task_graph()
        result = ga_explore(
            GAConfig(population=6, children=6, generations=3),
            task_graph,
            mesh2x2_graph,
            automorphism_group(mesh2x2_graph),
            document.to_symmetry(task_graph).group,
            document.to_cost_model(),
        )
        trials_path, summary_path = workspace.write_results("sobel_run", result)
        assert trials_path.endswith("sobel_run.trials.jsonl")
        trials = workspace.load_trials(trials_path)
        assert len(trials) == 24
        assert [t.cost for t in trials] == [r.cost for r in result.records]
        summary = workspace.load_summary(summary_path)
        assert summary.name == "sobel_run"
        assert summary.mode == "ga"
        assert summary.counters["trials"] == 24
        assert summary.best_cost == result.best_cost

    def test_summary_bytes_are_stable(self, workspace, taskgraph_documents, mesh2x2_graph):
        document = taskgraph_documents["matmult"]
        task_graph = document.to_task_graph()
        args = (
            task_graph,
            mesh2x2_graph,
            automorphism_group(mesh2x2_graph),
            document.to_symmetry(task_graph).group,
            document.to_cost_model(),
        )
        contents = []
        for _ in range(2):
            _, summary_path = workspace.write_results("repeat", ga_explore(GAConfig(generations=4), *args))
            with open(summary_path, "rb") as f:
                contents.append(f.read())
        assert contents[0] == contents[1]
        assert json.loads(contents[0])["name"] == "repeat"


class TestSchemas:
    """Input document validation"""

    def test_bundled_documents_load(self, data_dir):
        for name in ("mesh2x2", "mesh3x3", "hetero_bus"):
            load_document(os.path.join(data_dir, "architectures", f"{name}.json"), ArchitectureDocument).to_topology()
        for name in ("ga_audio_filter", "ga_mjpeg", "subarch_hetero_bus", "subarch_parallella"):
            load_document(os.path.join(data_dir, "runs", f"{name}.json"), RunConfigDocument)

    def test_channel_aliases(self):
        document = TaskGraphDocument.model_validate(
            {"tasks": [{"index": 0, "name": "a"}, {"index": 1, "name": "b"}], "channels": [{"from": 0, "to": 1, "volume": 3}]}
        )
        assert document.to_task_graph().channels[0].volume == 3

    def test_gapped_indices_are_rejected(self):
        document = ArchitectureDocument.model_validate({"nodes": [{"index": 0, "type": "A"}, {"index": 2, "type": "A"}]})
        with pytest.raises(ValueError):
            document.to_topology()

    def test_invalid_values_are_rejected(self):
        with pytest.raises(ValidationError):
            ArchitectureDocument.model_validate({"nodes": []})
        with pytest.raises(ValidationError):
            RunConfigDocument.model_validate({"name": "x", "architecture": "a", "taskgraph": "t", "mode": "anneal"})
        with pytest.raises(ValidationError):
            RunConfigDocument.model_validate(
                {"name": "x", "architecture": "a", "taskgraph": "t", "mode": "ga", "ga": {"symmetry_scope": "all"}}
            )

    def test_mapping_entries_accept_names_and_indices(self):
        document = MappingDocument.model_validate({"mapping": ["PE_2", 0, "PE_4"]})
        assert document.to_mapping(PointSet(4)) == (1, 0, 3)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
