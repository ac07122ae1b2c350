import json
import os
import sys

import pandas as pd
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from modules import autos
from modules.cli import EXIT_CAP_EXCEEDED, EXIT_INPUT_ERROR, run_cli
from modules.config import clear_cached_configs
from modules.workspace import Workspace

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


def data(*parts):
    return os.path.join(DATA_DIR, *parts)


@pytest.fixture
def workspace(tmp_path):
    clear_cached_configs()
    return Workspace(root=str(tmp_path / "ws"))


@pytest.fixture
def cli(tmp_path, workspace):
    """Runs the CLI against a missing config file so built-in defaults apply."""
    config = str(tmp_path / "no-config.json")

    def invoke(*argv):
        run_cli(["--config", config, *argv], workspace=workspace)

    return invoke


def output_value(text, prefix):
    for line in text.splitlines():
        if line.startswith(prefix):
            return line[len(prefix):].strip()
    raise AssertionError(f"No line starting with {prefix!r} in:\n{text}")


def test_autos_reports_the_parallella_group(cli, capsys):
    cli("autos", "parallella")
    out = capsys.readouterr().out
    assert "mode: group" in out
    assert output_value(out, "order:") == "8"


def test_autos_reports_the_keystone_group(cli, capsys):
    cli("autos", "keystone")
    assert output_value(capsys.readouterr().out, "order:") == "967680"


def test_autos_second_run_uses_the_cache(cli, capsys, monkeypatch):
    cli("autos", data("architectures", "mesh3x3.json"))
    capsys.readouterr()

    def fail(graph):
        raise AssertionError("automorphism group recomputed despite a cached entry")

    monkeypatch.setattr(autos, "automorphism_group", fail)
    cli("autos", data("architectures", "mesh3x3.json"))
    assert output_value(capsys.readouterr().out, "order:") == "8"


def test_autos_preset_and_file_share_a_cache_entry(cli, capsys, monkeypatch, workspace):
    cli("autos", "mesh2x2")
    monkeypatch.setattr(autos, "automorphism_group", lambda graph: pytest.fail("cache miss"))
    cli("autos", data("architectures", "mesh2x2.json"))
    assert len(os.listdir(workspace.cache_dir)) == 1


def test_autos_semigroup_mode(cli, capsys, tmp_path):
    output = str(tmp_path / "generators.json")
    cli("autos", "mesh2x2", "--mode", "semigroup", "--output", output)
    out = capsys.readouterr().out
    assert "seeded with group: yes" in out
    with open(output, "r", encoding="utf-8") as f:
        document = json.load(f)
    assert document["mode"] == "semigroup"
    assert document["elements"] == output_value(out, "elements:")


def test_autos_cap_exceeded_exits_with_code_3(cli, capsys):
    with pytest.raises(SystemExit) as excinfo:
        cli("autos", "mesh2x2", "--mode", "semigroup", "--cap", "3")
    assert excinfo.value.code == EXIT_CAP_EXCEEDED
    assert "3" in capsys.readouterr().err


def test_canon_keys_of_equivalent_mappings_match(cli, capsys):
    arch = data("architectures", "mesh2x2.json")
    taskgraph = data("taskgraphs", "audio_filter.json")
    cli("canon", arch, taskgraph, data("mappings", "m1.json"))
    first = capsys.readouterr().out
    cli("canon", arch, taskgraph, data("mappings", "pi_m1.json"))
    second = capsys.readouterr().out
    assert output_value(first, "key:") == output_value(second, "key:")
    assert output_value(first, "canonical:") == output_value(second, "canonical:")
    assert output_value(first, "mapping:") != output_value(second, "mapping:")
    assert output_value(first, "key:") == "0001010103030302"
    assert output_value(first, "canonical:") == "[0, 1, 1, 1, 3, 3, 3, 2]"


@pytest.mark.parametrize(
    "argv",
    [
        ("autos", "parallella"),
        ("autos", "mesh2x2", "--mode", "semigroup"),
        ("canon", data("architectures", "mesh2x2.json"), data("taskgraphs", "audio_filter.json"), data("mappings", "m1.json")),
        ("classes", "mesh3x3", "--method", "inv-semi", "--max-size", "4"),
        ("classes", data("architectures", "hetero_bus.json"), "--method", "groups"),
    ],
)
def test_repeated_runs_print_the_same_bytes(tmp_path, capsys, argv):
    clear_cached_configs()
    outputs = []
    for attempt in range(2):
        workspace = Workspace(root=str(tmp_path / f"ws{attempt}"))
        run_cli(["--config", str(tmp_path / "none.json"), *argv], workspace=workspace)
        outputs.append(capsys.readouterr().out.encode("utf-8"))
    assert outputs[0] == outputs[1]
    assert outputs[0]


def test_classes_on_3x3_mesh(cli, capsys, tmp_path):
    output = str(tmp_path / "classes.json")
    cli("classes", "mesh3x3", "--output", output)
    out = capsys.readouterr().out
    assert output_value(out, "total:") == "101"
    assert output_value(out, "burnside:") == "101 ✅"
    with open(output, "r", encoding="utf-8") as f:
        document = json.load(f)
    assert document["counts"]["2"] == 8
    assert len(document["representatives"]) == 101


def test_classes_with_semigroup_method(cli, capsys):
    cli("classes", "mesh3x3", "--method", "inv-semi", "--max-size", "2")
    out = capsys.readouterr().out
    assert output_value(out, "total:") == "5"
    assert "burnside" not in out


def test_dse_is_deterministic(tmp_path, capsys):
    clear_cached_configs()
    contents = []
    for attempt in range(2):
        workspace = Workspace(root=str(tmp_path / f"ws{attempt}"))
        run_cli(
            ["--config", str(tmp_path / "none.json"), "dse", data("runs", "ga_audio_filter.json")],
            workspace=workspace,
        )
        trials, summary = workspace.result_paths("ga_audio_filter")
        with open(trials, "rb") as f, open(summary, "rb") as g:
            contents.append((f.read(), g.read()))
    assert contents[0] == contents[1]
    out = capsys.readouterr().out
    assert "trials: 1020" in out


def test_dse_subarch_run_and_report(cli, capsys, workspace):
    cli("dse", data("runs", "subarch_hetero_bus.json"))
    _, summary_path = workspace.result_paths("subarch_hetero_bus")
    with open(summary_path, "r", encoding="utf-8") as f:
        summary = json.load(f)
    assert summary["mode"] == "inv-semi"
    assert summary["best_per_size"][0]["trials"] == 2

    cli("report", summary_path)
    frame = pd.read_csv(summary_path[: -len(".summary.json")] + ".csv")
    assert list(frame.columns) == ["strategy", "size", "trials", "trials_to_best", "best_cost", "deadline_met"]
    assert frame["size"].tolist() == list(range(1, 9))


def test_report_for_a_ga_run(cli, capsys, workspace, tmp_path):
    cli("dse", data("runs", "ga_audio_filter.json"))
    _, summary_path = workspace.result_paths("ga_audio_filter")
    output = str(tmp_path / "report.csv")
    cli("report", summary_path, "--output", output)
    frame = pd.read_csv(output)
    assert len(frame) == 51
    assert (frame["evaluations"] + frame["cache_hits"]).tolist() == [20] * 51
    assert frame["best_cost"].is_monotonic_decreasing


def test_missing_file_exits_with_code_2(cli, capsys):
    with pytest.raises(SystemExit) as excinfo:
        cli("autos", "does-not-exist.json")
    assert excinfo.value.code == EXIT_INPUT_ERROR
    assert "❌" in capsys.readouterr().err


def test_invalid_mapping_exits_with_code_2(cli, tmp_path):
    mapping = tmp_path / "bad.json"
    mapping.write_text(json.dumps({"mapping": ["PE_9"] * 8}), encoding="utf-8")
    with pytest.raises(SystemExit) as excinfo:
        cli("canon", data("architectures", "mesh2x2.json"), data("taskgraphs", "audio_filter.json"), str(mapping))
    assert excinfo.value.code == EXIT_INPUT_ERROR


def test_malformed_json_exits_with_code_2(cli, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(SystemExit) as excinfo:
        cli("dse", str(broken))
    assert excinfo.value.code == EXIT_INPUT_ERROR


def test_report_rejects_other_files(cli):
    with pytest.raises(SystemExit) as excinfo:
        cli("report", data("runs", "ga_mjpeg.json"))
    assert excinfo.value.code == EXIT_INPUT_ERROR


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
