import json
import subprocess
import sys

import numpy as np
import pytest

from bittables.cli import main
from bittables.table import entries_from_csv

import oracles


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_sample_ct_json_payload(capsys):
    code, out = run_cli(
        capsys, "sample-ct", "--rows", "3,4", "--cols", "2,5", "--samples", "2",
        "--seed", "9", "--validate",
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 2
    for t, line in enumerate(lines):
        obj = json.loads(line)
        assert obj["schema"] == 1 and obj["command"] == "sample-ct"
        assert obj["index"] == t and obj["seed"] == 9
        assert obj["valid"] is True
        assert np.asarray(obj["entries"]).sum() == 7


def test_repeated_runs_are_byte_identical(capsys):
    argv = [
        "sample-ct", "--rows", "4,6,2", "--cols", "5,3,4", "--samples", "3",
        "--seed", "123", "--retain-levels",
    ]
    _, first = run_cli(capsys, *argv)
    _, second = run_cli(capsys, *argv)
    assert first == second
    argv2 = ["sample-latin", "--n", "5", "--samples", "2", "--seed", "4"]
    _, a = run_cli(capsys, *argv2)
    _, b = run_cli(capsys, *argv2)
    assert a == b


def test_mask_flag_forces_zeros(capsys):
    code, out = run_cli(
        capsys, "sample-ct", "--rows", "3,3", "--cols", "3,3",
        "--mask", "0,1", "--samples", "4", "--seed", "2", "--validate",
    )
    assert code == 0
    for line in out.strip().split("\n"):
        obj = json.loads(line)
        assert obj["mask"] == [[0, 1]]
        assert obj["entries"][0][1] == 0 and obj["valid"]


def test_csv_format_round_trips(capsys):
    code, out = run_cli(
        capsys, "sample-binary", "--rows", "2,1,1", "--cols", "1,2,1",
        "--samples", "2", "--seed", "3", "--format", "csv",
    )
    assert code == 0
    blocks = out.split("\n\n")
    assert len(blocks) == 2
    for block in blocks:
        e = entries_from_csv(block)
        assert e.sum(axis=1).tolist() == [2, 1, 1]
        assert e.sum(axis=0).tolist() == [1, 2, 1]


def test_count_commands(capsys):
    code, out = run_cli(
        capsys, "count", "--binary", "--rows", "3,3,3,3,3,3", "--cols", "3,3,3,3,3,3"
    )
    assert code == 0
    assert json.loads(out)["count"] == 297200
    code, out = run_cli(capsys, "count", "--integer", "--rows", "2,2", "--cols", "2,2")
    assert json.loads(out)["count"] == 3
    code, out = run_cli(capsys, "count", "--latin", "--n", "4")
    assert json.loads(out)["count"] == 576


def test_sample_partition_payload(capsys):
    code, out = run_cli(
        capsys, "sample-partition", "--n", "12", "--distinct", "--samples", "5",
        "--seed", "8", "--validate",
    )
    assert code == 0
    for line in out.strip().split("\n"):
        obj = json.loads(line)
        parts = obj["parts"]
        assert sum(parts) == 12 and len(set(parts)) == len(parts)
        assert obj["valid"] is True


def test_latin_validate_flag(capsys):
    code, out = run_cli(
        capsys, "sample-latin", "--n", "6", "--samples", "2", "--seed", "11", "--validate"
    )
    assert code == 0
    for line in out.strip().split("\n"):
        obj = json.loads(line)
        assert obj["valid"] is True
        grid = np.asarray(obj["square"])
        assert sorted(grid[0].tolist()) == [1, 2, 3, 4, 5, 6]


def test_uniformity_command_ct(capsys):
    code, out = run_cli(
        capsys, "test-uniformity", "--kind", "ct", "--rows", "2,2", "--cols", "2,2",
        "--samples", "300", "--seed", "5",
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["report"]["passed"] is True
    assert obj["report"]["categories"] == 3
    assert obj["unmatched"] == 0


def test_uniformity_command_partition(capsys):
    code, out = run_cli(
        capsys, "test-uniformity", "--kind", "partition", "--n", "6",
        "--samples", "1100", "--seed", "1",
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["report"]["categories"] == 11
    assert obj["report"]["passed"] is True


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sample-ct", "--rows", "1,1"])  # missing --cols
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["sample-ct", "--rows", "1,1", "--cols", "2", "--bogus"])
    assert exc.value.code == 1
    assert main(["count", "--latin"]) == 1  # missing --n
    assert main(["count", "--integer", "--rows", "2,2"]) == 1  # missing --cols
    assert main(["sample-ct", "--rows", "2,2", "--cols", "1,1"]) == 1  # unbalanced
    assert main(["sample-ct", "--rows", "2", "--cols", "2", "--mask", "5,5"]) == 1


def test_infeasible_exit_one(capsys):
    code = main(["sample-binary", "--rows", "3,1", "--cols", "2,2"])
    assert code == 1


def test_dead_state_exit_two(capsys):
    # frozen casualty: this order-13 cascade dies on its first sample
    code = main(
        ["sample-latin", "--n", "13", "--policy", "abort", "--seed", "121", "--samples", "1"]
    )
    assert code == 2
    # the default policy retries the level and succeeds on the same stream
    code, out = run_cli(capsys, "sample-latin", "--n", "13", "--seed", "121", "--validate")
    assert code == 0
    assert json.loads(out)["valid"] is True


def test_oracle_env_override(capsys, monkeypatch):
    monkeypatch.setenv("BITTABLES_MAX_LATIN_ORDER", "3")
    assert main(["count", "--latin", "--n", "4"]) == 1
    monkeypatch.setenv("BITTABLES_MAX_LATIN_ORDER", "4")
    code, out = run_cli(capsys, "count", "--latin", "--n", "4")
    assert code == 0 and json.loads(out)["count"] == 576


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "bittables", "count", "--integer", "--rows", "2,2", "--cols", "2,2"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["count"] == 3
