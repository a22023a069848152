import json

import pytest
from click.testing import CliRunner

from cli import cli
from widthkit import config


@pytest.fixture
def run(monkeypatch):
    # group options write into config; keep them from leaking between tests
    for name in ("BUDGET_N", "WORKERS", "SEED"):
        monkeypatch.setattr(config, name, getattr(config, name))
    runner = CliRunner(mix_stderr=False)

    def invoke(*args):
        return runner.invoke(cli, [str(a) for a in args])

    return invoke


def test_bounds(run):
    result = run("bounds", "--k", 0, "--q", 2)
    assert result.exit_code == 0, result.stderr
    data = json.loads(result.output)
    assert data["compact_count_bound"] == {"0": 4, "1": 2048}
    assert data["repeated_cuts_threshold"]["value"] == "3"
    assert data["matroid_exponent"] == "2048"


def test_bounds_exact(run):
    data = json.loads(run("bounds", "--k", 0, "--q", 2, "--exact").output)
    assert data["ell_matroid_exact"] == str(2 ** 2048 + 1)


def test_lrw_of_graph6_string(run):
    result = run("lrw", "B?")
    assert result.exit_code == 0
    assert json.loads(result.output)["width"] == 0


def test_pathwidth_of_file(run, data_dir):
    result = run("pathwidth", data_dir / "u24_gf3.txt")
    assert result.exit_code == 0, result.stderr
    data = json.loads(result.output)
    assert data["width"] == 2
    assert data["profile"] == [0, 1, 2, 1, 0]
    assert data["manifest"]["subcommand"] == "pathwidth"


def test_malformed_file_exits_1(run, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("2 2\n1 x\n")
    assert run("pathwidth", bad).exit_code == 1


def test_missing_file_exits_1(run, tmp_path):
    assert run("pathwidth", tmp_path / "nope.txt").exit_code == 1


def test_budget_exits_2(run, data_dir):
    assert run("--budget-n", 2, "pathwidth", data_dir / "u24_gf3.txt").exit_code == 2


def test_linked_emits_a_linked_layout(run, data_dir):
    data = json.loads(run("linked", "--config", data_dir / "u24_gf3.txt").output)
    assert data["linked"] is True
    assert data["width"] == 2


def test_linked_needs_one_input(run):
    assert run("linked").exit_code == 1


def test_link_on_u24(run, data_dir):
    data = json.loads(run("link", "--config", data_dir / "u24_gf3.txt", "--s", "a", "--t", "d").output)
    assert data["k"] == 1
    assert sorted(data["contract"] + data["delete"]) == ["b", "c"]


def test_pivot_command(run):
    data = json.loads(run("pivot", "A_", "--pivots", "0-1").output)
    assert data["graph6"] == "A_"
    assert run("pivot", "A_", "--pivots", "0").exit_code == 1


def test_obstruct_writes_certificates(run, tmp_path):
    out = tmp_path / "certs"
    result = run("obstruct", "--kind", "graph", "--k", 0, "--max-size", 4, "--out", out)
    assert result.exit_code == 0, result.stderr
    summary = (out / "summary.tsv").read_text().splitlines()
    assert len(summary) == 2
    assert summary[1].endswith("g2:1")
    assert (out / "manifest.json").exists()


def test_obstruct_budget_reaches_workers(run):
    args = ("obstruct", "--kind", "matroid", "--k", 0, "--max-size", 3, "--no-revalidate")
    assert run("--budget-n", 1, "--workers", 1, *args).exit_code == 2
    assert run("--budget-n", 1, "--workers", 2, *args).exit_code == 2
    assert run("--budget-n", 9, "--workers", 2, *args).exit_code == 0


def test_reenact_on_parallel_class(run, data_dir):
    result = run("reenact", "--config", data_dir / "parallel6_gf2.txt", "--k", 0)
    assert result.exit_code == 0, result.stderr
    data = json.loads(result.output)
    assert data["status"] == "completed"
    assert data["verdict"] == "held"
