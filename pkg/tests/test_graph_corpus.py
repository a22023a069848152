import json

import pytest
from click.testing import CliRunner

from ingestion.graph_corpus import build_corpus, main
from widthkit import config
from widthkit.errors import BudgetExceeded


def write_g6(path, lines):
    path.write_text("\n".join(lines) + "\n")
    return path


def test_corpus_keeps_one_graph_per_class(tmp_path):
    # Bo and Bg are both P3; B? is the empty graph on 3 vertices
    g6 = write_g6(tmp_path / "small.g6", ["Bo", "Bg", "B?", "A_"])
    corpus = build_corpus([g6])
    assert [(r["n"], r["m"], r["lrw"]) for r in corpus] == [(2, 1, 1), (3, 0, 0), (3, 2, 1)]


def test_corpus_budget(tmp_path, monkeypatch):
    monkeypatch.setattr(config, "BUDGET_N", 2)
    g6 = write_g6(tmp_path / "small.g6", ["A_", "B?"])
    assert [r["n"] for r in build_corpus([g6])] == [2]
    with pytest.raises(BudgetExceeded):
        build_corpus([g6], skip_over_budget=False)


def test_corpus_command(tmp_path):
    g6 = write_g6(tmp_path / "small.g6", ["A_"])
    out = tmp_path / "corpus.json"
    result = CliRunner().invoke(main, [str(g6), "--out", str(out)])
    assert result.exit_code == 0
    assert json.loads(out.read_text())[0]["canonical"] == "g2:1"
