import json
import subprocess
import sys

import pytest

from pcp.cli import EXIT_DATA, EXIT_INTERNAL, EXIT_OK, DataError, load_config, main
from pcp.harness import read_graph


@pytest.fixture
def simulated(tmp_path):
    data, truth = tmp_path / "x.csv", tmp_path / "truth.edges"
    rc = main(["simulate", "--vertices", "8", "--samples", "400", "--seed", "3",
               "--out", str(data), "--truth", str(truth)])
    assert rc == EXIT_OK
    return data, truth


def test_discover_writes_graph_and_pvalues(simulated, tmp_path, capsys):
    data, _ = simulated
    out, pv = tmp_path / "g.edges", tmp_path / "p.csv"
    rc = main(["discover", "--data", str(data), "--out", str(out), "--pvalues", str(pv),
               "--alpha", "0.2", "--lmax", "2", "--variant", "pcp"])
    assert rc == EXIT_OK
    info = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    g, names = read_graph(out)
    assert names[0] == "X0" and g.edge_count() == info["edges"]
    assert len(pv.read_text().splitlines()) == info["hypotheses"] + 1


def test_fdr_flag_prunes(simulated, tmp_path, capsys):
    data, _ = simulated
    out = tmp_path / "g.edges"
    assert main(["discover", "--data", str(data), "--out", str(out), "--fdr-q", "0.1"]) == EXIT_OK
    info = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert info["pruned_edges"] <= info["edges"]
    assert read_graph(out)[0].edge_count() == info["pruned_edges"]


def test_evaluate_reports_metrics(simulated, capsys):
    data, truth = simulated
    assert main(["evaluate", "--data", str(data), "--truth", str(truth)]) == EXIT_OK
    info = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert {"uc", "oc", "ue", "oe", "shd", "alpha_star"} <= set(info)


def test_config_file_with_flag_override(simulated, tmp_path, capsys):
    data, _ = simulated
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# settings\nalpha = 0.1\nlmax = none\nvariant = no_robust\n")
    assert load_config(cfg) == {"alpha": 0.1, "lmax": None, "variant": "no_robust"}
    rc = main(["discover", "--config", str(cfg), "--alpha", "0.05",
               "--data", str(data), "--out", str(tmp_path / "g.edges")])
    assert rc == EXIT_OK
    info = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert info["alpha"] == 0.05 and info["lmax"] is None and info["variant"] == "no_robust"


def test_bad_config_lines(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("alpha = 0.1\ncolour = red\n")
    with pytest.raises(DataError, match=":2:"):
        load_config(cfg)
    cfg.write_text("alpha\n")
    with pytest.raises(DataError, match=":1:"):
        load_config(cfg)


def test_data_errors_exit_with_one(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n3\n")
    out = str(tmp_path / "g.edges")
    assert main(["discover", "--data", str(bad), "--out", out]) == EXIT_DATA
    assert main(["discover", "--data", str(tmp_path / "missing.csv"), "--out", out]) == EXIT_DATA
    const = tmp_path / "const.csv"
    const.write_text("a,b\n1,1\n1,2\n1,3\n1,5\n")
    assert main(["discover", "--data", str(const), "--out", out]) == EXIT_DATA
    assert "error" in capsys.readouterr().err


def test_bad_truth_graph_exits_with_one(simulated, tmp_path):
    data, _ = simulated
    truth = tmp_path / "t.edges"
    truth.write_text("X0 -> X1\n")
    assert main(["evaluate", "--data", str(data), "--truth", str(truth)]) == EXIT_DATA


def test_oracle_check_and_bench(tmp_path, capsys):
    assert main(["oracle-check", "--dags", "20", "--max-vertices", "8"]) == EXIT_OK
    assert "20/20" in capsys.readouterr().out
    assert main(["bench", "--suite", "lowdim", "--replicates", "1", "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "metrics.csv").exists()


def test_internal_errors_exit_with_two(monkeypatch, tmp_path):
    import pcp.cli as cli
    from pcp.fdr import IntegrityError

    def boom(*a, **k):
        raise IntegrityError("edges without a hypothesis")

    monkeypatch.setattr(cli, "run_pipeline", boom)
    data = tmp_path / "x.csv"
    main(["simulate", "--vertices", "4", "--samples", "50", "--out", str(data)])
    assert main(["discover", "--data", str(data), "--out", str(tmp_path / "g")]) == EXIT_INTERNAL
    assert EXIT_INTERNAL == 2


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "pcp", "oracle-check", "--dags", "5"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "5/5" in res.stdout
