import json
import os

import pytest

from algevo import __version__
from algevo.cli import (
    EXIT_CONFIG,
    EXIT_DATA,
    EXIT_OK,
    EXIT_RESOURCE,
    ConfigError,
    _write_all,
    main,
    parse_config_text,
    parse_tokens,
    resolve_params,
)
from algevo.complexity import CtmTable
from algevo.experiments.io import CURVES_HEADER, RESULTS_HEADER, read_results_csv, read_results_json


@pytest.fixture(scope="module")
def ctm22(tmp_path_factory):
    p = tmp_path_factory.mktemp("tables") / "ctm22.tsv"
    assert main(["gen-ctm", "states=2", "cap=100", f"out={p}"]) == EXIT_OK
    return p


def test_gen_ctm_header(ctm22):
    head = ctm22.read_text().split("\n")[0]
    assert "total=10000" in head
    t = CtmTable.load(ctm22)
    assert t.total == 10000 and t.halting == 3044
    man = json.loads((ctm22.parent / "ctm22.tsv.manifest.json").read_text())
    assert man["command"] == "gen-ctm" and man["config"]["states"] == 2


def test_evolve_twice_identical(ctm22, tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        p = tmp_path / name
        args = ["evolve", "target=complete8", "strategy=bdm", "shifts=1", "seed=42", f"table={ctm22}", f"out={p}"]
        assert main(args) == EXIT_OK
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    trace = json.loads(outs[0])
    assert trace["terminal"] == "converged" and trace["config"]["seed"] == 42


def test_batch_zero_replicates(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["batch", "target=complete8", "replicates=0", f"out={out}"]) == EXIT_CONFIG
    assert list(tmp_path.iterdir()) == []
    assert "replicates" in capsys.readouterr().err


def test_batch_csv_and_manifest(tmp_path):
    out = tmp_path / "r.csv"
    rc = main(["batch", "target=complete8,star8", "replicates=3", "strategies=uniform,bdm", "seed=7", f"out={out}"])
    assert rc == EXIT_OK
    recs = read_results_csv(out.read_text())
    assert [r["target_id"] for r in recs] == ["complete8", "complete8", "star8", "star8"]
    assert all(len(ln.split(",")) == len(RESULTS_HEADER) for ln in out.read_text().strip().split("\n"))
    man = json.loads((tmp_path / "r.csv.manifest.json").read_text())
    assert man["version"] == __version__
    assert man["config"]["replicates"] == 3 and man["config"]["seed"] == 7
    seeds = man["derived"]["seeds[target][replicate][config]"]
    assert len(seeds) == 2 and len(seeds[0]) == 3 and len(seeds[0][0]) == 2
    assert man["table"]["fingerprint"] and man["outputs"] == [str(out)]
    assert man["derived"]["extinction_threshold"] == 2500


def test_batch_json_round_trip(tmp_path):
    out = tmp_path / "r.json"
    assert main(["batch", "target=random", "count=2", "replicates=2", "strategies=uniform,entropy_exp",
                 "format=json", f"out={out}"]) == EXIT_OK
    recs = read_results_json(out.read_text())
    assert len(recs) == 4 and recs[0]["target_id"] == "random0"
    assert recs[0]["target_bdm"] != recs[0]["target_bdm"]  # no table needed, so NaN


def test_manifest_replay_other_thread_count(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["batch", "target=grid2x4", "replicates=4", "threads=1", f"out={out}"]) == EXIT_OK
    out2 = tmp_path / "r2.csv"
    rc = main(["--manifest", str(tmp_path / "r.csv.manifest.json"), f"out={out2}", "threads=3"])
    assert rc == EXIT_OK
    assert out.read_bytes() == out2.read_bytes()


def test_manifest_fingerprint_mismatch(tmp_path, ctm22):
    out = tmp_path / "b.json"
    assert main(["bdm", "target=complete8", f"out={out}"]) == EXIT_OK
    rc = main(["--manifest", str(tmp_path / "b.json.manifest.json"), f"table={ctm22}",
               f"out={tmp_path / 'c.json'}"])
    assert rc == EXIT_DATA
    assert not (tmp_path / "c.json").exists()


def test_config_file_and_flag_forms(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# batch config\ntarget = complete8\nreplicates = 2\nstrategies=uniform\n")
    out = tmp_path / "r.csv"
    assert main(["batch", "--config", str(cfg), "--out", str(out), "--seed=3"]) == EXIT_OK
    man = json.loads((tmp_path / "r.csv.manifest.json").read_text())
    assert man["config"]["seed"] == 3 and man["config"]["replicates"] == 2
    # command line wins over the file
    out2 = tmp_path / "r2.csv"
    assert main(["batch", "--config", str(cfg), "replicates=1", f"out={out2}"]) == EXIT_OK
    assert read_results_csv(out2.read_text())[0]["replicates"] == 1


def test_bdm_command(capsys):
    assert main(["bdm", "target=empty8"]) == EXIT_OK
    assert float(capsys.readouterr().out.strip()) == pytest.approx(14.01, abs=0.01)


def test_exit_codes(tmp_path):
    assert main(["batch", "target=complete8", "bogus=1", f"out={tmp_path / 'x'}"]) == EXIT_CONFIG
    assert main(["batch", f"out={tmp_path / 'x'}"]) == EXIT_CONFIG
    assert main(["frobnicate"]) == EXIT_CONFIG
    assert main(["evolve", "target=nothing_here", f"out={tmp_path / 'x'}"]) == EXIT_CONFIG
    assert main(["evolve", "target=complete8", "shifts=abc", f"out={tmp_path / 'x'}"]) == EXIT_CONFIG
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n1 2\n")
    assert main(["bdm", f"target={bad}"]) == EXIT_DATA
    assert main(["bdm", "target=complete8", "bdm_block_size=4"]) == EXIT_DATA
    assert main(["gen-ctm", "states=4", f"out={tmp_path / 't.tsv'}"]) == EXIT_RESOURCE
    assert main(["batch", "target=complete8", f"out={tmp_path / 'missing' / 'r.csv'}"]) == EXIT_CONFIG
    assert main(["evolve", "target=complete8", "strategy=local_bdm", "block_size=3",
                 f"out={tmp_path / 'x'}"]) == EXIT_CONFIG
    assert main([]) == EXIT_CONFIG
    assert list(p.name for p in tmp_path.iterdir()) == ["bad.txt"]


def test_help_and_version(capsys):
    assert main(["--help"]) == EXIT_OK
    assert "commands:" in capsys.readouterr().out
    assert main(["--version"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == __version__
    assert main(["chase", "--help"]) == EXIT_OK
    assert "kind" in capsys.readouterr().out


def test_sequence_chase_evonet_analyze(tmp_path):
    seq = tmp_path / "seq.csv"
    assert main(["sequence", "nodes=4", "replicates=2", "strategies=uniform,bdm", "fit_degree=1",
                 "bdm_block_size=2", f"out={seq}"]) == EXIT_OK
    rows = seq.read_text().strip().split("\n")
    assert rows[0] == ",".join(CURVES_HEADER) and len(rows) == 1 + 6
    ch = tmp_path / "chase.csv"
    assert main(["chase", "kind=growing_star", "nodes=8", "replicates=2", "strategies=uniform,entropy_linear",
                 "mode=seed", f"out={ch}"]) == EXIT_OK
    assert "cumulative" in ch.read_text()
    ev = tmp_path / "net.csv"
    assert main(["evonet", "target=grid2x4", "replicates=4", "min_count=1", f"out={ev}"]) == EXIT_OK
    assert (tmp_path / "net.nodes.csv").is_file()
    assert (tmp_path / "net.nodes.csv.manifest.json").is_file()
    res = tmp_path / "r.csv"
    assert main(["batch", "target=complete8", "replicates=3", f"out={res}"]) == EXIT_OK
    an = tmp_path / "an.csv"
    assert main(["analyze", f"input={res}", f"out={an}"]) == EXIT_OK
    assert an.read_text().split("\n")[1].startswith("complete8,bdm,delta,")


def test_parse_tokens():
    assert parse_tokens(["a=1", "--b", "2", "--c-d=3"]) == {"a": "1", "b": "2", "c_d": "3"}
    with pytest.raises(ConfigError):
        parse_tokens(["loose"])
    with pytest.raises(ConfigError):
        parse_tokens(["--dangling"])
    with pytest.raises(ConfigError):
        parse_config_text("no equals sign\n")


@pytest.mark.parametrize("raw", [
    {"target": "x", "out": "o", "replicates": "-1"},
    {"target": "x", "out": "o", "replacement": "maybe"},
    {"target": "x", "out": "o", "strategies": "uniform,magic"},
    {"target": "x", "out": "o", "format": "xml"},
    {"target": "x", "out": "o", "alpha": "nan?"},
])
def test_resolve_params_diagnostics_name_key(raw):
    with pytest.raises(ConfigError) as exc:
        resolve_params("batch", raw)
    bad = [k for k in raw if k not in ("target", "out")][0]
    assert bad in str(exc.value)


def test_write_all_cleans_up(tmp_path, monkeypatch):
    a = tmp_path / "a.txt"
    b = tmp_path / "nodir" / "b.txt"
    with pytest.raises(OSError):
        _write_all({str(a): "x", str(b): "y"})
    assert not a.exists() and list(tmp_path.iterdir()) == []


def test_default_table_env(tmp_path, monkeypatch, ctm22, capsys):
    monkeypatch.setenv("ALGEVO_CTM_TABLE", str(ctm22))
    assert main(["bdm", "target=empty4"]) == EXIT_OK
    v22 = float(capsys.readouterr().out)
    monkeypatch.delenv("ALGEVO_CTM_TABLE")
    assert main(["bdm", "target=empty4"]) == EXIT_OK
    assert float(capsys.readouterr().out) != v22
    assert os.environ.get("ALGEVO_CTM_TABLE") is None
