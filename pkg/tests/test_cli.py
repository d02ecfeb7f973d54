"""Command-line behavior: exit codes, config precedence, pipeline closure."""

import json

import pytest

from sacmine import dataio
from sacmine.cli import main


def run(*argv):
    return main(list(argv))


def test_usage_errors_exit_2(tmp_path):
    iv = tmp_path / "iv.csv"
    iv.write_text("entity_id,concept_id,value_id,start,end\ne,c,v,0,2\n")
    assert run("mine", "--in", str(iv), "--out", str(tmp_path / "t.txt")) == 2
    assert run("mine", "--in", str(iv), "--out", str(tmp_path / "t.txt"),
               "--min-vs", "7/2") == 2
    assert run("mine", "--in", str(iv), "--out", str(tmp_path / "t.txt"),
               "--min-vs", "1/2", "--sac", "bogus") == 2
    assert run("abstract", "--in", str(iv), "--out", str(tmp_path / "o.csv"),
               "--method", "kb") == 2  # missing --kb


def test_data_errors_exit_3(tmp_path):
    missing = tmp_path / "nope.csv"
    assert run("mine", "--in", str(missing), "--out", str(tmp_path / "t.txt"),
               "--min-vs", "1/2") == 3
    bad = tmp_path / "bad.csv"
    bad.write_text("entity_id,concept_id,value_id,start,end\ne,c,v,5,2\n")
    assert run("mine", "--in", str(bad), "--out", str(tmp_path / "t.txt"),
               "--min-vs", "1/2") == 3


def test_full_pipeline(tmp_path, capsys):
    pts = tmp_path / "pts.csv"
    assert run("gen", "--out", str(pts), "--points", "--entities", "10",
               "--seed", "5", "--noise", "2") == 0
    canon = tmp_path / "canon.csv"
    assert run("ingest", "--in", str(pts), "--out", str(canon)) == 0
    ivf = tmp_path / "iv.csv"
    assert run("abstract", "--in", str(canon), "--out", str(ivf),
               "--method", "ewd", "--bins", "3") == 0
    tirps = tmp_path / "tirps.txt"
    assert run("mine", "--in", str(ivf), "--out", str(tirps), "--min-vs", "0.5",
               "--sac", "csac", "--max-size", "3",
               "--dump-instances", str(tmp_path / "mines.tsv")) == 0
    stats = capsys.readouterr().out
    assert "n_tirps=" in stats and "runtime_ms=" in stats and "peak_candidates=" in stats
    inst = tmp_path / "inst.tsv"
    assert run("detect", "--tirps", str(tirps), "--in", str(ivf),
               "--out", str(inst)) == 0
    # detection over the mining database reproduces the mining dump exactly
    assert dataio.read_instance_dump(inst) == dataio.read_instance_dump(
        tmp_path / "mines.tsv")
    feats = tmp_path / "f.csv"
    assert run("features", "--tirps", str(tirps), "--in", str(ivf),
               "--out", str(feats), "--rep", "meand") == 0
    source, ids, _, rows = dataio.read_features(feats)
    assert source == str(tirps)
    assert len(ids) == 10
    _, entries = dataio.read_tirps(tirps)
    assert all(len(r) == len(entries) for r in rows)


def test_labeled_flow_folds_and_bench(tmp_path):
    ivf = tmp_path / "iv.csv"
    lab = tmp_path / "lab.csv"
    assert run("gen", "--out", str(ivf), "--labels-out", str(lab),
               "--labeled", "--entities", "12", "--seed", "2") == 0
    folds = tmp_path / "folds.csv"
    assert run("folds", "--in", str(ivf), "--labels", str(lab),
               "--out", str(folds), "--mining-folds", "3", "--cv-folds", "4",
               "--seed", "9") == 0
    first = folds.read_text()
    assert run("folds", "--in", str(ivf), "--labels", str(lab),
               "--out", str(folds), "--mining-folds", "3", "--cv-folds", "4",
               "--seed", "9") == 0
    assert folds.read_text() == first
    bench = tmp_path / "bench.csv"
    assert run("bench", "--in", str(ivf), "--out", str(bench),
               "--sac-list", "none,csac", "--min-vs-list", "0.3,0.5",
               "--max-size", "3") == 0
    lines = bench.read_text().splitlines()
    assert lines[0].startswith("abstraction,")
    assert len(lines) == 5
    none_row = lines[1].split(",")
    csac_row = lines[3].split(",")
    assert int(csac_row[4]) <= int(none_row[4])  # nesting: csac never mines more


def test_gen_labels_out_requires_labeled(tmp_path):
    assert run("gen", "--out", str(tmp_path / "iv.csv"),
               "--labels-out", str(tmp_path / "lab.csv")) == 2


def test_config_file_supplies_and_flags_override(tmp_path):
    ivf = tmp_path / "iv.csv"
    assert run("gen", "--out", str(ivf), "--entities", "6", "--seed", "1") == 0
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"min_vs": "1/2", "sac": "csac", "max_size": 2}))
    out = tmp_path / "a.txt"
    assert run("mine", "--in", str(ivf), "--out", str(out), "--config", str(cfg)) == 0
    header, _ = dataio.read_tirps(out)
    assert str(header["min_vs"]) == "1/2"
    assert header["sac"] == "csac"
    out2 = tmp_path / "b.txt"
    assert run("mine", "--in", str(ivf), "--out", str(out2), "--config", str(cfg),
               "--min-vs", "1/3", "--sac", "lsac") == 0
    header2, _ = dataio.read_tirps(out2)
    assert str(header2["min_vs"]) == "1/3"
    assert header2["sac"] == "lsac"


def test_config_rejects_non_object(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("[1,2]")
    assert run("mine", "--in", "x", "--out", "y", "--config", str(cfg)) == 3


def test_abstract_kb_bundled_with_contexts(tmp_path):
    pts = tmp_path / "p.csv"
    pts.write_text("entity_id,concept_id,timestamp,value\n"
                   "p1,Creatinine,100,1.1\np2,Creatinine,100,1.1\n")
    ctx = tmp_path / "ctx.csv"
    ctx.write_text("entity_id,context\np1,Male\np2,Female\n")
    out = tmp_path / "iv.csv"
    assert run("abstract", "--in", str(pts), "--out", str(out),
               "--method", "kb", "--kb", "diabetes", "--contexts", str(ctx)) == 0
    db = dataio.read_intervals(out)
    states = {e.entity_id: e.intervals[0].symbol.value_id for e in db.entities}
    assert states == {"p1": "Normal", "p2": "Moderately_High"}
    # validity 60 days on both sides
    assert db.entities[0].intervals[0].start == 40
    assert db.entities[0].intervals[0].end == 160


def test_abstract_cutoffs_round_trip_between_runs(tmp_path):
    train = tmp_path / "train.csv"
    train.write_text("entity_id,concept_id,timestamp,value\n"
                     "e1,c,0,0\ne1,c,10,9\ne2,c,0,3\n")
    test = tmp_path / "test.csv"
    test.write_text("entity_id,concept_id,timestamp,value\n"
                    "e9,c,0,2\ne9,c,10,8\n")
    cuts = tmp_path / "cuts.csv"
    out1 = tmp_path / "train_iv.csv"
    assert run("abstract", "--in", str(train), "--out", str(out1),
               "--method", "ewd", "--bins", "3", "--cutoffs-out", str(cuts)) == 0
    assert dataio.read_cutoffs(cuts)["c"].cutoffs == (3.0, 6.0)
    out2 = tmp_path / "test_iv.csv"
    assert run("abstract", "--in", str(test), "--out", str(out2),
               "--method", "ewd", "--cutoffs-in", str(cuts)) == 0
    db = dataio.read_intervals(out2)
    assert [i.symbol.value_id for i in db.entities[0].intervals] == ["0", "2"]


def test_detect_respects_max_gap_flag(tmp_path):
    ivf = tmp_path / "iv.csv"
    ivf.write_text("entity_id,concept_id,value_id,start,end\n"
                   "e,A,0,0,2\ne,B,0,9,11\n")
    tirps = tmp_path / "t.txt"
    assert run("mine", "--in", str(ivf), "--out", str(tirps), "--min-vs", "1/1") == 0
    inst = tmp_path / "i.tsv"
    assert run("detect", "--tirps", str(tirps), "--in", str(ivf), "--out", str(inst),
               "--max-gap", "3") == 0
    pairs = [r for r in dataio.read_instance_dump(inst) if len(r[2]) == 2]
    assert pairs == []


def test_bench_needs_input(tmp_path):
    assert run("bench", "--out", str(tmp_path / "b.csv"), "--min-vs-list", "0.5") == 2
