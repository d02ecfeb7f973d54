"""Acceptance: classifier parity between pruned and unpruned feature sets.

Drives the mining package strictly through its command line and file formats:
generate a labeled dataset with one planted class-discriminative sequence,
split into three mining folds, mine each fold with and without contradiction
pruning, export held-out binary features, and compare classifiers over the
3x10 protocol.
"""

import csv
import subprocess
import sys

from sacharness import Cell, EvalSpec, evaluate


def cli(*args):
    subprocess.run([sys.executable, "-m", "sacmine.cli", *[str(a) for a in args]],
                   check=True, stdout=subprocess.DEVNULL)


def test_pruned_and_unpruned_features_classify_alike(tmp_path, capsys):
    iv, lab = tmp_path / "iv.csv", tmp_path / "lab.csv"
    cli("gen", "--labeled", "--entities", 36, "--seed", 3,
        "--out", iv, "--labels-out", lab)
    folds = tmp_path / "folds.csv"
    cli("folds", "--in", iv, "--labels", lab, "--out", folds,
        "--mining-folds", 3, "--cv-folds", 10, "--seed", 1)
    with open(folds, newline="") as f:
        fold_of = {r["entity_id"]: int(r["mining_fold"])
                   for r in csv.DictReader(f)}

    header, *rows = iv.read_text().splitlines()

    def write_subset(path, keep):
        path.write_text("\n".join(
            [header] + [r for r in rows if keep(fold_of[r.split(",")[0]])]) + "\n")

    cells = []
    for mode in ("none", "csac"):
        mats = []
        for fold in range(3):
            mine_in = tmp_path / f"mine_{fold}.csv"
            eval_in = tmp_path / f"eval_{fold}.csv"
            write_subset(mine_in, lambda f, fold=fold: f == fold)
            write_subset(eval_in, lambda f, fold=fold: f != fold)
            tirps = tmp_path / f"tirps_{mode}_{fold}.txt"
            feats = tmp_path / f"feats_{mode}_{fold}.csv"
            cli("mine", "--in", mine_in, "--out", tirps,
                "--min-vs", "1/2", "--sac", mode)
            cli("features", "--tirps", tirps, "--in", eval_in,
                "--labels", lab, "--rep", "binary", "--out", feats)
            mats.append(str(feats))
        cells.append(Cell(mode, "planted", "allen7", "binary", tuple(mats)))

    by = {(r.sac, r.classifier): r
          for r in evaluate(EvalSpec(cells=tuple(cells)))}
    classifiers = sorted({c for _, c in by})
    worst_auc = min(by[(m, c)].mean_auc for m in ("none", "csac")
                    for c in classifiers)
    worst_delta = max(abs(by[("none", c)].mean_auc - by[("csac", c)].mean_auc)
                      for c in classifiers)
    runs = {by[k].n_runs for k in by}
    ok = worst_auc >= 0.95 and worst_delta <= 0.05 and runs == {30}
    with capsys.disabled():
        print(f"[acceptance] pruned vs unpruned classifier parity: "
              f"{'PASS' if ok else 'FAIL'} (all four classifiers, min mean "
              f"AUC {worst_auc:.3f} >= 0.95, max |delta| {worst_delta:.3f} "
              "<= 0.05, 30 runs per cell)")
    assert ok, (worst_auc, worst_delta, runs)
