"""Classifier comparison over exported feature matrices.

Consumes the feature CSVs produced by the ``sacmine features`` command and
runs the fold protocol: for every configuration cell, each per-mining-fold
matrix is split with stratified cross-validation and every classifier is
fitted and scored by ROC AUC on each split. Results aggregate to one row per
(cell, classifier) with the mean and standard deviation over all runs.
"""

from __future__ import annotations

import csv
import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import sklearn
from sklearn.ensemble import RandomForestClassifier
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import roc_auc_score
from sklearn.model_selection import StratifiedKFold
from sklearn.naive_bayes import GaussianNB
from sklearn.svm import SVC


class HarnessError(ValueError):
    """Malformed spec or feature input."""


# Library defaults throughout; only the seed is pinned. The SVC is scored by
# its decision function, the others by the probability of the larger class.
CLASSIFIER_FACTORIES = {
    "random_forest": lambda seed: RandomForestClassifier(random_state=seed),
    "naive_bayes": lambda seed: GaussianNB(),
    "svm": lambda seed: SVC(random_state=seed),
    "logistic_regression": lambda seed: LogisticRegression(random_state=seed),
}

AUC_TABLE_HEADER = ("sac", "abstraction", "relations", "representation",
                    "classifier", "mean_auc", "std_auc", "n_runs")


@dataclass(frozen=True)
class FeatureMatrix:
    source: str
    entity_ids: tuple[str, ...]
    labels: tuple[str, ...]
    X: np.ndarray

    def __post_init__(self):
        if len(set(self.entity_ids)) != len(self.entity_ids):
            raise HarnessError(f"{self.source}: duplicate entity ids")
        if "" in self.labels:
            raise HarnessError(f"{self.source}: every row needs a label")


def read_features(path) -> FeatureMatrix:
    """Parse one feature CSV: optional # comments, then entity_id,label,T1..."""
    ids: list[str] = []
    labels: list[str] = []
    rows: list[list[float]] = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(line for line in f if not line.startswith("#"))
        header = next(reader, None)
        if header is None or header[:2] != ["entity_id", "label"]:
            raise HarnessError(f"{path}: expected header entity_id,label,...")
        width = len(header)
        for row in reader:
            if len(row) != width:
                raise HarnessError(f"{path}: row for {row[:1]} has {len(row)} "
                                   f"fields, header has {width}")
            ids.append(row[0])
            labels.append(row[1])
            try:
                rows.append([float(v) for v in row[2:]])
            except ValueError as exc:
                raise HarnessError(f"{path}: {exc}") from None
    return FeatureMatrix(str(path), tuple(ids), tuple(labels),
                         np.asarray(rows, dtype=float))


@dataclass(frozen=True)
class Cell:
    """One configuration: its provenance fields and per-mining-fold matrices."""
    sac: str
    abstraction: str
    relations: str
    representation: str
    matrices: tuple[str, ...]

    def __post_init__(self):
        if not self.matrices:
            raise HarnessError("a cell needs at least one feature matrix")


@dataclass(frozen=True)
class EvalSpec:
    cells: tuple[Cell, ...]
    classifiers: tuple[str, ...] = tuple(CLASSIFIER_FACTORIES)
    cv_folds: int = 10
    seed: int = 0

    def __post_init__(self):
        if not self.cells:
            raise HarnessError("spec has no cells")
        unknown = set(self.classifiers) - set(CLASSIFIER_FACTORIES)
        if unknown:
            raise HarnessError(f"unknown classifiers: {sorted(unknown)}")
        if not self.classifiers:
            raise HarnessError("spec has no classifiers")
        if self.cv_folds < 2:
            raise HarnessError("cv_folds must be >= 2")
        if len({len(c.matrices) for c in self.cells}) != 1:
            raise HarnessError("all cells must list the same number of "
                               "per-fold matrices")

    @classmethod
    def from_json(cls, path) -> "EvalSpec":
        base = Path(path).parent
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise HarnessError(f"{path}: {exc}") from None
        if not isinstance(raw, dict) or not isinstance(raw.get("cells"), list):
            raise HarnessError(f"{path}: expected an object with a cells list")
        cells = []
        for i, item in enumerate(raw["cells"]):
            try:
                cells.append(Cell(
                    sac=str(item["sac"]),
                    abstraction=str(item["abstraction"]),
                    relations=str(item["relations"]),
                    representation=str(item["representation"]),
                    matrices=tuple(str(base / m) for m in item["matrices"]),
                ))
            except (KeyError, TypeError) as exc:
                raise HarnessError(f"{path}: cell {i}: {exc}") from None
        kwargs = {}
        if "classifiers" in raw:
            kwargs["classifiers"] = tuple(raw["classifiers"])
        return cls(cells=tuple(cells), cv_folds=int(raw.get("cv_folds", 10)),
                   seed=int(raw.get("seed", 0)), **kwargs)


@dataclass(frozen=True)
class AucRow:
    sac: str
    abstraction: str
    relations: str
    representation: str
    classifier: str
    mean_auc: float
    std_auc: float
    n_runs: int


def encode_labels(mat: FeatureMatrix) -> np.ndarray | None:
    """Labels as 0/1 by sorted order; None (with a warning) if single-class."""
    classes = sorted(set(mat.labels))
    if len(classes) > 2:
        raise HarnessError(f"{mat.source}: AUC needs binary labels, "
                           f"got {classes}")
    if len(classes) < 2:
        warnings.warn(f"{mat.source}: single-class fold skipped",
                      RuntimeWarning, stacklevel=2)
        return None
    return np.asarray([classes.index(l) for l in mat.labels])


def stratified_splits(mat: FeatureMatrix, y: np.ndarray, cv_folds: int,
                      seed: int):
    """(train, test) index pairs; every split checked for entity hygiene."""
    skf = StratifiedKFold(n_splits=cv_folds, shuffle=True, random_state=seed)
    try:
        splits = list(skf.split(mat.X, y))
    except ValueError as exc:
        warnings.warn(f"{mat.source}: {exc}; fold skipped", RuntimeWarning,
                      stacklevel=2)
        return []
    for train, test in splits:
        train_ids = {mat.entity_ids[k] for k in train}
        test_ids = {mat.entity_ids[k] for k in test}
        assert not train_ids & test_ids, "entity in both train and test"
    return splits


def _score_split(clf, X_train, y_train, X_test) -> np.ndarray:
    clf.fit(X_train, y_train)
    if hasattr(clf, "decision_function"):
        return clf.decision_function(X_test)
    return clf.predict_proba(X_test)[:, 1]


def _evaluate_cell(cell: Cell, matrices, spec: EvalSpec) -> list[AucRow]:
    aucs: dict[str, list[float]] = {name: [] for name in spec.classifiers}
    for mat in matrices:
        y = encode_labels(mat)
        if y is None:
            continue
        for train, test in stratified_splits(mat, y, spec.cv_folds, spec.seed):
            if len(set(y[test])) < 2 or len(set(y[train])) < 2:
                warnings.warn(f"{mat.source}: single-class fold skipped",
                              RuntimeWarning, stacklevel=2)
                continue
            for name in spec.classifiers:
                clf = CLASSIFIER_FACTORIES[name](spec.seed)
                scores = _score_split(clf, mat.X[train], y[train], mat.X[test])
                aucs[name].append(float(roc_auc_score(y[test], scores)))
    rows = []
    for name in spec.classifiers:
        vals = aucs[name]
        rows.append(AucRow(
            cell.sac, cell.abstraction, cell.relations, cell.representation,
            name,
            float(np.mean(vals)) if vals else float("nan"),
            float(np.std(vals)) if vals else float("nan"),
            len(vals)))
    return rows


def evaluate(spec: EvalSpec, threads: int = 1) -> list[AucRow]:
    """AUC rows for every (cell, classifier), deterministically ordered."""
    loaded = [[read_features(p) for p in cell.matrices] for cell in spec.cells]
    n_folds = len(spec.cells[0].matrices)
    for i in range(n_folds):
        id_sets = {frozenset(mats[i].entity_ids) for mats in loaded}
        if len(id_sets) > 1:
            raise HarnessError(f"matrices for mining fold {i} do not share "
                               "one entity set across cells")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_cell = list(pool.map(
                lambda cm: _evaluate_cell(cm[0], cm[1], spec),
                zip(spec.cells, loaded)))
    else:
        per_cell = [_evaluate_cell(c, m, spec)
                    for c, m in zip(spec.cells, loaded)]
    rows = [row for cell_rows in per_cell for row in cell_rows]
    rows.sort(key=lambda r: (r.sac, r.abstraction, r.relations,
                             r.representation, r.classifier))
    return rows


def learner_documentation(spec: EvalSpec) -> list[str]:
    """Header lines recording the fitted estimators' effective defaults."""
    lines = [f"# scikit-learn {sklearn.__version__}, library defaults, "
             f"seed={spec.seed}"]
    for name in sorted(spec.classifiers):
        est = CLASSIFIER_FACTORIES[name](spec.seed)
        scorer = ("decision_function" if hasattr(est, "decision_function")
                  else "predict_proba")
        params = ", ".join(f"{k}={v!r}" for k, v in sorted(
            est.get_params().items()))
        lines.append(f"# {name}: {type(est).__name__}({params}) "
                     f"scored by {scorer}")
    lines.append(f"# cv: StratifiedKFold(n_splits={spec.cv_folds}, "
                 f"shuffle=True, random_state={spec.seed}), stratified by "
                 "label; auc=roc_auc_score, std=population")
    return lines


def write_auc_table(rows: list[AucRow], spec: EvalSpec, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        for line in learner_documentation(spec):
            f.write(line + "\n")
        f.write(",".join(AUC_TABLE_HEADER) + "\n")
        for r in rows:
            f.write(f"{r.sac},{r.abstraction},{r.relations},"
                    f"{r.representation},{r.classifier},{r.mean_auc:.6g},"
                    f"{r.std_auc:.6g},{r.n_runs}\n")
