"""Command-line workflow: ingest, abstract, mine, detect, features, folds, bench, gen.

Exit codes: 0 success, 2 usage error, 3 data error. A JSON config file may
supply any long-flag value (keys use underscores); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources

from . import abstraction, dataio, detect as detect_mod, gen as gen_mod, sac
from .errors import DataError
from .karmalego import MiningConfig, mine
from .model import FoldSpec, assign_folds
from .relations import ABSTRACT3, ALLEN7, RelationConfig

_BUNDLED_KBS = ("oncology", "hepatitis", "diabetes")


class _UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        f = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise _UsageError(f"cannot parse {text!r} as a fraction or decimal") from None
    if not 0 < f <= 1:
        raise _UsageError(f"min-vs must be within (0, 1], got {text!r}")
    return f


def _nonneg(text: str, what: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise _UsageError(f"{what} must be an integer, got {text!r}") from None
    if v < 0:
        raise _UsageError(f"{what} must be non-negative, got {v}")
    return v


def _positive(text: str, what: str) -> int:
    v = _nonneg(text, what)
    if v == 0:
        raise _UsageError(f"{what} must be positive")
    return v


def _choice(value: str, options, what: str) -> str:
    if value not in options:
        raise _UsageError(f"{what} must be one of {'|'.join(options)}, got {value!r}")
    return value


class _Args:
    """Flag values merged over config-file values over defaults."""

    def __init__(self, ns: argparse.Namespace, config: dict):
        self._ns = ns
        self._config = config

    def get(self, key: str, default=None):
        flag = getattr(self._ns, key, None)
        if flag is not None:
            return flag
        if key in self._config:
            return self._config[key]
        return default


def _load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as exc:
        raise DataError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise DataError(f"{path}: config must be a JSON object")
    return raw


def _require(args: _Args, key: str):
    value = args.get(key)
    if value is None:
        raise _UsageError(f"--{key.replace('_', '-')} is required")
    return value


def _resolve_kb(spec: str):
    if spec in _BUNDLED_KBS:
        ref = resources.files("sacmine").joinpath("kb", f"{spec}.json")
        with resources.as_file(ref) as p:
            return abstraction.load_kb(p)
    return abstraction.load_kb(spec)


def _relation_config(args: _Args) -> RelationConfig:
    mode = _choice(str(args.get("relations", ALLEN7)), (ALLEN7, ABSTRACT3), "relations")
    epsilon = _nonneg(str(args.get("epsilon", 0)), "epsilon")
    max_gap = args.get("max_gap")
    if max_gap is not None:
        max_gap = _nonneg(str(max_gap), "max-gap")
    return RelationConfig(epsilon=epsilon, max_gap=max_gap, mode=mode)


def _mining_config(args: _Args) -> MiningConfig:
    min_vs = args.get("min_vs")
    if min_vs is None:
        raise _UsageError("--min-vs is required")
    max_size = args.get("max_size")
    if max_size is not None:
        max_size = _positive(str(max_size), "max-size")
    return MiningConfig(
        min_ver_sup=_fraction(str(min_vs)),
        relation=_relation_config(args),
        sac_mode=_choice(str(args.get("sac", sac.NONE)), sac.MODES, "sac"),
        max_tirp_size=max_size,
        threads=_positive(str(args.get("threads", 1)), "threads"),
    )


def _detect_config(args: _Args, header: dict) -> MiningConfig:
    mode = _choice(header["relations"], (ALLEN7, ABSTRACT3), "relations")
    sac_mode = _choice(header["sac"], sac.MODES, "sac")
    epsilon = _nonneg(str(args.get("epsilon", 0)), "epsilon")
    max_gap = args.get("max_gap")
    if max_gap is not None:
        max_gap = _nonneg(str(max_gap), "max-gap")
    return MiningConfig(
        min_ver_sup=Fraction(1),
        relation=RelationConfig(epsilon=epsilon, max_gap=max_gap, mode=mode),
        sac_mode=sac_mode,
        threads=_positive(str(args.get("threads", 1)), "threads"),
    )


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_ingest(args: _Args) -> int:
    divisor = _positive(str(args.get("time_divisor", 1)), "time-divisor")
    points = dataio.read_points(_require(args, "in_path"), divisor)
    dataio.write_points(points, _require(args, "out"))
    return 0


def _cmd_abstract(args: _Args) -> int:
    method = _choice(str(_require(args, "method")), abstraction.METHODS, "method")
    if method == abstraction.KB and args.get("kb") is None:
        raise _UsageError("--kb is required for the kb method")
    points = dataio.read_points(_require(args, "in_path"))
    bins = _positive(str(args.get("bins", 3)), "bins")
    kb = _resolve_kb(str(args.get("kb"))) if args.get("kb") is not None else None
    contexts = dataio.read_contexts(args.get("contexts")) if args.get("contexts") else None
    labels = dataio.read_labels(args.get("labels")) if args.get("labels") else None
    cutoffs_in = dataio.read_cutoffs(args.get("cutoffs_in")) if args.get("cutoffs_in") else None
    before = _nonneg(str(args.get("valid_before", 1)), "valid-before")
    after = _nonneg(str(args.get("valid_after", 1)), "valid-after")
    db, cutoffs = abstraction.abstract_points(
        points, method, bins=bins, kb=kb, contexts=contexts, labels=labels,
        paa_window=_positive(str(args.get("paa", 1)), "paa"),
        default_window=(before, after), cutoffs_in=cutoffs_in,
        percentile_step=_positive(str(args.get("percentile_step", 5)), "percentile-step"),
        entity_labels=labels,
    )
    dataio.write_intervals(db, _require(args, "out"))
    if args.get("cutoffs_out"):
        if cutoffs is None:
            raise _UsageError("the kb method learns no cutoffs to write")
        dataio.write_cutoffs(cutoffs, args.get("cutoffs_out"))
    return 0


def _canonical_line_numbers(tree):
    return {tirp: i for i, (tirp, *_rest) in enumerate(dataio.tirp_lines(tree), start=1)}


def _cmd_mine(args: _Args) -> int:
    labels = dataio.read_labels(args.get("labels")) if args.get("labels") else None
    db = dataio.read_intervals(_require(args, "in_path"), labels)
    cfg = _mining_config(args)
    tree = mine(db, cfg)
    out = _require(args, "out")
    dataio.write_tirps(tree, out)
    if args.get("dump_instances"):
        line_no = _canonical_line_numbers(tree)
        rows = []
        for node in tree.nodes():
            n = line_no[node.tirp]
            for e_idx in sorted(node.instances):
                eid = db.entities[e_idx].entity_id
                for inst in node.instances[e_idx]:
                    rows.append((eid, n, inst))
        rows.sort(key=lambda r: (r[1], r[0], r[2]))
        dataio.write_instance_dump(rows, args.get("dump_instances"))
    n_tirps = sum(1 for _ in tree.nodes())
    print(f"n_tirps={n_tirps} runtime_ms={tree.runtime_ms} "
          f"peak_candidates={tree.peak_candidates}")
    return 0


def _cmd_detect(args: _Args) -> int:
    header, entries = dataio.read_tirps(_require(args, "tirps"))
    db = dataio.read_intervals(_require(args, "in_path"))
    cfg = _detect_config(args, header)
    rows = []
    for n, (tirp, *_rest) in enumerate(entries, start=1):
        for entity in db.entities:
            for inst in detect_mod.detect(tirp, entity, cfg):
                rows.append((entity.entity_id, n, inst))
    dataio.write_instance_dump(rows, _require(args, "out"))
    return 0


def _cmd_features(args: _Args) -> int:
    tirps_path = _require(args, "tirps")
    header, entries = dataio.read_tirps(tirps_path)
    labels = dataio.read_labels(args.get("labels")) if args.get("labels") else None
    db = dataio.read_intervals(_require(args, "in_path"), labels)
    cfg = _detect_config(args, header)
    rep = _choice(str(args.get("rep", detect_mod.BINARY)),
                  detect_mod.REPRESENTATIONS, "rep")
    tirps = [t for t, *_rest in entries]
    entity_ids, row_labels, matrix = detect_mod.feature_matrix(
        tirps, db, rep, cfg, threads=cfg.threads)
    dataio.write_features(entity_ids, row_labels, matrix,
                          _require(args, "out"), source=str(tirps_path))
    return 0


def _cmd_folds(args: _Args) -> int:
    labels = dataio.read_labels(_require(args, "labels"))
    db = dataio.read_intervals(_require(args, "in_path"), labels)
    spec = FoldSpec(
        mining_folds=_positive(str(args.get("mining_folds", 3)), "mining-folds"),
        cv_folds=_positive(str(args.get("cv_folds", 10)), "cv-folds"),
        seed=_nonneg(str(args.get("seed", 0)), "seed"),
    )
    try:
        folds = assign_folds(db, spec)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    dataio.write_folds(folds, _require(args, "out"))
    return 0


def _split_list(text: str, what: str, options) -> list[str]:
    items = [t.strip() for t in str(text).split(",") if t.strip()]
    if not items:
        raise _UsageError(f"{what} list is empty")
    return [_choice(t, options, what) for t in items]


def _cmd_bench(args: _Args) -> int:
    relations_list = _split_list(args.get("relations_list", ALLEN7), "relations",
                                 (ALLEN7, ABSTRACT3))
    sac_list = _split_list(args.get("sac_list", sac.NONE), "sac", sac.MODES)
    vs_raw = [t.strip() for t in str(_require(args, "min_vs_list")).split(",") if t.strip()]
    if not vs_raw:
        raise _UsageError("min-vs list is empty")
    vs_list = [_fraction(t) for t in vs_raw]
    threads = _positive(str(args.get("threads", 1)), "threads")
    max_size = args.get("max_size")
    if max_size is not None:
        max_size = _positive(str(max_size), "max-size")
    epsilon = _nonneg(str(args.get("epsilon", 0)), "epsilon")
    max_gap = args.get("max_gap")
    if max_gap is not None:
        max_gap = _nonneg(str(max_gap), "max-gap")

    labels = dataio.read_labels(args.get("labels")) if args.get("labels") else None
    dbs: list[tuple[str, object]] = []
    if args.get("in_path"):
        dbs.append(("given", dataio.read_intervals(args.get("in_path"), labels)))
    elif args.get("points"):
        points = dataio.read_points(args.get("points"))
        methods = _split_list(_require(args, "methods"), "method", abstraction.METHODS)
        kb = _resolve_kb(str(args.get("kb"))) if args.get("kb") else None
        contexts = dataio.read_contexts(args.get("contexts")) if args.get("contexts") else None
        bins = _positive(str(args.get("bins", 3)), "bins")
        before = _nonneg(str(args.get("valid_before", 1)), "valid-before")
        after = _nonneg(str(args.get("valid_after", 1)), "valid-after")
        for method in methods:
            db, _ = abstraction.abstract_points(
                points, method, bins=bins, kb=kb, contexts=contexts,
                labels=labels, default_window=(before, after), entity_labels=labels)
            dbs.append((method, db))
    else:
        raise _UsageError("bench needs --in (intervals) or --points (raw)")

    rows = []
    for method, db in dbs:
        for rel_mode in relations_list:
            for sac_mode in sac_list:
                for vs in vs_list:
                    cfg = MiningConfig(
                        min_ver_sup=vs,
                        relation=RelationConfig(epsilon=epsilon, max_gap=max_gap,
                                                mode=rel_mode),
                        sac_mode=sac_mode, max_tirp_size=max_size, threads=threads)
                    tree = mine(db, cfg)
                    rows.append({
                        "abstraction": method, "relations": rel_mode, "sac": sac_mode,
                        "min_vs": vs, "n_tirps": sum(1 for _ in tree.nodes()),
                        "runtime_ms": tree.runtime_ms,
                        "peak_candidates": tree.peak_candidates,
                    })
    dataio.write_bench(rows, _require(args, "out"))
    return 0


def _cmd_gen(args: _Args) -> int:
    rate = args.get("rate", 0.9)
    try:
        rate = float(rate)
    except (TypeError, ValueError):
        raise _UsageError(f"rate must be a number, got {rate!r}") from None
    spec = gen_mod.GenSpec(
        entities=_positive(str(args.get("entities", 30)), "entities"),
        concepts=_positive(str(args.get("concepts", 3)), "concepts"),
        values=_positive(str(args.get("values", 3)), "values"),
        chain_len=_positive(str(args.get("chain", 5)), "chain"),
        contradiction_rate=rate,
        noise=_nonneg(str(args.get("noise", 2)), "noise"),
        labeled=bool(args.get("labeled", False)),
        seed=_nonneg(str(args.get("seed", 0)), "seed"),
    )
    out = _require(args, "out")
    if args.get("points", False):
        points, labels = gen_mod.generate_points(spec)
        dataio.write_points(points, out)
    else:
        db, labels = gen_mod.generate(spec)
        dataio.write_intervals(db, out)
    if args.get("labels_out"):
        if not labels:
            raise _UsageError("--labels-out requires --labeled")
        dataio.write_labels(labels, args.get("labels_out"))
    return 0


# ---------------------------------------------------------------------------
# Parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file supplying any flag value")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sacmine",
        description="Mine time-interval relation patterns with semantic-adjacency pruning.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate and canonicalize a raw points file")
    p.add_argument("--in", dest="in_path", help="raw points CSV")
    p.add_argument("--out", help="canonical points CSV")
    p.add_argument("--time-divisor", dest="time_divisor",
                   help="divide timestamps by this before flooring to integers")
    _add_common(p)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("abstract", help="discretize points and interpolate intervals")
    p.add_argument("--in", dest="in_path", help="points CSV")
    p.add_argument("--out", help="intervals CSV")
    p.add_argument("--method", help="kb|ewd|sax|td4c-kl")
    p.add_argument("--bins", help="states per concept (default 3)")
    p.add_argument("--kb", help="knowledge-base JSON path or bundled name "
                               f"({'|'.join(_BUNDLED_KBS)})")
    p.add_argument("--contexts", help="entity context CSV (kb method)")
    p.add_argument("--labels", help="entity label CSV (td4c method)")
    p.add_argument("--paa", help="aggregation window in points (sax method, default 1)")
    p.add_argument("--valid-before", dest="valid_before",
                   help="validity window before each point (non-kb methods, default 1)")
    p.add_argument("--valid-after", dest="valid_after",
                   help="validity window after each point (non-kb methods, default 1)")
    p.add_argument("--percentile-step", dest="percentile_step",
                   help="candidate percentile step (td4c method, default 5)")
    p.add_argument("--cutoffs-in", dest="cutoffs_in",
                   help="apply these cutoffs instead of learning")
    p.add_argument("--cutoffs-out", dest="cutoffs_out", help="write learned cutoffs here")
    _add_common(p)
    p.set_defaults(func=_cmd_abstract)

    p = sub.add_parser("mine", help="mine frequent patterns from intervals")
    p.add_argument("--in", dest="in_path", help="intervals CSV")
    p.add_argument("--out", help="pattern file")
    p.add_argument("--labels", help="entity label CSV (carried through, optional)")
    p.add_argument("--min-vs", dest="min_vs", help="minimal vertical support, P/Q or 0.x")
    p.add_argument("--relations", help="allen7|abstract3 (default allen7)")
    p.add_argument("--sac", help="none|ssac|csac|lsac (default none)")
    p.add_argument("--epsilon", help="equality tolerance for endpoints (default 0)")
    p.add_argument("--max-gap", dest="max_gap", help="maximal gap for the before relation")
    p.add_argument("--max-size", dest="max_size", help="cap on pattern size")
    p.add_argument("--threads", help="worker threads (default 1)")
    p.add_argument("--dump-instances", dest="dump_instances",
                   help="also write supporting instances here")
    _add_common(p)
    p.set_defaults(func=_cmd_mine)

    p = sub.add_parser("detect", help="find pattern instances in an intervals file")
    p.add_argument("--tirps", help="pattern file from mine")
    p.add_argument("--in", dest="in_path", help="intervals CSV")
    p.add_argument("--out", help="instance dump")
    p.add_argument("--epsilon", help="equality tolerance (default 0)")
    p.add_argument("--max-gap", dest="max_gap", help="maximal gap for the before relation")
    p.add_argument("--threads", help="worker threads (default 1)")
    _add_common(p)
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("features", help="export a classification feature matrix")
    p.add_argument("--tirps", help="pattern file from mine")
    p.add_argument("--in", dest="in_path", help="intervals CSV")
    p.add_argument("--out", help="feature CSV")
    p.add_argument("--rep", help="binary|hs|meand (default binary)")
    p.add_argument("--labels", help="entity label CSV")
    p.add_argument("--epsilon", help="equality tolerance (default 0)")
    p.add_argument("--max-gap", dest="max_gap", help="maximal gap for the before relation")
    p.add_argument("--threads", help="worker threads (default 1)")
    _add_common(p)
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("folds", help="assign stratified mining and CV folds")
    p.add_argument("--in", dest="in_path", help="intervals CSV")
    p.add_argument("--labels", help="entity label CSV")
    p.add_argument("--out", help="fold map CSV")
    p.add_argument("--mining-folds", dest="mining_folds", help="default 3")
    p.add_argument("--cv-folds", dest="cv_folds", help="default 10")
    p.add_argument("--seed", help="default 0")
    _add_common(p)
    p.set_defaults(func=_cmd_folds)

    p = sub.add_parser("bench", help="sweep mining over a configuration grid")
    p.add_argument("--in", dest="in_path", help="intervals CSV (skips abstraction)")
    p.add_argument("--points", help="raw points CSV (abstracted per --methods)")
    p.add_argument("--methods", help="comma list of abstraction methods")
    p.add_argument("--kb", help="knowledge base for the kb method")
    p.add_argument("--contexts", help="entity context CSV")
    p.add_argument("--labels", help="entity label CSV")
    p.add_argument("--bins", help="states per concept (default 3)")
    p.add_argument("--valid-before", dest="valid_before", help="default 1")
    p.add_argument("--valid-after", dest="valid_after", help="default 1")
    p.add_argument("--relations-list", dest="relations_list",
                   help="comma list (default allen7)")
    p.add_argument("--sac-list", dest="sac_list", help="comma list (default none)")
    p.add_argument("--min-vs-list", dest="min_vs_list", help="comma list of thresholds")
    p.add_argument("--epsilon", help="equality tolerance (default 0)")
    p.add_argument("--max-gap", dest="max_gap", help="maximal gap for the before relation")
    p.add_argument("--max-size", dest="max_size", help="cap on pattern size")
    p.add_argument("--threads", help="worker threads (default 1)")
    p.add_argument("--out", help="sweep CSV")
    _add_common(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    p.add_argument("--out", help="output CSV (intervals, or points with --points)")
    p.add_argument("--points", action="store_true", default=None,
                   help="emit raw points instead of intervals")
    p.add_argument("--labels-out", dest="labels_out", help="write labels here (--labeled)")
    p.add_argument("--entities", help="default 30")
    p.add_argument("--concepts", help="default 3")
    p.add_argument("--values", help="values per concept (default 3)")
    p.add_argument("--chain", help="planted chain length (default 5)")
    p.add_argument("--rate", help="contradiction-injection rate (default 0.9)")
    p.add_argument("--noise", help="extra random intervals per entity (default 2)")
    p.add_argument("--labeled", action="store_true", default=None,
                   help="attach alternating labels and a discriminative sequence")
    p.add_argument("--seed", help="default 0")
    _add_common(p)
    p.set_defaults(func=_cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        config = _load_config(ns.config) if ns.config else {}
        args = _Args(ns, config)
        return ns.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
