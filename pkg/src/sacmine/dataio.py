"""File formats: CSV readers/writers and the pattern-file round trip.

All readers raise DataError with the offending 1-based line number. Identifier
fields reject characters that would break the serialized formats (comma, tab,
newline; '=' additionally for concept and value ids, which serialize as
``concept=value``).
"""

from __future__ import annotations

import csv
import math
from fractions import Fraction

from .abstraction import SAX, EWD, TD4C_KL, CutoffSet, RawPoint
from .errors import DataError
from .karmalego import EnumerationTree, TIRP
from .model import EntityRecord, IntervalDatabase, Symbol, SymbolicInterval, build_database
from .relations import ABSTRACT3, ALLEN7, code_from_char, mode_of_char, rel_char

_BANNED = set(",\t\n\r")

POINTS_HEADER = ["entity_id", "concept_id", "timestamp", "value"]
INTERVALS_HEADER = ["entity_id", "concept_id", "value_id", "start", "end"]
LABELS_HEADER = ["entity_id", "label"]
CONTEXTS_HEADER = ["entity_id", "context"]
CUTOFFS_HEADER = ["concept_id", "method", "cutoff_index", "cutoff_value"]
FOLDS_HEADER = ["entity_id", "mining_fold", "cv_fold"]
BENCH_HEADER = ["abstraction", "relations", "sac", "min_vs", "n_tirps",
                "runtime_ms", "peak_candidates"]


def _check_id(text: str, what: str, path, line: int, allow_eq: bool = True) -> str:
    if not text:
        raise DataError(f"{path}:{line}: empty {what}")
    bad = _BANNED if allow_eq else _BANNED | {"="}
    if any(ch in bad for ch in text):
        raise DataError(f"{path}:{line}: {what} {text!r} contains a forbidden character")
    return text


def _int(text: str, what: str, path, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise DataError(f"{path}:{line}: {what} {text!r} is not an integer") from None


def _float(text: str, what: str, path, line: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise DataError(f"{path}:{line}: {what} {text!r} is not a number") from None
    if not math.isfinite(v):
        raise DataError(f"{path}:{line}: {what} {text!r} is not finite")
    return v


def _open_csv(path, expected_header):
    f = open(path, newline="", encoding="utf-8")
    reader = csv.reader(f)
    try:
        header = next(reader)
    except StopIteration:
        f.close()
        raise DataError(f"{path}:1: empty file (expected header "
                        f"{','.join(expected_header)})") from None
    if [h.strip() for h in header] != expected_header:
        f.close()
        raise DataError(f"{path}:1: expected header {','.join(expected_header)}, "
                        f"got {','.join(header)}")
    return f, reader


def _row_len(row, n, path, line):
    if len(row) != n:
        raise DataError(f"{path}:{line}: expected {n} fields, got {len(row)}")


def read_points(path, time_divisor: int = 1) -> list[RawPoint]:
    """Raw points, timestamps floored to integers after dividing by time_divisor."""
    if time_divisor < 1:
        raise DataError("time divisor must be a positive integer")
    f, reader = _open_csv(path, POINTS_HEADER)
    points = []
    with f:
        for row in reader:
            line = reader.line_num
            _row_len(row, 4, path, line)
            eid = _check_id(row[0], "entity_id", path, line)
            cid = _check_id(row[1], "concept_id", path, line, allow_eq=False)
            ts = _float(row[2], "timestamp", path, line)
            value = _float(row[3], "value", path, line)
            points.append(RawPoint(eid, cid, int(math.floor(ts / time_divisor + 1e-9)), value))
    return points


def write_points(points, path) -> None:
    """Canonical point dump: sorted, exact duplicates collapsed.

    Conflicting values at one (entity, concept, timestamp) are a data error —
    they would make the interpolation conflict rule order-dependent.
    """
    seen: dict[tuple, float] = {}
    for p in sorted(points, key=lambda p: (p.entity_id, p.concept_id, p.timestamp)):
        key = (p.entity_id, p.concept_id, p.timestamp)
        if key in seen and seen[key] != p.value:
            raise DataError(f"conflicting values {seen[key]!r} and {p.value!r} "
                            f"at entity={p.entity_id} concept={p.concept_id} t={p.timestamp}")
        seen[key] = p.value
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(POINTS_HEADER)
        for (eid, cid, ts), value in seen.items():
            w.writerow([eid, cid, ts, f"{value:.10g}"])


def read_intervals(path, labels: dict[str, str] | None = None) -> IntervalDatabase:
    f, reader = _open_csv(path, INTERVALS_HEADER)
    per_entity: dict[str, list[SymbolicInterval]] = {}
    with f:
        for row in reader:
            line = reader.line_num
            _row_len(row, 5, path, line)
            eid = _check_id(row[0], "entity_id", path, line)
            cid = _check_id(row[1], "concept_id", path, line, allow_eq=False)
            vid = _check_id(row[2], "value_id", path, line, allow_eq=False)
            start = _int(row[3], "start", path, line)
            end = _int(row[4], "end", path, line)
            if end < start:
                raise DataError(f"{path}:{line}: end {end} precedes start {start}")
            per_entity.setdefault(eid, []).append(
                SymbolicInterval(start, end, Symbol(cid, vid)))
    labels = labels or {}
    records = [EntityRecord(eid, tuple(ivs), labels.get(eid))
               for eid, ivs in sorted(per_entity.items())]
    return build_database(records)


def write_intervals(db: IntervalDatabase, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(INTERVALS_HEADER)
        for e in db.entities:
            for iv in e.intervals:
                w.writerow([e.entity_id, iv.symbol.concept_id, iv.symbol.value_id,
                            iv.start, iv.end])


def _read_two_column(path, header, what) -> dict[str, str]:
    f, reader = _open_csv(path, header)
    out: dict[str, str] = {}
    with f:
        for row in reader:
            line = reader.line_num
            _row_len(row, 2, path, line)
            eid = _check_id(row[0], "entity_id", path, line)
            val = _check_id(row[1], what, path, line)
            if eid in out and out[eid] != val:
                raise DataError(f"{path}:{line}: conflicting {what} for entity {eid!r}")
            out[eid] = val
    return out


def read_labels(path) -> dict[str, str]:
    return _read_two_column(path, LABELS_HEADER, "label")


def write_labels(labels: dict[str, str], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(LABELS_HEADER)
        for eid, label in sorted(labels.items()):
            w.writerow([eid, label])


def read_contexts(path) -> dict[str, str]:
    return _read_two_column(path, CONTEXTS_HEADER, "context")


def write_contexts(contexts: dict[str, str], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(CONTEXTS_HEADER)
        for eid, ctx in sorted(contexts.items()):
            w.writerow([eid, ctx])


def read_cutoffs(path) -> dict[str, CutoffSet]:
    f, reader = _open_csv(path, CUTOFFS_HEADER)
    rows: dict[str, dict] = {}
    with f:
        for row in reader:
            line = reader.line_num
            _row_len(row, 4, path, line)
            cid = _check_id(row[0], "concept_id", path, line, allow_eq=False)
            method = row[1]
            if method not in (EWD, SAX, TD4C_KL):
                raise DataError(f"{path}:{line}: unknown method {method!r}")
            idx = _int(row[2], "cutoff_index", path, line)
            val = _float(row[3], "cutoff_value", path, line)
            slot = rows.setdefault(cid, {"method": method, "cutoffs": {}})
            if slot["method"] != method:
                raise DataError(f"{path}:{line}: concept {cid!r} mixes methods")
            if idx in slot["cutoffs"]:
                raise DataError(f"{path}:{line}: duplicate cutoff_index {idx} "
                                f"for concept {cid!r}")
            slot["cutoffs"][idx] = val
    out = {}
    for cid, slot in rows.items():
        indices = sorted(slot["cutoffs"])
        if indices != list(range(len(indices))):
            raise DataError(f"{path}: concept {cid!r} cutoff indices not contiguous from 0")
        try:
            out[cid] = CutoffSet(cid, slot["method"],
                                 tuple(slot["cutoffs"][i] for i in indices))
        except ValueError as exc:
            raise DataError(f"{path}: concept {cid!r}: {exc}") from None
    return out


def write_cutoffs(cutoffs: dict[str, CutoffSet], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(CUTOFFS_HEADER)
        for cid in sorted(cutoffs):
            cs = cutoffs[cid]
            for i, v in enumerate(cs.cutoffs):
                w.writerow([cid, cs.method, i, f"{v:.10g}"])


def read_folds(path) -> dict[str, tuple[int, int]]:
    f, reader = _open_csv(path, FOLDS_HEADER)
    out: dict[str, tuple[int, int]] = {}
    with f:
        for row in reader:
            line = reader.line_num
            _row_len(row, 3, path, line)
            eid = _check_id(row[0], "entity_id", path, line)
            if eid in out:
                raise DataError(f"{path}:{line}: duplicate entity {eid!r}")
            out[eid] = (_int(row[1], "mining_fold", path, line),
                        _int(row[2], "cv_fold", path, line))
    return out


def write_folds(folds: dict[str, tuple[int, int]], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(FOLDS_HEADER)
        for eid in sorted(folds):
            mf, cf = folds[eid]
            w.writerow([eid, mf, cf])


# ---------------------------------------------------------------------------
# Pattern files


def _tirp_sort_key(entry):
    tirp = entry[0]
    return (tirp.size,
            ",".join(str(s) for s in tirp.symbols),
            "".join(rel_char(r, entry[4]) for r in tirp.relations))


def tirp_lines(tree: EnumerationTree):
    """(TIRP, support Fraction, mean_hor_sup, mean_duration) in canonical order."""
    mode = tree.config.relation.mode
    entries = []
    for node in tree.nodes():
        vs, mean_hs, mean_dur = tree.stats(node)
        entries.append((node.tirp, vs, mean_hs, mean_dur, mode))
    entries.sort(key=_tirp_sort_key)
    return [(t, vs, hs, dur) for t, vs, hs, dur, _ in entries]


def format_header(min_vs: Fraction, relations: str, sac_mode: str,
                  entities: int, runtime_ms: int) -> str:
    return (f"# min_vs={min_vs.numerator}/{min_vs.denominator}, "
            f"relations={relations}, sac={sac_mode}, entities={entities}, "
            f"runtime_ms={runtime_ms}")


def write_tirps(tree: EnumerationTree, path) -> None:
    cfg = tree.config
    lines = tirp_lines(tree)
    mode = cfg.relation.mode
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_header(cfg.min_ver_sup, mode, cfg.sac_mode,
                              tree.n_entities, tree.runtime_ms) + "\n")
        for tirp, vs, mean_hs, mean_dur in lines:
            syms = ",".join(str(s) for s in tirp.symbols)
            rels = "".join(rel_char(r, mode) for r in tirp.relations)
            f.write(f"{tirp.size}\t{syms}\t{rels}\t"
                    f"{vs.numerator}/{vs.denominator}\t"
                    f"{mean_hs:.6g}\t{mean_dur:.6g}\n")


def parse_tirp_header(line: str, path) -> dict:
    if not line.startswith("# "):
        raise DataError(f"{path}:1: missing pattern-file header")
    fields = {}
    for part in line[2:].strip().split(", "):
        if "=" not in part:
            raise DataError(f"{path}:1: malformed header field {part!r}")
        key, _, val = part.partition("=")
        fields[key] = val
    try:
        return {
            "min_vs": Fraction(fields["min_vs"]),
            "relations": fields["relations"],
            "sac": fields["sac"],
            "entities": int(fields["entities"]),
            "runtime_ms": int(fields["runtime_ms"]),
        }
    except (KeyError, ValueError) as exc:
        raise DataError(f"{path}:1: malformed header ({exc})") from None


def read_tirps(path):
    """Returns (header dict, list of (TIRP, support, mean_hor_sup, mean_duration)).

    List order is file order; 1-based positions are the Tn column ids and the
    tirp_line_no values of instance dumps.
    """
    with open(path, encoding="utf-8") as f:
        raw = f.read().splitlines()
    if not raw:
        raise DataError(f"{path}:1: empty pattern file")
    header = parse_tirp_header(raw[0], path)
    mode = header["relations"]
    if mode not in (ALLEN7, ABSTRACT3):
        raise DataError(f"{path}:1: unknown relations mode {mode!r}")
    out = []
    for lineno, line in enumerate(raw[1:], start=2):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 6:
            raise DataError(f"{path}:{lineno}: expected 6 tab-separated fields")
        k = _int(parts[0], "size", path, lineno)
        symbols = []
        for tok in parts[1].split(","):
            cid, eq, vid = tok.partition("=")
            if not eq or not cid or not vid:
                raise DataError(f"{path}:{lineno}: malformed symbol {tok!r}")
            symbols.append(Symbol(cid, vid))
        if len(symbols) != k:
            raise DataError(f"{path}:{lineno}: size {k} but {len(symbols)} symbols")
        want = k * (k - 1) // 2
        if len(parts[2]) != want:
            raise DataError(f"{path}:{lineno}: expected {want} relation chars, "
                            f"got {len(parts[2])}")
        try:
            for ch in parts[2]:
                if mode_of_char(ch) != mode:
                    raise ValueError(f"relation char {ch!r} does not belong to mode {mode!r}")
            relations = tuple(code_from_char(ch) for ch in parts[2])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
        try:
            support = Fraction(parts[3])
        except (ValueError, ZeroDivisionError):
            raise DataError(f"{path}:{lineno}: malformed support {parts[3]!r}") from None
        mean_hs = _float(parts[4], "mean_hor_sup", path, lineno)
        mean_dur = _float(parts[5], "mean_duration", path, lineno)
        out.append((TIRP(tuple(symbols), relations), support, mean_hs, mean_dur))
    return header, out


def write_instance_dump(rows, path) -> None:
    """Rows of (entity_id, tirp_line_no, index tuple); written in given order."""
    with open(path, "w", encoding="utf-8") as f:
        for eid, line_no, indices in rows:
            f.write(f"{eid}\t{line_no}\t{','.join(str(i) for i in indices)}\n")


def read_instance_dump(path):
    out = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 tab-separated fields")
            indices = tuple(_int(t, "index", path, lineno) for t in parts[2].split(","))
            out.append((parts[0], _int(parts[1], "tirp_line_no", path, lineno), indices))
    return out


def write_features(entity_ids, labels, matrix, path, source: str) -> None:
    n_cols = matrix.shape[1] if matrix.size else 0
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(f"# source={source}\n")
        w = csv.writer(f)
        w.writerow(["entity_id", "label"] + [f"T{i}" for i in range(1, n_cols + 1)])
        for row_i, eid in enumerate(entity_ids):
            label = labels[row_i] if labels[row_i] is not None else ""
            w.writerow([eid, label] + [f"{v:.6g}" for v in matrix[row_i]])


def read_features(path):
    """Returns (source, entity_ids, labels with None for blank, float matrix rows)."""
    with open(path, encoding="utf-8") as f:
        first = f.readline().rstrip("\n")
        if not first.startswith("# source="):
            raise DataError(f"{path}:1: missing '# source=' line")
        source = first[len("# source="):]
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}:2: missing feature header") from None
        if header[:2] != ["entity_id", "label"]:
            raise DataError(f"{path}:2: feature header must start with entity_id,label")
        n_cols = len(header) - 2
        entity_ids, labels, rows = [], [], []
        for row in reader:
            line = reader.line_num + 1  # account for the source comment line
            _row_len(row, n_cols + 2, path, line)
            entity_ids.append(row[0])
            labels.append(row[1] or None)
            rows.append([_float(v, "feature", path, line) for v in row[2:]])
    return source, entity_ids, labels, rows


def write_bench(rows, path) -> None:
    """Rows of dicts with the bench header's keys, written in given order."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(BENCH_HEADER)
        for r in rows:
            vs = r["min_vs"]
            w.writerow([r["abstraction"], r["relations"], r["sac"],
                        f"{vs.numerator}/{vs.denominator}",
                        r["n_tirps"], r["runtime_ms"], r["peak_candidates"]])
