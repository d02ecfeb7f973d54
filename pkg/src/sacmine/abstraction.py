"""Raw time-stamped points to symbolic intervals.

Discretization (knowledge-based bins, equal-width, SAX, class-supervised
divergence search), then temporal interpolation through per-concept validity
windows with same-symbol merging and later-wins conflict truncation.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.stats import norm

from .errors import DataError
from .model import EntityRecord, IntervalDatabase, Symbol, SymbolicInterval, build_database

KB = "kb"
EWD = "ewd"
SAX = "sax"
TD4C_KL = "td4c-kl"
METHODS = (KB, EWD, SAX, TD4C_KL)

_KL_EPS = 1e-9  # add-epsilon smoothing for the divergence; small enough to
                # leave every desk-scale argmax untouched


@dataclass(frozen=True)
class RawPoint:
    entity_id: str
    concept_id: str
    timestamp: int
    value: float


class StatePoint(NamedTuple):
    entity_id: str
    concept_id: str
    timestamp: int
    value_id: str


@dataclass(frozen=True)
class Bin:
    value_id: str
    low: float | None
    high: float | None
    rank: int
    low_open: bool = False
    high_open: bool = False

    def contains(self, v: float) -> bool:
        if self.low is not None and (v < self.low or (self.low_open and v == self.low)):
            return False
        if self.high is not None and (v > self.high or (self.high_open and v == self.high)):
            return False
        return True


@dataclass(frozen=True)
class ConceptSpec:
    concept_id: str
    contexts: tuple[tuple[str, tuple[Bin, ...]], ...]  # (selector, bins); "" = default
    validity: tuple[int, int]  # (before, after)


@dataclass(frozen=True)
class KnowledgeBase:
    concepts: dict[str, ConceptSpec]

    def windows(self) -> dict[str, tuple[int, int]]:
        return {cid: spec.validity for cid, spec in self.concepts.items()}


def load_kb(path) -> KnowledgeBase:
    with open(path, encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON ({exc})") from None
    return parse_kb(raw, source=str(path))


def parse_kb(raw, source="<kb>") -> KnowledgeBase:
    concepts: dict[str, ConceptSpec] = {}
    for c in raw.get("concepts", []):
        try:
            cid = c["id"]
            validity = (int(c["validity"]["before"]), int(c["validity"]["after"]))
            contexts = []
            for ctx in c["contexts"]:
                bins = tuple(
                    Bin(
                        value_id=str(b["value"]),
                        low=None if b.get("low") is None else float(b["low"]),
                        high=None if b.get("high") is None else float(b["high"]),
                        rank=int(b["rank"]),
                        low_open=bool(b.get("low_open", False)),
                        high_open=bool(b.get("high_open", False)),
                    )
                    for b in ctx["bins"]
                )
                contexts.append((str(ctx.get("selector", "")), bins))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{source}: malformed knowledge base entry ({exc})") from None
        if validity[0] < 0 or validity[1] < 0:
            raise DataError(f"{source}: concept {cid!r} has a negative validity window")
        concepts[cid] = ConceptSpec(cid, tuple(contexts), validity)
    if not concepts:
        raise DataError(f"{source}: knowledge base defines no concepts")
    return KnowledgeBase(concepts)


def kb_state(concept_id: str, context: str | None, value: float, kb: KnowledgeBase) -> str:
    """Value id of the matching bin; overlapping matches resolve to max rank."""
    spec = kb.concepts.get(concept_id)
    if spec is None:
        raise DataError(f"concept {concept_id!r} not in knowledge base")
    bins = _context_bins(spec, context)
    best = None
    for b in bins:
        if b.contains(value) and (best is None or b.rank > best.rank):
            best = b
    if best is None:
        raise DataError(f"no bin of concept {concept_id!r} covers value {value!r}")
    return best.value_id


def _context_bins(spec: ConceptSpec, context: str | None):
    wanted = context or ""
    default = None
    for selector, bins in spec.contexts:
        if selector == wanted:
            return bins
        if selector == "":
            default = bins
    if default is None:
        raise DataError(f"concept {spec.concept_id!r} has no context matching {context!r}")
    return default


@dataclass(frozen=True)
class CutoffSet:
    concept_id: str
    method: str
    cutoffs: tuple[float, ...]

    def __post_init__(self):
        if not self.cutoffs or any(b <= a for a, b in zip(self.cutoffs, self.cutoffs[1:])):
            raise ValueError("cutoffs must be non-empty and strictly increasing")


def bin_index(value: float, cutoffs) -> int:
    """Index of the first cutoff strictly greater than value; bins left-closed."""
    return bisect_right(cutoffs, value)


def ewd_cutoffs(concept_id: str, values, bins: int = 3) -> CutoffSet:
    """Equal-width cutoffs at min + i*(max-min)/bins."""
    if bins < 2:
        raise DataError("ewd needs bins >= 2")
    lo = min(values)
    hi = max(values)
    if lo == hi:
        raise DataError(f"concept {concept_id!r}: all values identical; ewd undefined")
    width = (hi - lo) / bins
    return CutoffSet(concept_id, EWD, tuple(lo + i * width for i in range(1, bins)))


def sax_breakpoints(bins: int) -> tuple[float, ...]:
    """Equiprobable standard-normal breakpoints."""
    if bins < 2:
        raise DataError("sax needs bins >= 2")
    return tuple(float(norm.ppf(i / bins)) for i in range(1, bins))


def sax_symbols(points: list[RawPoint], bins: int = 3, paa_window: int = 1,
                breakpoints=None) -> list[StatePoint]:
    """Discretize one entity-concept series.

    Z-normalizes with the population standard deviation (a zero-variance
    series maps to z = 0, the middle bin), averages non-overlapping windows of
    paa_window points (the trailing partial window stands on its own), stamps
    each window at the floor midpoint of its first and last timestamps, and
    bins by equiprobable normal breakpoints.
    """
    if paa_window < 1:
        raise DataError("paa window must be >= 1")
    if breakpoints is None:
        breakpoints = sax_breakpoints(bins)
    pts = sorted(points, key=lambda p: p.timestamp)
    vals = np.asarray([p.value for p in pts], dtype=float)
    sd = float(vals.std())
    z = np.zeros(len(vals)) if sd == 0.0 else (vals - float(vals.mean())) / sd
    out = []
    for w in range(0, len(pts), paa_window):
        chunk = pts[w:w + paa_window]
        zmean = float(z[w:w + len(chunk)].mean())
        ts = (chunk[0].timestamp + chunk[-1].timestamp) // 2
        out.append(StatePoint(chunk[0].entity_id, chunk[0].concept_id, ts,
                              str(bin_index(zmean, breakpoints))))
    return out


def td4c_kl_cutoffs(concept_id: str, values, labels, bins: int = 3,
                    percentile_step: int = 5) -> CutoffSet:
    """Greedy divergence-maximizing cutoffs over pooled-percentile candidates.

    Each greedy step picks the candidate whose induced per-class state
    distributions maximize the pairwise symmetric Kullback-Leibler divergence
    (add-epsilon smoothed); ties resolve to the smaller cutoff value.
    """
    if bins < 2:
        raise DataError("td4c needs bins >= 2")
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise DataError(f"concept {concept_id!r}: td4c needs at least 2 classes")
    arr = np.asarray(list(values), dtype=float)
    candidates = sorted({float(np.percentile(arr, p)) for p in range(percentile_step, 100, percentile_step)})
    if len(candidates) < bins - 1:
        raise DataError(f"concept {concept_id!r}: {len(candidates)} distinct candidates "
                        f"cannot supply {bins - 1} cutoffs")
    pairs = list(zip(arr.tolist(), labels))
    selected: list[float] = []
    for _ in range(bins - 1):
        best = None
        best_score = -math.inf
        for cand in candidates:
            if cand in selected:
                continue
            score = _symmetric_kl(pairs, classes, sorted(selected + [cand]))
            if score > best_score:
                best = cand
                best_score = score
        selected.append(best)
    return CutoffSet(concept_id, TD4C_KL, tuple(sorted(selected)))


def _symmetric_kl(pairs, classes, cutoffs) -> float:
    nbins = len(cutoffs) + 1
    counts = {cl: [0] * nbins for cl in classes}
    for v, label in pairs:
        counts[label][bisect_right(cutoffs, v)] += 1
    dists = []
    for cl in classes:
        total = sum(counts[cl]) + _KL_EPS * nbins
        dists.append([(c + _KL_EPS) / total for c in counts[cl]])
    score = 0.0
    for a in range(len(dists)):
        for b in range(a + 1, len(dists)):
            for pa, pb in zip(dists[a], dists[b]):
                score += pa * math.log(pa / pb) + pb * math.log(pb / pa)
    return score


def interpolate(points: list[StatePoint], windows: dict[str, tuple[int, int]]):
    """Expand state points into maximal symbolic intervals.

    Each point (t, symbol) becomes [t - before, t + after]. Same-symbol
    intervals that overlap or meet merge; when different values of one concept
    overlap, the later measurement wins and the earlier interval's end is
    truncated to the later's start (an interval truncated to nothing is
    dropped). Returns entity_id -> interval list (unsorted across concepts).
    """
    series: dict[tuple[str, str], list[StatePoint]] = {}
    for p in points:
        series.setdefault((p.entity_id, p.concept_id), []).append(p)
    out: dict[str, list[SymbolicInterval]] = {}
    for (eid, cid), pts in sorted(series.items()):
        win = windows.get(cid)
        if win is None:
            raise DataError(f"no validity window for concept {cid!r}")
        before, after = win
        stack: list[SymbolicInterval] = []
        for p in sorted(pts, key=lambda p: (p.timestamp, p.value_id)):
            cur = SymbolicInterval(p.timestamp - before, p.timestamp + after,
                                   Symbol(cid, p.value_id))
            if stack:
                top = stack[-1]
                if top.symbol == cur.symbol and cur.start <= top.end:
                    stack[-1] = SymbolicInterval(top.start, max(top.end, cur.end), top.symbol)
                    continue
                if cur.start < top.end:
                    if cur.start <= top.start:
                        stack.pop()
                    else:
                        stack[-1] = SymbolicInterval(top.start, cur.start, top.symbol)
            stack.append(cur)
        out.setdefault(eid, []).extend(stack)
    return out


def abstract_points(points: list[RawPoint], method: str, *, bins: int = 3,
                    kb: KnowledgeBase | None = None, contexts: dict[str, str] | None = None,
                    labels: dict[str, str] | None = None, paa_window: int = 1,
                    default_window: tuple[int, int] = (1, 1),
                    cutoffs_in: dict[str, CutoffSet] | None = None,
                    percentile_step: int = 5,
                    entity_labels: dict[str, str] | None = None):
    """Full abstraction workflow: discretize, interpolate, build the database.

    Returns (IntervalDatabase, cutoff sets or None). Cutoff-based methods learn
    from the given points unless cutoffs_in supplies pre-learned values (for
    applying training-fold cutoffs to held-out data). entity_labels, when
    given, are attached to the resulting records.
    """
    if method not in METHODS:
        raise DataError(f"unknown abstraction method {method!r}")
    if not points:
        raise DataError("no points to abstract")
    windows = dict(kb.windows()) if kb else {}
    concepts = sorted({p.concept_id for p in points})
    for cid in concepts:
        windows.setdefault(cid, default_window)

    state_points: list[StatePoint] = []
    cutoff_sets: dict[str, CutoffSet] | None = None

    if method == KB:
        if kb is None:
            raise DataError("kb abstraction requires a knowledge base")
        contexts = contexts or {}
        for p in points:
            vid = kb_state(p.concept_id, contexts.get(p.entity_id), p.value, kb)
            state_points.append(StatePoint(p.entity_id, p.concept_id, p.timestamp, vid))
    elif method == SAX:
        cutoff_sets = {}
        for cid in concepts:
            bp = cutoffs_in[cid].cutoffs if cutoffs_in and cid in cutoffs_in else sax_breakpoints(bins)
            cutoff_sets[cid] = CutoffSet(cid, SAX, tuple(bp))
        by_ec: dict[tuple[str, str], list[RawPoint]] = {}
        for p in points:
            by_ec.setdefault((p.entity_id, p.concept_id), []).append(p)
        for (eid, cid), pts in sorted(by_ec.items()):
            state_points.extend(sax_symbols(pts, bins, paa_window, cutoff_sets[cid].cutoffs))
    else:
        cutoff_sets = {}
        by_c: dict[str, list[RawPoint]] = {}
        for p in points:
            by_c.setdefault(p.concept_id, []).append(p)
        for cid in concepts:
            if cutoffs_in and cid in cutoffs_in:
                cutoff_sets[cid] = cutoffs_in[cid]
            elif method == EWD:
                cutoff_sets[cid] = ewd_cutoffs(cid, [p.value for p in by_c[cid]], bins)
            else:
                if labels is None:
                    raise DataError("td4c abstraction requires entity labels")
                missing = {p.entity_id for p in by_c[cid]} - set(labels)
                if missing:
                    raise DataError(f"entities without labels: {sorted(missing)[:5]}")
                cutoff_sets[cid] = td4c_kl_cutoffs(
                    cid,
                    [p.value for p in by_c[cid]],
                    [labels[p.entity_id] for p in by_c[cid]],
                    bins,
                    percentile_step,
                )
        for p in points:
            vid = str(bin_index(p.value, cutoff_sets[p.concept_id].cutoffs))
            state_points.append(StatePoint(p.entity_id, p.concept_id, p.timestamp, vid))

    per_entity = interpolate(state_points, windows)
    entity_labels = entity_labels or {}
    records = [
        EntityRecord(eid, tuple(ivs), entity_labels.get(eid))
        for eid, ivs in sorted(per_entity.items())
    ]
    db = build_database(records, validity=windows)
    return db, cutoff_sets
