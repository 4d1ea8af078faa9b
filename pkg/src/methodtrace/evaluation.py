"""Oracle ingestion and scoring: commit-level and method-level
precision/recall/F1, plus wall-clock runtime statistics.

Commit-level scores aggregate TP/FP/FN over all methods before computing
percentages; method-level scores are computed per method and then
arithmetic-mean averaged (including each method's own F1, not the harmonic
mean of the averaged precision/recall).
"""

from __future__ import annotations

import json
import logging
import statistics
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Iterable

from .errors import EmptyInput, MalformedOracleFile
from .tracing import ChangeKind, MethodHistory

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleChange:
    commit: str
    kinds: frozenset[str]  # canonical ChangeKind values or opaque foreign tags


@dataclass
class OracleEntry:
    repository: str
    start_commit: str
    file: str
    method_name: str
    start_line: int
    expected: list[OracleChange]  # newest -> oldest


@dataclass(frozen=True)
class MetricCounts:
    tp: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError("counts must be non-negative")

    def __add__(self, other: "MetricCounts") -> "MetricCounts":
        return MetricCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


@dataclass(frozen=True)
class Scores:
    precision: float  # percentage, 2 decimals
    recall: float
    f1: float


@dataclass(frozen=True)
class RuntimeStats:
    mean: float
    median: float
    min: float
    max: float


def _round2(value: float) -> float:
    return float(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _ratio(numerator: int, denominator: int) -> float:
    """Proportion with the zero-denominator convention: perfect when there
    was nothing to predict (or nothing expected)."""
    if denominator == 0:
        return 1.0
    return numerator / denominator


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def commit_level_scores(counts: Iterable[MetricCounts]) -> Scores:
    """Sum TP/FP/FN across methods, then compute percentages."""
    counts = list(counts)
    if not counts:
        raise EmptyInput("no counts to aggregate")
    total = MetricCounts(0, 0, 0)
    for c in counts:
        total = total + c
    precision = _ratio(total.tp, total.tp + total.fp)
    recall = _ratio(total.tp, total.tp + total.fn)
    return Scores(
        precision=_round2(precision * 100.0),
        recall=_round2(recall * 100.0),
        f1=_round2(_f1(precision, recall) * 100.0),
    )


def method_level_scores(per_method: Iterable[MetricCounts]) -> Scores:
    """Per-method percentages averaged arithmetically across methods."""
    per_method = list(per_method)
    if not per_method:
        raise EmptyInput("no per-method counts")
    precisions, recalls, f1s = [], [], []
    for c in per_method:
        p = _ratio(c.tp, c.tp + c.fp)
        r = _ratio(c.tp, c.tp + c.fn)
        precisions.append(p)
        recalls.append(r)
        f1s.append(_f1(p, r))
    n = len(per_method)
    return Scores(
        precision=_round2(sum(precisions) / n * 100.0),
        recall=_round2(sum(recalls) / n * 100.0),
        f1=_round2(sum(f1s) / n * 100.0),
    )


def compare(
    actual: MethodHistory,
    expected: OracleEntry,
    kind_filter: set[ChangeKind] | None = None,
) -> MetricCounts:
    """Count commit matches between a traced history and an oracle entry.

    Both sides are filtered to commits carrying at least one kind in
    ``kind_filter`` (no filtering when None); matching is by commit id only.
    """
    filter_values = {k.value for k in kind_filter} if kind_filter is not None else None

    def keep(kinds: Iterable[str]) -> bool:
        return filter_values is None or bool(set(kinds) & filter_values)

    actual_ids = {
        r.commit.id for r in actual.records if keep(k.value for k in r.kinds)
    }
    expected_ids = {c.commit for c in expected.expected if keep(c.kinds)}
    tp = len(actual_ids & expected_ids)
    return MetricCounts(
        tp=tp, fp=len(actual_ids) - tp, fn=len(expected_ids) - tp
    )


def runtime_stats(durations: Iterable[float]) -> RuntimeStats:
    """Mean/median/min/max of wall-clock seconds, rounded to 2 decimals."""
    values = list(durations)
    if not values:
        raise EmptyInput("no durations")
    return RuntimeStats(
        mean=_round2(statistics.fmean(values)),
        median=_round2(statistics.median(values)),
        min=_round2(min(values)),
        max=_round2(max(values)),
    )


# -- oracle loading -----------------------------------------------------------

_KIND_ALIASES = {
    "introduced": ChangeKind.INTRODUCED.value,
    "bodychange": ChangeKind.BODY_CHANGE.value,
    "body": ChangeKind.BODY_CHANGE.value,
    "rename": ChangeKind.RENAME.value,
    "methodrename": ChangeKind.RENAME.value,
    "signaturechange": ChangeKind.SIGNATURE_CHANGE.value,
    "returntypechange": ChangeKind.SIGNATURE_CHANGE.value,
    "parameterchange": ChangeKind.PARAMETER_CHANGE.value,
    "parametermetachange": ChangeKind.PARAMETER_CHANGE.value,
    "annotationchange": ChangeKind.ANNOTATION_CHANGE.value,
    "javadocchange": ChangeKind.JAVADOC_CHANGE.value,
    "documentationchange": ChangeKind.JAVADOC_CHANGE.value,
    "formatchange": ChangeKind.FORMATTING_CHANGE.value,
    "formattingchange": ChangeKind.FORMATTING_CHANGE.value,
    "filerename": ChangeKind.FILE_RENAME.value,
    "filemove": ChangeKind.FILE_RENAME.value,
    "methodmove": ChangeKind.METHOD_MOVE.value,
    "movefromfile": ChangeKind.METHOD_MOVE.value,
    "mergeresolutionchange": ChangeKind.MERGE_RESOLUTION_CHANGE.value,
}


def _map_kind(raw: str) -> list[str]:
    """Canonical kind values for a foreign change-type tag; unmappable tags
    come back unchanged so they survive as opaque markers."""
    text = raw.strip()
    key = text.lower().replace(" ", "").replace("_", "").replace("-", "")
    key = key.removeprefix("y")
    if key.startswith("multichange(") and key.endswith(")"):
        inner = text[text.index("(") + 1 : text.rindex(")")]
        out: list[str] = []
        for part in inner.split(","):
            out.extend(_map_kind(part))
        return out
    return [_KIND_ALIASES.get(key, text)]


def _native_entry(doc: dict, origin: str) -> OracleEntry:
    try:
        expected = [
            OracleChange(commit=item["commit"], kinds=frozenset(item["kinds"]))
            for item in doc["expected"]
        ]
        entry = OracleEntry(
            repository=doc["repository"],
            start_commit=doc["start_commit"],
            file=doc["file"],
            method_name=doc["method_name"],
            start_line=int(doc["start_line"]),
            expected=expected,
        )
    except (KeyError, TypeError) as exc:
        raise MalformedOracleFile(f"{origin}: missing field {exc}") from exc
    if not entry.expected:
        raise MalformedOracleFile(f"{origin}: expected history is empty")
    commits = [c.commit for c in entry.expected]
    if len(commits) != len(set(commits)):
        raise MalformedOracleFile(f"{origin}: duplicate commits in expected history")
    return entry


def _codeshovel_entry(doc: dict, origin: str) -> OracleEntry:
    try:
        repository = doc["repositoryName"]
        file = doc["filePath"]
        method = doc["functionName"]
        line = int(doc.get("functionStartLine", 0))
        start = doc.get("startCommitName") or doc.get("startCommit") or ""
    except (KeyError, TypeError) as exc:
        raise MalformedOracleFile(f"{origin}: missing field {exc}") from exc
    raw = doc.get("expectedResult", doc)
    changes: list[OracleChange] = []
    short = raw.get("changeHistoryShort") if isinstance(raw, dict) else None
    history = raw.get("changeHistory") if isinstance(raw, dict) else None
    if isinstance(short, dict) and short:
        for sha, kind in short.items():
            changes.append(OracleChange(commit=sha, kinds=frozenset(_map_kind(str(kind)))))
    elif isinstance(history, list) and history:
        changes = [OracleChange(commit=sha, kinds=frozenset()) for sha in history]
    elif isinstance(raw, dict):
        # oldest layout: {sha: kind, ...} directly under expectedResult
        for sha, kind in raw.items():
            if isinstance(kind, str) and len(sha) >= 7:
                changes.append(OracleChange(commit=sha, kinds=frozenset(_map_kind(kind))))
    if not changes:
        raise MalformedOracleFile(f"{origin}: no change history found")
    return OracleEntry(
        repository=repository, start_commit=start, file=file,
        method_name=method, start_line=line, expected=changes,
    )


def _codetracker_entry(doc: dict, origin: str) -> OracleEntry:
    try:
        repository = doc.get("repositoryName") or doc["repositoryWebURL"]
        file = doc["filePath"]
        method = doc.get("functionName") or doc.get("methodName") or ""
        line = int(doc.get("functionStartLine") or doc.get("startLine") or 0)
        start = doc.get("startCommitId") or doc.get("startCommitName") or ""
        raw_changes = doc["expectedChanges"]
    except (KeyError, TypeError) as exc:
        raise MalformedOracleFile(f"{origin}: missing field {exc}") from exc
    grouped: dict[str, set[str]] = {}
    order: list[str] = []
    for item in raw_changes:
        if not isinstance(item, dict) or "commitId" not in item:
            raise MalformedOracleFile(f"{origin}: malformed expectedChanges item")
        sha = item["commitId"]
        if sha not in grouped:
            grouped[sha] = set()
            order.append(sha)
        grouped[sha].update(_map_kind(str(item.get("changeType", ""))))
    if not grouped:
        raise MalformedOracleFile(f"{origin}: no change history found")
    return OracleEntry(
        repository=repository, start_commit=start, file=file,
        method_name=method, start_line=line,
        expected=[OracleChange(sha, frozenset(grouped[sha])) for sha in order],
    )


_PARSERS = {
    "native": _native_entry,
    "codeshovel": _codeshovel_entry,
    "codetracker": _codetracker_entry,
}


def load_oracle(
    directory: str | Path,
    format: str = "native",
    diagnostics: list[str] | None = None,
) -> list[OracleEntry]:
    """Parse a directory of oracle JSON files.

    Unreadable or structurally invalid files are skipped with a diagnostic
    (collected into ``diagnostics`` when given, logged otherwise).
    """
    if format not in _PARSERS:
        raise ValueError(f"unknown oracle format {format!r}")
    parser = _PARSERS[format]
    entries: list[OracleEntry] = []
    for path in sorted(Path(directory).glob("*.json")):
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
            entries.append(parser(doc, path.name))
        except (json.JSONDecodeError, MalformedOracleFile, OSError) as exc:
            message = f"skipped {path.name}: {exc}"
            if diagnostics is not None:
                diagnostics.append(message)
            else:
                logger.warning("%s", message)
    return entries


# -- report rendering ---------------------------------------------------------


@dataclass
class ScoreRow:
    oracle: str
    tool: str
    counts: MetricCounts
    commit_scores: Scores
    method_scores: Scores | None = None


def report_json(rows: list[ScoreRow]) -> str:
    payload = []
    for row in rows:
        item = {
            "oracle": row.oracle,
            "tool": row.tool,
            "tp": row.counts.tp,
            "fp": row.counts.fp,
            "fn": row.counts.fn,
            "precision": row.commit_scores.precision,
            "recall": row.commit_scores.recall,
            "f1": row.commit_scores.f1,
        }
        if row.method_scores is not None:
            item["method_precision"] = row.method_scores.precision
            item["method_recall"] = row.method_scores.recall
            item["method_f1"] = row.method_scores.f1
        payload.append(item)
    return json.dumps(payload, indent=2) + "\n"


def report_table(rows: list[ScoreRow]) -> str:
    """Aligned text table with TP/FP/FN and commit-level percentages."""
    headers = ["Oracle", "Tool", "TP", "FP", "FN", "Precision", "Recall", "F1"]
    body = [
        [
            row.oracle,
            row.tool,
            str(row.counts.tp),
            str(row.counts.fp),
            str(row.counts.fn),
            f"{row.commit_scores.precision:.2f}",
            f"{row.commit_scores.recall:.2f}",
            f"{row.commit_scores.f1:.2f}",
        ]
        for row in rows
    ]
    widths = [max(len(headers[i]), *(len(r[i]) for r in body)) if body else len(headers[i])
              for i in range(len(headers))]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * widths[i] for i in range(len(headers))),
    ]
    for r in body:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(len(headers))))
    return "\n".join(lines) + "\n"
