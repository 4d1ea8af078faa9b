"""The three-stage method location cascade: exact signature match, in-file
body-similarity match, and cross-file search over the commit's changed files.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .errors import FileAbsentAtCommit
from .gitrepo import DiffEntry, RepoHandle, list_changed_files, read_file
from .javasource import MethodRecord, ParsedFile, parse_methods
from .similarity import method_similarity


@dataclass(frozen=True)
class MatchThresholds:
    same_file: float = 0.70
    cross_file: float = 0.75

    def __post_init__(self):
        if not (0.0 < self.same_file <= self.cross_file <= 1.0):
            raise ValueError(
                f"thresholds must satisfy 0 < same_file <= cross_file <= 1, "
                f"got {self.same_file}/{self.cross_file}"
            )


@dataclass(frozen=True)
class MatchResult:
    method: MethodRecord | None
    score: float
    source_file: str | None
    diagnostics: tuple[str, ...] = ()
    diff_entry: DiffEntry | None = None  # set on cross-file hits

    @property
    def hit(self) -> bool:
        return self.method is not None


_MISS = MatchResult(method=None, score=0.0, source_file=None)


class ParseCache:
    """(commit, file) -> ParsedFile, safe for concurrent read/insert."""

    def __init__(self):
        self._store: dict[tuple[str, str], ParsedFile] = {}
        self._lock = threading.Lock()

    def parse(self, repo: RepoHandle, commit: str, file: str) -> ParsedFile:
        key = (commit, file)
        with self._lock:
            cached = self._store.get(key)
        if cached is not None:
            return cached
        try:
            text = read_file(repo, commit, file)
        except FileAbsentAtCommit:
            parsed = ParsedFile(
                file=file, methods=[], parse_ok=False,
                diagnostics=[f"FileAbsentAtCommit: {file} at {commit[:12]}"],
                commit=commit,
            )
        else:
            parsed = parse_methods(text, file)
            parsed.commit = commit
        with self._lock:
            self._store.setdefault(key, parsed)
        return parsed


class Matcher:
    """Cascade runner bound to one repository handle.

    ``counters`` records how often each stage ran, making cascade
    precedence observable in tests.
    """

    def __init__(
        self,
        repo: RepoHandle,
        thresholds: MatchThresholds | None = None,
        cache: ParseCache | None = None,
    ):
        self.repo = repo
        self.thresholds = thresholds or MatchThresholds()
        self.cache = cache or ParseCache()
        self.counters = {"signature": 0, "body": 0, "alt_file": 0}

    # -- stages ----------------------------------------------------------

    def find_by_signature_match(self, commit: str, file: str, target: MethodRecord) -> MatchResult:
        """The unique method at (commit, file) with the target's signature."""
        self.counters["signature"] += 1
        parsed = self.cache.parse(self.repo, commit, file)
        if not parsed.parse_ok:
            return MatchResult(None, 0.0, None, tuple(parsed.diagnostics))
        hits = [m for m in parsed.methods if m.signature == target.signature]
        if not hits:
            return _MISS
        return MatchResult(method=hits[0], score=1.0, source_file=file)

    def find_by_body_match(
        self, commit: str, file: str, target: MethodRecord, threshold: float
    ) -> MatchResult:
        """Highest-scoring method strictly above the threshold.

        Ties break toward the target's simple name, then the smallest
        start-line distance, then the lower start line.
        """
        if not (0.0 < threshold <= 1.0):
            raise ValueError(f"threshold must be in (0, 1], got {threshold}")
        self.counters["body"] += 1
        parsed = self.cache.parse(self.repo, commit, file)
        if not parsed.parse_ok:
            return MatchResult(None, 0.0, None, tuple(parsed.diagnostics))
        best: MethodRecord | None = None
        best_key: tuple | None = None
        best_score = 0.0
        for m in parsed.methods:
            score = method_similarity(m, target)
            if score <= threshold:
                continue
            key = (
                score,
                m.name == target.name,
                -abs(m.start_line - target.start_line),
                -m.start_line,
            )
            if best_key is None or key > best_key:
                best, best_key, best_score = m, key, score
        if best is None:
            return _MISS
        return MatchResult(method=best, score=best_score, source_file=file)

    def alt_file_match(self, commit: str, parent: str, target: MethodRecord) -> MatchResult:
        """Search the target method in the other files changed at ``commit``
        relative to ``parent``, looking at the parent-side paths."""
        self.counters["alt_file"] += 1
        entries = list_changed_files(self.repo, commit, parent)
        best = _MISS
        for entry in entries:
            candidate = entry.old_path
            if candidate is None or candidate == target.file:
                continue
            if not candidate.endswith(".java"):
                continue
            result = self.find_by_body_match(
                parent, candidate, target, self.thresholds.cross_file
            )
            if result.hit and result.score > best.score:
                best = MatchResult(
                    method=result.method,
                    score=result.score,
                    source_file=candidate,
                    diff_entry=entry,
                )
        return best

    # -- cascade ----------------------------------------------------------

    def locate_in_file(self, commit: str, file: str, target: MethodRecord) -> MatchResult:
        """Signature stage, then body stage; no cross-file search."""
        result = self.find_by_signature_match(commit, file, target)
        if result.hit:
            return result
        return self.find_by_body_match(commit, file, target, self.thresholds.same_file)
