"""Method history tracing: breadth-first traversal of the file-filtered
commit DAG with change detection, merge handling, recursion across file
moves/renames, and introduction-commit determination.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    FileAbsentAtCommit,
    MethodNotFound,
    ParseFailureAtStart,
    StartFileAbsent,
    StartMethodNotFound,
)
from .gitrepo import (
    CommitMeta,
    DiffKind,
    FileDag,
    RepoHandle,
    build_file_dag,
    read_file,
    resolve_commit,
)
from .javasource import MethodRecord, find_method, normalize_java_text
from .matching import Matcher, MatchResult, MatchThresholds, ParseCache
from .similarity import method_similarity


class ChangeKind(str, Enum):
    INTRODUCED = "Introduced"
    BODY_CHANGE = "BodyChange"
    SIGNATURE_CHANGE = "SignatureChange"
    RENAME = "Rename"
    PARAMETER_CHANGE = "ParameterChange"
    ANNOTATION_CHANGE = "AnnotationChange"
    JAVADOC_CHANGE = "JavadocChange"
    FORMATTING_CHANGE = "FormattingChange"
    FILE_RENAME = "FileRename"
    METHOD_MOVE = "MethodMove"
    MERGE_RESOLUTION_CHANGE = "MergeResolutionChange"


@dataclass(frozen=True)
class TraversalNode:
    commit: str
    file: str
    name: str
    line: int


@dataclass(frozen=True)
class TracerConfig:
    thresholds: MatchThresholds = field(default_factory=MatchThresholds)
    include_formatting: bool = True
    include_javadoc: bool = True
    include_annotations: bool = True
    max_commits: int | None = None  # safety valve; None = unbounded


@dataclass(frozen=True)
class ChangeRecord:
    commit: CommitMeta
    kinds: frozenset[ChangeKind]
    file_before: str
    file_after: str
    name_before: str
    name_after: str
    start_line_after: int
    method_before: MethodRecord | None
    method_after: MethodRecord
    contributor: str


@dataclass
class MethodHistory:
    locator: TraversalNode
    records: list[ChangeRecord]  # newest -> oldest
    complete: bool


def classify_change(
    before: MethodRecord,
    after: MethodRecord,
    file_moved: bool,
    config: TracerConfig,
    moved_by_file_rename: bool = False,
) -> set[ChangeKind]:
    """Change kinds between two versions of one method.

    An empty result means nothing reportable happened under the given
    configuration and no record should be emitted.
    """
    kinds: set[ChangeKind] = set()
    if before.name != after.name:
        kinds.add(ChangeKind.RENAME)
    if before.parameter_types != after.parameter_types:
        kinds.add(ChangeKind.PARAMETER_CHANGE)
    if kinds or before.return_type != after.return_type:
        kinds.add(ChangeKind.SIGNATURE_CHANGE)
    body_before = before.body_text or ""
    body_after = after.body_text or ""
    if normalize_java_text(body_before) != normalize_java_text(body_after):
        kinds.add(ChangeKind.BODY_CHANGE)
    elif body_before != body_after:
        kinds.add(ChangeKind.FORMATTING_CHANGE)
    if before.annotations_text != after.annotations_text:
        kinds.add(ChangeKind.ANNOTATION_CHANGE)
    if before.javadoc_text != after.javadoc_text:
        kinds.add(ChangeKind.JAVADOC_CHANGE)
    if file_moved:
        kinds.add(ChangeKind.FILE_RENAME if moved_by_file_rename else ChangeKind.METHOD_MOVE)
    if not config.include_formatting:
        kinds.discard(ChangeKind.FORMATTING_CHANGE)
    if not config.include_javadoc:
        kinds.discard(ChangeKind.JAVADOC_CHANGE)
    if not config.include_annotations:
        kinds.discard(ChangeKind.ANNOTATION_CHANGE)
    return kinds


@dataclass
class _Comparison:
    """Outcome of searching one ancestor line."""

    parent: str
    result: MatchResult
    same_file: bool

    @property
    def method(self) -> MethodRecord:
        return self.result.method

    def moved_by_file_rename(self, current_file: str) -> bool:
        entry = self.result.diff_entry
        return (
            entry is not None
            and entry.kind == DiffKind.RENAMED
            and entry.new_path == current_file
        )


class _TraceEngine:
    def __init__(self, repo: RepoHandle, config: TracerConfig, cache: ParseCache | None):
        self.repo = repo
        self.config = config
        self.matcher = Matcher(repo, config.thresholds, cache or ParseCache())
        self.visited: set[tuple[str, str]] = set()
        self.queue: deque[tuple[FileDag, TraversalNode]] = deque()
        self.records: list[tuple[int, ChangeRecord]] = []
        self.dead_ends: list[tuple[CommitMeta, MethodRecord]] = []
        self.processed = 0
        self.truncated = False
        self.seq = 0

    # -- helpers ---------------------------------------------------------

    def meta(self, commit: str) -> CommitMeta:
        return resolve_commit(self.repo, commit)

    def emit(self, record: ChangeRecord) -> None:
        if any(r.commit.id == record.commit.id for _, r in self.records):
            return  # one record per commit; keep the first (nearest the query)
        self.records.append((self.seq, record))
        self.seq += 1

    def enqueue_root(self, commit: str, file: str, name: str, line: int) -> None:
        key = (commit, file)
        if key in self.visited:
            return
        self.visited.add(key)
        dag = build_file_dag(self.repo, commit, file)
        self.queue.append((dag, TraversalNode(dag.start, file, name, line)))

    def enqueue_ancestor(self, dag: FileDag, commit: str, file: str, found: MethodRecord) -> None:
        key = (commit, file)
        if key in self.visited:
            return
        self.visited.add(key)
        self.queue.append((dag, TraversalNode(commit, file, found.name, found.start_line)))

    # -- traversal --------------------------------------------------------

    def run(self, root: TraversalNode) -> None:
        self.enqueue_root(root.commit, root.file, root.name, root.line)
        while self.queue:
            if self.config.max_commits is not None and self.processed >= self.config.max_commits:
                self.truncated = True
                return
            dag, u = self.queue.popleft()
            self.processed += 1
            self.process(dag, u)

    def process(self, dag: FileDag, u: TraversalNode) -> None:
        parsed = self.matcher.cache.parse(self.repo, u.commit, u.file)
        if not parsed.parse_ok:
            return  # unexpected mid-trace parse loss; line ends silently
        try:
            um = find_method(parsed, u.name, u.line)
        except MethodNotFound:
            return

        targets = dag.ancestors.get(u.commit, ())
        via_git_parents = False
        if not targets:
            # DAG root: the file first appears here; compare against the
            # commit's own parents (the method may have moved in)
            targets = self.meta(u.commit).parents
            via_git_parents = True
        if not targets:
            self.dead_ends.append((self.meta(u.commit), um))
            return

        comparisons: list[_Comparison] = []
        for parent in targets:
            same = self.matcher.locate_in_file(parent, u.file, um)
            if same.hit:
                comparisons.append(_Comparison(parent, same, same_file=True))
                continue
            alt = self.matcher.alt_file_match(u.commit, parent, um)
            if alt.hit:
                comparisons.append(_Comparison(parent, alt, same_file=False))

        if not comparisons:
            self.dead_ends.append((self.meta(u.commit), um))
            return

        if len(targets) >= 2:
            self.handle_merge(u, um, comparisons)
        else:
            self.handle_single(u, um, comparisons[0])

        for comp in comparisons:
            if comp.same_file:
                self.enqueue_ancestor(dag, comp.parent, u.file, comp.method)
            else:
                self.enqueue_root(
                    comp.parent, comp.result.source_file,
                    comp.method.name, comp.method.start_line,
                )

    def handle_single(self, u: TraversalNode, um: MethodRecord, comp: _Comparison) -> None:
        if comp.same_file and comp.method.full_text == um.full_text:
            return
        kinds = classify_change(
            comp.method, um,
            file_moved=not comp.same_file,
            config=self.config,
            moved_by_file_rename=comp.moved_by_file_rename(u.file),
        )
        if kinds:
            self.emit(self.build_record(u, um, comp, kinds))

    def handle_merge(self, u: TraversalNode, um: MethodRecord, comparisons: list[_Comparison]) -> None:
        if any(c.method.full_text == um.full_text for c in comparisons):
            return  # introduced unchanged from one branch: not a change commit
        best = max(comparisons, key=lambda c: method_similarity(c.method, um))
        kinds = classify_change(
            best.method, um,
            file_moved=not best.same_file,
            config=self.config,
            moved_by_file_rename=best.moved_by_file_rename(u.file),
        )
        kinds.add(ChangeKind.MERGE_RESOLUTION_CHANGE)
        self.emit(self.build_record(u, um, best, kinds))

    def build_record(
        self, u: TraversalNode, um: MethodRecord, comp: _Comparison, kinds: set[ChangeKind]
    ) -> ChangeRecord:
        meta = self.meta(u.commit)
        return ChangeRecord(
            commit=meta,
            kinds=frozenset(kinds),
            file_before=comp.result.source_file or u.file,
            file_after=u.file,
            name_before=comp.method.name,
            name_after=um.name,
            start_line_after=um.start_line,
            method_before=comp.method,
            method_after=um,
            contributor=f"{meta.author_name} <{meta.author_email}>",
        )

    def introduction_record(self) -> ChangeRecord | None:
        if self.truncated or not self.dead_ends:
            return None
        meta, um = min(self.dead_ends, key=lambda d: (d[0].commit_time, d[0].id))
        return ChangeRecord(
            commit=meta,
            kinds=frozenset({ChangeKind.INTRODUCED}),
            file_before=um.file,
            file_after=um.file,
            name_before=um.name,
            name_after=um.name,
            start_line_after=um.start_line,
            method_before=None,
            method_after=um,
            contributor=f"{meta.author_name} <{meta.author_email}>",
        )


def trace(
    repo: RepoHandle,
    locator: TraversalNode,
    config: TracerConfig | None = None,
    cache: ParseCache | None = None,
) -> MethodHistory:
    """Reconstruct every commit in which the located method changed.

    Walks the file-filtered DAG breadth-first from the locator commit,
    comparing each visited version against its nearest file-touching
    ancestors via the matching cascade; recurses into a new DAG when the
    method moved files. Records come back newest to oldest, ending with the
    introduction commit when the traversal completed.
    """
    config = config or TracerConfig()
    start_meta = resolve_commit(repo, locator.commit)
    engine = _TraceEngine(repo, config, cache)
    try:
        read_file(repo, start_meta.id, locator.file)
    except FileAbsentAtCommit as exc:
        raise StartFileAbsent(f"{locator.file} absent at {start_meta.id[:12]}") from exc
    parsed = engine.matcher.cache.parse(repo, start_meta.id, locator.file)
    if not parsed.parse_ok:
        raise ParseFailureAtStart("; ".join(parsed.diagnostics))
    try:
        find_method(parsed, locator.name, locator.line)
    except MethodNotFound as exc:
        raise StartMethodNotFound(str(exc)) from exc

    root = TraversalNode(start_meta.id, locator.file, locator.name, locator.line)
    engine.run(root)

    intro = engine.introduction_record()
    ordered = sorted(
        engine.records, key=lambda item: (-item[1].commit.commit_time, item[0])
    )
    records = [r for _, r in ordered]
    if intro is not None:
        records = [r for r in records if r.commit.id != intro.commit.id]
        records.append(intro)
    return MethodHistory(locator=root, records=records, complete=intro is not None)
