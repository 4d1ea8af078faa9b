"""methodtrace: method-level change history tracing for Java in Git.

Reconstructs every commit in which a given method changed — across renames,
signature edits, body edits, cross-file moves, file renames, and merges —
plus an evaluation harness for scoring traced histories against ground-truth
oracles.
"""

from .errors import MethodTraceError
from .gitrepo import (
    CommitMeta,
    DiffEntry,
    DiffKind,
    FileDag,
    RepoHandle,
    build_file_dag,
    diff_file,
    list_changed_files,
    open_repository,
    read_file,
    resolve_commit,
)
from .javasource import (
    MethodRecord,
    ParsedFile,
    find_method,
    normalize_body,
    normalize_java_text,
    parse_methods,
)
from .matching import Matcher, MatchResult, MatchThresholds, ParseCache
from .similarity import jaro, jaro_winkler, method_similarity
from .tracing import (
    ChangeKind,
    ChangeRecord,
    MethodHistory,
    TracerConfig,
    TraversalNode,
    classify_change,
    trace,
)

__version__ = "0.1.0"

__all__ = [
    "ChangeKind",
    "ChangeRecord",
    "CommitMeta",
    "DiffEntry",
    "DiffKind",
    "FileDag",
    "Matcher",
    "MatchResult",
    "MatchThresholds",
    "MethodHistory",
    "MethodRecord",
    "MethodTraceError",
    "ParseCache",
    "ParsedFile",
    "RepoHandle",
    "TracerConfig",
    "TraversalNode",
    "build_file_dag",
    "classify_change",
    "diff_file",
    "find_method",
    "jaro",
    "jaro_winkler",
    "list_changed_files",
    "method_similarity",
    "normalize_body",
    "normalize_java_text",
    "open_repository",
    "parse_methods",
    "read_file",
    "resolve_commit",
    "trace",
]
