"""Version-control access: open/clone repositories, read commits, trees,
blobs and diffs, and build the file-filtered commit DAG the tracer walks.

Backed by GitPython for object access plus direct ``git`` plumbing calls
(``rev-list``, ``diff-tree``, ``cat-file --batch-check``) where batch
performance or exact semantics matter.
"""

from __future__ import annotations

import hashlib
import os
import re
import shutil
import subprocess
import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import git
import gitdb.exc

from .errors import (
    AmbiguousAbbreviation,
    CloneFailed,
    FileAbsentAtCommit,
    NotARepository,
    UnknownCommit,
)

_clone_registry_guard = threading.Lock()
_clone_locks: dict[str, threading.Lock] = {}


class DiffKind(str, Enum):
    ADDED = "Added"
    MODIFIED = "Modified"
    DELETED = "Deleted"
    RENAMED = "Renamed"


@dataclass(frozen=True)
class CommitMeta:
    id: str
    parents: tuple[str, ...]
    author_name: str
    author_email: str
    commit_time: int  # UTC seconds since epoch
    message: str


@dataclass(frozen=True)
class DiffEntry:
    kind: DiffKind
    old_path: str | None
    new_path: str | None


@dataclass(frozen=True)
class FileDag:
    start: str
    path: str
    nodes: frozenset[str]
    ancestors: dict[str, tuple[str, ...]] = field(hash=False)


class RepoHandle:
    """Read-only handle on one on-disk repository.

    Confined to one logical worker at a time; open several handles for
    concurrent work against the same repository.
    """

    def __init__(self, repo: git.Repo, source: str):
        self._repo = repo
        self.source = source
        self._meta_cache: dict[str, CommitMeta] = {}
        self._blob_cache: dict[tuple[str, str], str | None] = {}
        self._batch_proc: subprocess.Popen | None = None
        self._batch_lock = threading.Lock()

    @property
    def git_dir(self) -> str:
        return str(self._repo.git_dir)

    @property
    def working_dir(self) -> str | None:
        wd = self._repo.working_tree_dir
        return str(wd) if wd else None

    def close(self) -> None:
        if self._batch_proc is not None:
            self._batch_proc.stdin.close()
            self._batch_proc.wait(timeout=10)
            self._batch_proc = None
        self._repo.close()

    # -- plumbing ------------------------------------------------------

    def _git(self, *args: str) -> str:
        return self._repo.git.execute(["git", *args])

    def _batch(self) -> subprocess.Popen:
        if self._batch_proc is None or self._batch_proc.poll() is not None:
            self._batch_proc = subprocess.Popen(
                ["git", "cat-file", "--batch-check"],
                cwd=self.git_dir,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
            )
        return self._batch_proc

    def blob_id(self, commit: str, path: str) -> str | None:
        """Object id of ``path``'s blob at ``commit``; None when absent."""
        key = (commit, path)
        cached = self._blob_cache.get(key, "?")
        if cached != "?":
            return cached
        with self._batch_lock:
            proc = self._batch()
            proc.stdin.write(f"{commit}:{path}\n".encode())
            proc.stdin.flush()
            line = proc.stdout.readline().decode("utf-8", errors="replace").strip()
        result: str | None
        if line.endswith(" missing") or not line:
            result = None
        else:
            fields = line.split()
            result = fields[0] if len(fields) == 3 and fields[1] == "blob" else None
        self._blob_cache[key] = result
        return result


def _cache_slot(url: str, cache_dir: str | os.PathLike) -> Path:
    digest = hashlib.sha256(url.encode()).hexdigest()
    return Path(cache_dir) / digest


def open_repository(source: str, cache_dir: str | os.PathLike = ".methodtrace-cache") -> RepoHandle:
    """Open a local repository or clone a remote one into the cache.

    Remote clones land in ``<cache_dir>/<sha256(url)>/`` and are reused by
    later calls; at most one clone runs per URL under concurrent opens.
    """
    if os.path.exists(source):
        try:
            return RepoHandle(git.Repo(source), source)
        except (git.InvalidGitRepositoryError, git.NoSuchPathError) as exc:
            raise NotARepository(f"{source} is not a Git repository") from exc

    slot = _cache_slot(source, cache_dir)
    marker = slot.with_suffix(".complete")
    with _clone_registry_guard:
        lock = _clone_locks.setdefault(str(slot), threading.Lock())
    with lock:
        if marker.exists() and slot.exists():
            return RepoHandle(git.Repo(slot), source)
        if slot.exists():  # stale partial clone
            shutil.rmtree(slot)
        slot.parent.mkdir(parents=True, exist_ok=True)
        try:
            repo = git.Repo.clone_from(source, slot)
        except git.GitCommandError as exc:
            raise CloneFailed(f"clone of {source} failed: {exc}") from exc
        marker.touch()
        return RepoHandle(repo, source)


_HEX_PREFIX = re.compile(r"[0-9a-f]{4,39}$")


def _resolve_hex_prefix(repo: RepoHandle, ref: str) -> git.Commit:
    """Expand an abbreviated hash the way git does for commit contexts."""
    try:
        raw = repo._git("rev-parse", f"--disambiguate={ref}")
    except git.GitCommandError as exc:
        raise UnknownCommit(f"cannot resolve {ref!r}") from exc
    commits = []
    for sha in raw.splitlines():
        obj = repo._repo.rev_parse(sha)
        if obj.type == "commit":
            commits.append(obj)
    if not commits:
        raise UnknownCommit(f"cannot resolve {ref!r}")
    if len(commits) > 1:
        raise AmbiguousAbbreviation(
            f"{ref} matches {len(commits)} commits: "
            + ", ".join(c.hexsha[:12] for c in commits)
        )
    return commits[0]


def resolve_commit(repo: RepoHandle, ref: str) -> CommitMeta:
    """Resolve a full/abbreviated hash or symbolic ref to commit metadata."""
    cached = repo._meta_cache.get(ref)
    if cached is not None:
        return cached
    try:
        commit = repo._repo.commit(ref)
    except gitdb.exc.AmbiguousObjectName as exc:
        raise AmbiguousAbbreviation(f"{ref} matches multiple objects") from exc
    except (git.BadName, gitdb.exc.BadObject, gitdb.exc.BadName, ValueError) as exc:
        if _HEX_PREFIX.fullmatch(ref):
            commit = _resolve_hex_prefix(repo, ref)
        else:
            raise UnknownCommit(f"cannot resolve {ref!r}") from exc
    meta = CommitMeta(
        id=commit.hexsha,
        parents=tuple(p.hexsha for p in commit.parents),
        author_name=commit.author.name or "",
        author_email=commit.author.email or "",
        commit_time=int(commit.committed_date),
        message=commit.message if isinstance(commit.message, str) else commit.message.decode("utf-8", "replace"),
    )
    repo._meta_cache[ref] = meta
    repo._meta_cache[meta.id] = meta
    return meta


def read_file(repo: RepoHandle, commit: str, path: str) -> str:
    """Blob content at (commit, path), decoded as UTF-8 with replacement."""
    meta = resolve_commit(repo, commit)
    try:
        entry = repo._repo.commit(meta.id).tree[path]
    except KeyError as exc:
        raise FileAbsentAtCommit(f"{path} absent at {meta.id[:12]}") from exc
    if entry.type != "blob":
        raise FileAbsentAtCommit(f"{path} is not a file at {meta.id[:12]}")
    return entry.data_stream.read().decode("utf-8", errors="replace")


def list_changed_files(repo: RepoHandle, commit: str, parent: str) -> list[DiffEntry]:
    """Tree diff between parent and commit with rename detection at 50%."""
    commit_id = resolve_commit(repo, commit).id
    parent_id = resolve_commit(repo, parent).id
    raw = repo._git(
        "diff-tree", "-r", "-z", "-M50%", "--name-status",
        parent_id, commit_id,
    )
    entries: list[DiffEntry] = []
    fields = raw.split("\0")
    i = 0
    while i < len(fields) and fields[i]:
        status = fields[i]
        code = status[0]
        if code in ("R", "C"):
            old, new = fields[i + 1], fields[i + 2]
            i += 3
            if code == "R":
                entries.append(DiffEntry(DiffKind.RENAMED, old, new))
            else:  # copies leave the source in place: the new path is added
                entries.append(DiffEntry(DiffKind.ADDED, None, new))
        else:
            path = fields[i + 1]
            i += 2
            if code == "A":
                entries.append(DiffEntry(DiffKind.ADDED, None, path))
            elif code == "D":
                entries.append(DiffEntry(DiffKind.DELETED, path, None))
            else:  # M, T and anything exotic: content differs at same path
                entries.append(DiffEntry(DiffKind.MODIFIED, path, path))
    entries.sort(key=lambda e: (e.new_path or "", e.old_path or ""))
    return entries


_EMPTY_TREE = "4b825dc642cb6eb9a060e54bf8d69288fbee4904"


def diff_file(repo: RepoHandle, commit: str, parent: str | None, path: str) -> str:
    """Unified diff of one file between parent and commit.

    A None/empty parent compares against the empty tree, so a root commit's
    file shows as pure additions.
    """
    commit_id = resolve_commit(repo, commit).id
    parent_id = _EMPTY_TREE if not parent else resolve_commit(repo, parent).id
    return repo._git("diff", "-M50%", parent_id, commit_id, "--", f":(literal){path}")


def _reachable_parents(repo: RepoHandle, start_id: str) -> tuple[list[str], dict[str, tuple[str, ...]]]:
    """Topologically ordered reachable commits (children first) + parent map."""
    raw = repo._git("rev-list", "--topo-order", "--parents", start_id)
    order: list[str] = []
    parents: dict[str, tuple[str, ...]] = {}
    for line in raw.splitlines():
        shas = line.split()
        order.append(shas[0])
        parents[shas[0]] = tuple(shas[1:])
    return order, parents


def _touching_candidates(repo: RepoHandle, start_id: str, path: str) -> list[str]:
    """Commits where the path's restricted tree differs from at least one
    parent (git --full-history semantics), used as a candidate superset."""
    raw = repo._git("rev-list", "--full-history", start_id, "--", f":(literal){path}")
    return raw.splitlines()


def build_file_dag(repo: RepoHandle, start: str, path: str) -> FileDag:
    """Commit DAG filtered to commits where ``path``'s blob changed.

    Membership: the blob at ``path`` differs from at least one parent's, or
    the path is present while absent in at least one parent, or the commit
    is a root containing the path. The start commit is always included.
    Ancestor edges point to the nearest included commit along each parent
    line (first-parent first, deduplicated).
    """
    start_id = resolve_commit(repo, start).id
    if repo.blob_id(start_id, path) is None:
        raise FileAbsentAtCommit(f"{path} absent at start commit {start_id[:12]}")

    order, parents = _reachable_parents(repo, start_id)
    nodes: set[str] = {start_id}
    for sha in _touching_candidates(repo, start_id, path):
        blob = repo.blob_id(sha, path)
        if blob is None:
            continue  # deletions and mode-only changes are not method-bearing
        commit_parents = parents.get(sha, ())
        if not commit_parents:
            nodes.add(sha)
            continue
        if any(repo.blob_id(p, path) != blob for p in commit_parents):
            nodes.add(sha)

    # nearest included ancestor(s) per commit, computed parents-first
    frontier: dict[str, tuple[str, ...]] = {}
    for sha in reversed(order):
        if sha in nodes:
            frontier[sha] = (sha,)
            continue
        merged: list[str] = []
        for p in parents[sha]:
            for a in frontier.get(p, ()):
                if a not in merged:
                    merged.append(a)
        frontier[sha] = tuple(merged)

    ancestors: dict[str, tuple[str, ...]] = {}
    for u in nodes:
        merged = []
        for p in parents.get(u, ()):
            for a in frontier.get(p, ()):
                if a not in merged:
                    merged.append(a)
        ancestors[u] = tuple(merged)

    return FileDag(start=start_id, path=path, nodes=frozenset(nodes), ancestors=ancestors)
