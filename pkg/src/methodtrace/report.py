"""Canonical JSON serialization of traced histories.

One self-describing document layout (schema/history-v1.json): fixed key
order, two-space indentation, LF line endings, UTF-8. Byte-identical across
runs and platforms for identical inputs.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from typing import Any

from .gitrepo import RepoHandle
from .javasource import find_method
from .matching import ParseCache
from .tracing import MethodHistory, TracerConfig

SCHEMA_VERSION = "1"


def _iso_utc(epoch_seconds: int) -> str:
    return datetime.fromtimestamp(epoch_seconds, tz=timezone.utc).strftime(
        "%Y-%m-%dT%H:%M:%SZ"
    )


def build_history_document(
    repo: RepoHandle,
    history: MethodHistory,
    repository: str,
    config: TracerConfig,
) -> dict[str, Any]:
    """Assemble the serializable document for one traced history."""
    parsed = ParseCache().parse(repo, history.locator.commit, history.locator.file)
    method_signature = history.locator.name
    if parsed.parse_ok:
        try:
            method_signature = find_method(
                parsed, history.locator.name, history.locator.line
            ).signature
        except Exception:
            pass
    records = []
    for r in history.records:
        records.append(
            {
                "hash": r.commit.id,
                "parents": list(r.commit.parents),
                "author_name": r.commit.author_name,
                "author_email": r.commit.author_email,
                "commit_time": _iso_utc(r.commit.commit_time),
                "message": r.commit.message.splitlines()[0] if r.commit.message else "",
                "contributor": r.contributor,
                "kinds": sorted(k.value for k in r.kinds),
                "file_before": r.file_before,
                "file_after": r.file_after,
                "name_before": r.name_before,
                "name_after": r.name_after,
                "start_line_after": r.start_line_after,
            }
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "repository": repository,
        "origin_commit": history.locator.commit,
        "file": history.locator.file,
        "method": method_signature,
        "start_line": history.locator.line,
        "config": {
            "threshold_same_file": config.thresholds.same_file,
            "threshold_cross_file": config.thresholds.cross_file,
            "include_formatting": config.include_formatting,
            "include_javadoc": config.include_javadoc,
            "include_annotations": config.include_annotations,
            "max_commits": config.max_commits,
        },
        "records": records,
        "complete": history.complete,
    }


def serialize(document: dict[str, Any]) -> str:
    """Canonical text form: 2-space indent, LF endings, UTF-8, trailing LF."""
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def deserialize(text: str) -> dict[str, Any]:
    return json.loads(text)
