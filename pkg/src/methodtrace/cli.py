"""Command-line front end: trace one method (or a manifest of locators) and
emit the canonical history JSON.

Exit codes: 0 success, 2 usage error, 3 trace error (message on stderr and a
machine-readable error JSON on stdout when --out is absent).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import MethodTraceError
from .gitrepo import open_repository
from .matching import MatchThresholds
from .report import build_history_document, serialize
from .tracing import TracerConfig, TraversalNode, trace

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_TRACE_ERROR = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="methodtrace",
        description="Trace the change history of a Java method across a Git repository.",
    )
    parser.add_argument("--repo", help="repository path or clone URL")
    parser.add_argument("--commit", help="start commit (full or abbreviated sha, or ref)")
    parser.add_argument("--file", help="file path of the method at the start commit")
    parser.add_argument("--method", help="method name")
    parser.add_argument("--line", type=int, help="1-based line of the method declaration")
    parser.add_argument("--out", help="output file (default: stdout); a directory in manifest mode")
    parser.add_argument("--threshold-same", type=float, default=0.70,
                        help="same-file body similarity threshold (default 0.70)")
    parser.add_argument("--threshold-cross", type=float, default=0.75,
                        help="cross-file body similarity threshold (default 0.75)")
    parser.add_argument("--no-formatting", action="store_true",
                        help="drop formatting-only changes from the history")
    parser.add_argument("--no-javadoc", action="store_true",
                        help="drop Javadoc-only changes from the history")
    parser.add_argument("--no-annotations", action="store_true",
                        help="drop annotation-only changes from the history")
    parser.add_argument("--max-commits", type=int, default=None,
                        help="stop after visiting this many commits")
    parser.add_argument("--cache-dir", default=".methodtrace-cache",
                        help="clone cache directory for remote repositories")
    parser.add_argument("--manifest", help="file with one locator per line: "
                        "repo commit file method line")
    return parser


def _config_from_args(args: argparse.Namespace) -> TracerConfig:
    if args.max_commits is not None and args.max_commits < 1:
        raise ValueError("--max-commits must be a positive integer")
    return TracerConfig(
        thresholds=MatchThresholds(args.threshold_same, args.threshold_cross),
        include_formatting=not args.no_formatting,
        include_javadoc=not args.no_javadoc,
        include_annotations=not args.no_annotations,
        max_commits=args.max_commits,
    )


def _trace_to_text(repo_source: str, commit: str, file: str, method: str, line: int,
                   config: TracerConfig, cache_dir: str) -> str:
    repo = open_repository(repo_source, cache_dir)
    locator = TraversalNode(commit=commit, file=file, name=method, line=line)
    history = trace(repo, locator, config)
    document = build_history_document(repo, history, repo_source, config)
    return serialize(document)


def _emit_error(exc: Exception, out: str | None) -> None:
    code = exc.code if isinstance(exc, MethodTraceError) else type(exc).__name__
    print(f"methodtrace: {code}: {exc}", file=sys.stderr)
    if out is None:
        print(json.dumps({"error": code, "message": str(exc)}))


def _run_single(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    missing = [
        flag for flag, value in [
            ("--repo", args.repo), ("--commit", args.commit), ("--file", args.file),
            ("--method", args.method), ("--line", args.line),
        ] if value is None
    ]
    if missing:
        parser.error(f"missing required flags: {', '.join(missing)}")
    try:
        config = _config_from_args(args)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        text = _trace_to_text(
            args.repo, args.commit, args.file, args.method, args.line,
            config, args.cache_dir,
        )
    except (MethodTraceError, OSError) as exc:
        _emit_error(exc, args.out)
        return EXIT_TRACE_ERROR
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _run_manifest(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    try:
        lines = Path(args.manifest).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        parser.error(f"cannot read manifest: {exc}")
    try:
        config = _config_from_args(args)
    except ValueError as exc:
        parser.error(str(exc))
    out_dir = Path(args.out) if args.out else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for index, raw in enumerate(lines):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 5:
            print(f"methodtrace: manifest line {index + 1}: expected 5 fields", file=sys.stderr)
            failures += 1
            continue
        repo_source, commit, file, method, line_no = fields
        try:
            text = _trace_to_text(
                repo_source, commit, file, method, int(line_no), config, args.cache_dir
            )
        except (MethodTraceError, OSError, ValueError) as exc:
            _emit_error(exc, args.out)
            failures += 1
            continue
        if out_dir is not None:
            (out_dir / f"trace-{index + 1:04d}.json").write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    return EXIT_TRACE_ERROR if failures else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.manifest:
        return _run_manifest(args, parser)
    return _run_single(args, parser)


if __name__ == "__main__":
    sys.exit(main())
