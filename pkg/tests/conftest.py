"""Shared test fixtures: a deterministic scriptable Git sandbox."""

from __future__ import annotations

import os
import subprocess
from pathlib import Path

import pytest

EPOCH = 1_600_000_000


class GitSandbox:
    """Minimal repo builder: write files, commit with fixed clocks."""

    def __init__(self, root: Path):
        self.root = root
        self.tick = 0
        self._run("init", "-q", "-b", "main")
        self._run("config", "user.name", "Test Author")
        self._run("config", "user.email", "test@example.test")
        self._run("config", "commit.gpgsign", "false")

    def _env(self) -> dict[str, str]:
        stamp = f"{EPOCH + 60 * self.tick} +0000"
        env = os.environ.copy()
        env.update(
            GIT_AUTHOR_DATE=stamp,
            GIT_COMMITTER_DATE=stamp,
            GIT_AUTHOR_NAME="Test Author",
            GIT_AUTHOR_EMAIL="test@example.test",
            GIT_COMMITTER_NAME="Test Author",
            GIT_COMMITTER_EMAIL="test@example.test",
        )
        return env

    def _run(self, *args: str) -> str:
        res = subprocess.run(
            ["git", *args], cwd=self.root, env=self._env(),
            check=True, capture_output=True, text=True,
        )
        return res.stdout.strip()

    def git(self, *args: str) -> str:
        return self._run(*args)

    def write(self, path: str, content: str) -> None:
        target = self.root / path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(content, encoding="utf-8")

    def commit(self, files: dict[str, str | None], message: str) -> str:
        """One commit; value None deletes the path. Returns the new sha."""
        self.tick += 1
        for path, content in files.items():
            if content is None:
                self._run("rm", "-q", str(path))
            else:
                self.write(path, content)
                self._run("add", str(path))
        self._run("commit", "-q", "-m", message)
        return self.head()

    def move(self, old: str, new: str, message: str) -> str:
        self.tick += 1
        (self.root / new).parent.mkdir(parents=True, exist_ok=True)
        self._run("mv", old, new)
        self._run("commit", "-q", "-m", message)
        return self.head()

    def branch(self, name: str, at: str | None = None) -> None:
        args = ["checkout", "-q", "-b", name]
        if at:
            args.append(at)
        self._run(*args)

    def checkout(self, name: str) -> None:
        self._run("checkout", "-q", name)

    def merge_keep(self, branch: str, resolved_files: dict[str, str], message: str) -> str:
        """Merge ``branch``; on conflict (or not) force the given file
        contents as the resolution, then commit the merge."""
        self.tick += 1
        proc = subprocess.run(
            ["git", "merge", "--no-commit", "--no-ff", branch],
            cwd=self.root, env=self._env(), capture_output=True, text=True,
        )
        for path, content in resolved_files.items():
            self.write(path, content)
            self._run("add", str(path))
        if proc.returncode != 0:
            # conflicted paths not overridden above keep the merged content
            self._run("add", "-A")
        self._run("commit", "-q", "--no-edit", "-m", message)
        return self.head()

    def head(self) -> str:
        return self._run("rev-parse", "HEAD")


@pytest.fixture
def sandbox(tmp_path: Path) -> GitSandbox:
    repo_dir = tmp_path / "repo"
    repo_dir.mkdir()
    return GitSandbox(repo_dir)
