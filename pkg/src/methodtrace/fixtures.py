"""Scripted synthetic repositories with known method genealogies.

Each scenario builds a real Git repository one commit per step (merges add a
small branch structure) with fixed clocks and authorship, and records the
ground-truth history the tracer must reproduce. The scenario catalog covers
every step kind alone plus documented combinations: overload introduction,
file rename, method move, dual-branch introduction, and the three merge
resolutions.
"""

from __future__ import annotations

import json
import os
import subprocess
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import StepInvalid, WorkdirNotEmpty
from .tracing import TraversalNode

EPOCH = 1_700_000_000
AUTHOR_NAME = "Fixture Author"
AUTHOR_EMAIL = "fixture@example.test"


class StepKind(str, Enum):
    INIT_FILE = "InitFile"
    EDIT_BODY = "EditBody"
    RENAME_METHOD = "RenameMethod"
    CHANGE_PARAMS = "ChangeParams"
    MOVE_METHOD_TO_FILE = "MoveMethodToFile"
    RENAME_FILE = "RenameFile"
    ADD_OVERLOAD = "AddOverload"
    MERGE_BRANCHES = "MergeBranches"
    FORMAT_ONLY = "FormatOnly"
    EDIT_JAVADOC = "EditJavadoc"
    EDIT_ANNOTATION = "EditAnnotation"
    TOUCH_OTHER_FILE = "TouchOtherFile"


class MergeResolution(str, Enum):
    TAKE_OURS = "TakeOurs"
    TAKE_THEIRS = "TakeTheirs"
    EDITED_RESOLUTION = "EditedResolution"


@dataclass(frozen=True)
class ScenarioStep:
    kind: StepKind
    resolution: MergeResolution | None = None
    merge_mode: str = "conflict"  # conflict | dual_add | side_add
    overload_similar: bool = True
    with_method: bool = True  # InitFile only


@dataclass
class GroundTruth:
    locator: TraversalNode
    expected_records: list[tuple[str, frozenset[str]]]  # newest -> oldest


@dataclass(frozen=True)
class Scenario:
    name: str
    steps: tuple[ScenarioStep, ...]
    trace_overload: bool = False
    description: str = ""


# -- Java payloads ---------------------------------------------------------

def _body(version: int) -> str:
    """Deterministic body variant, padded well past 120 characters so
    similarity scores are meaningful at the 0.70/0.75 thresholds."""
    return (
        f"        int acc = seed * {31 + 2 * version};\n"
        f"        for (int round = 0; round < {16 + version}; round++) {{\n"
        f"            acc = Integer.rotateLeft(acc ^ 0x9e3779b{version % 10}, {5 + version % 3}) + round * {7 + version};\n"
        f"        }}\n"
        f"        return acc;"
    )


# Long literals of characters that occur nowhere else in the fixture keep
# this body's similarity to every sibling method well under the thresholds.
_DISTINCT_OVERLOAD_BODY = (
    '        String banner = "~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~";\n'
    '        String fence = "||||||||||||||||||||||||||||||||||||||||||||||||";\n'
    '        String weave = banner + "????????????????????????" + fence + extra;\n'
    '        return weave.length() - banner.length() - fence.length();'
)

_JAVADOCS = [
    "Computes a rolling checksum over the seed.",
    "Computes a rolling checksum over the seed; now documented in detail.",
    "Computes a rolling checksum; documentation revised a third time.",
]

_ANNOTATIONS = [
    "@Deprecated",
    '@SuppressWarnings("checksum")',
    '@SuppressWarnings("rewritten")',
]

_NAMES = ["compute", "calculate", "evaluate"]
_PARAMS = ["int seed", "int seed, int rounds", "int seed, int rounds, int bias"]


@dataclass
class _MethodState:
    name_version: int = 0
    params_version: int = 0
    body_version: int = 0
    javadoc_version: int = 0
    annotation_version: int = 0
    format_pad: int = 0

    @property
    def name(self) -> str:
        return _NAMES[self.name_version % len(_NAMES)]

    @property
    def params(self) -> str:
        return _PARAMS[self.params_version % len(_PARAMS)]

    def render(self) -> str:
        javadoc = _JAVADOCS[self.javadoc_version % len(_JAVADOCS)]
        annotation = _ANNOTATIONS[self.annotation_version % len(_ANNOTATIONS)]
        body_lines = _body(self.body_version).splitlines()
        pad = " " * self.format_pad
        body = "\n".join(pad + line if line.strip() else line for line in body_lines)
        return (
            f"    /** {javadoc} */\n"
            f"    {annotation}\n"
            f"    public int {self.name}({self.params}) {{\n"
            f"{body}\n"
            f"    }}\n"
        )

    def header(self) -> str:
        return f"public int {self.name}({self.params}) {{"


def _overload_block(state: _MethodState, similar: bool) -> str:
    if similar:
        javadoc = _JAVADOCS[state.javadoc_version % len(_JAVADOCS)]
        annotation = _ANNOTATIONS[state.annotation_version % len(_ANNOTATIONS)]
        prefix = f"    /** {javadoc} */\n    {annotation}\n"
        body = _body(state.body_version)
    else:
        # package-private on purpose: no shared "public" prefix with the
        # sibling methods, so the Winkler prefix boost cannot lift an
        # unrelated body over the same-file threshold
        prefix = ""
        body = _DISTINCT_OVERLOAD_BODY
        return (
            f"    int {state.name}({state.params}, int extra) {{\n"
            f"{body}\n"
            f"    }}\n"
        )
    return (
        f"{prefix}"
        f"    public int {state.name}({state.params}, int extra) {{\n"
        f"{body}\n"
        f"    }}\n"
    )


_TRAILER = """\
    public String describe() {
        return "widget=" + tag();
    }

    private int tag() {
        return 41;
    }
"""


def _render_file(class_name: str, method: str | None, overload: str | None) -> str:
    parts = ["package fixture;", "", f"public class {class_name} {{", ""]
    if method:
        parts.append(method)
    if overload:
        parts.append(overload)
    parts.append(_TRAILER)
    parts.append("}")
    return "\n".join(parts) + "\n"


# -- repository builder ------------------------------------------------------


class _Builder:
    def __init__(self, workdir: Path):
        self.root = workdir
        self.tick = 0
        self.branch_count = 0
        self.file = "src/Widget.java"
        self.class_name = "Widget"
        self.method: _MethodState | None = None
        self.overload: str | None = None
        self.other_version = 0
        self.tick_of: dict[str, int] = {}
        self.contributions: list[tuple[str, frozenset[str]]] = []
        self.intro_sha: str | None = None
        self._git("init", "-q", "-b", "main")
        self._git("config", "user.name", AUTHOR_NAME)
        self._git("config", "user.email", AUTHOR_EMAIL)
        self._git("config", "commit.gpgsign", "false")

    # -- git plumbing --

    def _env(self) -> dict[str, str]:
        stamp = f"{EPOCH + 60 * self.tick} +0000"
        env = os.environ.copy()
        env.update(
            GIT_AUTHOR_DATE=stamp,
            GIT_COMMITTER_DATE=stamp,
            GIT_AUTHOR_NAME=AUTHOR_NAME,
            GIT_AUTHOR_EMAIL=AUTHOR_EMAIL,
            GIT_COMMITTER_NAME=AUTHOR_NAME,
            GIT_COMMITTER_EMAIL=AUTHOR_EMAIL,
        )
        return env

    def _git(self, *args: str, check: bool = True) -> subprocess.CompletedProcess:
        return subprocess.run(
            ["git", *args], cwd=self.root, env=self._env(),
            check=check, capture_output=True, text=True,
        )

    def _write(self, path: str, content: str) -> None:
        target = self.root / path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(content, encoding="utf-8")

    def _commit(self, message: str) -> str:
        self.tick += 1
        self._git("add", "-A")
        self._git("commit", "-q", "-m", message)
        sha = self.head()
        self.tick_of[sha] = self.tick
        return sha

    def head(self) -> str:
        return self._git("rev-parse", "HEAD").stdout.strip()

    def contribute(self, sha: str, kinds: set[str]) -> None:
        self.contributions.append((sha, frozenset(kinds)))

    # -- rendering --

    def render_traced(self) -> str:
        method = self.method.render() if self.method else None
        return _render_file(self.class_name, method, self.overload)

    def write_traced(self) -> None:
        self._write(self.file, self.render_traced())

    # -- steps --

    def step_init(self, step: ScenarioStep) -> None:
        if step.with_method:
            self.method = _MethodState()
        self.write_traced()
        sha = self._commit("create widget")
        if step.with_method:
            self.intro_sha = sha

    def step_edit_body(self) -> None:
        self.method.body_version += 1
        self.write_traced()
        self.contribute(self._commit("rework body"), {"BodyChange"})

    def step_rename_method(self) -> None:
        self.method.name_version += 1
        self.write_traced()
        self.contribute(self._commit("rename method"), {"Rename", "SignatureChange"})

    def step_change_params(self) -> None:
        self.method.params_version += 1
        self.write_traced()
        self.contribute(self._commit("extend parameters"), {"ParameterChange", "SignatureChange"})

    def step_move_method(self) -> None:
        old_file = self.file
        moved = self.method
        self.method = None
        self.write_traced()  # old file loses the method
        self.file = "src/Helper.java"
        self.class_name = "Helper"
        self.method = moved
        self.overload = None
        self.write_traced()
        self._write(old_file, _render_file("Widget", None, None))
        self.contribute(self._commit("move method to helper"), {"MethodMove"})

    def step_rename_file(self) -> None:
        new_file = f"src/{self.class_name}Core.java"
        self._git("mv", self.file, new_file)
        self.file = new_file
        self.tick += 1
        self._git("commit", "-q", "-m", "rename file")
        sha = self.head()
        self.tick_of[sha] = self.tick
        self.contributions.append((sha, frozenset({"FileRename"})))

    def step_add_overload(self, step: ScenarioStep, trace_overload: bool) -> str:
        self.overload = _overload_block(self.method, step.overload_similar)
        self.write_traced()
        sha = self._commit("add overload")
        if trace_overload and step.overload_similar:
            self.contribute(sha, {"ParameterChange", "SignatureChange"})
        return sha

    def step_format_only(self) -> None:
        self.method.format_pad += 4
        self.write_traced()
        self.contribute(self._commit("reformat"), {"FormattingChange"})

    def step_edit_javadoc(self) -> None:
        self.method.javadoc_version += 1
        self.write_traced()
        self.contribute(self._commit("revise javadoc"), {"JavadocChange"})

    def step_edit_annotation(self) -> None:
        self.method.annotation_version += 1
        self.write_traced()
        self.contribute(self._commit("swap annotation"), {"AnnotationChange"})

    def step_touch_other(self) -> None:
        self.other_version += 1
        self._write(
            "src/Notes.java",
            f"package fixture;\n\npublic class Notes {{\n    int revision = {self.other_version};\n}}\n",
        )
        self._commit("touch unrelated file")

    def step_merge(self, step: ScenarioStep) -> None:
        self.branch_count += 1
        branch = f"side{self.branch_count}"
        if step.merge_mode == "conflict":
            self._merge_conflict(step, branch)
        elif step.merge_mode == "dual_add":
            self._merge_dual_add(step, branch)
        elif step.merge_mode == "side_add":
            self._merge_side_add(branch)
        else:
            raise StepInvalid(f"unknown merge mode {step.merge_mode!r}")

    def _merge_commit(self, branch: str, resolved: str | None) -> str:
        """Merge ``branch`` into the current branch, forcing the traced file
        to ``resolved`` when given, and commit with the next tick."""
        self.tick += 1
        proc = self._git("merge", "--no-commit", "--no-ff", branch, check=False)
        if resolved is not None:
            self._write(self.file, resolved)
        self._git("add", "-A")
        self._git("commit", "-q", "--no-edit", "-m", f"merge {branch}")
        sha = self.head()
        self.tick_of[sha] = self.tick
        return sha

    def _merge_conflict(self, step: ScenarioStep, branch: str) -> None:
        base_body = self.method.body_version
        self._git("checkout", "-q", "-b", branch)
        self.method.body_version = base_body + 101
        self.write_traced()
        side_sha = self._commit("side branch edit")
        self._git("checkout", "-q", "main")
        self.method.body_version = base_body + 202
        self.write_traced()
        ours_sha = self._commit("main branch edit")

        if step.resolution == MergeResolution.TAKE_OURS:
            self.method.body_version = base_body + 202
        elif step.resolution == MergeResolution.TAKE_THEIRS:
            self.method.body_version = base_body + 101
        else:
            self.method.body_version = base_body + 303
        resolution = self.render_traced()
        merge_sha = self._merge_commit(branch, resolution)

        self.contribute(side_sha, {"BodyChange"})
        self.contribute(ours_sha, {"BodyChange"})
        if step.resolution == MergeResolution.EDITED_RESOLUTION:
            self.contribute(merge_sha, {"BodyChange", "MergeResolutionChange"})

    def _merge_dual_add(self, step: ScenarioStep, branch: str) -> None:
        if self.method is not None:
            raise StepInvalid("dual_add requires InitFile(with_method=False)")
        self._git("checkout", "-q", "-b", branch)
        self.method = _MethodState(body_version=11)
        self.write_traced()
        side_sha = self._commit("side adds method")
        self._git("checkout", "-q", "main")
        self.method = _MethodState(body_version=22)
        self.write_traced()
        self._commit("main adds method")
        # resolution keeps the main-branch version
        merge_resolution = self.render_traced()
        self._merge_commit(branch, merge_resolution)
        self.intro_sha = side_sha  # the older of the two introductions

    def _merge_side_add(self, branch: str) -> None:
        if self.method is not None:
            raise StepInvalid("side_add requires InitFile(with_method=False)")
        self._git("checkout", "-q", "-b", branch)
        self.method = _MethodState(body_version=33)
        self.write_traced()
        side_sha = self._commit("side adds method")
        self._git("checkout", "-q", "main")
        self.other_version += 1
        self._write(
            "src/Notes.java",
            f"package fixture;\n\npublic class Notes {{\n    int revision = {self.other_version};\n}}\n",
        )
        self._commit("main touches notes")
        self._merge_commit(branch, None)  # clean auto-merge
        self.intro_sha = side_sha


def build_scenario(
    steps: list[ScenarioStep] | tuple[ScenarioStep, ...],
    workdir: str | os.PathLike,
    trace_overload: bool = False,
) -> tuple[Path, GroundTruth]:
    """Materialize a scenario as a Git repository plus its ground truth.

    The workdir must be empty. Returns the repository path and the expected
    history (newest to oldest) for the method the head locator points at.
    """
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    if any(workdir.iterdir()):
        raise WorkdirNotEmpty(f"{workdir} is not empty")
    steps = list(steps)
    if not steps or steps[0].kind != StepKind.INIT_FILE:
        raise StepInvalid("the first step must be InitFile")
    if any(s.kind == StepKind.INIT_FILE for s in steps[1:]):
        raise StepInvalid("InitFile may appear only once")

    builder = _Builder(workdir)
    overload_sha: str | None = None
    overload_step: ScenarioStep | None = None
    for step in steps:
        if step.kind == StepKind.INIT_FILE:
            builder.step_init(step)
        elif step.kind == StepKind.EDIT_BODY:
            builder.step_edit_body()
        elif step.kind == StepKind.RENAME_METHOD:
            builder.step_rename_method()
        elif step.kind == StepKind.CHANGE_PARAMS:
            builder.step_change_params()
        elif step.kind == StepKind.MOVE_METHOD_TO_FILE:
            builder.step_move_method()
        elif step.kind == StepKind.RENAME_FILE:
            builder.step_rename_file()
        elif step.kind == StepKind.ADD_OVERLOAD:
            overload_sha = builder.step_add_overload(step, trace_overload)
            overload_step = step
        elif step.kind == StepKind.MERGE_BRANCHES:
            builder.step_merge(step)
        elif step.kind == StepKind.FORMAT_ONLY:
            builder.step_format_only()
        elif step.kind == StepKind.EDIT_JAVADOC:
            builder.step_edit_javadoc()
        elif step.kind == StepKind.EDIT_ANNOTATION:
            builder.step_edit_annotation()
        elif step.kind == StepKind.TOUCH_OTHER_FILE:
            builder.step_touch_other()
        else:
            raise StepInvalid(f"unknown step kind {step.kind}")

    head = builder.head()
    content = builder.render_traced()
    if trace_overload:
        if overload_sha is None or builder.method is None:
            raise StepInvalid("trace_overload requires an AddOverload step")
        visibility = "public " if overload_step.overload_similar else ""
        header = f"{visibility}int {builder.method.name}({builder.method.params}, int extra) {{"
    else:
        if builder.method is None:
            raise StepInvalid("no traced method at head")
        header = builder.method.header()
    line = next(
        i + 1 for i, text_line in enumerate(content.splitlines()) if header in text_line
    )
    locator = TraversalNode(commit=head, file=builder.file, name=builder.method.name, line=line)

    if trace_overload and overload_step is not None and not overload_step.overload_similar:
        entries = [(overload_sha, frozenset({"Introduced"}))]
    else:
        entries = list(builder.contributions)
        if builder.intro_sha is None:
            raise StepInvalid("scenario produced no introduction commit")
        entries.append((builder.intro_sha, frozenset({"Introduced"})))
    entries.sort(key=lambda e: -builder.tick_of[e[0]])
    return workdir, GroundTruth(locator=locator, expected_records=entries)


def write_ground_truth(truth: GroundTruth, repository: str, path: str | os.PathLike) -> None:
    """Emit a ground truth as a native oracle JSON document."""
    document = {
        "schema_version": "1",
        "repository": repository,
        "start_commit": truth.locator.commit,
        "file": truth.locator.file,
        "method_name": truth.locator.name,
        "start_line": truth.locator.line,
        "expected": [
            {"commit": sha, "kinds": sorted(kinds)}
            for sha, kinds in truth.expected_records
        ],
    }
    Path(path).write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")


def scenario_catalog() -> list[Scenario]:
    """Every step kind exercised alone plus the documented combinations."""
    init = ScenarioStep(StepKind.INIT_FILE)
    return [
        Scenario("init_only", (init,), description="file created with the method, never touched again"),
        Scenario("body_edit", (init, ScenarioStep(StepKind.EDIT_BODY))),
        Scenario("rename_method", (init, ScenarioStep(StepKind.RENAME_METHOD))),
        Scenario("change_params", (init, ScenarioStep(StepKind.CHANGE_PARAMS))),
        Scenario("move_method", (init, ScenarioStep(StepKind.MOVE_METHOD_TO_FILE))),
        Scenario("rename_file", (init, ScenarioStep(StepKind.RENAME_FILE))),
        Scenario("add_overload_base", (init, ScenarioStep(StepKind.ADD_OVERLOAD)),
                 description="adding an overload leaves the base method's history untouched"),
        Scenario("merge_take_ours",
                 (init, ScenarioStep(StepKind.MERGE_BRANCHES, resolution=MergeResolution.TAKE_OURS))),
        Scenario("merge_take_theirs",
                 (init, ScenarioStep(StepKind.MERGE_BRANCHES, resolution=MergeResolution.TAKE_THEIRS))),
        Scenario("merge_edited_resolution",
                 (init, ScenarioStep(StepKind.MERGE_BRANCHES, resolution=MergeResolution.EDITED_RESOLUTION))),
        Scenario("format_only", (init, ScenarioStep(StepKind.FORMAT_ONLY))),
        Scenario("javadoc_edit", (init, ScenarioStep(StepKind.EDIT_JAVADOC))),
        Scenario("annotation_edit", (init, ScenarioStep(StepKind.EDIT_ANNOTATION))),
        Scenario("touch_other_file", (init, ScenarioStep(StepKind.TOUCH_OTHER_FILE))),
        Scenario(
            "full_chain",
            (
                init,
                ScenarioStep(StepKind.EDIT_BODY),
                ScenarioStep(StepKind.RENAME_METHOD),
                ScenarioStep(StepKind.MOVE_METHOD_TO_FILE),
                ScenarioStep(StepKind.EDIT_BODY),
            ),
            description="create, edit, rename, move across files, edit again",
        ),
        Scenario(
            "rename_file_then_edit",
            (
                init,
                ScenarioStep(StepKind.EDIT_BODY),
                ScenarioStep(StepKind.RENAME_FILE),
                ScenarioStep(StepKind.EDIT_BODY),
            ),
        ),
        Scenario(
            "overload_similar_follows_sibling",
            (init, ScenarioStep(StepKind.EDIT_BODY), ScenarioStep(StepKind.ADD_OVERLOAD)),
            trace_overload=True,
            description="tracing an overload whose body mirrors its sibling follows the sibling",
        ),
        Scenario(
            "overload_distinct_introduction",
            (init, ScenarioStep(StepKind.ADD_OVERLOAD, overload_similar=False)),
            trace_overload=True,
            description="an overload with an unrelated body is introduced where it was added",
        ),
        Scenario(
            "dual_branch_introduction",
            (
                ScenarioStep(StepKind.INIT_FILE, with_method=False),
                ScenarioStep(StepKind.MERGE_BRANCHES, merge_mode="dual_add",
                             resolution=MergeResolution.TAKE_OURS),
            ),
            description="method added independently on two branches; the earlier commit wins",
        ),
        Scenario(
            "merge_single_parent_method",
            (
                ScenarioStep(StepKind.INIT_FILE, with_method=False),
                ScenarioStep(StepKind.MERGE_BRANCHES, merge_mode="side_add"),
            ),
            description="method arrives through one branch of a merge without modification",
        ),
        Scenario(
            "cosmetic_then_merge",
            (
                init,
                ScenarioStep(StepKind.FORMAT_ONLY),
                ScenarioStep(StepKind.EDIT_JAVADOC),
                ScenarioStep(StepKind.EDIT_ANNOTATION),
                ScenarioStep(StepKind.MERGE_BRANCHES, resolution=MergeResolution.TAKE_THEIRS),
            ),
        ),
        Scenario(
            "params_then_move_then_format",
            (
                init,
                ScenarioStep(StepKind.CHANGE_PARAMS),
                ScenarioStep(StepKind.MOVE_METHOD_TO_FILE),
                ScenarioStep(StepKind.FORMAT_ONLY),
                ScenarioStep(StepKind.TOUCH_OTHER_FILE),
            ),
        ),
    ]
