"""Scoring and oracle ingestion tests."""

from __future__ import annotations

import json

import pytest

from methodtrace.errors import EmptyInput
from methodtrace.evaluation import (
    MetricCounts,
    OracleChange,
    OracleEntry,
    ScoreRow,
    Scores,
    commit_level_scores,
    compare,
    load_oracle,
    method_level_scores,
    report_json,
    report_table,
    runtime_stats,
)
from methodtrace.gitrepo import CommitMeta
from methodtrace.tracing import ChangeKind, ChangeRecord, MethodHistory, TraversalNode


def history_of(commit_kinds: list[tuple[str, set[ChangeKind]]]) -> MethodHistory:
    records = []
    for i, (sha, kinds) in enumerate(commit_kinds):
        meta = CommitMeta(
            id=sha, parents=(), author_name="a", author_email="a@x",
            commit_time=1000 - i, message="m",
        )
        records.append(
            ChangeRecord(
                commit=meta, kinds=frozenset(kinds), file_before="f", file_after="f",
                name_before="m", name_after="m", start_line_after=1,
                method_before=None, method_after=None, contributor="a <a@x>",
            )
        )
    return MethodHistory(
        locator=TraversalNode("0" * 40, "f", "m", 1), records=records, complete=True
    )


def entry_of(commit_kinds: list[tuple[str, set[str]]]) -> OracleEntry:
    return OracleEntry(
        repository="r", start_commit="0" * 40, file="f", method_name="m", start_line=1,
        expected=[OracleChange(sha, frozenset(kinds)) for sha, kinds in commit_kinds],
    )


class TestCommitLevelScores:
    def test_historyfinder_training_row(self):
        scores = commit_level_scores([MetricCounts(3047, 6, 67)])
        assert (scores.precision, scores.recall, scores.f1) == (99.80, 97.85, 98.82)

    def test_codeshovel_training_row(self):
        scores = commit_level_scores([MetricCounts(2813, 158, 28)])
        assert (scores.precision, scores.recall, scores.f1) == (94.68, 99.01, 96.80)

    def test_zero_denominator_convention(self):
        scores = commit_level_scores([MetricCounts(0, 0, 0)])
        assert (scores.precision, scores.recall, scores.f1) == (100.00, 100.00, 100.00)

    def test_aggregation_before_division(self):
        # (1,1,0) and (1,0,1) aggregate to TP=2, FP=1, FN=1
        scores = commit_level_scores([MetricCounts(1, 1, 0), MetricCounts(1, 0, 1)])
        assert scores.precision == pytest.approx(66.67)
        assert scores.recall == pytest.approx(66.67)

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            commit_level_scores([])

    def test_f1_between_precision_and_recall(self):
        for counts in [MetricCounts(8, 3, 1), MetricCounts(5, 1, 9), MetricCounts(2, 2, 2)]:
            s = commit_level_scores([counts])
            assert min(s.precision, s.recall) <= s.f1 <= max(s.precision, s.recall)


class TestMethodLevelScores:
    def test_arithmetic_mean(self):
        scores = method_level_scores([MetricCounts(1, 0, 0), MetricCounts(1, 1, 0)])
        assert scores.precision == 75.00

    def test_single_method_equals_commit_level(self):
        counts = MetricCounts(5, 0, 0)
        assert method_level_scores([counts]) == commit_level_scores([counts])

    def test_per_method_f1_averaging(self):
        # both methods have F1 = 2/3; the mean is 66.67, not the harmonic
        # mean of the averaged precision/recall (which would be 75.00)
        scores = method_level_scores([MetricCounts(1, 1, 0), MetricCounts(1, 0, 1)])
        assert (scores.precision, scores.recall, scores.f1) == (75.00, 75.00, 66.67)

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            method_level_scores([])


class TestCompare:
    def test_identical_sets(self):
        shas = [f"{i:040x}" for i in range(5)]
        actual = history_of([(s, {ChangeKind.BODY_CHANGE}) for s in shas])
        expected = entry_of([(s, {"BodyChange"}) for s in shas])
        assert compare(actual, expected) == MetricCounts(5, 0, 0)

    def test_superset_counts_false_positives(self):
        shas = [f"{i:040x}" for i in range(5)]
        actual = history_of([(s, {ChangeKind.BODY_CHANGE}) for s in shas])
        expected = entry_of([(s, {"BodyChange"}) for s in shas[:3]])
        assert compare(actual, expected) == MetricCounts(3, 2, 0)

    def test_kind_filter_drops_commit_on_both_sides(self):
        a, b = "a" * 40, "b" * 40
        actual = history_of([(a, {ChangeKind.BODY_CHANGE})])
        expected = entry_of([(a, {"BodyChange"}), (b, {"FormattingChange"})])
        keep_all = compare(actual, expected)
        assert keep_all == MetricCounts(1, 0, 1)
        filtered = compare(
            actual, expected,
            kind_filter={ChangeKind.BODY_CHANGE, ChangeKind.INTRODUCED},
        )
        assert filtered == MetricCounts(1, 0, 0)

    def test_symmetry_swaps_fp_fn(self):
        a, b, c = "a" * 40, "b" * 40, "c" * 40
        actual = history_of([(a, {ChangeKind.BODY_CHANGE}), (b, {ChangeKind.RENAME})])
        expected = entry_of([(a, {"BodyChange"}), (c, {"BodyChange"})])
        fwd = compare(actual, expected)
        mirrored_actual = history_of(
            [(e.commit, {ChangeKind.BODY_CHANGE}) for e in expected.expected]
        )
        mirrored_expected = entry_of([(a, {"BodyChange"}), (b, {"BodyChange"})])
        rev = compare(mirrored_actual, mirrored_expected)
        assert (fwd.tp, fwd.fp, fwd.fn) == (rev.tp, rev.fn, rev.fp)


class TestRuntimeStats:
    def test_single(self):
        stats = runtime_stats([1.0])
        assert (stats.mean, stats.median, stats.min, stats.max) == (1.00, 1.00, 1.00, 1.00)

    def test_even_count_median(self):
        assert runtime_stats([1.0, 3.0]).median == 2.00

    def test_hand_computed(self):
        stats = runtime_stats([0.5, 1.0, 2.0, 10.0])
        assert stats.mean == 3.38
        assert stats.median == 1.50

    def test_ordering_invariants(self):
        stats = runtime_stats([0.4, 0.9, 5.4, 2.2, 1.1])
        assert stats.min <= stats.median <= stats.max
        assert stats.min <= stats.mean <= stats.max

    def test_empty(self):
        with pytest.raises(EmptyInput):
            runtime_stats([])


class TestLoadOracle:
    def test_native_single_entry(self, tmp_path):
        doc = {
            "schema_version": "1",
            "repository": "demo",
            "start_commit": "a" * 40,
            "file": "src/A.java",
            "method_name": "f",
            "start_line": 10,
            "expected": [
                {"commit": "b" * 40, "kinds": ["BodyChange"]},
                {"commit": "a" * 40, "kinds": ["Introduced"]},
            ],
        }
        (tmp_path / "one.json").write_text(json.dumps(doc))
        entries = load_oracle(tmp_path, "native")
        assert len(entries) == 1
        assert entries[0].method_name == "f"
        assert entries[0].expected[1].kinds == frozenset({"Introduced"})

    def test_empty_directory(self, tmp_path):
        assert load_oracle(tmp_path, "native") == []

    def test_malformed_file_skipped_with_diagnostic(self, tmp_path):
        (tmp_path / "bad.json").write_text("{not json")
        (tmp_path / "incomplete.json").write_text(json.dumps({"repository": "x"}))
        diagnostics: list[str] = []
        entries = load_oracle(tmp_path, "native", diagnostics)
        assert entries == []
        assert len(diagnostics) == 2

    def test_codeshovel_layout(self, tmp_path):
        doc = {
            "origin": "codeshovel",
            "repositoryName": "checkstyle",
            "filePath": "src/main/java/com/puppycrawl/tools/checkstyle/Checker.java",
            "functionName": "fireErrors",
            "functionStartLine": 383,
            "startCommitName": "119fd4fb",
            "expectedResult": {
                "changeHistory": ["c" * 40, "d" * 40, "e" * 40],
                "changeHistoryShort": {
                    "c" * 40: "Ybodychange",
                    "d" * 40: "Ymultichange(Yrename,Ybodychange)",
                    "e" * 40: "Yintroduced",
                },
            },
        }
        (tmp_path / "checkstyle-Checker-fireErrors.json").write_text(json.dumps(doc))
        entries = load_oracle(tmp_path, "codeshovel")
        assert len(entries) == 1
        entry = entries[0]
        assert entry.method_name == "fireErrors"
        by_commit = {c.commit: c.kinds for c in entry.expected}
        assert by_commit["d" * 40] == frozenset({"Rename", "BodyChange"})
        assert by_commit["e" * 40] == frozenset({"Introduced"})

    def test_codeshovel_unmappable_kind_kept_opaque(self, tmp_path):
        doc = {
            "repositoryName": "x",
            "filePath": "A.java",
            "functionName": "f",
            "functionStartLine": 1,
            "startCommitName": "a" * 40,
            "expectedResult": {
                "changeHistoryShort": {"a" * 40: "Yexceptionschange"}
            },
        }
        (tmp_path / "x.json").write_text(json.dumps(doc))
        entries = load_oracle(tmp_path, "codeshovel")
        assert entries[0].expected[0].kinds == frozenset({"Yexceptionschange"})

    def test_codetracker_layout(self, tmp_path):
        doc = {
            "repositoryName": "junit4",
            "repositoryWebURL": "https://github.com/junit-team/junit4.git",
            "filePath": "src/main/java/org/junit/runners/BlockJUnit4ClassRunner.java",
            "functionName": "runChild",
            "functionStartLine": 64,
            "startCommitId": "a" * 40,
            "expectedChanges": [
                {"commitId": "b" * 40, "changeType": "body change"},
                {"commitId": "b" * 40, "changeType": "documentation change"},
                {"commitId": "c" * 40, "changeType": "introduced"},
            ],
        }
        (tmp_path / "junit.json").write_text(json.dumps(doc))
        entries = load_oracle(tmp_path, "codetracker")
        assert len(entries) == 1
        entry = entries[0]
        assert entry.expected[0].kinds == frozenset({"BodyChange", "JavadocChange"})
        assert entry.expected[1].kinds == frozenset({"Introduced"})

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            load_oracle(tmp_path, "mystery")


class TestReportRendering:
    def rows(self):
        counts = MetricCounts(3047, 6, 67)
        return [ScoreRow("Training", "tracer", counts, commit_level_scores([counts]))]

    def test_json_report(self):
        payload = json.loads(report_json(self.rows()))
        assert payload[0]["precision"] == 99.80
        assert payload[0]["tp"] == 3047

    def test_text_table_alignment(self):
        table = report_table(self.rows())
        lines = table.splitlines()
        assert lines[0].startswith("Oracle")
        assert "99.80" in lines[2]
        assert len(lines) == 3


class TestEndToEndScoring:
    def test_forge_oracle_roundtrip_scores_perfect(self, tmp_path):
        """Full harness loop: trace every forge scenario, emit native oracle
        JSON, reload it, compare, and aggregate at both granularities."""
        from methodtrace.fixtures import build_scenario, scenario_catalog, write_ground_truth
        from methodtrace.gitrepo import open_repository
        from methodtrace.tracing import TracerConfig, trace

        oracle_dir = tmp_path / "oracle"
        oracle_dir.mkdir()
        histories = {}
        for scenario in scenario_catalog()[:8]:
            repo, truth = build_scenario(
                scenario.steps, tmp_path / scenario.name,
                trace_overload=scenario.trace_overload,
            )
            write_ground_truth(truth, scenario.name, oracle_dir / f"{scenario.name}.json")
            handle = open_repository(str(repo), tmp_path / "cache")
            histories[scenario.name] = trace(handle, truth.locator, TracerConfig())

        entries = load_oracle(oracle_dir, "native")
        assert len(entries) == 8
        per_method = [
            compare(histories[entry.repository], entry) for entry in entries
        ]
        assert all(c.fp == 0 and c.fn == 0 for c in per_method)
        commit_scores = commit_level_scores(per_method)
        method_scores = method_level_scores(per_method)
        assert (commit_scores.precision, commit_scores.recall, commit_scores.f1) == (100.0, 100.0, 100.0)
        assert (method_scores.precision, method_scores.recall, method_scores.f1) == (100.0, 100.0, 100.0)

        rows = [ScoreRow("forge", "tracer", sum(per_method[1:], per_method[0]), commit_scores, method_scores)]
        table = report_table(rows)
        assert "100.00" in table
        payload = json.loads(report_json(rows))
        assert payload[0]["method_f1"] == 100.0
