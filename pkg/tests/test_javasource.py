"""Structural Java parsing tests: extraction, slicing, lookup, normalization."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from methodtrace.errors import MethodNotFound
from methodtrace.javasource import (
    find_method,
    normalize_body,
    normalize_java_text,
    parse_methods,
)

SIMPLE = """\
package demo;

public class C {
    public int foo(int a) {
        return a * 2;
    }
}
"""

RICH = """\
package demo;

import java.util.List;
import java.util.Map;

public class Outer {

    private int counter = compute(1);

    /**
     * Adds things together.
     */
    @Deprecated
    @SuppressWarnings("unchecked")
    public int compute(int seed) {
        int acc = seed;
        // internal note
        for (int i = 0; i < 3; i++) {
            acc += i;
        }
        return acc;
    }

    public int compute(int seed, int bias) {
        return seed + bias;
    }

    public Map<String, List<Integer>> lookup(Map<String, Integer> input, int... extras) {
        return null;
    }

    public <T extends Comparable<T>> T max(List<T> values) {
        return values.get(0);
    }

    public Outer() {
        this.counter = 0;
    }

    static class Inner {
        void run() {
            class Local {
                void deep() {
                    System.out.println("local");
                }
            }
            Runnable r = new Runnable() {
                public void run() {
                    System.out.println("anon");
                }
            };
            r.run();
        }
    }

    interface Callback {
        void onDone(String id);

        default int retries() {
            return 3;
        }
    }
}
"""


def parsed_rich():
    parsed = parse_methods(RICH, "Outer.java")
    assert parsed.parse_ok, parsed.diagnostics
    return parsed


class TestParseMethods:
    def test_single_method_signature(self):
        parsed = parse_methods(SIMPLE, "C.java")
        assert parsed.parse_ok
        assert [m.signature for m in parsed.methods] == ["C#foo(int)"]
        m = parsed.methods[0]
        assert m.return_type == "int"
        assert m.name == "foo"
        assert m.start_line == 4
        assert m.end_line == 6

    def test_empty_source(self):
        parsed = parse_methods("", "E.java")
        assert parsed.parse_ok
        assert parsed.methods == []

    def test_unbalanced_braces(self):
        parsed = parse_methods("class C { void f() { }", "C.java")
        assert not parsed.parse_ok
        assert parsed.diagnostics
        assert parsed.methods == []

    def test_overloads_get_distinct_signatures(self):
        parsed = parsed_rich()
        sigs = {m.signature for m in parsed.methods}
        assert "Outer#compute(int)" in sigs
        assert "Outer#compute(int,int)" in sigs

    def test_generic_parameter_normalization(self):
        parsed = parsed_rich()
        lookup = next(m for m in parsed.methods if m.name == "lookup")
        assert lookup.parameter_types == ("Map<String,Integer>", "int...")
        assert lookup.return_type == "Map<String,List<Integer>>"

    def test_generic_method_type_params_excluded_from_return(self):
        parsed = parsed_rich()
        mx = next(m for m in parsed.methods if m.name == "max")
        assert mx.return_type == "T"
        assert mx.parameter_types == ("List<T>",)

    def test_constructor(self):
        parsed = parsed_rich()
        ctor = next(m for m in parsed.methods if m.name == "Outer")
        assert ctor.return_type is None
        assert ctor.signature == "Outer#Outer()"

    def test_nested_local_and_anonymous_paths(self):
        parsed = parsed_rich()
        paths = {(m.enclosing_type_path, m.name) for m in parsed.methods}
        assert ("Outer.Inner", "run") in paths
        assert ("Outer.Inner.Local", "deep") in paths
        assert ("Outer.Inner$anon1", "run") in paths

    def test_interface_members(self):
        parsed = parsed_rich()
        on_done = next(m for m in parsed.methods if m.name == "onDone")
        assert on_done.body_text is None
        assert on_done.enclosing_type_path == "Outer.Callback"
        retries = next(m for m in parsed.methods if m.name == "retries")
        assert retries.body_text is not None

    def test_javadoc_and_annotations_captured(self):
        parsed = parsed_rich()
        compute = next(m for m in parsed.methods if m.signature == "Outer#compute(int)")
        assert "Adds things together." in compute.javadoc_text
        assert "@Deprecated" in compute.annotations_text
        assert '@SuppressWarnings("unchecked")' in compute.annotations_text
        assert compute.full_text.startswith("/**")
        assert compute.full_text.endswith("}")

    def test_start_line_includes_annotations_not_javadoc(self):
        parsed = parsed_rich()
        compute = next(m for m in parsed.methods if m.signature == "Outer#compute(int)")
        lines = RICH.splitlines()
        assert lines[compute.start_line - 1].strip() == "@Deprecated"

    def test_field_initializer_is_not_a_method(self):
        parsed = parsed_rich()
        assert all(m.name != "counter" for m in parsed.methods)

    def test_methods_sorted_by_start_line(self):
        parsed = parsed_rich()
        lines = [m.start_line for m in parsed.methods]
        assert lines == sorted(lines)

    def test_determinism(self):
        a = parse_methods(RICH, "Outer.java")
        b = parse_methods(RICH, "Outer.java")
        assert a.methods == b.methods

    def test_full_text_reconstruction(self):
        parsed = parsed_rich()
        lines = RICH.splitlines(keepends=True)
        for m in parsed.methods:
            assert m.full_text in RICH
            window = "".join(lines[m.start_line - 1 : m.end_line])
            if not m.javadoc_text:
                # verbatim substring of the [start_line, end_line] range
                assert m.full_text in window
            else:
                # Javadoc sits above the declaration line; the declaration
                # window is the tail of full_text
                assert m.full_text.endswith(window.rstrip("\n").lstrip())

    def test_enum_with_constant_bodies(self):
        src = """
enum Mode {
    FAST("f") {
        int cost() {
            return 1;
        }
    },
    SLOW("s");

    private final String tag;

    Mode(String tag) {
        this.tag = tag;
    }

    int cost() {
        return 9;
    }
}
"""
        parsed = parse_methods(src, "Mode.java")
        assert parsed.parse_ok, parsed.diagnostics
        got = {(m.enclosing_type_path, m.name) for m in parsed.methods}
        assert ("Mode$anon1", "cost") in got
        assert ("Mode", "cost") in got
        assert ("Mode", "Mode") in got

    def test_lambda_bodies_are_not_methods(self):
        src = """
class L {
    Runnable r = () -> {
        int x = 1;
    };

    void go() {
        java.util.function.Function<Integer, Integer> f = y -> y + 1;
        f.apply(2);
    }
}
"""
        parsed = parse_methods(src, "L.java")
        assert parsed.parse_ok
        assert [m.name for m in parsed.methods] == ["go"]

    def test_string_literals_with_braces(self):
        src = 'class S {\n    String f() {\n        return "}{ not structure /* no */ ";\n    }\n}\n'
        parsed = parse_methods(src, "S.java")
        assert parsed.parse_ok
        assert [m.name for m in parsed.methods] == ["f"]

    def test_array_allocation_is_not_anonymous_class(self):
        src = """
class A {
    int[] data = new int[]{1, 2, 3};

    void fill() {
        int[][] grid = new int[2][2];
        Object o = new Object() {
            public String toString() {
                return "x";
            }
        };
        o.toString();
    }
}
"""
        parsed = parse_methods(src, "A.java")
        assert parsed.parse_ok
        names = {(m.enclosing_type_path, m.name) for m in parsed.methods}
        assert ("A", "fill") in names
        assert ("A$anon1", "toString") in names
        assert len(parsed.methods) == 2


class TestFindMethod:
    def test_exact_line(self):
        parsed = parse_methods(SIMPLE, "C.java")
        m = find_method(parsed, "foo", 4)
        assert m.signature == "C#foo(int)"

    def test_tolerance_covers_annotation_shift(self):
        src = "class C {\n    @Deprecated\n    void foo() {\n    }\n}\n"
        parsed = parse_methods(src, "C.java")
        # declaration (with annotation) starts at line 2; a query pointing one
        # line below the header still resolves
        assert find_method(parsed, "foo", 4).start_line == 2
        assert find_method(parsed, "foo", 2).start_line == 2

    def test_exact_match_beats_nearest(self):
        src = "class C {\n    void foo() {\n    }\n\n    void foo(int a) {\n    }\n}\n"
        parsed = parse_methods(src, "C.java")
        assert find_method(parsed, "foo", 5).parameter_types == ("int",)
        assert find_method(parsed, "foo", 2).parameter_types == ()

    def test_missing_name(self):
        parsed = parse_methods(SIMPLE, "C.java")
        with pytest.raises(MethodNotFound):
            find_method(parsed, "bar", 4)

    def test_outside_tolerance(self):
        parsed = parse_methods(SIMPLE, "C.java")
        with pytest.raises(MethodNotFound):
            find_method(parsed, "foo", 40)


class TestNormalize:
    def test_indentation_collapses(self):
        a = "{\n    int x = 1;\n    return x;\n}"
        b = "{ int x = 1; return x; }"
        assert normalize_java_text(a) == normalize_java_text(b)

    def test_string_literal_preserved(self):
        a = '{ return "a b"; }'
        b = '{ return "a  b"; }'
        assert normalize_java_text(a) != normalize_java_text(b)

    def test_comments_stripped(self):
        a = "{ int x = 1; // note\n return x; }"
        b = "{ int x = 1; return x; }"
        assert normalize_java_text(a) == normalize_java_text(b)

    def test_block_comment_acts_as_whitespace(self):
        assert normalize_java_text("a/*x*/b") == normalize_java_text("a b")

    @given(st.text(alphabet="ab {}();/*\n\"'\\", max_size=60))
    def test_idempotent(self, text):
        once = normalize_java_text(text)
        assert normalize_java_text(once) == once

    def test_normalize_body_of_record(self):
        parsed = parse_methods(SIMPLE, "C.java")
        assert normalize_body(parsed.methods[0]) == "{ return a * 2; }"
