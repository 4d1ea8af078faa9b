"""Structural model of Java source: method and constructor extraction.

A lexical scan plus a brace-structure walk — enough grammar to find every
method/constructor declaration (in top-level, nested, inner, local, and
anonymous classes) and slice its exact source text, without attempting full
Java parsing or semantic analysis. Input is arbitrary text; failures are
encoded in the returned ``ParsedFile``, never raised.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass, field

from .errors import MethodNotFound

_WORD_RE = re.compile(r"(?:[^\W\d]|\$)(?:\w|\$)*", re.UNICODE)
_NUMBER_RE = re.compile(r"[0-9][0-9a-zA-Z_.]*")
_WS = " \t\r\n\f\x0b"

_MODIFIERS = {
    "public", "private", "protected", "static", "final", "abstract",
    "default", "synchronized", "native", "strictfp", "transient",
    "volatile", "sealed",
}
_TYPE_KEYWORDS = {"class", "interface", "enum", "record"}

# find_method matches a query line against the declaration start with this
# slack: oracle lines sometimes point at the annotation or Javadoc line.
LINE_TOLERANCE = 2


@dataclass(frozen=True)
class _Token:
    kind: str  # "word" | "string" | "number" | "punct"
    text: str
    start: int
    end: int


@dataclass(frozen=True)
class _Comment:
    start: int
    end: int
    javadoc: bool


@dataclass(frozen=True)
class MethodRecord:
    """One parsed method or constructor occurrence."""

    file: str
    enclosing_type_path: str
    name: str
    parameter_types: tuple[str, ...]
    return_type: str | None  # absent for constructors
    body_text: str | None  # exact source of the body block; absent if no body
    full_text: str  # Javadoc (if any) through closing brace / semicolon
    annotations_text: str
    javadoc_text: str
    start_line: int  # declaration start (annotations included, Javadoc not)
    end_line: int

    @property
    def signature(self) -> str:
        """Canonical form: enclosing path, name, ordered parameter types."""
        return f"{self.enclosing_type_path}#{self.name}({','.join(self.parameter_types)})"


@dataclass
class ParsedFile:
    file: str
    methods: list[MethodRecord]
    parse_ok: bool
    diagnostics: list[str] = field(default_factory=list)
    commit: str | None = None


def normalize_java_text(text: str) -> str:
    """Collapse whitespace runs outside string/char literals to one space.

    Comments (line, block, Javadoc) count as whitespace and disappear;
    literal contents are preserved byte-exactly. Idempotent: lexically valid
    input stabilizes after one pass; degenerate quoting (an unterminated
    literal cut off by a newline) can re-pair quotes once whitespace
    collapses, so the pass is iterated to its fixpoint.
    """
    current = _collapse_pass(text)
    while True:
        again = _collapse_pass(current)
        if again == current:
            return current
        current = again


def _collapse_pass(text: str) -> str:
    out: list[str] = []
    pending_ws = False
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c in _WS:
            pending_ws = True
            i += 1
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            j = text.find("\n", i)
            i = n if j < 0 else j
            pending_ws = True
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "*":
            j = text.find("*/", i + 2)
            i = n if j < 0 else j + 2
            pending_ws = True
            continue
        if pending_ws and out:
            out.append(" ")
        pending_ws = False
        if c == '"':
            if text.startswith('"""', i):
                j = _scan_text_block(text, i)
            else:
                j = _scan_quoted(text, i, '"')
            out.append(text[i:j])
            i = j
        elif c == "'":
            j = _scan_quoted(text, i, "'")
            out.append(text[i:j])
            i = j
        else:
            out.append(c)
            i += 1
    return "".join(out)


def normalize_body(record: MethodRecord) -> str:
    """Normalized body text of a method; empty when the method has no body."""
    return normalize_java_text(record.body_text or "")


def _scan_quoted(text: str, i: int, quote: str) -> int:
    """Index just past the closing quote (or end of text if unterminated)."""
    j = i + 1
    n = len(text)
    while j < n:
        c = text[j]
        if c == "\\":
            j += 2
            continue
        if c == quote or c == "\n":
            return j + 1 if c == quote else j
        j += 1
    return n


def _scan_text_block(text: str, i: int) -> int:
    j = i + 3
    n = len(text)
    while j < n:
        if text[j] == "\\":
            j += 2
            continue
        if text.startswith('"""', j):
            return j + 3
        j += 1
    return n


def _tokenize(text: str) -> tuple[list[_Token], list[_Comment], list[str]]:
    tokens: list[_Token] = []
    comments: list[_Comment] = []
    diagnostics: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c in _WS:
            i += 1
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            j = text.find("\n", i)
            i = n if j < 0 else j + 1
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "*":
            j = text.find("*/", i + 2)
            if j < 0:
                diagnostics.append(f"unterminated block comment at offset {i}")
                break
            is_javadoc = text.startswith("/**", i) and j > i + 2
            comments.append(_Comment(i, j + 2, is_javadoc))
            i = j + 2
            continue
        if c == '"':
            j = _scan_text_block(text, i) if text.startswith('"""', i) else _scan_quoted(text, i, '"')
            if j >= n and not text.endswith('"'):
                diagnostics.append(f"unterminated string literal at offset {i}")
            tokens.append(_Token("string", text[i:j], i, j))
            i = j
            continue
        if c == "'":
            j = _scan_quoted(text, i, "'")
            tokens.append(_Token("string", text[i:j], i, j))
            i = j
            continue
        m = _WORD_RE.match(text, i)
        if m:
            tokens.append(_Token("word", m.group(), i, m.end()))
            i = m.end()
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            tokens.append(_Token("number", m.group(), i, m.end()))
            i = m.end()
            continue
        tokens.append(_Token("punct", c, i, i + 1))
        i += 1
    return tokens, comments, diagnostics


_OPENERS = {"(": ")", "[": "]", "{": "}"}


class _Walker:
    """Token-stream walker that collects method records."""

    def __init__(self, text: str, tokens: list[_Token], comments: list[_Comment], file: str):
        self.text = text
        self.tokens = tokens
        self.comments = comments
        self.file = file
        self.methods: list[MethodRecord] = []
        self.diagnostics: list[str] = []
        self.anon_counters: dict[str, int] = {}
        self.line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def line_of(self, offset: int) -> int:
        return bisect_right(self.line_starts, offset)

    # -- helpers -------------------------------------------------------

    def tok(self, i: int) -> _Token | None:
        return self.tokens[i] if 0 <= i < len(self.tokens) else None

    def is_type_decl(self, i: int) -> bool:
        """True when tokens[i] starts a class/interface/enum/record declaration."""
        t = self.tokens[i]
        if t.kind != "word" or t.text not in _TYPE_KEYWORDS:
            return False
        prev = self.tok(i - 1)
        if prev and prev.text == ".":  # Foo.class literal, package segment
            return False
        name = self.tok(i + 1)
        if name is None or name.kind != "word":
            return False
        if t.text != "record":
            return True
        # "record" is a contextual keyword; require a declaration-shaped tail.
        after = self.tok(i + 2)
        return after is not None and after.text in {"<", "{", "(", "extends", "implements", "permits"}

    def skip_angles(self, i: int) -> int:
        """tokens[i] == '<'; index just past the balanced closing '>'."""
        depth = 0
        while i < len(self.tokens):
            t = self.tokens[i]
            if t.text == "<":
                depth += 1
            elif t.text == ">":
                depth -= 1
                if depth == 0:
                    return i + 1
            elif t.text in "({[":
                i = self.skip_balanced(i) - 1
            i += 1
        return i

    def skip_balanced(self, i: int) -> int:
        """tokens[i] is an opener; index just past its matching closer."""
        closer = _OPENERS[self.tokens[i].text]
        depth = 0
        while i < len(self.tokens):
            t = self.tokens[i]
            if t.text in _OPENERS and _OPENERS[t.text] == closer:
                depth += 1
            elif t.text == closer:
                depth -= 1
                if depth == 0:
                    return i + 1
            i += 1
        raise _Unbalanced(f"unbalanced '{closer}' expected")

    def consume_annotation(self, i: int) -> tuple[int, tuple[int, int]]:
        """tokens[i] == '@'; returns (next index, (start, end) source span)."""
        start = self.tokens[i].start
        i += 1
        end = self.tokens[i - 1].end
        # qualified name
        while True:
            t = self.tok(i)
            if t is not None and t.kind == "word":
                end = t.end
                i += 1
                nxt = self.tok(i)
                if nxt is not None and nxt.text == ".":
                    i += 1
                    continue
            break
        t = self.tok(i)
        if t is not None and t.text == "(":
            i = self.scan_region(i + 1, ")", path=None)
            end = self.tokens[i - 1].end
        return i, (start, end)

    def next_anon_path(self, path: str) -> str:
        k = self.anon_counters.get(path, 0) + 1
        self.anon_counters[path] = k
        return f"{path}$anon{k}"

    # -- structural walk -----------------------------------------------

    def walk_compilation_unit(self) -> None:
        i = 0
        while i < len(self.tokens):
            t = self.tokens[i]
            if t.kind == "word" and self.is_type_decl(i):
                i = self.parse_type_declaration(i, "")
            elif t.text == "@" and (n := self.tok(i + 1)) is not None and n.text == "interface":
                i = self.parse_type_declaration(i + 1, "")
            else:
                i += 1

    def parse_type_declaration(self, i: int, parent_path: str) -> int:
        """tokens[i] is the type keyword ('interface' for annotation types)."""
        kind = self.tokens[i].text
        name_tok = self.tok(i + 1)
        if name_tok is None:
            return i + 1
        path = f"{parent_path}.{name_tok.text}" if parent_path else name_tok.text
        i += 2
        # header: type params, record header, extends/implements/permits
        while i < len(self.tokens):
            t = self.tokens[i]
            if t.text == "{":
                return self.parse_type_body(i, path, kind)
            if t.text == "<":
                i = self.skip_angles(i)
            elif t.text == "(":
                i = self.skip_balanced(i)
            elif t.text == ";":  # degenerate declaration
                return i + 1
            else:
                i += 1
        return i

    def parse_type_body(self, i: int, path: str, kind: str) -> int:
        """tokens[i] == '{' of a type body; returns index past matching '}'."""
        i += 1
        if kind == "enum":
            i = self.parse_enum_constants(i, path)
        while i < len(self.tokens):
            t = self.tokens[i]
            if t.text == "}":
                return i + 1
            if t.text == ";":
                i += 1
                continue
            i = self.parse_member(i, path, kind)
        raise _Unbalanced(f"type body of {path} not closed")

    def parse_enum_constants(self, i: int, path: str) -> int:
        while i < len(self.tokens):
            t = self.tokens[i]
            if t.text == ";":
                return i + 1
            if t.text == "}":
                return i
            if t.text == "@":
                i, _ = self.consume_annotation(i)
                continue
            if t.text == ",":
                i += 1
                continue
            if t.kind in ("word", "string", "number"):
                i += 1
                t = self.tok(i)
                if t is not None and t.text == "(":
                    i = self.scan_region(i + 1, ")", path)
                    t = self.tok(i)
                if t is not None and t.text == "{":
                    i = self.parse_type_body(i, self.next_anon_path(path), "class")
                continue
            i += 1
        return i

    def parse_member(self, i: int, path: str, kind: str) -> int:
        """One member: field, method, constructor, nested type, initializer."""
        member_start = self.tokens[i].start
        annotations: list[tuple[int, int]] = []
        header: list[_Token] = []  # non-annotation tokens before the decision point
        type_param_spans: list[tuple[int, int]] = []
        j = i
        while j < len(self.tokens):
            t = self.tokens[j]
            if t.text == "@":
                nxt = self.tok(j + 1)
                if nxt is not None and nxt.text == "interface":
                    return self.parse_type_declaration(j + 1, path)
                j, span = self.consume_annotation(j)
                annotations.append(span)
                continue
            if t.kind == "word" and self.is_type_decl(j):
                return self.parse_type_declaration(j, path)
            if t.text == "{":
                non_mod = [h for h in header if not (h.kind == "word" and h.text in _MODIFIERS)]
                if not non_mod:
                    # instance/static initializer block
                    return self.scan_region(j + 1, "}", path)
                if kind == "record" and len(non_mod) == 1 and non_mod[0].kind == "word":
                    return self.finish_callable(
                        name_tok=non_mod[0], params_span=None, body_open=j,
                        path=path, annotations=annotations, member_start=member_start,
                        header=header,
                    )
                # malformed member; treat as opaque block
                return self.scan_region(j + 1, "}", path)
            if t.text == "(":
                name_tok = next((h for h in reversed(header) if h.kind == "word"), None)
                if name_tok is None:
                    # expression-ish junk at member level; skip the parens
                    return self.skip_balanced(j)
                params_end = self.skip_balanced(j)
                return self.finish_callable(
                    name_tok=name_tok, params_span=(j, params_end), body_open=None,
                    path=path, annotations=annotations, member_start=member_start,
                    header=header,
                )
            if t.text == "=":
                return self.scan_region(j + 1, ";", path)
            if t.text == ";":
                return j + 1
            if t.text == "<":
                end = self.skip_angles(j)
                if any(not (h.kind == "word" and h.text in _MODIFIERS) for h in header):
                    # generics of the return type, e.g. List<String> foo()
                    header.extend(self.tokens[j:end])
                else:
                    type_param_spans.append((j, end))
                j = end
                continue
            if t.text == "}":
                return j  # let the caller see the close
            header.append(t)
            j += 1
        return j

    def finish_callable(
        self,
        name_tok: _Token,
        params_span: tuple[int, int] | None,
        body_open: int | None,
        path: str,
        annotations: list[tuple[int, int]],
        member_start: int,
        header: list[_Token],
    ) -> int:
        """Parse a method/constructor from its parameter list (or compact-
        constructor brace) onward, record it, and return the next index."""
        if params_span is not None:
            j = params_span[1]
            # trailing array dims, throws clause, annotation-member default
            while j < len(self.tokens):
                t = self.tokens[j]
                if t.text == "{":
                    body_open = j
                    break
                if t.text == ";":
                    break
                if t.text == "<":
                    j = self.skip_angles(j)
                elif t.text == "(":
                    j = self.skip_balanced(j)
                elif t.text == "@":
                    j, _ = self.consume_annotation(j)
                else:
                    j += 1
            else:
                raise _Unbalanced(f"declaration of {name_tok.text} not terminated")
        else:
            j = body_open  # compact record constructor
        if body_open is not None:
            after_body = self.scan_region(body_open + 1, "}", path)
            body_close = after_body - 1
            body_text = self.text[self.tokens[body_open].start : self.tokens[body_close].end]
            end_offset = self.tokens[body_close].end
            next_i = after_body
        else:
            body_text = None
            end_offset = self.tokens[j].end  # the ';'
            next_i = j + 1

        params = (
            self.parse_parameters(*params_span) if params_span is not None else tuple()
        )
        return_tokens = self.return_type_tokens(header, name_tok)
        return_type = _join_type_tokens(return_tokens) if return_tokens else None

        javadoc = self.attached_javadoc(member_start)
        full_start = javadoc.start if javadoc else member_start
        annotations_text = "\n".join(self.text[a:b] for a, b in annotations)
        record = MethodRecord(
            file=self.file,
            enclosing_type_path=path,
            name=name_tok.text,
            parameter_types=params,
            return_type=return_type,
            body_text=body_text,
            full_text=self.text[full_start:end_offset],
            annotations_text=annotations_text,
            javadoc_text=self.text[javadoc.start : javadoc.end] if javadoc else "",
            start_line=self.line_of(member_start),
            end_line=self.line_of(end_offset - 1),
        )
        self.methods.append(record)
        return next_i

    def attached_javadoc(self, member_start: int) -> _Comment | None:
        """Last Javadoc before the member with only whitespace/comments between."""
        candidate: _Comment | None = None
        for c in self.comments:
            if c.end <= member_start:
                if c.javadoc:
                    candidate = c
            else:
                break
        if candidate is None:
            return None
        gap = self.text[candidate.end : member_start]
        for c in self.comments:
            if c.start >= candidate.end and c.end <= member_start:
                gap = gap.replace(self.text[c.start : c.end], "", 1)
        return candidate if gap.strip(_WS) == "" else None

    def parse_parameters(self, open_idx: int, end_idx: int) -> tuple[str, ...]:
        """Parameter type list from the tokens inside '(' .. ')'."""
        inner = self.tokens[open_idx + 1 : end_idx - 1]
        if not inner:
            return tuple()
        groups: list[list[_Token]] = [[]]
        depth = 0
        for t in inner:
            if t.text in "([<" or (t.text == "{"):
                depth += 1
            elif t.text in ")]>" or t.text == "}":
                depth -= 1
            if t.text == "," and depth == 0:
                groups.append([])
            else:
                groups[-1].append(t)
        types: list[str] = []
        for group in groups:
            toks = self.strip_param_annotations(group)
            toks = [t for t in toks if not (t.kind == "word" and t.text == "final")]
            if not toks:
                continue
            # last word token is the parameter name; what follows it
            # (C-style array dims) belongs to the type
            name_idx = None
            for idx in range(len(toks) - 1, -1, -1):
                if toks[idx].kind == "word":
                    name_idx = idx
                    break
            if name_idx is None or name_idx == 0 and len(toks) == 1:
                # lone token: a bare type (e.g. inside an annotation) — keep it
                types.append(_join_type_tokens(toks))
                continue
            type_tokens = toks[:name_idx] + toks[name_idx + 1 :]
            types.append(_join_type_tokens(type_tokens))
        return tuple(t for t in types if t)

    def strip_param_annotations(self, toks: list[_Token]) -> list[_Token]:
        out: list[_Token] = []
        i = 0
        while i < len(toks):
            if toks[i].text == "@":
                i += 1
                while i < len(toks) and toks[i].kind == "word":
                    if i + 1 < len(toks) and toks[i + 1].text == ".":
                        i += 2
                        continue
                    i += 1
                    break
                if i < len(toks) and toks[i].text == "(":
                    depth = 0
                    while i < len(toks):
                        if toks[i].text == "(":
                            depth += 1
                        elif toks[i].text == ")":
                            depth -= 1
                            if depth == 0:
                                i += 1
                                break
                        i += 1
                continue
            out.append(toks[i])
            i += 1
        return out

    def return_type_tokens(self, header: list[_Token], name_tok: _Token) -> list[_Token]:
        """Header tokens that form the return type (modifiers and name removed)."""
        out: list[_Token] = []
        for t in header:
            if t is name_tok:
                continue
            if t.kind == "word" and t.text in _MODIFIERS:
                continue
            if t.start >= name_tok.start:
                continue
            out.append(t)
        return out

    def scan_region(self, i: int, closer: str, path: str | None) -> int:
        """Walk code generically until the unmatched ``closer``; detect local
        and anonymous classes on the way. Returns the index past the closer."""
        while i < len(self.tokens):
            t = self.tokens[i]
            if t.text == closer:
                return i + 1
            if closer == ";" and t.text == "}":
                return i  # unterminated statement; surface the brace
            if t.text in _OPENERS:
                i = self.scan_region(i + 1, _OPENERS[t.text], path)
                continue
            if t.text in (")", "]", "}"):
                raise _Unbalanced(f"unexpected '{t.text}'")
            if path is not None and t.kind == "word" and t.text == "new":
                i = self.scan_new_expression(i, path)
                continue
            if path is not None and t.kind == "word" and self.is_type_decl(i):
                i = self.parse_type_declaration(i, path)
                continue
            i += 1
        if closer == ";":
            return i
        raise _Unbalanced(f"missing '{closer}'")

    def scan_new_expression(self, i: int, path: str) -> int:
        """tokens[i] == 'new'. Detect anonymous class bodies; step past the
        allocated type name so array initializers are not misread."""
        j = i + 1
        # annotations on the allocated type
        while (t := self.tok(j)) is not None and t.text == "@":
            j, _ = self.consume_annotation(j)
        # qualified, possibly generic type name
        saw_name = False
        while (t := self.tok(j)) is not None:
            if t.kind == "word":
                saw_name = True
                j += 1
                nxt = self.tok(j)
                if nxt is not None and nxt.text == "<":
                    j = self.skip_angles(j)
                    nxt = self.tok(j)
                if nxt is not None and nxt.text == ".":
                    j += 1
                    continue
            break
        if not saw_name:
            return i + 1
        t = self.tok(j)
        if t is None:
            return j
        if t.text == "[":
            return j  # array creation; let the generic walk continue
        if t.text == "(":
            j = self.scan_region(j + 1, ")", path)
            t = self.tok(j)
            if t is not None and t.text == "{":
                return self.parse_type_body(j, self.next_anon_path(path), "class")
            return j
        return j


class _Unbalanced(Exception):
    pass


def _join_type_tokens(tokens: list[_Token]) -> str:
    """Whitespace-collapsed type string; a space only between word tokens."""
    parts: list[str] = []
    prev_word = False
    for t in tokens:
        is_word = t.kind in ("word", "number")
        if parts and prev_word and is_word:
            parts.append(" ")
        parts.append(t.text)
        prev_word = is_word
    return "".join(parts)


def parse_methods(text: str, file: str) -> ParsedFile:
    """Extract every method/constructor declaration from Java source text.

    Never raises: syntax problems yield ``parse_ok=False`` with diagnostics
    and an empty method list.
    """
    tokens, comments, diagnostics = _tokenize(text)
    if diagnostics:
        return ParsedFile(file=file, methods=[], parse_ok=False, diagnostics=diagnostics)
    opens = sum(1 for t in tokens if t.text == "{")
    closes = sum(1 for t in tokens if t.text == "}")
    if opens != closes:
        return ParsedFile(
            file=file, methods=[], parse_ok=False,
            diagnostics=[f"unbalanced braces: {opens} opening vs {closes} closing"],
        )
    walker = _Walker(text, tokens, comments, file)
    try:
        walker.walk_compilation_unit()
    except (_Unbalanced, IndexError, RecursionError) as exc:
        return ParsedFile(
            file=file, methods=[], parse_ok=False,
            diagnostics=[f"structure error: {exc}"],
        )
    walker.methods.sort(key=lambda m: (m.start_line, m.end_line))
    return ParsedFile(file=file, methods=walker.methods, parse_ok=True,
                      diagnostics=walker.diagnostics)


def find_method(parsed: ParsedFile, name: str, line: int) -> MethodRecord:
    """Locate a method by name and approximate declaration line.

    An exact start-line match wins; otherwise the nearest record within
    ±LINE_TOLERANCE lines. Raises MethodNotFound when no name matches close
    enough.
    """
    candidates = [m for m in parsed.methods if m.name == name]
    for m in candidates:
        if m.start_line == line:
            return m
    near = [
        (abs(m.start_line - line), m.start_line, m)
        for m in candidates
        if abs(m.start_line - line) <= LINE_TOLERANCE
    ]
    if not near:
        raise MethodNotFound(f"no method named {name!r} within {LINE_TOLERANCE} lines of {line}")
    return min(near, key=lambda x: (x[0], x[1]))[2]
