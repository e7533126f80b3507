"""Manifest format for describing modules, maps, telescopes, and checks.

A manifest is a line-oriented text file.  `#` starts a comment.  Statements:

    ring Z                  or   ring Z/12
    module M = rel [[2, 0], [0, 3]]
    module F = free 2
    morphism f: M -> N = [[1, 0]]
    telescope T = (M; f, x2, g)
    probe M, N
    analyze M with trace, strict_ml
    analyze T with colim, chain_detection K=4

Relation lists are rows of coefficients; the row width is the generator
count.  In a telescope, `x<k>` abbreviates multiplication by k on the
current stage.  Parsing collects every problem with its line and column
instead of stopping at the first one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fpmod import FpModule, FpMorphism, free_module
from .mlab import Telescope
from .ring import RingSpec, ZZ, Zmod

MODULE_PREDICATES = ("trace", "ttt", "strict_ml", "projective", "free_summands")
MORPHISM_PREDICATES = ("split", "pure", "kernel", "cokernel", "image")
TELESCOPE_PREDICATES = ("split", "colim", "chain_detection")


@dataclass(frozen=True)
class ManifestError:
    line: int
    col: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


class ManifestParseError(ValueError):
    def __init__(self, errors: list[ManifestError]) -> None:
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = errors


@dataclass
class Analysis:
    target: str
    kind: str
    predicates: list[str]
    bound: int | None
    line: int


@dataclass
class Manifest:
    ring: RingSpec
    objects: dict[str, tuple[str, object]] = field(default_factory=dict)
    probe_names: list[str] | None = None
    analyses: list[Analysis] = field(default_factory=list)

    def modules(self) -> dict[str, FpModule]:
        return {n: o for n, (k, o) in self.objects.items() if k == "module"}

    def morphisms(self) -> dict[str, FpMorphism]:
        return {n: o for n, (k, o) in self.objects.items() if k == "morphism"}

    def telescopes(self) -> dict[str, Telescope]:
        return {n: o for n, (k, o) in self.objects.items() if k == "telescope"}


@dataclass(frozen=True)
class _Token:
    kind: str  # name, int, punct, end
    text: str
    col: int


class _StmtError(Exception):
    def __init__(self, col: int, message: str) -> None:
        super().__init__(message)
        self.col = col
        self.message = message


def _tokenize(line: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch in " \t":
            i += 1
            continue
        col = i + 1
        if line.startswith("->", i):
            tokens.append(_Token("punct", "->", col))
            i += 2
            continue
        if ch in "()[],;:=/":
            tokens.append(_Token("punct", ch, col))
            i += 1
            continue
        if ch == "-" or ch.isdigit():
            j = i + 1
            while j < n and line[j].isdigit():
                j += 1
            text = line[i:j]
            if text == "-":
                raise _StmtError(col, "expected a number after '-'")
            tokens.append(_Token("int", text, col))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (line[j].isalnum() or line[j] == "_"):
                j += 1
            tokens.append(_Token("name", line[i:j], col))
            i = j
            continue
        raise _StmtError(col, f"unexpected character {ch!r}")
    tokens.append(_Token("end", "", n + 1))
    return tokens


class _Cursor:
    def __init__(self, tokens: list[_Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def expect_punct(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.text != text:
            raise _StmtError(tok.col, f"expected {text!r}")
        return self.next()

    def expect_name(self, what: str = "a name") -> _Token:
        tok = self.peek()
        if tok.kind != "name":
            raise _StmtError(tok.col, f"expected {what}")
        return self.next()

    def expect_int(self) -> _Token:
        tok = self.peek()
        if tok.kind != "int":
            raise _StmtError(tok.col, "expected an integer")
        return self.next()

    def expect_end(self) -> None:
        tok = self.peek()
        if tok.kind != "end":
            raise _StmtError(tok.col, f"unexpected trailing input {tok.text!r}")


def _parse_matrix(cur: _Cursor) -> tuple[list[list[int]], int]:
    """Bracketed rows of integers; returns rows and the opening column."""
    opening = cur.expect_punct("[")
    rows: list[list[int]] = []
    if cur.peek().kind == "punct" and cur.peek().text == "]":
        cur.next()
        return rows, opening.col
    while True:
        row_open = cur.expect_punct("[")
        row: list[int] = []
        if cur.peek().kind == "punct" and cur.peek().text == "]":
            cur.next()
        else:
            while True:
                row.append(int(cur.expect_int().text))
                tok = cur.peek()
                if tok.kind == "punct" and tok.text == ",":
                    cur.next()
                    continue
                cur.expect_punct("]")
                break
        if rows and len(row) != len(rows[0]):
            raise _StmtError(row_open.col,
                             f"row has {len(row)} entries, expected {len(rows[0])}")
        rows.append(row)
        tok = cur.peek()
        if tok.kind == "punct" and tok.text == ",":
            cur.next()
            continue
        cur.expect_punct("]")
        break
    return rows, opening.col


class _Parser:
    def __init__(self) -> None:
        self.ring: RingSpec | None = None
        self.ring_line: int | None = None
        self.objects: dict[str, tuple[str, object]] = {}
        self.probe_names: list[str] | None = None
        self.analyses: list[Analysis] = []
        self.errors: list[ManifestError] = []

    def error(self, line: int, col: int, message: str) -> None:
        self.errors.append(ManifestError(line, col, message))

    def need_ring(self, line: int, col: int) -> RingSpec:
        if self.ring is None:
            raise _StmtError(col, "no ring declared yet")
        return self.ring

    def define(self, line: int, tok: _Token, kind: str, obj: object) -> None:
        if tok.text in self.objects:
            raise _StmtError(tok.col, f"name {tok.text!r} is already defined")
        self.objects[tok.text] = (kind, obj)

    def lookup(self, tok: _Token, kind: str):
        entry = self.objects.get(tok.text)
        if entry is None:
            raise _StmtError(tok.col, f"unknown name {tok.text!r}")
        if entry[0] != kind:
            raise _StmtError(tok.col, f"{tok.text!r} is a {entry[0]}, expected a {kind}")
        return entry[1]

    def parse(self, text: str) -> Manifest:
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            try:
                cur = _Cursor(_tokenize(line))
                self.statement(cur, lineno)
            except _StmtError as exc:
                self.error(lineno, exc.col, exc.message)
        if self.ring is None:
            self.error(1, 1, "manifest declares no ring")
        if self.errors:
            raise ManifestParseError(sorted(self.errors, key=lambda e: (e.line, e.col)))
        manifest = Manifest(self.ring, self.objects, self.probe_names, self.analyses)
        return manifest

    def statement(self, cur: _Cursor, lineno: int) -> None:
        head = cur.expect_name("a statement keyword")
        handler = {"ring": self.stmt_ring, "module": self.stmt_module,
                   "morphism": self.stmt_morphism, "telescope": self.stmt_telescope,
                   "probe": self.stmt_probe, "analyze": self.stmt_analyze}.get(head.text)
        if handler is None:
            raise _StmtError(head.col, f"unknown statement {head.text!r}")
        handler(cur, lineno)

    def stmt_ring(self, cur: _Cursor, lineno: int) -> None:
        tok = cur.expect_name("a ring")
        if tok.text != "Z":
            raise _StmtError(tok.col, "ring must be Z or Z/<n>")
        if cur.peek().kind == "punct" and cur.peek().text == "/":
            cur.next()
            mod = cur.expect_int()
            n = int(mod.text)
            if n < 2:
                raise _StmtError(mod.col, "modulus must be at least 2")
            ring = Zmod(n)
        else:
            ring = ZZ
        cur.expect_end()
        if self.ring is not None:
            raise _StmtError(tok.col, "ring is already declared")
        self.ring = ring
        self.ring_line = lineno

    def stmt_module(self, cur: _Cursor, lineno: int) -> None:
        name = cur.expect_name("a module name")
        cur.expect_punct("=")
        form = cur.expect_name("'free' or 'rel'")
        ring = self.need_ring(lineno, form.col)
        if form.text == "free":
            rank_tok = cur.expect_int()
            rank = int(rank_tok.text)
            if rank < 0:
                raise _StmtError(rank_tok.col, "rank cannot be negative")
            module = free_module(ring, rank)
        elif form.text == "rel":
            rows, col = _parse_matrix(cur)
            if not rows:
                raise _StmtError(col, "empty relation list; use 'free <k>' instead")
            module = FpModule(ring, len(rows[0]), rows)
        else:
            raise _StmtError(form.col, "expected 'free' or 'rel'")
        cur.expect_end()
        self.define(lineno, name, "module", module)

    def stmt_morphism(self, cur: _Cursor, lineno: int) -> None:
        name = cur.expect_name("a morphism name")
        cur.expect_punct(":")
        src_tok = cur.expect_name("a source module")
        src = self.lookup(src_tok, "module")
        cur.expect_punct("->")
        tgt_tok = cur.expect_name("a target module")
        tgt = self.lookup(tgt_tok, "module")
        cur.expect_punct("=")
        rows, col = _parse_matrix(cur)
        cur.expect_end()
        width = len(rows[0]) if rows else tgt.ngens
        if len(rows) != src.ngens or width != tgt.ngens:
            raise _StmtError(col, f"matrix must be {src.ngens} rows of {tgt.ngens} entries")
        try:
            f = FpMorphism(src, tgt, rows)
        except ValueError:
            raise _StmtError(col, "matrix does not send relations into relations")
        self.define(lineno, name, "morphism", f)

    def stmt_telescope(self, cur: _Cursor, lineno: int) -> None:
        name = cur.expect_name("a telescope name")
        cur.expect_punct("=")
        cur.expect_punct("(")
        start_tok = cur.expect_name("a module name")
        current = self.lookup(start_tok, "module")
        modules = [current]
        maps: list[FpMorphism] = []
        tok = cur.peek()
        if tok.kind == "punct" and tok.text == ";":
            cur.next()
            while True:
                item = cur.expect_name("a map name or x<k>")
                if item.text.startswith("x") and item.text[1:].isdigit():
                    scalar = int(item.text[1:])
                    f = FpMorphism.identity(current).scale(scalar)
                else:
                    f = self.lookup(item, "morphism")
                    if f.source != current:
                        raise _StmtError(item.col,
                                         f"map {item.text!r} does not start at the current stage")
                maps.append(f)
                current = f.target
                modules.append(current)
                tok = cur.peek()
                if tok.kind == "punct" and tok.text == ",":
                    cur.next()
                    continue
                break
        cur.expect_punct(")")
        cur.expect_end()
        self.define(lineno, name, "telescope", Telescope(modules, maps))

    def stmt_probe(self, cur: _Cursor, lineno: int) -> None:
        names = []
        while True:
            tok = cur.expect_name("a module name")
            self.lookup(tok, "module")
            names.append(tok.text)
            nxt = cur.peek()
            if nxt.kind == "punct" and nxt.text == ",":
                cur.next()
                continue
            break
        cur.expect_end()
        self.probe_names = names

    def stmt_analyze(self, cur: _Cursor, lineno: int) -> None:
        target = cur.expect_name("an object name")
        entry = self.objects.get(target.text)
        if entry is None:
            raise _StmtError(target.col, f"unknown name {target.text!r}")
        kind = entry[0]
        with_tok = cur.expect_name("'with'")
        if with_tok.text != "with":
            raise _StmtError(with_tok.col, "expected 'with'")
        allowed = {"module": MODULE_PREDICATES, "morphism": MORPHISM_PREDICATES,
                   "telescope": TELESCOPE_PREDICATES}[kind]
        predicates = []
        bound = None
        while True:
            tok = cur.expect_name("a predicate")
            if tok.text == "K":
                cur.expect_punct("=")
                val = cur.expect_int()
                bound = int(val.text)
                if bound < 0:
                    raise _StmtError(val.col, "bound cannot be negative")
                break
            if tok.text not in allowed:
                raise _StmtError(tok.col,
                                 f"predicate {tok.text!r} does not apply to a {kind}")
            predicates.append(tok.text)
            nxt = cur.peek()
            if nxt.kind == "punct" and nxt.text == ",":
                cur.next()
                continue
            if nxt.kind == "name" and nxt.text == "K":
                continue
            break
        cur.expect_end()
        if not predicates:
            raise _StmtError(target.col, "analyze needs at least one predicate")
        self.analyses.append(Analysis(target.text, kind, predicates, bound, lineno))


def parse_manifest(text: str) -> Manifest:
    """Parse manifest text, raising ManifestParseError with all problems."""
    return _Parser().parse(text)
