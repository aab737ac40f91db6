"""Text formats: ODD documents (``.agodd``), scenario sets (``.agsc``) and
event scripts (``.agev``).

Parsing is total: any input yields a model or raises exactly one
:class:`ParseError`. Serializers emit the canonical form (two-space indent,
one declaration per line, trailing newline) which re-parses to an equal
model and re-serializes byte for byte.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .model import (
    CATEGORY_ORDER,
    AgOdd,
    AgOddError,
    AttributeNode,
    CategoryKind,
    CategoryNode,
    CdvTag,
    Constraint,
    DimensionDecl,
    FramingLimitations,
    Mode,
    ProcessDef,
    Quantity,
    Range,
    Relation,
    SourceSpan,
    Trigger,
    TriggerKind,
    Value,
    format_number,
)
from .scenario import Binding, ProcessRef, Scenario
from .process import ProcessEvent

IDENT_RE = re.compile(r"^[a-z_][a-z0-9_]*$")

KEYWORDS = frozenset(
    """odd framing requirement capability hara dimension unit range values scenery environment
    dynamic_objects permissive restrictive attr tag iter constraint in oneof process start trigger
    end endvalue interaction after state scenario layer bind interaction elapsed measured""".split()
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<num>-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)
  | (?P<tag>(?:SA|EA|C)\d+(?:\.\d+)?(?![\w.]))
  | (?P<word>°?[^\W\d]\w*(?:/[^\W\d]\w*)?)
  | (?P<punct><=|>=|[{}\[\](),:/=<>%])
    """,
    re.VERBOSE,
)

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}


@dataclass(frozen=True)
class Token:
    kind: str  # string | num | tag | word | punct | eof
    text: str
    line: int
    column: int

    def show(self) -> str:
        if self.kind == "eof":
            return "end of input"
        return repr(self.text)


class ParseError(AgOddError):
    """First offending token of a document."""

    def __init__(self, span: SourceSpan, expected: str, found: str, code: str = "syntax"):
        self.span = span
        self.expected = expected
        self.found = found
        super().__init__(code, f"{span}: expected {expected}, found {found}")


def _unescape(body: str, span: SourceSpan) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        nxt = body[i + 1]
        if nxt in _ESCAPES:
            out.append(_ESCAPES[nxt])
            i += 2
        elif nxt == "u" and re.fullmatch(r"[0-9a-fA-F]{4}", body[i + 2 : i + 6] or ""):
            out.append(chr(int(body[i + 2 : i + 6], 16)))
            i += 6
        else:
            raise ParseError(span, "valid escape sequence", repr("\\" + nxt))
    return "".join(out)


def quote(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def tokenize(text: str, source: str = "<string>") -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(SourceSpan(source, line, col), "token", repr(text[pos]))
        kind = m.lastgroup
        chunk = m.group()
        if kind == "string":
            tokens.append(Token("string", _unescape(chunk[1:-1], SourceSpan(source, line, col)), line, col))
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, col))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text, source: str):
        if isinstance(text, (bytes, bytearray)):
            try:
                text = bytes(text).decode("utf-8")
            except UnicodeDecodeError as exc:
                raise ParseError(SourceSpan(source, 1, 1), "UTF-8 text", f"byte 0x{text[exc.start]:02x}") from None
        self.source = source
        self.toks = tokenize(text, source)
        self.i = 0

    # -- token helpers -------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def span(self, tok: Token | None = None) -> SourceSpan:
        tok = tok or self.tok
        return SourceSpan(self.source, tok.line, tok.column)

    def fail(self, expected: str, tok: Token | None = None, code: str = "syntax"):
        tok = tok or self.tok
        raise ParseError(self.span(tok), expected, tok.show(), code)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.kind in ("word", "punct") and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        return self.advance()

    def string(self) -> str:
        if self.tok.kind != "string":
            self.fail("string")
        return self.advance().text

    def number(self) -> float:
        if self.tok.kind != "num":
            self.fail("number")
        tok = self.advance()
        v = float(tok.text)
        if not math.isfinite(v):
            self.fail("finite number", tok)
        return v

    def integer(self) -> int:
        if self.tok.kind != "num" or not re.fullmatch(r"-?\d+", self.tok.text):
            self.fail("integer")
        return int(self.advance().text)

    def ident(self) -> str:
        if self.tok.kind != "word" or not IDENT_RE.match(self.tok.text) or self.tok.text in KEYWORDS:
            self.fail("identifier")
        return self.advance().text

    def tag(self) -> CdvTag:
        if self.tok.kind != "tag":
            self.fail("CDV tag")
        tok = self.advance()
        try:
            return CdvTag.parse(tok.text)
        except AgOddError:
            self.fail("CDV tag", tok)

    def opt_unit(self, after: Token) -> str:
        """Unit written on the same line right after a number, else unitless."""
        t = self.tok
        if t.line != after.line:
            return ""
        if t.kind == "punct" and t.text == "%":
            self.advance()
            return "%"
        if t.kind == "word" and t.text not in KEYWORDS:
            self.advance()
            return t.text
        return ""

    def unit_decl(self) -> str:
        t = self.tok
        if t.kind == "punct" and t.text == "%":
            self.advance()
            return "%"
        if t.kind == "word" and (t.text not in KEYWORDS or t.text == "none"):
            self.advance()
            return "" if t.text == "none" else t.text
        self.fail("unit")

    def quantity(self) -> tuple[float, str, Token]:
        num_tok = self.tok
        v = self.number()
        return v, self.opt_unit(num_tok), num_tok

    def mode(self, default: Mode) -> Mode:
        if self.accept("permissive"):
            return Mode.PERMISSIVE
        if self.accept("restrictive"):
            return Mode.RESTRICTIVE
        return default

    def relation(self) -> Relation:
        if self.tok.kind == "punct" and self.tok.text in ("<=", ">=", "<", ">", "="):
            return Relation(self.advance().text)
        self.fail("relation")

    def eof(self):
        if self.tok.kind != "eof":
            self.fail("end of input")


class _OddParser(_Parser):
    def parse(self) -> AgOdd:
        self.expect("odd")
        name = self.string()
        self.expect("{")
        framing = FramingLimitations()
        dims: list[DimensionDecl] = []
        cats: dict[CategoryKind, CategoryNode] = {}
        procs: list[ProcessDef] = []
        self.dims: dict[str, DimensionDecl] = {}
        framing_seen = False
        while not self.accept("}"):
            t = self.tok
            if self.at("framing") and not framing_seen:
                framing_seen = True
                framing = self.framing()
            elif self.at("dimension"):
                d = self.dimension()
                if d.name in self.dims:
                    self.fail("new dimension name", t, code="duplicate-dimension")
                self.dims[d.name] = d
                dims.append(d)
            elif t.kind == "word" and t.text in ("scenery", "environment", "dynamic_objects"):
                kind = CategoryKind(t.text)
                if kind in cats:
                    self.fail("each category at most once", t, code="duplicate-category")
                cats[kind] = self.category()
            elif self.at("process"):
                procs.append(self.process())
            else:
                self.fail("'dimension', category, 'process' or '}'")
        self.eof()
        return AgOdd(name, framing, tuple(dims), {k: cats.get(k, CategoryNode(k)) for k in CATEGORY_ORDER}, tuple(procs))

    def framing(self) -> FramingLimitations:
        self.expect("framing")
        self.expect("{")
        reqs, caps, hara = [], [], []
        while not self.accept("}"):
            if self.accept("requirement"):
                reqs.append(self.string())
            elif self.accept("capability"):
                caps.append(self.string())
            elif self.accept("hara"):
                hara.append(self.string())
            else:
                self.fail("'requirement', 'capability', 'hara' or '}'")
        return FramingLimitations(tuple(reqs), tuple(caps), tuple(hara))

    def dimension(self) -> DimensionDecl:
        start = self.expect("dimension")
        name = self.ident()
        self.expect("unit")
        unit = self.unit_decl()
        if self.accept("range"):
            self.expect("[")
            lo_tok = self.tok
            lo = self.number()
            self.expect(",")
            hi = self.number()
            self.expect("]")
            if lo > hi:
                self.fail("range with lower <= upper", lo_tok, code="invalid-interval")
            return DimensionDecl(name, unit, lo, hi, span=self.span(start))
        if self.accept("values"):
            self.expect("{")
            labels = [self.string()]
            while not self.accept("}"):
                labels.append(self.string())
            if len(set(labels)) != len(labels):
                self.fail("distinct labels", start, code="duplicate-label")
            return DimensionDecl(name, unit, labels=tuple(labels), span=self.span(start))
        return DimensionDecl(name, unit, span=self.span(start))

    def category(self) -> CategoryNode:
        t = self.advance()
        mode = self.mode(Mode.RESTRICTIVE)
        self.expect("{")
        children = []
        while not self.accept("}"):
            if not self.at("attr"):
                self.fail("'attr' or '}'")
            children.append(self.attribute(0))
        return CategoryNode(CategoryKind(t.text), mode, tuple(children), span=self.span(t))

    def attribute(self, lod: int) -> AttributeNode:
        start = self.expect("attr")
        name = self.string()
        mode = self.mode(Mode.PERMISSIVE)
        tags: list[CdvTag] = []
        if self.accept("tag"):
            tags.append(self.tag())
            while self.accept(","):
                tags.append(self.tag())
        iteration = None
        if self.accept("iter"):
            iteration = self.integer()
        constraints, children = [], []
        if self.accept("{"):
            while not self.accept("}"):
                if self.at("constraint"):
                    constraints.append(self.constraint())
                elif self.at("attr"):
                    children.append(self.attribute(lod + 1))
                else:
                    self.fail("'constraint', 'attr' or '}'")
        return AttributeNode(
            name, mode, lod, tuple(constraints), frozenset(tags), tuple(children), iteration, span=self.span(start)
        )

    def constraint(self) -> Constraint:
        self.expect("constraint")
        dim_tok = self.tok
        dim_name = self.ident()
        dim = self.dims.get(dim_name)
        if dim is None:
            self.fail("declared dimension", dim_tok, code="unknown-dimension")
        if self.accept("oneof"):
            self.expect("{")
            labels = [self.string()]
            while not self.accept("}"):
                labels.append(self.string())
            if not dim.is_categorical:
                self.fail("numeric relation for numeric dimension", dim_tok, code="unit-mismatch")
            return Constraint(dim_name, Relation.ONEOF, labels=tuple(labels))
        if self.accept("in"):
            self.expect("[")
            lo = self.number()
            self.expect(",")
            hi = self.number()
            close = self.expect("]")
            unit = self.opt_unit(close)
            unit_tok = self.toks[self.i - 1]
            c = Constraint(dim_name, Relation.IN, lo, hi, unit=unit)
        else:
            rel = self.relation()
            v, unit, _ = self.quantity()
            unit_tok = self.toks[self.i - 1]
            c = Constraint(dim_name, rel, v, unit=unit)
        if dim.is_categorical or unit != dim.unit:
            self.fail(f"unit {dim.unit or 'none'!r} of dimension {dim_name!r}", unit_tok, code="unit-mismatch")
        return c

    def process(self) -> ProcessDef:
        start_tok = self.expect("process")
        name = self.string()
        self.expect("{")
        start, end, trigger, end_values = [], [], None, []
        if self.accept("start"):
            start = self.tag_list()
        if self.accept("trigger"):
            trigger = self.trigger()
        if self.accept("end"):
            end = self.tag_list()
        while self.accept("endvalue"):
            dim = self.ident()
            if self.tok.kind == "string":
                end_values.append((dim, self.string()))
            else:
                v, unit, _ = self.quantity()
                end_values.append((dim, Quantity(v, unit)))
        self.expect("}")
        return ProcessDef(name, tuple(start), trigger, tuple(end), tuple(end_values), span=self.span(start_tok))

    def tag_list(self) -> list[CdvTag]:
        tags = [self.tag()]
        while self.tok.kind == "tag" or self.at(","):
            self.accept(",")
            tags.append(self.tag())
        return tags

    def trigger(self) -> Trigger:
        if self.accept("interaction"):
            self.expect("(")
            tags = [self.tag()]
            while self.accept(","):
                tags.append(self.tag())
            self.expect(")")
            return Trigger(TriggerKind.INTERACTION, tags=tuple(tags))
        if self.accept("after"):
            v, unit, tok = self.quantity()
            if not unit:
                self.fail("time unit", self.tok)
            return Trigger(TriggerKind.RELATIVE_TIME, duration=Quantity(v, unit))
        if self.accept("state"):
            self.expect("(")
            dim = self.ident()
            rel = self.relation()
            v, unit, _ = self.quantity()
            self.expect(")")
            return Trigger(TriggerKind.STATE_CHANGE, dimension=dim, relation=rel, value=Quantity(v, unit))
        self.fail("'interaction', 'after' or 'state'")


class _ScenarioParser(_Parser):
    def parse(self) -> list[Scenario]:
        out: list[Scenario] = []
        names: set[str] = set()
        while self.tok.kind != "eof":
            t = self.expect("scenario")
            name_tok = self.tok
            name = self.string()
            if name in names:
                self.fail("unique scenario name", name_tok, code="duplicate-scenario")
            names.add(name)
            self.expect("{")
            bindings, procs = [], []
            while not self.accept("}"):
                item_tok = self.expect("layer")
                layer_tok = self.tok
                layer = self.integer()
                if not 1 <= layer <= 7:
                    self.fail("layer 1..7", layer_tok, code="invalid-layer")
                self.expect(":")
                if self.accept("process"):
                    procs.append(ProcessRef(layer, self.string(), span=self.span(item_tok)))
                elif self.accept("bind"):
                    path = [self.string()]
                    while self.accept("/"):
                        path.append(self.string())
                    dim = None
                    if self.tok.kind == "word" and self.tok.text not in KEYWORDS:
                        dim = self.ident()
                    value = self.valuespec()
                    if dim is not None and value is None:
                        self.fail("'=' or 'in' after dimension name")
                    bindings.append(Binding(layer, tuple(path), value, dim, span=self.span(item_tok)))
                else:
                    self.fail("'bind' or 'process'")
            out.append(Scenario(name, tuple(bindings), tuple(procs), span=self.span(t)))
        return out

    def valuespec(self) -> Value | Range | None:
        if self.accept("="):
            if self.tok.kind == "string":
                return self.string()
            v, unit, _ = self.quantity()
            return Quantity(v, unit)
        if self.accept("in"):
            self.expect("[")
            lo_tok = self.tok
            lo = self.number()
            self.expect(",")
            hi = self.number()
            close = self.expect("]")
            if lo > hi:
                self.fail("interval with lower <= upper", lo_tok, code="invalid-interval")
            return Range(lo, hi, self.opt_unit(close))
        return None


class _EventParser(_Parser):
    def parse(self) -> list[ProcessEvent]:
        events = []
        while self.tok.kind != "eof":
            t = self.tok
            if self.accept("interaction"):
                ev = ProcessEvent.interaction(self.tag())
            elif self.accept("elapsed"):
                v, unit, _ = self.quantity()
                if not unit:
                    self.fail("time unit")
                ev = ProcessEvent.elapsed(Quantity(v, unit))
            elif self.accept("measured"):
                dim = self.ident()
                if self.tok.kind == "string":
                    ev = ProcessEvent.measured(dim, self.string())
                else:
                    v, unit, _ = self.quantity()
                    ev = ProcessEvent.measured(dim, Quantity(v, unit))
            else:
                self.fail("'interaction', 'elapsed' or 'measured'")
            if self.tok.kind != "eof" and self.tok.line == t.line:
                self.fail("end of line")
            events.append(ev)
        return events


def parse_odd(text: str | bytes, source: str = "<string>") -> AgOdd:
    return _OddParser(text, source).parse()


def parse_scenarios(text: str | bytes, source: str = "<string>") -> list[Scenario]:
    return _ScenarioParser(text, source).parse()


def parse_events(text: str | bytes, source: str = "<string>") -> list[ProcessEvent]:
    return _EventParser(text, source).parse()


# -- serialization ---------------------------------------------------------


def _unit_suffix(unit: str) -> str:
    return f" {unit}" if unit else ""


def _value_text(v: Value) -> str:
    if isinstance(v, str):
        return quote(v)
    return format_number(v.value) + _unit_suffix(v.unit)


def _constraint_text(c: Constraint) -> str:
    head = f"constraint {c.dimension}"
    if c.relation is Relation.ONEOF:
        return f"{head} oneof {{ {' '.join(quote(lab) for lab in c.labels)} }}"
    if c.relation is Relation.IN:
        return f"{head} in [{format_number(c.value)}, {format_number(c.hi)}]{_unit_suffix(c.unit)}"
    return f"{head} {c.relation.value} {format_number(c.value)}{_unit_suffix(c.unit)}"


def _attribute_lines(node: AttributeNode, depth: int) -> list[str]:
    pad = "  " * depth
    head = f"{pad}attr {quote(node.name)} {node.mode.value}"
    if node.tags:
        head += " tag " + ", ".join(str(t) for t in node.sorted_tags())
    if node.iteration is not None:
        head += f" iter {node.iteration}"
    if not node.constraints and not node.children:
        return [head]
    lines = [head + " {"]
    lines += [f"{pad}  {_constraint_text(c)}" for c in node.constraints]
    for child in node.children:
        lines += _attribute_lines(child, depth + 1)
    lines.append(pad + "}")
    return lines


def _trigger_text(t: Trigger) -> str:
    if t.kind is TriggerKind.INTERACTION:
        return f"interaction({', '.join(str(tag) for tag in t.tags)})"
    if t.kind is TriggerKind.RELATIVE_TIME:
        return f"after {_value_text(t.duration)}"
    return f"state({t.dimension} {t.relation.value} {_value_text(t.value)})"


def serialize_odd(odd: AgOdd) -> str:
    lines = [f"odd {quote(odd.name)} {{"]
    fr = odd.framing
    if not fr.is_empty():
        lines.append("  framing {")
        lines += [f"    requirement {quote(s)}" for s in fr.functional_requirements]
        lines += [f"    capability {quote(s)}" for s in fr.system_capabilities]
        lines += [f"    hara {quote(s)}" for s in fr.hara_results]
        lines.append("  }")
    for d in odd.dimensions:
        line = f"  dimension {d.name} unit {d.unit or 'none'}"
        if d.labels is not None:
            line += f" values {{ {' '.join(quote(lab) for lab in d.labels)} }}"
        elif d.lo is not None and d.hi is not None:
            line += f" range [{format_number(d.lo)}, {format_number(d.hi)}]"
        lines.append(line)
    for kind in CATEGORY_ORDER:
        cat = odd.categories[kind]
        if not cat.children and cat.mode is Mode.RESTRICTIVE:
            continue
        lines.append(f"  {kind.value} {cat.mode.value} {{")
        for child in cat.children:
            lines += _attribute_lines(child, 2)
        lines.append("  }")
    for p in odd.processes:
        lines.append(f"  process {quote(p.name)} {{")
        if p.start_tags:
            lines.append("    start " + " ".join(str(t) for t in p.start_tags))
        if p.trigger is not None:
            lines.append("    trigger " + _trigger_text(p.trigger))
        if p.end_tags:
            lines.append("    end " + " ".join(str(t) for t in p.end_tags))
        lines += [f"    endvalue {dim} {_value_text(v)}" for dim, v in p.end_values]
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _valuespec_text(v) -> str:
    if v is None:
        return ""
    if isinstance(v, Range):
        return f" in [{format_number(v.lo)}, {format_number(v.hi)}]{_unit_suffix(v.unit)}"
    return " = " + _value_text(v)


def serialize_scenarios(scenarios) -> str:
    blocks = []
    for s in scenarios:
        lines = [f"scenario {quote(s.name)} {{"]
        for b in s.bindings:
            path = "/".join(quote(p) for p in b.path)
            dim = f" {b.dimension}" if b.dimension else ""
            lines.append(f"  layer {b.layer}: bind {path}{dim}{_valuespec_text(b.value)}")
        for ref in s.processes:
            lines.append(f"  layer {ref.layer}: process {quote(ref.name)}")
        lines.append("}")
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def serialize_events(events) -> str:
    return "".join(str(e) + "\n" for e in events)
