"""Ag-ODD domain types and structural validation."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Union

Path = tuple[str, ...]


class AgOddError(Exception):
    """Raised for contract violations of the public operations.

    ``code`` is a short stable identifier such as ``unknown-tag``.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class Mode(Enum):
    PERMISSIVE = "permissive"
    RESTRICTIVE = "restrictive"

    @property
    def symbol(self) -> str:
        return "∪" if self is Mode.PERMISSIVE else "∩"


class CategoryKind(Enum):
    SCENERY = "scenery"
    ENVIRONMENT = "environment"
    DYNAMIC_OBJECTS = "dynamic_objects"


CATEGORY_ORDER = (CategoryKind.SCENERY, CategoryKind.ENVIRONMENT, CategoryKind.DYNAMIC_OBJECTS)


class Relation(Enum):
    LE = "<="
    GE = ">="
    LT = "<"
    GT = ">"
    EQ = "="
    IN = "in"
    ONEOF = "oneof"

    @property
    def symbol(self) -> str:
        return {"<=": "≤", ">=": "≥"}.get(self.value, self.value)


class TagRole(Enum):
    START = "SA"
    END = "EA"
    CONDITION = "C"


class AutomationBand(Enum):
    MANUAL = "manual"
    PARTIALLY_AUTOMATED = "partially_automated"
    SEMI_AUTONOMOUS = "semi_autonomous"
    AUTONOMOUS = "autonomous"


_TAG_RE = re.compile(r"^(SA|EA|C)(\d+)(?:\.(\d+))?$")


@dataclass(frozen=True)
class CdvTag:
    role: TagRole
    index: int
    sub_index: int | None = None

    @classmethod
    def parse(cls, text: str) -> CdvTag:
        m = _TAG_RE.match(text)
        if m is None or (m.group(3) is not None and m.group(1) != "C"):
            raise AgOddError("invalid-tag", f"not a CDV tag: {text!r}")
        sub = int(m.group(3)) if m.group(3) is not None else None
        return cls(TagRole(m.group(1)), int(m.group(2)), sub)

    def __str__(self) -> str:
        s = f"{self.role.value}{self.index}"
        return s if self.sub_index is None else f"{s}.{self.sub_index}"

    @property
    def sort_key(self) -> tuple[str, int, int]:
        return (self.role.value, self.index, -1 if self.sub_index is None else self.sub_index)


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Quantity:
    value: float
    unit: str = ""  # "" is unitless

    def __str__(self) -> str:
        num = format_number(self.value)
        return f"{num} {self.unit}" if self.unit else num


@dataclass(frozen=True)
class Range:
    lo: float
    hi: float
    unit: str = ""

    def __str__(self) -> str:
        s = f"[{format_number(self.lo)}, {format_number(self.hi)}]"
        return f"{s} {self.unit}" if self.unit else s


# Concrete value of a binding or state entry: a measured number or an enumeration label.
Value = Union[Quantity, str]


def format_number(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))


@dataclass(frozen=True)
class DimensionDecl:
    name: str
    unit: str = ""
    lo: float | None = None
    hi: float | None = None
    labels: tuple[str, ...] | None = None
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    @property
    def is_categorical(self) -> bool:
        return self.labels is not None

    @property
    def is_bounded(self) -> bool:
        return self.labels is not None or (self.lo is not None and self.hi is not None)


@dataclass(frozen=True)
class Constraint:
    dimension: str
    relation: Relation
    value: float | None = None  # scalar relations
    hi: float | None = None  # upper end for Relation.IN (``value`` is the lower end)
    labels: tuple[str, ...] | None = None  # Relation.ONEOF
    unit: str = ""

    def describe(self) -> str:
        if self.relation is Relation.ONEOF:
            return f"{self.dimension} in {{{', '.join(self.labels or ())}}}"
        if self.relation is Relation.IN:
            return f"{self.dimension} in {Range(self.value, self.hi, self.unit)}"
        return f"{self.dimension} {self.relation.symbol} {Quantity(self.value, self.unit)}"

    def holds(self, value: Value) -> bool:
        """Direct evaluation of the relation on one concrete value."""
        if self.relation is Relation.ONEOF:
            return isinstance(value, str) and value in (self.labels or ())
        if isinstance(value, str):
            return False
        v = value.value
        if self.relation is Relation.LE:
            return v <= self.value
        if self.relation is Relation.GE:
            return v >= self.value
        if self.relation is Relation.LT:
            return v < self.value
        if self.relation is Relation.GT:
            return v > self.value
        if self.relation is Relation.EQ:
            return v == self.value
        return self.value <= v <= self.hi


@dataclass(frozen=True)
class AttributeNode:
    name: str
    mode: Mode = Mode.PERMISSIVE
    lod: int = 0
    constraints: tuple[Constraint, ...] = ()
    tags: frozenset[CdvTag] = frozenset()
    children: tuple[AttributeNode, ...] = ()
    iteration: int | None = None
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    def child(self, name: str) -> AttributeNode | None:
        for c in self.children:
            if c.name == name:
                return c
        return None

    def sorted_tags(self) -> list[CdvTag]:
        return sorted(self.tags, key=lambda t: t.sort_key)


@dataclass(frozen=True)
class CategoryNode:
    kind: CategoryKind
    mode: Mode = Mode.RESTRICTIVE
    children: tuple[AttributeNode, ...] = ()
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    @property
    def name(self) -> str:
        return self.kind.value

    def child(self, name: str) -> AttributeNode | None:
        for c in self.children:
            if c.name == name:
                return c
        return None


class TriggerKind(Enum):
    INTERACTION = "interaction"
    RELATIVE_TIME = "relative_time"
    STATE_CHANGE = "state_change"


@dataclass(frozen=True)
class Trigger:
    kind: TriggerKind
    tags: tuple[CdvTag, ...] = ()  # interaction: primary condition tag first
    duration: Quantity | None = None  # relative_time
    dimension: str | None = None  # state_change
    relation: Relation | None = None
    value: Quantity | None = None

    def describe(self) -> str:
        if self.kind is TriggerKind.INTERACTION:
            return "Interaction with " + " ".join(str(t) for t in self.tags)
        if self.kind is TriggerKind.RELATIVE_TIME:
            return f"After {self.duration}"
        return f"{self.dimension} {self.relation.symbol} {self.value}"


@dataclass(frozen=True)
class ProcessDef:
    name: str
    start_tags: tuple[CdvTag, ...] = ()
    trigger: Trigger | None = None
    end_tags: tuple[CdvTag, ...] = ()
    # Explicit end state per dimension, overriding nearest-point projection.
    end_values: tuple[tuple[str, Value], ...] = ()
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    @property
    def is_empty(self) -> bool:
        return not self.start_tags and self.trigger is None and not self.end_tags


@dataclass(frozen=True)
class FramingLimitations:
    functional_requirements: tuple[str, ...] = ()
    system_capabilities: tuple[str, ...] = ()
    hara_results: tuple[str, ...] = ()

    def is_empty(self) -> bool:
        return not (self.functional_requirements or self.system_capabilities or self.hara_results)


def _default_categories() -> dict[CategoryKind, CategoryNode]:
    return {k: CategoryNode(k) for k in CATEGORY_ORDER}


@dataclass(frozen=True)
class AgOdd:
    name: str
    framing: FramingLimitations = FramingLimitations()
    dimensions: tuple[DimensionDecl, ...] = ()
    categories: dict[CategoryKind, CategoryNode] = field(default_factory=_default_categories)
    processes: tuple[ProcessDef, ...] = ()

    def __post_init__(self):
        # Missing categories default to empty-restrictive.
        if any(k not in self.categories for k in CATEGORY_ORDER):
            cats = _default_categories()
            cats.update(self.categories)
            object.__setattr__(self, "categories", cats)

    def __hash__(self) -> int:
        return hash((self.name, self.dimensions, self.processes))

    def dimension(self, name: str) -> DimensionDecl | None:
        for d in self.dimensions:
            if d.name == name:
                return d
        return None

    def process(self, name: str) -> ProcessDef | None:
        for p in self.processes:
            if p.name == name:
                return p
        return None

    def category(self, kind: CategoryKind | str) -> CategoryNode:
        return self.categories[CategoryKind(kind)]

    def walk(self) -> Iterator[tuple[Path, AttributeNode]]:
        """Yield ``(path, node)`` depth-first in category then insertion order."""

        def rec(prefix: Path, nodes):
            for n in nodes:
                p = prefix + (n.name,)
                yield p, n
                yield from rec(p, n.children)

        for kind in CATEGORY_ORDER:
            yield from rec((kind.value,), self.categories[kind].children)

    def lookup(self, path: Path) -> list[CategoryNode | AttributeNode] | None:
        """Nodes along ``path`` (category first), or None if it does not resolve."""
        chain = self.resolve_prefix(path)
        return chain if len(chain) == len(path) else None

    def resolve_prefix(self, path: Path) -> list[CategoryNode | AttributeNode]:
        """Longest resolvable prefix of ``path`` as a node chain (may be empty)."""
        if not path:
            return []
        try:
            cat = self.categories[CategoryKind(path[0])]
        except ValueError:
            return []
        chain: list[CategoryNode | AttributeNode] = [cat]
        node: CategoryNode | AttributeNode = cat
        for name in path[1:]:
            nxt = node.child(name)
            if nxt is None:
                break
            chain.append(nxt)
            node = nxt
        return chain


def format_path(path: Path) -> str:
    if not path:
        return ""
    return path[0] + "".join(f'/"{p}"' for p in path[1:])


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # error | warning | info
    code: str
    message: str
    location: SourceSpan | None = None

    def __str__(self) -> str:
        loc = f"{self.location}: " if self.location else ""
        return f"{loc}{self.severity}[{self.code}]: {self.message}"


_SEVERITY_RANK = {"error": 0, "warning": 1, "info": 2}


def sort_diagnostics(diags) -> list[Diagnostic]:
    def key(d: Diagnostic):
        loc = d.location
        lk = (loc.file, loc.line, loc.column) if loc else ("", 0, 0)
        return (_SEVERITY_RANK[d.severity], lk, d.code, d.message)

    return sorted(set(diags), key=key)


def has_errors(diags) -> bool:
    return any(d.severity == "error" for d in diags)


def find_tag(odd: AgOdd, tag: CdvTag) -> list[Path]:
    return [p for p, n in odd.walk() if tag in n.tags]


def resolve_tag(odd: AgOdd, tag: CdvTag | str) -> Path:
    """Path (category first) of the node carrying ``tag``."""
    if isinstance(tag, str):
        tag = CdvTag.parse(tag)
    paths = find_tag(odd, tag)
    if not paths:
        raise AgOddError("unknown-tag", f"no attribute carries {tag}")
    return paths[0]


def classify_automation(driving: int, working: int) -> AutomationBand:
    """Joint automation band of the driving and work-process levels (0..5 each).

    The two levels combine by their minimum: a machine is only as autonomous
    as its least automated axis.
    """
    for lvl in (driving, working):
        if isinstance(lvl, bool) or not isinstance(lvl, int) or not 0 <= lvl <= 5:
            raise AgOddError("out-of-range-level", f"automation level {lvl!r} not in 0..5")
    level = min(driving, working)
    if level == 0:
        return AutomationBand.MANUAL
    if level <= 2:
        return AutomationBand.PARTIALLY_AUTOMATED
    if level <= 4:
        return AutomationBand.SEMI_AUTONOMOUS
    return AutomationBand.AUTONOMOUS


def _constraint_problems(c: Constraint, dim: DimensionDecl | None) -> list[tuple[str, str]]:
    if dim is None:
        return [("unknown-dimension", f"constraint on undeclared dimension {c.dimension!r}")]
    out = []
    if c.relation is Relation.ONEOF:
        if not dim.is_categorical:
            out.append(("unit-mismatch", f"label set on numeric dimension {dim.name!r}"))
        else:
            unknown = [lab for lab in c.labels or () if lab not in dim.labels]
            if unknown:
                out.append(("unknown-label", f"labels {unknown} not in dimension {dim.name!r}"))
        return out
    if dim.is_categorical:
        out.append(("unit-mismatch", f"numeric constraint on enumerated dimension {dim.name!r}"))
    elif c.unit != dim.unit:
        out.append(
            ("unit-mismatch", f"{c.describe()}: unit {c.unit or 'none'!r} != {dim.unit or 'none'!r}")
        )
    if c.relation is Relation.IN and c.value > c.hi:
        out.append(("invalid-interval", f"{c.describe()}: lower end exceeds upper end"))
    return out


def validate_model(odd: AgOdd) -> list[Diagnostic]:
    """All invariant violations of ``odd``; empty iff the model is well-formed."""
    diags: list[Diagnostic] = []

    def err(code, msg, span=None, severity="error"):
        diags.append(Diagnostic(severity, code, msg, span))

    seen_dims: set[str] = set()
    for d in odd.dimensions:
        if d.name in seen_dims:
            err("duplicate-dimension", f"dimension {d.name!r} declared twice", d.span)
        seen_dims.add(d.name)
        if d.labels is not None and not d.labels:
            err("empty-enumeration", f"dimension {d.name!r} has no labels", d.span)
        if d.lo is not None and d.hi is not None and d.lo > d.hi:
            err("invalid-interval", f"dimension {d.name!r} range is empty", d.span)

    tag_owner: dict[CdvTag, Path] = {}
    for kind in CATEGORY_ORDER:
        cat = odd.categories[kind]
        if cat.kind is not kind:
            err("category-kind", f"category slot {kind.value} holds {cat.kind.value}", cat.span)

    def check_siblings(parent_path: Path, nodes, span):
        names = [n.name for n in nodes]
        for name in sorted({n for n in names if names.count(n) > 1}):
            err("duplicate-sibling", f"{format_path(parent_path + (name,))} declared twice", span)

    for kind in CATEGORY_ORDER:
        cat = odd.categories[kind]
        check_siblings((kind.value,), cat.children, cat.span)

    for path, node in odd.walk():
        expected = len(path) - 2  # path starts with the category name
        if node.lod != expected:
            err("lod-mismatch", f"{format_path(path)} has LoD {node.lod}, expected {expected}", node.span)
        check_siblings(path, node.children, node.span)
        for c in node.constraints:
            for code, msg in _constraint_problems(c, odd.dimension(c.dimension)):
                err(code, f"{format_path(path)}: {msg}", node.span)
        for tag in node.sorted_tags():
            if tag in tag_owner:
                err(
                    "duplicate-cdv-tag",
                    f"{tag} on {format_path(path)} already on {format_path(tag_owner[tag])}",
                    node.span,
                )
            else:
                tag_owner[tag] = path
            if tag.role is TagRole.CONDITION and path[0] != CategoryKind.DYNAMIC_OBJECTS.value:
                err("condition-not-dynamic-object", f"{tag} on {format_path(path)} outside dynamic_objects", node.span)
        if node.mode is Mode.PERMISSIVE and len(node.children) == 1:
            only = node.children[0]
            pinned = only.constraints and all(c.relation is Relation.EQ for c in only.constraints)
            if pinned and not only.children:
                err(
                    "ambiguous-permissive",
                    f"{format_path(path)} is permissive but its only refinement is fully pinned; consider restrictive",
                    node.span,
                    severity="warning",
                )

    names = [p.name for p in odd.processes]
    for p in odd.processes:
        if names.count(p.name) > 1:
            err("duplicate-process", f"process {p.name!r} declared twice", p.span)
        parts = (bool(p.start_tags), p.trigger is not None, bool(p.end_tags))
        if any(parts) and not all(parts):
            err("partial-process", f"process {p.name!r} must define start, trigger and end, or none", p.span)
        refs = [(t, TagRole.START) for t in p.start_tags] + [(t, TagRole.END) for t in p.end_tags]
        if p.trigger is not None and p.trigger.kind is TriggerKind.INTERACTION:
            refs += [(t, TagRole.CONDITION) for t in p.trigger.tags]
        for tag, role in refs:
            if tag.role is not role:
                err("wrong-tag-role", f"process {p.name!r}: {tag} used as {role.value} tag", p.span)
            elif tag not in tag_owner:
                err("unresolved-tag", f"process {p.name!r}: no attribute carries {tag}", p.span)
        if p.trigger is not None and p.trigger.kind is TriggerKind.STATE_CHANGE:
            dim = odd.dimension(p.trigger.dimension)
            if dim is None:
                err("unknown-dimension", f"process {p.name!r}: trigger on undeclared {p.trigger.dimension!r}", p.span)
            elif p.trigger.value.unit != dim.unit:
                err("unit-mismatch", f"process {p.name!r}: trigger unit differs from {dim.name!r}", p.span)
    return sort_diagnostics(diags)
