"""Logical scenarios over the 7-layer model and their projection into the
ODD's dimension space."""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import AgOdd, Diagnostic, Path, Range, SourceSpan, TagRole, Value, format_path, sort_diagnostics
from .regions import Region1D
from .model import DimensionDecl
from .semantics import compatible, infer_dimension, path_crossing, value_region

LAYER_NAMES = {
    1: "Field level",
    2: "Field infrastructure",
    3: "Temporary manipulation",
    4: "Objects",
    5: "Environment",
    6: "Digital information",
    7: "Process",
}
PROCESS_LAYER = 7


@dataclass(frozen=True)
class Binding:
    """Layer-tagged binding of an attribute path to a value, an interval, or nothing."""

    layer: int
    path: Path
    value: Value | Range | None = None
    dimension: str | None = None  # explicit target; inferred from the ODD when absent
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ProcessRef:
    layer: int
    name: str
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Scenario:
    name: str
    bindings: tuple[Binding, ...] = ()
    processes: tuple[ProcessRef, ...] = ()
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    @property
    def paths(self) -> tuple[Path, ...]:
        seen: dict[Path, None] = {}
        for b in self.bindings:
            seen.setdefault(tuple(b.path), None)
        return tuple(seen)


@dataclass(frozen=True)
class ScenarioRegion:
    dims: dict[str, Region1D]
    paths: frozenset[Path] = frozenset()

    def __getitem__(self, dimension: str) -> Region1D:
        return self.dims[dimension]

    @property
    def is_empty(self) -> bool:
        return any(r.is_empty for r in self.dims.values())


def binding_dimension(b: Binding, odd: AgOdd) -> DimensionDecl | None:
    """Dimension a valued binding constrains: the explicit one if compatible, else inferred."""
    if b.value is None:
        return None
    if b.dimension is not None:
        dim = odd.dimension(b.dimension)
        return dim if dim is not None and compatible(dim, b.value) else None
    return infer_dimension(odd, b.path, b.value)


def validate_scenario(s: Scenario, odd: AgOdd) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    for ref in s.processes:
        if ref.layer != PROCESS_LAYER:
            diags.append(Diagnostic("error", "layer-misuse", f"{s.name}: process {ref.name!r} referenced on layer {ref.layer}, processes live on layer 7", ref.span))
        if odd.process(ref.name) is None:
            diags.append(Diagnostic("error", "unknown-process", f"{s.name}: no process named {ref.name!r}", ref.span))
    for b in s.bindings:
        where = f"{s.name}: {format_path(tuple(b.path))}"
        chain = odd.lookup(tuple(b.path))
        if chain is None:
            crossing = path_crossing(odd, b.path)
            edge = crossing[1].value if crossing else ""
            diags.append(Diagnostic("info", "unresolved-path", f"{where} is not declared in the ODD ({edge} edge)", b.span))
        if b.layer == PROCESS_LAYER:
            node = chain[-1] if chain else None
            roles = {t.role for t in getattr(node, "tags", ())}
            if not roles & {TagRole.START, TagRole.END}:
                diags.append(Diagnostic("error", "layer-misuse", f"{where}: layer 7 binds only start/end-tagged attributes", b.span))
        if b.value is None:
            continue
        if b.dimension is not None and odd.dimension(b.dimension) is None:
            diags.append(Diagnostic("error", "unknown-dimension", f"{where}: dimension {b.dimension!r} is not declared", b.span))
            continue
        dim = binding_dimension(b, odd)
        if dim is None and b.dimension is not None:
            diags.append(Diagnostic("error", "unit-mismatch", f"{where}: {b.value} does not fit dimension {b.dimension}", b.span))
        elif dim is None:
            diags.append(Diagnostic("warning", "unbindable-value", f"{where}: value {b.value} matches no unique dimension", b.span))
        elif not value_region(dim, b.value).issubset(Region1D.full(dim)):
            diags.append(Diagnostic("warning", "out-of-domain", f"{where}: {b.value} lies outside the declared domain of {dim.name}", b.span))
    return sort_diagnostics(diags)


def scenario_region(s: Scenario, odd: AgOdd) -> ScenarioRegion:
    dims = {d.name: Region1D.full(d) for d in odd.dimensions}
    for b in s.bindings:
        dim = binding_dimension(b, odd)
        if dim is not None:
            dims[dim.name] = dims[dim.name].intersect(value_region(dim, b.value))
    return ScenarioRegion(dims, frozenset(s.paths))
