"""Condition-dependent variables: trigger matching, state transitions from
start to end attribute conditions, and wiring checks.

World state is keyed by dimension name; a tag is satisfied when every
dimension constrained along its node's path holds a value inside the node's
effective domain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .model import (
    AgOdd,
    AgOddError,
    CategoryKind,
    CdvTag,
    Constraint,
    Diagnostic,
    ProcessDef,
    Quantity,
    TagRole,
    TriggerKind,
    Value,
    find_tag,
    format_number,
    format_path,
    sort_diagnostics,
)
from .regions import Region1D
from .semantics import constrained_dimensions, domain_along

# Time units accepted by relative-time triggers and elapsed events, in seconds.
TIME_UNITS = {"s": 1.0, "min": 60.0, "h": 3600.0, "d": 86400.0}


def seconds(q: Quantity) -> float:
    if q.unit not in TIME_UNITS:
        raise AgOddError("unit-mismatch", f"{q.unit!r} is not a time unit ({', '.join(TIME_UNITS)})")
    return q.value * TIME_UNITS[q.unit]


def _value_text(v: Value) -> str:
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    return f"{format_number(v.value)} {v.unit}" if v.unit else format_number(v.value)


@dataclass(frozen=True)
class ProcessEvent:
    kind: str  # interaction | elapsed | measured
    tag: CdvTag | None = None
    duration: Quantity | None = None
    dimension: str | None = None
    value: Value | None = None

    @classmethod
    def interaction(cls, tag: CdvTag | str) -> ProcessEvent:
        return cls("interaction", tag=CdvTag.parse(tag) if isinstance(tag, str) else tag)

    @classmethod
    def elapsed(cls, duration: Quantity) -> ProcessEvent:
        return cls("elapsed", duration=duration)

    @classmethod
    def measured(cls, dimension: str, value: Value) -> ProcessEvent:
        return cls("measured", dimension=dimension, value=value)

    def __str__(self) -> str:
        if self.kind == "interaction":
            return f"interaction {self.tag}"
        if self.kind == "elapsed":
            return f"elapsed {_value_text(self.duration)}"
        return f"measured {self.dimension} {_value_text(self.value)}"


@dataclass(frozen=True)
class WorldState:
    values: tuple[tuple[str, Value], ...] = ()

    @classmethod
    def of(cls, values: dict[str, Value] | None = None) -> WorldState:
        return cls(tuple(sorted((values or {}).items())))

    def get(self, dimension: str) -> Value | None:
        return dict(self.values).get(dimension)

    def as_dict(self) -> dict[str, Value]:
        return dict(self.values)

    def updated(self, changes: dict[str, Value]) -> WorldState:
        merged = self.as_dict()
        merged.update(changes)
        return WorldState.of(merged)

    def satisfies(self, odd: AgOdd, path) -> bool:
        chain = odd.lookup(tuple(path))
        if chain is None:
            return False
        have = self.as_dict()
        for name in constrained_dimensions(chain):
            dim = odd.dimension(name)
            if name not in have or dim is None:
                return False
            if not domain_along(chain, dim).contains_value(have[name]):
                return False
        return True

    def satisfied_tags(self, odd: AgOdd) -> frozenset[CdvTag]:
        """Tags whose node constraints currently hold; recomputed on every call."""
        return frozenset(t for path, node in odd.walk() if self.satisfies(odd, path) for t in node.tags)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{k}={_value_text(v)}" for k, v in self.values) + "}"


@dataclass(frozen=True)
class NoFire:
    reason: str  # trigger-mismatch | start-unsatisfied

    def __bool__(self) -> bool:
        return False


def _node_path(odd: AgOdd, tag: CdvTag):
    paths = find_tag(odd, tag)
    if not paths:
        raise AgOddError("unknown-tag", f"no attribute carries {tag}")
    return paths[0]


def _check_unit(odd: AgOdd, dimension: str, value: Value) -> None:
    dim = odd.dimension(dimension)
    if dim is None:
        raise AgOddError("unknown-dimension", f"dimension {dimension!r} is not declared")
    if isinstance(value, str):
        if not dim.is_categorical:
            raise AgOddError("unit-mismatch", f"{dimension} expects {dim.unit or 'unitless'} numbers, got label {value!r}")
    elif dim.is_categorical or value.unit != dim.unit:
        want = "labels" if dim.is_categorical else repr(dim.unit)
        raise AgOddError("unit-mismatch", f"{dimension} expects {want}, got {value.unit!r}")


def _trigger_matches(state: WorldState, p: ProcessDef, e: ProcessEvent, odd: AgOdd) -> bool:
    t = p.trigger
    if t is None:
        return False
    if t.kind is TriggerKind.INTERACTION:
        if e.kind != "interaction" or e.tag not in t.tags:
            return False
        # Condition constraints gate firing only for dimensions the state knows.
        have = state.as_dict()
        for tag in t.tags:
            chain = odd.lookup(_node_path(odd, tag))
            for name in constrained_dimensions(chain):
                if name in have and not domain_along(chain, odd.dimension(name)).contains_value(have[name]):
                    return False
        return True
    if t.kind is TriggerKind.RELATIVE_TIME:
        return e.kind == "elapsed" and seconds(e.duration) >= seconds(t.duration)
    if e.kind != "measured" or e.dimension != t.dimension:
        return False
    _check_unit(odd, e.dimension, e.value)
    if isinstance(e.value, str) or e.value.unit != t.value.unit:
        raise AgOddError("unit-mismatch", f"trigger on {t.dimension} uses {t.value.unit!r}")
    return Constraint(t.dimension, t.relation, t.value.value, unit=t.value.unit).holds(e.value)


def _project(region: Region1D, current: Value | None, dim) -> Value | None:
    if region.is_categorical:
        if isinstance(current, str) and current in region.labels:
            return current
        allowed = [lab for lab in dim.labels if lab in region.labels]
        return allowed[0] if allowed else None
    if isinstance(current, Quantity):
        x = region.nearest(current.value)
    else:
        x = region.min_point()
    return None if x is None else Quantity(x, dim.unit)


def end_values(state: WorldState, p: ProcessDef, odd: AgOdd) -> dict[str, Value]:
    """Values imposed by firing ``p``: projection into the end domains, then overrides."""
    domains: dict[str, Region1D] = {}
    for tag in p.end_tags:
        chain = odd.lookup(_node_path(odd, tag))
        for name in constrained_dimensions(chain):
            dom = domain_along(chain, odd.dimension(name))
            domains[name] = domains[name].intersect(dom) if name in domains else dom
    changes: dict[str, Value] = {}
    for name, region in domains.items():
        v = _project(region, state.get(name), odd.dimension(name))
        if v is not None:
            changes[name] = v
    changes.update(dict(p.end_values))
    return changes


def fire_trigger(state: WorldState, p: ProcessDef, e: ProcessEvent, odd: AgOdd) -> WorldState | NoFire:
    if e.kind == "measured":
        _check_unit(odd, e.dimension, e.value)
    if p.is_empty or not _trigger_matches(state, p, e, odd):
        return NoFire("trigger-mismatch")
    if not all(state.satisfies(odd, _node_path(odd, t)) for t in p.start_tags):
        return NoFire("start-unsatisfied")
    return state.updated(end_values(state, p, odd))


@dataclass(frozen=True)
class TraceStep:
    event: ProcessEvent
    fired: tuple[str, ...]
    state: WorldState


@dataclass(frozen=True)
class Trace:
    initial: WorldState
    steps: tuple[TraceStep, ...] = ()

    @property
    def final(self) -> WorldState:
        return self.steps[-1].state if self.steps else self.initial

    @property
    def firings(self) -> list[tuple[int, str]]:
        return [(i, name) for i, s in enumerate(self.steps) for name in s.fired]

    def to_json(self) -> dict:
        def state_json(st: WorldState) -> dict:
            return {k: (v if isinstance(v, str) else {"value": v.value, "unit": v.unit}) for k, v in st.values}

        return {
            "initial": state_json(self.initial),
            "steps": [{"event": str(s.event), "fired": list(s.fired), "state": state_json(s.state)} for s in self.steps],
            "final": state_json(self.final),
        }


def simulate(initial: WorldState, odd: AgOdd, events) -> Trace:
    """Offer each event to every process in declaration order.

    Elapsed time accumulates per process and resets when that process fires.
    Measured events update the state before processes see them.
    """
    state = initial
    clocks = {p.name: 0.0 for p in odd.processes}
    steps = []
    for e in events:
        if e.kind == "measured":
            _check_unit(odd, e.dimension, e.value)
            state = state.updated({e.dimension: e.value})
        elif e.kind == "elapsed":
            dt = seconds(e.duration)
            for name in clocks:
                clocks[name] += dt
        fired = []
        for p in odd.processes:
            offered = e
            if e.kind == "elapsed":
                offered = ProcessEvent.elapsed(Quantity(clocks[p.name], "s"))
            result = fire_trigger(state, p, offered, odd)
            if isinstance(result, WorldState):
                state = result
                fired.append(p.name)
                clocks[p.name] = 0.0
        steps.append(TraceStep(e, tuple(fired), state))
    return Trace(initial, tuple(steps))


def check_processes(odd: AgOdd) -> list[Diagnostic]:
    diags: list[Diagnostic] = []

    def err(code: str, msg: str, span) -> None:
        diags.append(Diagnostic("error", code, msg, span))

    for path, node in odd.walk():
        for t in node.tags:
            if t.role is TagRole.CONDITION and path[0] != CategoryKind.DYNAMIC_OBJECTS.value:
                err("condition-not-dynamic-object", f"{t} on {format_path(path)} is outside dynamic_objects", node.span)

    for p in odd.processes:
        if p.is_empty:
            continue
        if not (p.start_tags and p.trigger and p.end_tags):
            err("partial-process", f"process {p.name!r} must give start, trigger and end, or none", p.span)
            continue
        trig_tags = p.trigger.tags if p.trigger.kind is TriggerKind.INTERACTION else ()
        paths = {}
        for tags, role in ((p.start_tags, TagRole.START), (p.end_tags, TagRole.END), (trig_tags, TagRole.CONDITION)):
            for t in tags:
                if t.role is not role:
                    err("wrong-tag-role", f"process {p.name!r}: {t} used where a {role.value} tag belongs", p.span)
                    continue
                found = find_tag(odd, t)
                if not found:
                    err("unresolved-tag", f"process {p.name!r}: {t} is not attached to any attribute of the category trees", p.span)
                    continue
                paths[t] = found[0]
                if role is TagRole.CONDITION and found[0][0] != CategoryKind.DYNAMIC_OBJECTS.value:
                    err("condition-not-dynamic-object", f"process {p.name!r}: {t} resolves to {format_path(found[0])}", p.span)

        def units(tags):
            out = set()
            for t in tags:
                if t in paths:
                    for name in constrained_dimensions(odd.lookup(paths[t])):
                        dim = odd.dimension(name)
                        if dim is not None:
                            out.add("#labels" if dim.is_categorical else dim.unit)
            return out

        su, eu = units(p.start_tags), units(p.end_tags)
        if su and eu and not su & eu:
            err("incompatible-start-end", f"process {p.name!r}: start units {sorted(su)} vs end units {sorted(eu)}", p.span)

        t = p.trigger
        if t.kind is TriggerKind.RELATIVE_TIME and t.duration.unit not in TIME_UNITS:
            err("unit-mismatch", f"process {p.name!r}: {t.duration.unit!r} is not a time unit", p.span)
        if t.kind is TriggerKind.STATE_CHANGE:
            dim = odd.dimension(t.dimension)
            if dim is None:
                err("unknown-dimension", f"process {p.name!r}: trigger dimension {t.dimension!r} is not declared", p.span)
            elif dim.is_categorical or dim.unit != t.value.unit:
                err("unit-mismatch", f"process {p.name!r}: trigger on {t.dimension} must use {dim.unit!r}", p.span)

        for name, v in p.end_values:
            dim = odd.dimension(name)
            if dim is None:
                err("unknown-dimension", f"process {p.name!r}: endvalue dimension {name!r} is not declared", p.span)
                continue
            region = Region1D.full(dim)
            for tag in p.end_tags:
                if tag in paths:
                    region = region.intersect(domain_along(odd.lookup(paths[tag]), dim))
            ok_unit = isinstance(v, str) == dim.is_categorical and (isinstance(v, str) or v.unit == dim.unit)
            if not ok_unit:
                err("unit-mismatch", f"process {p.name!r}: endvalue {name} has the wrong unit", p.span)
            elif not region.contains_value(v):
                err("end-value-outside-end-domain", f"process {p.name!r}: endvalue {name} = {_value_text(v)} is outside {region}", p.span)
    return sort_diagnostics(diags)
