"""Meaning of an Ag-ODD: effective domains under LoD refinement,
permissive/restrictive resolution, and membership of concrete samples.

Mode governs openness of a node to unlisted sub-instances. Numeric limits are
always hard, whatever the mode of the node carrying them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .model import (
    AgOdd,
    AgOddError,
    AttributeNode,
    CategoryNode,
    Constraint,
    DimensionDecl,
    Mode,
    Path,
    Quantity,
    Range,
    Value,
    format_path,
)
from .regions import Interval, Region1D


class BoundaryKind(Enum):
    PERMISSIVE_OPEN = "permissive_open"
    RESTRICTIVE_HARD = "restrictive_hard"


class Cause(Enum):
    UNMENTIONED_ATTRIBUTE = "unmentioned-attribute"
    NUMERIC_BOUND = "numeric-bound"
    RESTRICTIVE_ENUMERATION = "restrictive-enumeration"


@dataclass(frozen=True)
class Facet:
    """A boundary of a node: a bound on ``dimension``, or (None) its instance-set edge."""

    dimension: str | None = None

    @classmethod
    def instances(cls) -> Facet:
        return cls(None)

    @classmethod
    def bound(cls, dimension: str) -> Facet:
        return cls(dimension)

    def __str__(self) -> str:
        return "instance edge" if self.dimension is None else f"{self.dimension} bound"


def _chain(odd: AgOdd, path: Path) -> list[CategoryNode | AttributeNode]:
    chain = odd.lookup(tuple(path))
    if chain is None:
        raise AgOddError("unknown-path", f"{format_path(tuple(path))} does not resolve")
    return chain


def _dimension(odd: AgOdd, name: str) -> DimensionDecl:
    dim = odd.dimension(name)
    if dim is None:
        raise AgOddError("unknown-dimension", f"dimension {name!r} is not declared")
    return dim


def domain_along(chain, dim: DimensionDecl) -> Region1D:
    """Declared domain of ``dim`` narrowed by every constraint along ``chain``."""
    region = Region1D.full(dim)
    for node in chain:
        for c in getattr(node, "constraints", ()):
            if c.dimension == dim.name:
                region = region.intersect(Region1D.of_constraint(c))
    return region


def effective_domain(odd: AgOdd, path: Path, dimension: str) -> Region1D:
    return domain_along(_chain(odd, path), _dimension(odd, dimension))


def boundary_kind(odd: AgOdd, path: Path, facet: Facet) -> BoundaryKind:
    node = _chain(odd, path)[-1]
    if facet.dimension is not None:
        return BoundaryKind.RESTRICTIVE_HARD
    if node.mode is Mode.PERMISSIVE:
        return BoundaryKind.PERMISSIVE_OPEN
    return BoundaryKind.RESTRICTIVE_HARD


def constrained_dimensions(chain) -> list[str]:
    """Dimensions constrained anywhere along ``chain``, first occurrence order."""
    out: list[str] = []
    for node in chain:
        for c in getattr(node, "constraints", ()):
            if c.dimension not in out:
                out.append(c.dimension)
    return out


def odd_region(odd: AgOdd) -> dict[str, Region1D]:
    """Per-dimension extent of the ODD.

    A dimension constrained somewhere spans the union of the effective domains
    of the nodes constraining it; an unconstrained one spans its declared domain.
    """
    out: dict[str, Region1D] = {}
    for dim in odd.dimensions:
        region = None
        for path, node in odd.walk():
            if any(c.dimension == dim.name for c in node.constraints):
                here = domain_along(odd.lookup(path), dim)
                region = here if region is None else region.union(here)
        out[dim.name] = Region1D.full(dim) if region is None else region
    return out


# -- binding values -----------------------------------------------------------


def compatible(dim: DimensionDecl, value: Value | Range) -> bool:
    if isinstance(value, str):
        return dim.is_categorical and value in dim.labels
    return not dim.is_categorical and dim.unit == value.unit


def _words(text: str) -> list[str]:
    return [w for w in re.split(r"[^0-9a-z]+", text.lower()) if w]


def infer_dimension(odd: AgOdd, path: Path, value: Value | Range) -> DimensionDecl | None:
    """Dimension a bound value at ``path`` refers to, or None if not unique.

    Looks at the nearest node on the resolved part of the path that constrains
    a compatible dimension, then at dimension names matching the last path
    element, then at any uniquely compatible dimension.
    """
    chain = odd.resolve_prefix(tuple(path))
    pool = [d for d in odd.dimensions if compatible(d, value)]
    for node in reversed(chain):
        names = constrained_dimensions([node])
        cands = [d for d in pool if d.name in names]
        if len(cands) == 1:
            return cands[0]
        if cands:
            pool = cands
            break
    if path:
        words = _words(path[-1])
        named = [d for d in pool if _words(d.name) == words[: len(_words(d.name))]]
        if len(named) == 1:
            return named[0]
    return pool[0] if len(pool) == 1 else None


def value_region(dim: DimensionDecl, value: Value | Range) -> Region1D:
    if isinstance(value, Range):
        return Region1D.numeric(dim.name, [Interval(value.lo, value.hi)])
    return Region1D.of_value(dim.name, value)


def first_violated(chain, dim: DimensionDecl, region: Region1D) -> tuple[int, Constraint | None]:
    """Index in ``chain`` and constraint first excluding part of ``region``.

    ``(0, None)`` when only the declared domain is exceeded.
    """
    for i, node in enumerate(chain):
        for c in getattr(node, "constraints", ()):
            if c.dimension == dim.name and not region.issubset(Region1D.of_constraint(c)):
                return i, c
    return 0, None


def path_crossing(odd: AgOdd, path: Path) -> tuple[Path, BoundaryKind, Cause | None] | None:
    """Edge crossed by instantiating ``path``, or None when the path is declared.

    Returns the path of the deepest declared node, the kind of its instance
    edge, and the exclusion cause for restrictive edges.
    """
    path = tuple(path)
    chain = odd.resolve_prefix(path)
    if not chain:
        return ((), BoundaryKind.RESTRICTIVE_HARD, Cause.UNMENTIONED_ATTRIBUTE)
    if len(chain) == len(path):
        return None
    at = path[: len(chain)]
    node = chain[-1]
    if node.mode is Mode.PERMISSIVE:
        return (at, BoundaryKind.PERMISSIVE_OPEN, None)
    cause = Cause.UNMENTIONED_ATTRIBUTE if isinstance(node, CategoryNode) else Cause.RESTRICTIVE_ENUMERATION
    return (at, BoundaryKind.RESTRICTIVE_HARD, cause)


# -- membership ---------------------------------------------------------------


@dataclass(frozen=True)
class WorldSample:
    """A concrete world: measured values at attribute paths plus present objects."""

    bindings: tuple[tuple[Path, Value], ...] = ()
    objects: tuple[Path, ...] = ()


@dataclass(frozen=True)
class Reason:
    path: Path
    cause: Cause
    at: Path  # node whose facet excludes the sample
    facet: Facet = field(default_factory=Facet)

    def __str__(self) -> str:
        return f"{format_path(self.path)}: {self.cause.value} ({self.facet} of {format_path(self.at) or '<root>'})"


@dataclass(frozen=True)
class Membership:
    included: bool
    reasons: tuple[Reason, ...] = ()

    @property
    def verdict(self) -> str:
        return "included" if self.included else "excluded"


def bound_dimension(odd: AgOdd, path: Path, value: Value | Range) -> DimensionDecl:
    dim = infer_dimension(odd, path, value)
    if dim is None:
        unit = "label" if isinstance(value, str) else repr(value.unit or "none")
        raise AgOddError("unit-mismatch", f"no declared dimension for {unit} value at {format_path(tuple(path))}")
    return dim


def contains(odd: AgOdd, sample: WorldSample) -> Membership:
    reasons: list[Reason] = []
    for path in list(sample.objects) + [p for p, _ in sample.bindings]:
        crossing = path_crossing(odd, path)
        if crossing is not None and crossing[2] is not None:
            reasons.append(Reason(tuple(path), crossing[2], crossing[0], Facet.instances()))
    for path, value in sample.bindings:
        dim = bound_dimension(odd, path, value)
        chain = odd.resolve_prefix(tuple(path))
        region = value_region(dim, value)
        if not region.issubset(domain_along(chain, dim)):
            idx, _ = first_violated(chain, dim, region)
            cause = Cause.RESTRICTIVE_ENUMERATION if dim.is_categorical else Cause.NUMERIC_BOUND
            at = tuple(path)[: idx + 1] if chain else ()
            reasons.append(Reason(tuple(path), cause, at, Facet.bound(dim.name)))
    unique = sorted(set(reasons), key=lambda r: (r.path, r.cause.value, r.at, str(r.facet)))
    return Membership(not unique, tuple(unique))


def quantity(value: float, unit: str = "") -> Quantity:
    return Quantity(float(value), unit)
