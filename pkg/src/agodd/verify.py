"""Iterative verification: boundary violations, grid coverage, gaps, verdicts.

Regions are products of per-dimension unions of intervals (or label sets).
Coverage is counted on a uniform grid over each declared range; categorical
dimensions contribute one cell per label. Counting never enumerates the full
product grid: each dimension is compressed into classes of cells sharing the
same set of covering scenarios, and the product is counted over classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .model import AgOdd, AgOddError, Constraint, DimensionDecl, Path, format_number, format_path
from .regions import Region1D, cell_count, cell_edges, covered_cells
from .scenario import Scenario, binding_dimension, scenario_region
from .semantics import (
    BoundaryKind,
    Cause,
    domain_along,
    first_violated,
    odd_region,
    path_crossing,
    value_region,
)

REPORT_SCHEMA = "agodd-report/1"
DEFAULT_GRID = 100


class Verdict(Enum):
    VERIFIED = "verified"
    NEEDS_SCENARIOS = "needs_scenarios"
    NEEDS_ODD_REVISION = "needs_odd_revision"


@dataclass(frozen=True)
class Violation:
    scenario: str
    path: Path
    facet: str
    kind: BoundaryKind
    detail: str
    dimension: str | None = None  # None for instance-set edges

    def sort_key(self):
        return (self.scenario, self.path, self.dimension or "")

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "path": list(self.path),
            "facet": self.facet,
            "kind": self.kind.value,
            "detail": self.detail,
        }


def _remediation(at: Path, cause: Cause) -> str:
    if cause is Cause.UNMENTIONED_ATTRIBUTE:
        return f"extend {format_path(at)} with the attribute or drop it from the scenario"
    return f"add it under {format_path(at)} or make that node permissive, or narrow the scenario"


def _scenario_findings(odd: AgOdd, s: Scenario) -> tuple[list[Violation], list[Violation]]:
    hard: dict[tuple, Violation] = {}
    extent = odd_region(odd)
    notes: dict[tuple, Violation] = {}
    for path in s.paths:
        crossing = path_crossing(odd, path)
        if crossing is None:
            continue
        at, kind, cause = crossing
        facet = f"instance edge of {format_path(at) or '<root>'}"
        if kind is BoundaryKind.PERMISSIVE_OPEN:
            detail = f"{format_path(path)} is not listed under permissive {format_path(at)}; included"
            notes.setdefault((path, facet), Violation(s.name, path, facet, kind, detail))
        else:
            detail = f"{cause.value}; {_remediation(at, cause)}"
            hard.setdefault((path, facet), Violation(s.name, path, facet, kind, detail))
    for b in s.bindings:
        dim = binding_dimension(b, odd)
        if dim is None:
            continue
        path = tuple(b.path)
        chain = odd.resolve_prefix(path)
        region = value_region(dim, b.value)
        if not region.issubset(domain_along(chain, dim)):
            idx, c = first_violated(chain, dim, region)
            at = path[: idx + 1]
        elif not region.issubset(extent[dim.name]):
            # Bound above the refining node: the value still leaves the ODD region.
            at, c = _outer_bound(odd, dim, region, path)
        else:
            continue
        if c is None:
            facet = f"{dim.name} declared domain"
            detail = f"{b.value} exceeds the declared domain of {dim.name}"
        else:
            facet = f"{c.describe()} at {format_path(at)}"
            detail = f"{b.value} exceeds {c.describe()}"
        hard.setdefault((path, facet), Violation(s.name, path, facet, BoundaryKind.RESTRICTIVE_HARD, detail, dim.name))
    return list(hard.values()), list(notes.values())


def _outer_bound(odd: AgOdd, dim: DimensionDecl, region: Region1D, under: Path) -> tuple[Path, Constraint | None]:
    """First node with a constraint on ``dim`` not containing ``region``.

    Nodes below ``under`` are preferred; otherwise walk order decides.
    """
    nodes = sorted(odd.walk(), key=lambda pn: pn[0][: len(under)] != under)
    for path, node in nodes:
        for c in node.constraints:
            if c.dimension == dim.name and not region.issubset(Region1D.of_constraint(c)):
                return path, c
    return (), None


def detect_violations(odd: AgOdd, scenarios) -> list[Violation]:
    out = [v for s in scenarios for v in _scenario_findings(odd, s)[0]]
    return sorted(out, key=Violation.sort_key)


def permissive_crossings(odd: AgOdd, scenarios) -> list[Violation]:
    """Crossings of permissive edges: reported as info, never as violations."""
    out = [v for s in scenarios for v in _scenario_findings(odd, s)[1]]
    return sorted(out, key=Violation.sort_key)


# -- coverage -----------------------------------------------------------------


@dataclass(frozen=True)
class CoverageReport:
    overall: float
    per_dimension: dict[str, float]
    grid: int
    covered_cells: int = 0
    total_cells: int = 0

    def to_json(self) -> dict:
        return {"overall": self.overall, "per_dimension": dict(self.per_dimension), "grid": self.grid}


@dataclass(frozen=True)
class GapRegion:
    """Uncovered box: per dimension ``(lo, hi)`` for numeric, label tuple for categorical."""

    bounds: tuple[tuple[str, tuple], ...]
    cells: int

    def box(self) -> dict[str, tuple]:
        return dict(self.bounds)

    def describe(self, odd: AgOdd) -> str:
        parts = []
        for name, b in self.bounds:
            dim = odd.dimension(name)
            if dim.is_categorical:
                parts.append(f"{name} ∈ {{{', '.join(b)}}}")
            else:
                unit = f" {dim.unit}" if dim.unit else ""
                parts.append(f"{name} ∈ [{format_number(b[0])}, {format_number(b[1])}]{unit}")
        return " × ".join(parts) if parts else "(whole ODD)"

    def to_json(self) -> dict:
        box = {}
        for name, b in self.bounds:
            box[name] = {"labels": list(b)} if b and isinstance(b[0], str) else {"lo": b[0], "hi": b[1]}
        return {"box": box, "cells": self.cells}


@dataclass
class _Grid:
    dims: list[DimensionDecl]
    grid: int
    odd_masks: list[np.ndarray]
    scen_masks: list[list[np.ndarray]]  # per live scenario, per dimension, clamped to the ODD

    @property
    def all_bits(self) -> int:
        return (1 << len(self.scen_masks)) - 1

    def signatures(self, k: int) -> list[int]:
        """Per cell of dimension ``k``: bitmask of scenarios covering it."""
        sigs = [0] * len(self.odd_masks[k])
        for j, masks in enumerate(self.scen_masks):
            for i in np.flatnonzero(masks[k]):
                sigs[i] |= 1 << j
        return sigs


def _check_grid(odd: AgOdd, grid: int) -> None:
    if isinstance(grid, bool) or not isinstance(grid, int) or grid < 1:
        raise AgOddError("invalid-grid", f"grid must be a positive integer, got {grid!r}")
    for d in odd.dimensions:
        if not d.is_bounded:
            raise AgOddError("unbounded-dimension", f"dimension {d.name!r} has no declared range")


def _build(odd: AgOdd, scenarios, grid: int) -> _Grid:
    _check_grid(odd, grid)
    dims = list(odd.dimensions)
    region = odd_region(odd)
    odd_masks = [covered_cells(region[d.name], d, grid) for d in dims]
    scen = []
    for s in scenarios:
        sr = scenario_region(s, odd)
        masks = [covered_cells(sr[d.name], d, grid) & m for d, m in zip(dims, odd_masks)]
        if all(m.any() for m in masks):
            scen.append(masks)
    return _Grid(dims, grid, odd_masks, scen)


def _count_covered(g: _Grid) -> int:
    classes = []
    for k in range(len(g.dims)):
        sigs = g.signatures(k)
        counts: dict[int, int] = {}
        for i in np.flatnonzero(g.odd_masks[k]):
            counts[sigs[i]] = counts.get(sigs[i], 0) + 1
        classes.append(sorted(counts.items()))

    @lru_cache(maxsize=None)
    def rec(k: int, active: int) -> int:
        if not active:
            return 0
        if k == len(classes):
            return 1
        return sum(n * rec(k + 1, active & sig) for sig, n in classes[k])

    return rec(0, g.all_bits)


def coverage(odd: AgOdd, scenarios, grid: int = DEFAULT_GRID) -> CoverageReport:
    g = _build(odd, scenarios, grid)
    total = math.prod(int(m.sum()) for m in g.odd_masks)
    covered = _count_covered(g) if total else 0
    per_dim = {}
    for k, d in enumerate(g.dims):
        n = int(g.odd_masks[k].sum())
        hit = np.zeros_like(g.odd_masks[k])
        for masks in g.scen_masks:
            hit |= masks[k]
        per_dim[d.name] = int(hit.sum()) / n if n else 0.0
    overall = covered / total if total else 0.0
    return CoverageReport(overall, per_dim, grid, covered, total)


def _runs(mask: np.ndarray, sigs: list[int] | None = None) -> list[tuple[int, int, int]]:
    """Maximal runs ``(start, end, sig)`` of ODD cells with equal signature."""
    out = []
    i, n = 0, len(mask)
    while i < n:
        if not mask[i]:
            i += 1
            continue
        sig = sigs[i] if sigs else 0
        j = i + 1
        while j < n and mask[j] and (sigs[j] if sigs else 0) == sig:
            j += 1
        out.append((i, j, sig))
        i = j
    return out


def _merge(boxes: list[tuple[tuple[int, int], ...]], ndims: int) -> list[tuple[tuple[int, int], ...]]:
    changed = True
    while changed:
        changed = False
        for k in range(ndims):
            groups: dict[tuple, list] = {}
            for b in boxes:
                groups.setdefault(b[:k] + b[k + 1 :], []).append(b)
            merged = []
            for key in sorted(groups):
                items = sorted(groups[key], key=lambda b: b[k])
                cur = items[0]
                for b in items[1:]:
                    if b[k][0] == cur[k][1]:
                        cur = cur[:k] + ((cur[k][0], b[k][1]),) + cur[k + 1 :]
                        changed = True
                    else:
                        merged.append(cur)
                        cur = b
                merged.append(cur)
            boxes = merged
    return sorted(boxes)


def find_gaps(odd: AgOdd, scenarios, grid: int = DEFAULT_GRID) -> list[GapRegion]:
    g = _build(odd, scenarios, grid)
    nd = len(g.dims)
    runs = [_runs(g.odd_masks[k], g.signatures(k)) for k in range(nd)]
    plain = [_runs(g.odd_masks[k]) for k in range(nd)]
    if nd and any(not r for r in plain):
        return []
    boxes: list[tuple[tuple[int, int], ...]] = []

    def rec(k: int, active: int, prefix: tuple) -> None:
        if not active:
            # Everything below is uncovered: span whole ODD runs of the remaining dims.
            def fill(j: int, pre: tuple) -> None:
                if j == nd:
                    boxes.append(pre)
                    return
                for a, b, _ in plain[j]:
                    fill(j + 1, pre + ((a, b),))

            fill(k, prefix)
            return
        if k == nd:
            return
        for a, b, sig in runs[k]:
            rec(k + 1, active & sig, prefix + ((a, b),))

    rec(0, g.all_bits, ())
    out = []
    for box in _merge(boxes, nd):
        bounds = []
        cells = 1
        for d, (a, b) in zip(g.dims, box):
            cells *= int(g.odd_masks[g.dims.index(d)][a:b].sum())
            if d.is_categorical:
                bounds.append((d.name, tuple(d.labels[a:b])))
            else:
                edges = cell_edges(d.lo, d.hi, cell_count(d, grid))
                bounds.append((d.name, (float(edges[a]), float(edges[b]))))
        out.append(GapRegion(tuple(bounds), cells))
    return out


def gap_fraction(gaps, report: CoverageReport) -> float:
    return sum(gp.cells for gp in gaps) / report.total_cells if report.total_cells else 0.0


# -- iteration ------------------------------------------------------------------


def decide(violations, overall: float, threshold: float) -> Verdict:
    if violations:
        return Verdict.NEEDS_ODD_REVISION
    return Verdict.VERIFIED if overall >= threshold else Verdict.NEEDS_SCENARIOS


@dataclass(frozen=True)
class IterationReport:
    iteration: int
    violations: tuple[Violation, ...]
    coverage: CoverageReport
    gaps: tuple[GapRegion, ...]
    verdict: Verdict
    notes: tuple[Violation, ...] = ()
    threshold: float = 1.0
    framing: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "iteration": self.iteration,
            "verdict": self.verdict.value,
            "violations": [v.to_json() for v in self.violations],
            "coverage": self.coverage.to_json(),
            "gaps": [gp.to_json() for gp in self.gaps],
            "framing": self.framing,
        }


def verify_iteration(
    odd: AgOdd,
    scenarios,
    coverage_threshold: float = 1.0,
    grid: int = DEFAULT_GRID,
    iteration: int = 1,
) -> IterationReport:
    violations = tuple(detect_violations(odd, scenarios))
    cov = coverage(odd, scenarios, grid)
    gaps = tuple(find_gaps(odd, scenarios, grid))
    fr = odd.framing
    framing = {
        "functional_requirements": list(fr.functional_requirements),
        "system_capabilities": list(fr.system_capabilities),
        "hara_results": list(fr.hara_results),
    }
    return IterationReport(
        iteration,
        violations,
        cov,
        gaps,
        decide(violations, cov.overall, coverage_threshold),
        tuple(permissive_crossings(odd, scenarios)),
        coverage_threshold,
        framing,
    )

