"""Plain-text rendering: LoD tables, verification reports, traces."""

from __future__ import annotations

from .model import CATEGORY_ORDER, AgOdd, AttributeNode, format_number, format_path
from .process import Trace
from .verify import IterationReport

FINAL_MARK = "◀"


def _cell_text(node: AttributeNode) -> tuple[str, str, str]:
    tags = "/".join(str(t) for t in node.sorted_tags())
    return node.name, tags, node.mode.symbol


def _grid(rows: list[list[str]], seps: set[int]) -> list[str]:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    out = []
    for r in rows:
        parts = []
        for i, cell in enumerate(r):
            if i in seps:
                parts.append("||")
            parts.append(cell.ljust(widths[i]))
        out.append(" ".join(parts).rstrip())
    return out


def render_table(odd: AgOdd) -> str:
    """ODD as an LoD table: LoD columns left to right, each with Tag and Type.

    Read right to left: the rightmost attribute of a row is the final
    boundary, progressively narrowing the attributes to its left.
    """
    depth = 1
    for path, _ in odd.walk():
        depth = max(depth, len(path) - 1)
    header = []
    for k in range(depth):
        header += [f"LoD{k}", "Tag", "Type"]
    header.append("Final")
    rows = [header]
    seps = {3 * k for k in range(1, depth)} | {3 * depth}

    def blank() -> list[str]:
        return [""] * (3 * depth + 1)

    for kind in CATEGORY_ORDER:
        cat = odd.categories[kind]
        row = blank()
        row[0], row[2] = kind.value, cat.mode.symbol
        rows.append(row)

        def rec(nodes, k: int, row: list[str] | None) -> None:
            for node in nodes:
                if row is None:
                    row = blank()
                    rows.append(row)
                row[3 * k : 3 * k + 3] = _cell_text(node)
                if node.children:
                    rec(node.children, k + 1, row)
                else:
                    row[-1] = FINAL_MARK
                row = None

        rec(cat.children, 0, None)
    lines = [f"{odd.name} (read right to left; {FINAL_MARK} marks the final boundary)"]
    lines += _grid(rows, seps)
    if odd.processes:
        lines.append("")
        prows = [["process", "Start", "Condition", "End"]]
        for p in odd.processes:
            start = " ".join(str(t) for t in p.start_tags) or "---"
            cond = p.trigger.describe() if p.trigger else "---"
            end = " ".join(str(t) for t in p.end_tags) or "---"
            prows.append([p.name, start, cond, end])
        lines += _grid(prows, {1})
    return "\n".join(lines) + "\n"


def render_report(report: IterationReport, odd: AgOdd) -> str:
    cov = report.coverage
    lines = [
        f"iteration {report.iteration}: {report.verdict.value}",
        f"coverage {cov.overall:.4f} at grid {cov.grid} ({cov.covered_cells}/{cov.total_cells} cells, threshold {format_number(report.threshold)})",
    ]
    for name, frac in cov.per_dimension.items():
        lines.append(f"  {name}: {frac:.4f}")
    lines.append(f"violations: {len(report.violations)}")
    for v in report.violations:
        lines.append(f"  {v.scenario}: {format_path(v.path)} [{v.kind.value}] {v.facet}: {v.detail}")
    if report.notes:
        lines.append(f"permissive crossings (info): {len(report.notes)}")
        for v in report.notes:
            lines.append(f"  {v.scenario}: {v.detail}")
    lines.append(f"gaps: {len(report.gaps)}")
    for g in report.gaps:
        lines.append(f"  {g.describe(odd)} ({g.cells} cells)")
    return "\n".join(lines) + "\n"


def render_trace(trace: Trace) -> str:
    lines = [f"initial {trace.initial}"]
    for i, step in enumerate(trace.steps, 1):
        fired = ", ".join(step.fired) if step.fired else "-"
        lines.append(f"{i}. {step.event} -> fired: {fired}; state {step.state}")
    lines.append(f"final {trace.final}")
    return "\n".join(lines) + "\n"
