"""Coverage figures written to files (non-interactive backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

from .model import AgOdd  # noqa: E402
from .scenario import scenario_region  # noqa: E402
from .semantics import odd_region  # noqa: E402
from .verify import IterationReport  # noqa: E402


def _finite(parts, lo: float, hi: float):
    for p in parts:
        yield max(p.lo, lo), min(p.hi, hi)


def plot_report(report: IterationReport, odd: AgOdd, scenarios, path: str) -> None:
    """Per-dimension coverage bars, plus a projection onto the first two numeric dimensions."""
    numeric = [d for d in odd.dimensions if not d.is_categorical]
    two_d = len(numeric) >= 2
    fig, axes = plt.subplots(1, 2 if two_d else 1, figsize=(11 if two_d else 6, 4.5))
    axes = list(axes) if two_d else [axes]

    ax = axes[0]
    names = list(report.coverage.per_dimension)
    ax.bar(names, [report.coverage.per_dimension[n] for n in names], color="tab:blue")
    ax.axhline(report.threshold, color="black", linestyle="--", linewidth=1)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("covered fraction")
    ax.set_title(f"iteration {report.iteration}: {report.verdict.value} (overall {report.coverage.overall:.3f})")

    if two_d:
        ax = axes[1]
        dx, dy = numeric[:2]
        region = odd_region(odd)
        for x0, x1 in _finite(region[dx.name].parts, dx.lo, dx.hi):
            for y0, y1 in _finite(region[dy.name].parts, dy.lo, dy.hi):
                ax.add_patch(Rectangle((x0, y0), x1 - x0, y1 - y0, facecolor="navy", alpha=0.25, edgecolor="red"))
        violating = {v.scenario for v in report.violations}
        for s in scenarios:
            sr = scenario_region(s, odd)
            colour = "red" if s.name in violating else "green"
            for x0, x1 in _finite(sr[dx.name].parts, dx.lo, dx.hi):
                for y0, y1 in _finite(sr[dy.name].parts, dy.lo, dy.hi):
                    ax.add_patch(Rectangle((x0, y0), x1 - x0, y1 - y0, fill=False, edgecolor=colour, linewidth=1.5))
                    ax.annotate(s.name, ((x0 + x1) / 2, (y0 + y1) / 2), ha="center", fontsize=7)
        for g in report.gaps:
            box = g.box()
            (x0, x1), (y0, y1) = box[dx.name], box[dy.name]
            ax.add_patch(Rectangle((x0, y0), x1 - x0, y1 - y0, fill=False, hatch="//", edgecolor="grey", linewidth=0))
        ax.set_xlim(dx.lo, dx.hi if dx.hi > dx.lo else dx.lo + 1)
        ax.set_ylim(dy.lo, dy.hi if dy.hi > dy.lo else dy.lo + 1)
        ax.set_xlabel(f"{dx.name} [{dx.unit}]" if dx.unit else dx.name)
        ax.set_ylabel(f"{dy.name} [{dy.unit}]" if dy.unit else dy.name)
        ax.set_title("ODD region, scenarios and gaps")
        ax.set_aspect("auto")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
