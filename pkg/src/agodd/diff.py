"""Structural ODD diffs keyed by attribute path, and their application.

Every difference between two models is captured, so ``apply_diff(old,
diff_odds(old, new)) == new`` holds. Added subtrees travel whole, with their
sibling position; surviving nodes are diffed field by field.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .model import CATEGORY_ORDER, AgOdd, AttributeNode, CategoryKind, CategoryNode, Path, format_path

ITERATION_MARKERS = {1: "white", 2: "blue", 3: "red"}


def iteration_marker(iteration: int | None) -> str:
    if iteration is None:
        return "-"
    return ITERATION_MARKERS.get(iteration, f"iter{iteration}")


@dataclass(frozen=True)
class Change:
    path: Path
    before: object
    after: object
    iteration: int | None = None
    index: int | None = None  # sibling position of an added node


@dataclass(frozen=True)
class OddDiff:
    added_attributes: tuple[Change, ...] = ()
    removed_attributes: tuple[Change, ...] = ()
    mode_changes: tuple[Change, ...] = ()
    constraint_changes: tuple[Change, ...] = ()
    tag_changes: tuple[Change, ...] = ()
    iteration_changes: tuple[Change, ...] = ()
    order_changes: tuple[Change, ...] = ()
    # Whole-model fields outside the category trees.
    other_changes: tuple[Change, ...] = field(default=())

    @property
    def is_empty(self) -> bool:
        return not any(getattr(self, f) for f in self.__dataclass_fields__)

    def added_names(self) -> list[str]:
        """Names of every added attribute, including nodes inside added subtrees."""
        out: list[str] = []

        def rec(node: AttributeNode) -> None:
            out.append(node.name)
            for c in node.children:
                rec(c)

        for ch in self.added_attributes:
            rec(ch.after)
        return out

    def removed_names(self) -> list[str]:
        return [ch.path[-1] for ch in self.removed_attributes]


def _diff_children(path: Path, old_nodes, new_nodes, acc: dict[str, list]) -> None:
    old_by = {n.name: n for n in old_nodes}
    new_by = {n.name: n for n in new_nodes}
    for n in old_nodes:
        if n.name not in new_by:
            acc["removed_attributes"].append(Change(path + (n.name,), n, None, n.iteration))
    for i, n in enumerate(new_nodes):
        if n.name not in old_by:
            acc["added_attributes"].append(Change(path + (n.name,), None, n, n.iteration, i))
    common_old = [n.name for n in old_nodes if n.name in new_by]
    common_new = [n.name for n in new_nodes if n.name in old_by]
    if common_old != common_new:
        acc["order_changes"].append(Change(path, tuple(common_old), tuple(common_new)))
    for name in common_new:
        a, b = old_by[name], new_by[name]
        p = path + (name,)
        if a.mode != b.mode:
            acc["mode_changes"].append(Change(p, a.mode, b.mode, b.iteration))
        if a.constraints != b.constraints:
            acc["constraint_changes"].append(Change(p, a.constraints, b.constraints, b.iteration))
        if a.tags != b.tags:
            acc["tag_changes"].append(Change(p, a.tags, b.tags, b.iteration))
        if a.iteration != b.iteration:
            acc["iteration_changes"].append(Change(p, a.iteration, b.iteration, b.iteration))
        _diff_children(p, a.children, b.children, acc)


def diff_odds(old: AgOdd, new: AgOdd) -> OddDiff:
    acc: dict[str, list] = {f: [] for f in OddDiff.__dataclass_fields__}
    for kind in CATEGORY_ORDER:
        a, b = old.categories[kind], new.categories[kind]
        if a.mode != b.mode:
            acc["mode_changes"].append(Change((kind.value,), a.mode, b.mode))
        _diff_children((kind.value,), a.children, b.children, acc)
    for attr in ("name", "framing", "dimensions", "processes"):
        a, b = getattr(old, attr), getattr(new, attr)
        if a != b:
            acc["other_changes"].append(Change((attr,), a, b))
    return OddDiff(**{k: tuple(v) for k, v in acc.items()})


def _patch_children(path: Path, nodes, d: OddDiff) -> tuple[AttributeNode, ...]:
    removed = {ch.path for ch in d.removed_attributes}
    kept = [n for n in nodes if path + (n.name,) not in removed]
    for ch in d.order_changes:
        if ch.path == path:
            by = {n.name: n for n in kept}
            kept = [by[name] for name in ch.after]
    out = []
    for n in kept:
        p = path + (n.name,)
        for field_name, attr in (
            ("mode_changes", "mode"),
            ("constraint_changes", "constraints"),
            ("tag_changes", "tags"),
            ("iteration_changes", "iteration"),
        ):
            for ch in getattr(d, field_name):
                if ch.path == p:
                    n = replace(n, **{attr: ch.after})
        out.append(replace(n, children=_patch_children(p, n.children, d)))
    adds = sorted((ch for ch in d.added_attributes if ch.path[:-1] == path), key=lambda ch: ch.index)
    for ch in adds:
        out.insert(ch.index, ch.after)
    return tuple(out)


def apply_diff(old: AgOdd, d: OddDiff) -> AgOdd:
    cats: dict[CategoryKind, CategoryNode] = {}
    for kind in CATEGORY_ORDER:
        cat = old.categories[kind]
        for ch in d.mode_changes:
            if ch.path == (kind.value,):
                cat = replace(cat, mode=ch.after)
        cats[kind] = replace(cat, children=_patch_children((kind.value,), cat.children, d))
    fields = {"categories": cats}
    for ch in d.other_changes:
        fields[ch.path[0]] = ch.after
    return replace(old, **fields)


def render_diff(d: OddDiff) -> str:
    """Human-readable diff; each line carries the iteration colour marker."""
    if d.is_empty:
        return "no changes\n"
    lines = []

    def line(sign: str, ch: Change, text: str) -> None:
        lines.append(f"{sign} [{iteration_marker(ch.iteration)}] {format_path(ch.path)}{text}")

    for ch in d.added_attributes:
        line("+", ch, f" ({ch.after.mode.symbol})")
    for ch in d.removed_attributes:
        line("-", ch, "")
    for ch in d.mode_changes:
        line("~", ch, f" mode {ch.before.symbol} -> {ch.after.symbol}")
    for ch in d.constraint_changes:
        before = "; ".join(c.describe() for c in ch.before) or "none"
        after = "; ".join(c.describe() for c in ch.after) or "none"
        line("~", ch, f" constraints {before} -> {after}")
    for ch in d.tag_changes:
        before = ", ".join(sorted(str(t) for t in ch.before)) or "none"
        after = ", ".join(sorted(str(t) for t in ch.after)) or "none"
        line("~", ch, f" tags {before} -> {after}")
    for ch in d.iteration_changes:
        line("~", ch, f" iteration {ch.before} -> {ch.after}")
    for ch in d.order_changes:
        lines.append(f"~ {format_path(ch.path)} child order {', '.join(ch.after)}")
    for ch in d.other_changes:
        lines.append(f"~ {ch.path[0]} changed")
    return "\n".join(lines) + "\n"
