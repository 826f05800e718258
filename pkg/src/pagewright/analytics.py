"""Prompt-log analytics and version-graph exports.

Consumes line-delimited JSON logs of prompt sessions (one entry per line)
and produces per-participant counts by prompt category, rollback counts,
and graph serializations (JSON and DOT). Hand labels in the log win; only
unlabeled entries go through the keyword classifier.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError
from .prompts import PromptKind, REPORT_CATEGORIES, classify_prompt, report_category
from .versioning import VersionGraph


@dataclass(frozen=True)
class LogEntry:
    participant: str
    text: str
    kind: str | None = None  # hand label; None -> classifier
    ts: str | None = None
    rollback: bool = False
    synthetic: bool = False


def load_prompt_log(path: Path) -> list[LogEntry]:
    entries: list[LogEntry] = []
    last_ts: dict[str, str] = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path.name}:{line_no}: invalid JSON: {exc}") from exc
        entry = LogEntry(
            participant=raw["participant"],
            text=raw.get("text", ""),
            kind=raw.get("kind"),
            ts=raw.get("ts"),
            rollback=bool(raw.get("rollback", False)),
            synthetic=bool(raw.get("synthetic", False)),
        )
        if entry.ts is not None:
            previous = last_ts.get(entry.participant)
            if previous is not None and entry.ts < previous:
                raise ValidationError(
                    f"{path.name}:{line_no}: timestamps must be nondecreasing per participant"
                )
            last_ts[entry.participant] = entry.ts
        entries.append(entry)
    return entries


def participant_sort_key(name: str):
    match = re.fullmatch(r"([A-Za-z]*)(\d+)", name)
    if match:
        return (match.group(1), int(match.group(2)))
    return (name, 0)


@dataclass
class AnalyticsReport:
    participants: list[str]
    counts: dict[str, dict[str, int]]  # participant -> category -> count

    def totals_row(self) -> dict[str, int]:
        return {p: sum(self.counts[p].values()) for p in self.participants}

    def category_row(self, category: str) -> dict[str, int]:
        return {p: self.counts[p].get(category, 0) for p in self.participants}


def analyze_log(entries: list[LogEntry]) -> AnalyticsReport:
    """Per-participant counts over the five report categories, plus totals.

    Rollback markers are not prompts and are excluded from the counts.
    """
    participants: list[str] = []
    counts: dict[str, dict[str, int]] = {}
    seen_first: set[str] = set()
    for entry in entries:
        if entry.participant not in counts:
            counts[entry.participant] = {c: 0 for c in REPORT_CATEGORIES}
            participants.append(entry.participant)
        if entry.rollback:
            continue
        first = entry.participant not in seen_first
        seen_first.add(entry.participant)
        if entry.kind:
            try:
                kind = PromptKind.parse(entry.kind)
            except ValueError as exc:
                raise ValidationError(f"bad kind label for {entry.participant}: {exc}") from exc
        else:
            kind = classify_prompt(entry.text, first_in_session=first)
        counts[entry.participant][report_category(kind)] += 1
    participants.sort(key=participant_sort_key)
    return AnalyticsReport(participants=participants, counts=counts)


def rollback_counts(entries: list[LogEntry]) -> dict[str, int]:
    """Rollback events per participant, in natural participant order."""
    counts: dict[str, int] = {}
    for entry in entries:
        counts.setdefault(entry.participant, 0)
        if entry.rollback:
            counts[entry.participant] += 1
    return {p: counts[p] for p in sorted(counts, key=participant_sort_key)}


def render_report_table(report: AnalyticsReport) -> str:
    """Fixed-width text table: one row per category, one column per participant."""
    participants = report.participants
    width = max([9] + [len(p) for p in participants]) + 2
    lines = ["Category".ljust(12) + "".join(p.rjust(width) for p in participants)]
    for category in REPORT_CATEGORIES:
        row = report.category_row(category)
        lines.append(
            category.ljust(12) + "".join(str(row[p]).rjust(width) for p in participants)
        )
    totals = report.totals_row()
    lines.append("Total".ljust(12) + "".join(str(totals[p]).rjust(width) for p in participants))
    return "\n".join(lines)


# -- graph exports ---------------------------------------------------------------


def graph_to_json(graph: VersionGraph) -> dict:
    return {
        "head": graph.head,
        "root": graph.root,
        "active_path": graph.active_path,
        "abandoned_branches": graph.abandoned_branches,
        "discarded_count": graph.discarded_count,
        "nodes": [
            {
                "id": node.id,
                "parent": node.parent,
                "label": node.label,
                "created_at": node.created_at,
                "seq": node.seq,
            }
            for node in graph.nodes
        ],
    }


def graph_to_dot(graph: VersionGraph) -> str:
    """Graphviz rendering: active path solid, abandoned branches dashed."""
    on_path = set(graph.active_path)
    lines = ["digraph versions {", "  rankdir=LR;", "  node [shape=box];"]
    for node in graph.nodes:
        name = node.label or node.id[:8]
        attrs = [f'label="{name}"']
        if node.id == graph.head:
            attrs.append("penwidth=2")
        if node.id not in on_path:
            attrs.append('style=dashed color=gray40 fontcolor=gray40')
        lines.append(f'  "{node.id}" [{" ".join(attrs)}];')
    for node in graph.nodes:
        if node.parent is not None:
            style = "" if node.id in on_path else " [style=dashed color=gray40]"
            lines.append(f'  "{node.parent}" -> "{node.id}"{style};')
    lines.append("}")
    return "\n".join(lines) + "\n"
