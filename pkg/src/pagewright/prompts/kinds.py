"""Prompt kind taxonomy and the fold used by analytics reports.

Live sessions record the kind the user picked in the UI; the heuristic
classifier in :mod:`.classify` is only for imported logs. ``Transition`` and
``Predefined`` are tool-internal refinements of ``Feature`` and fold back
into the Features column for report output, leaving exactly five report
categories.
"""

from __future__ import annotations

from enum import Enum


class PromptKind(str, Enum):
    INITIAL = "Initial"
    FEATURE = "Feature"
    BUG_FIX = "BugFix"
    LAYOUT = "Layout"
    TRANSITION = "Transition"
    PREDEFINED = "Predefined"
    OTHER = "Other"

    @classmethod
    def parse(cls, value: str) -> "PromptKind":
        for kind in cls:
            if kind.value.lower() == value.strip().lower():
                return kind
        raise ValueError(f"unknown prompt kind: {value!r}")


REFINEMENT_KINDS = (PromptKind.FEATURE, PromptKind.BUG_FIX, PromptKind.LAYOUT)

REPORT_CATEGORIES = ("Initial", "Features", "Bug Fixing", "Layout", "Other")

_CATEGORY_BY_KIND = {
    PromptKind.INITIAL: "Initial",
    PromptKind.FEATURE: "Features",
    PromptKind.TRANSITION: "Features",
    PromptKind.PREDEFINED: "Features",
    PromptKind.BUG_FIX: "Bug Fixing",
    PromptKind.LAYOUT: "Layout",
    PromptKind.OTHER: "Other",
}


def report_category(kind: PromptKind) -> str:
    """Fold a kind into one of the five report categories."""
    return _CATEGORY_BY_KIND[kind]
