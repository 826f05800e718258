"""Keyword heuristic for labelling imported prompt logs.

Only used by analytics over logs that lack hand labels; live sessions
always record the kind the user selected. Rules are checked in order and
the first hit wins.
"""

from __future__ import annotations

import re

from .kinds import PromptKind

_BUG_FIX_TERMS = ("error", "fix", "bug", "not working", "broken", "crash")
_LAYOUT_TERMS = ("button", "color", "style", "layout", "table", "font", "css")
_OTHER_TERMS = ("install", "configure", "setup", "environment variable")


def _matches_any(text: str, terms: tuple[str, ...]) -> bool:
    for term in terms:
        if " " in term:
            if term in text:
                return True
        elif re.search(rf"\b{re.escape(term)}(s|es|ed|ing)?\b", text):
            return True
    return False


def classify_prompt(text: str, first_in_session: bool = False) -> PromptKind:
    """Classify free prompt text into a kind.

    ``first_in_session`` marks the opening prompt of a participant's
    session, the only way a prompt is labelled Initial here.
    """
    if first_in_session:
        return PromptKind.INITIAL
    lowered = text.lower().strip()
    if not lowered:
        return PromptKind.OTHER
    if _matches_any(lowered, _BUG_FIX_TERMS):
        return PromptKind.BUG_FIX
    if _matches_any(lowered, _LAYOUT_TERMS):
        return PromptKind.LAYOUT
    if _matches_any(lowered, _OTHER_TERMS):
        return PromptKind.OTHER
    return PromptKind.FEATURE
