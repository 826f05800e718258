"""Prompt construction: kinds, templates, context selection, composition."""

from .kinds import PromptKind, REPORT_CATEGORIES, report_category
from .templates import PromptTemplate, load_template_dir
from .classify import classify_prompt
from .compose import ComposedPrompt, Message, PromptComposer, select_context_files

__all__ = [
    "PromptKind",
    "REPORT_CATEGORIES",
    "report_category",
    "PromptTemplate",
    "load_template_dir",
    "classify_prompt",
    "ComposedPrompt",
    "Message",
    "PromptComposer",
    "select_context_files",
]
