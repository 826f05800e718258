"""pagewright: build small multi-page web apps purely from requirement prompts.

The service composes all technology/architecture prompting internally,
projects model output into a runnable workspace, snapshots every change
with one-click rollback, and runs the generated app for live preview.
"""

__version__ = "0.1.0"
