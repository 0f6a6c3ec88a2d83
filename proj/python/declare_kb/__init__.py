"""Data-aware Declare conformance checking over an in-memory column store."""

from ._core import (
    DeclareKbError,
    KnowledgeBase,
    Model,
    align,
    check,
    mine,
    run_cli,
)

__all__ = ["DeclareKbError", "KnowledgeBase", "Model", "align", "check", "mine", "run_cli"]
