"""Maintenance engine for living survey documents.

A survey is kept as a persistent state: mutable content plus a frozen,
author-approved outline. New papers are integrated one at a time through
an agentic update loop whose edits are additive and localized by
construction. The package also ships a retrospective benchmark harness
and the full evaluation-metric suite used to score update streams.
"""

__version__ = "0.1.0"
