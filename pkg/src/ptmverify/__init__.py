"""Exact verification of prepare-transform-measure models: conditions, time reversal and Bell-type tests."""

from __future__ import annotations

__version__ = "0.1.0"
