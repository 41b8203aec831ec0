"""Exact symbolic engine for invariant differential forms under Lie group
actions: relative Chevalley-Eilenberg cohomology plus chart-level checks of
the evaluation cochain conditions."""

__version__ = "0.1.0"
