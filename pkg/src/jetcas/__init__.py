"""Exact jet calculus, Lie equations and formal adjoints over rational functions."""

__version__ = "0.1.0"
