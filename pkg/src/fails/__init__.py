"""Incident-report collection and reliability analytics for LLM services."""

__version__ = "0.1.0"
