"""Shared exception types."""

from __future__ import annotations


class BudgetExceededError(RuntimeError):
    """Raised when an exhaustive routine exceeds its node budget."""

    def __init__(self, nodes: int, budget: int, what: str = "search"):
        self.nodes = nodes
        self.budget = budget
        super().__init__(f"{what} exceeded node budget ({nodes} > {budget})")


class GenerationError(RuntimeError):
    """Raised when a graph generator cannot produce a valid graph."""

    def __init__(self, message: str, attempts: int = 0):
        self.attempts = attempts
        super().__init__(message)


class ConfigError(ValueError):
    """Raised on invalid experiment configuration."""
