"""Syzlab specific exception hierarchy."""

from __future__ import annotations


class SyzlabError(Exception):
    """Base error for the syzygy toolkit."""


class ParameterError(SyzlabError, ValueError):
    """Raised when inputs violate an operation's standing hypotheses."""


class UnboundedSearchError(SyzlabError):
    """Raised when a lattice enumeration is not confined to a finite box."""


class GradedRangeError(SyzlabError):
    """Raised when a Koszul request leaves a model's graded range or the wedge cap."""


class ResampleBudgetError(SyzlabError):
    """Raised when a random model or basis sampler runs out of attempts."""


class CacheError(SyzlabError):
    """Raised when the report cache directory cannot be used."""
