"""Run configuration and shared error types."""

from __future__ import annotations

import os
from dataclasses import dataclass

# Prime powers used for counting samples, smallest first.  Counting cost
# grows quickly with q, so fits always consume this list left to right.
DEFAULT_SAMPLE_POOL = (2, 3, 4, 5, 7, 8, 9, 11, 13)


class HallcanonError(Exception):
    """Base class for all package errors."""


class BudgetExceededError(HallcanonError):
    """An enumeration would exceed a configured hard budget."""


class InterpolationError(HallcanonError):
    """No polynomial of admissible degree fits the counted samples."""


class HallPolynomialContradiction(HallcanonError):
    """A previously validated polynomial disagrees with a fresh count."""


class ClassificationError(HallcanonError):
    """A module could not be matched to exactly one iso-class descriptor."""


class UnsupportedQuiverError(HallcanonError):
    """The requested quiver is outside the supported classes."""


class BarSolveError(HallcanonError):
    """The bar-invariant triangular system has no admissible solution."""


class CacheCorruptError(HallcanonError):
    """An on-disk cache record failed its checksum."""


class InsufficientPointsError(HallcanonError):
    """The field is too small to host the required homogeneous points."""


@dataclass(frozen=True)
class JobConfig:
    """Knobs shared by every computation.

    ``primes`` is the ordered pool of sample prime powers, ``budget_*`` are
    hard enumeration limits (a clear error beats silent degradation),
    ``series_order`` is the certificate depth for power-series membership
    tests, and ``expansion_check`` controls whether basis expansions are
    re-verified against a direct field-level computation ("off", "first"
    for the smallest sample only, or "all").
    """

    primes: tuple[int, ...] = DEFAULT_SAMPLE_POOL
    budget_subspaces: int = 2_000_000
    budget_aut: int = 2_000_000
    dim_budget: int = 8
    series_order: int = 10
    cache_dir: str | None = None
    threads: int = 1
    seed: int = 0
    expansion_check: str = "first"
    fmt: str = "json"

    @staticmethod
    def default() -> "JobConfig":
        return JobConfig(cache_dir=os.environ.get("HALLCANON_CACHE"))
