"""Cost guards for exhaustive computations."""

from __future__ import annotations


class InstanceTooLarge(ValueError):
    """An exhaustive computation was asked to exceed its work limit."""


def check_cost(cost: int, limit: int, what: str) -> None:
    if cost > limit:
        raise InstanceTooLarge(f"{what}: about {cost:,} steps exceeds the limit of {limit:,}")
