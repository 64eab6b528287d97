"""Reproducible seeds for randomized checks, read from ``FSC_SEED``."""

from __future__ import annotations

import os
import random

DEFAULT_SEED = 20240


def seed_from_env(default: int = DEFAULT_SEED) -> int:
    raw = os.environ.get("FSC_SEED", "").strip()
    if not raw:
        return default
    try:
        return int(raw, 0)
    except ValueError:
        raise ValueError(f"FSC_SEED must be an integer, got {raw!r}") from None


def rng(offset: int = 0) -> random.Random:
    """A ``random.Random`` seeded from the environment, shifted by ``offset``."""
    return random.Random(seed_from_env() + offset)
