"""Shared fixtures: synthetic zero tables and bundled-data helpers."""

import os
from datetime import timedelta
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ci", deadline=timedelta(milliseconds=4000))
settings.register_profile("dev", max_examples=25)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))

REPO_ROOT = Path(__file__).resolve().parents[1]
DEEP_ZEROS = REPO_ROOT / "data" / "zeros10000"


def bundled_ready() -> bool:
    from primerace.zerodata import bundled_zeros_dir
    d = bundled_zeros_dir()
    return d.is_dir() and len(list(d.glob("*.zeros"))) >= 17


def deep_ready() -> bool:
    return DEEP_ZEROS.is_dir() and len(list(DEEP_ZEROS.glob("*.zeros"))) >= 5


needs_bundled = pytest.mark.skipif(
    not bundled_ready(), reason="bundled desk zero tables not generated yet")
needs_deep = pytest.mark.skipif(
    not deep_ready(), reason="height-10000 zero tables not generated yet")


@pytest.fixture(scope="session")
def synthetic_table():
    """A small fake zero table with known ordinates."""
    from primerace.zerodata import ZeroTable

    gammas = np.array([3.0, 5.5, 8.25, 13.0, 21.0, 29.0, 44.0, 61.0])
    return ZeroTable(q=8, key=-8, height=100.0, prec=9, gammas=gammas, members=1)


@pytest.fixture(scope="session")
def desk_tables():
    """Bundled desk tables for q=8, keyed by character index."""
    from primerace.zerodata import load_tables_for_modulus

    return load_tables_for_modulus(8)
