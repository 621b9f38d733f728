"""
tests/conftest.py

Shared pytest fixtures: repo root on sys.path, a clean environment for config
loading, and a few small oracle values used across modules.
"""

import sys
from pathlib import Path

import pytest

# --- Add repo root so "import engine" / "import services" work in tests & CI ---
_repo_root = Path(__file__).resolve().parents[1]
if str(_repo_root) not in sys.path:
    sys.path.insert(0, str(_repo_root))


# p(0..20)
PARTITION_NUMBERS = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176, 231, 297, 385, 490, 627]


@pytest.fixture
def partition_numbers() -> list[int]:
    """Partition counts p(N) for N <= 20."""
    return list(PARTITION_NUMBERS)


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    """No FIBCFG_ORDER from the caller's shell, cwd in an empty temp dir."""
    # teardown restores "absent" even after a .env load
    monkeypatch.setenv("FIBCFG_ORDER", "0")
    monkeypatch.delenv("FIBCFG_ORDER")
    monkeypatch.chdir(tmp_path)
    return tmp_path
