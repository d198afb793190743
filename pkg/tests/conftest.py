"""Shared fixtures: small root data, spectral points and a fixture loader."""

import json
from pathlib import Path

import numpy as np
import pytest

from src.roots.root_system import build_root_datum
from src.spectral.characters import SpectralPoint

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def load_fixture():
    def _load(name):
        return json.loads((FIXTURES / name).read_text(encoding="utf-8"))
    return _load


@pytest.fixture
def a1():
    return build_root_datum("A", 1)


@pytest.fixture
def a2():
    return build_root_datum("A", 2)


@pytest.fixture
def a3():
    return build_root_datum("A", 3)


@pytest.fixture
def c2():
    return build_root_datum("C", 2)


@pytest.fixture
def z_a1():
    """u = 0.5, so ⟨z, α∨⟩ = 1."""
    return SpectralPoint.of((0.5,))


@pytest.fixture
def z_a2():
    """u = (1, 1), so both simple coroot pairings equal 1."""
    return SpectralPoint.of((1.0, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
