"""Shared fixtures: packaged example worlds, lexicons, and the action registry."""
from pathlib import Path

import pytest

from gridspeak.config import default_registry
from gridspeak.grammar import Lexicon
from gridspeak.world import WorldState, load_world_file

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture()
def registry():
    return default_registry()


@pytest.fixture()
def campus_world() -> WorldState:
    """Three-agent campus: hallways, offices, a lab, furniture, and props."""
    return load_world_file(DATA_DIR / "campus.world.yaml")


@pytest.fixture()
def single_world() -> WorldState:
    """One worker among bananas, tables, and lab electronics."""
    return load_world_file(DATA_DIR / "single.world.yaml")


@pytest.fixture()
def campus_lexicon(campus_world, registry) -> Lexicon:
    return Lexicon.build(registry, campus_world)


@pytest.fixture()
def single_lexicon(single_world, registry) -> Lexicon:
    return Lexicon.build(registry, single_world)
