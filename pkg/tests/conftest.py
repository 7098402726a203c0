"""Shared rings, charts and families for the test modules."""
from pathlib import Path

import pytest

from src.dmodules.exactalg import LocRing
from src.dmodules.gaussmanin import corpus_families
from src.dmodules.transfer import TransferChart

INPUTS = Path(__file__).resolve().parent.parent / 'inputs'


@pytest.fixture(scope='module')
def plane():
    return LocRing(('x', 'y'))


@pytest.fixture(scope='module')
def laurent():
    return LocRing(('x',), ['x'])


@pytest.fixture(scope='module')
def chart():
    return TransferChart(LocRing(('x', 'y')), ('x',), ('y',))


@pytest.fixture(scope='module')
def corpus():
    return corpus_families()


@pytest.fixture
def inputs_dir() -> Path:
    return INPUTS
