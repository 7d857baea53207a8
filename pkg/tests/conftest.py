import numpy as np
import pytest

from holonet.homotopy import build_path_frame, fundamental_presentation
from holonet.standard import chain_poset, hexagon_poset, with_top


@pytest.fixture
def hexagon():
    return hexagon_poset()


@pytest.fixture
def hexagon_pfp(hexagon):
    """(poset, presentation, frame) for the hexagon at its smallest element."""
    base = min(hexagon.elements)
    return hexagon, fundamental_presentation(hexagon, base), build_path_frame(hexagon, base)


@pytest.fixture
def chain3():
    return chain_poset(3)


@pytest.fixture
def topped(hexagon):
    return with_top(hexagon)


def pfp(poset):
    base = min(poset.elements)
    return poset, fundamental_presentation(poset, base), build_path_frame(poset, base)


def rng_for(seed):
    return np.random.default_rng(seed)
