import json

import numpy as np
import pytest

from shiftreal import GridConfig, parse_symbol


@pytest.fixture(scope="session")
def grid():
    return GridConfig()


@pytest.fixture(scope="session")
def small_grid():
    return GridConfig(2**12, 2**-6)


@pytest.fixture(scope="session")
def matinner_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("sym") / "rot.json"
    path.write_text(json.dumps({"a0": [[0, 1], [-1, 0]], "b": [1, 0]}))
    return str(path)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def sym(text):
    return parse_symbol(text)
