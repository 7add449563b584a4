import os

import numpy as np
import pytest

from phialg.catalog import default_families

# override with PHIALG_TEST_SEED=<n> to re-run the randomized sweeps elsewhere
SEED = int(os.environ.get("PHIALG_TEST_SEED", "0"))


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def families():
    return default_families()
