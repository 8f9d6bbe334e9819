import numpy as np
import pytest

from specreg import default_scene, power_weights, sample_scene


def random_dataset(rng, m, n):
    """Unstructured complex data, handy for algebraic identities."""
    from specreg import RangeBinDataset

    return RangeBinDataset(rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))


@pytest.fixture(scope="session")
def fig_scene():
    return default_scene()


@pytest.fixture(scope="session")
def fig_dataset(fig_scene):
    return sample_scene(fig_scene)


@pytest.fixture(scope="session")
def fig_weights(fig_dataset):
    return power_weights(fig_dataset, 5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)
