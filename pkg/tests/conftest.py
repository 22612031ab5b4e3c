import numpy as np
import pytest

from rnls import make_grid, sample_field


@pytest.fixture(scope="session")
def grid64():
    return make_grid(6.0, 64)


@pytest.fixture(scope="session")
def grid128():
    return make_grid(6.0, 128)


@pytest.fixture(scope="session")
def grid256():
    return make_grid(6.0, 256)


def gaussian(grid, sigma=1.0, amp=1.0):
    return sample_field(grid, lambda X, Y: amp * np.exp(-sigma * (X ** 2 + Y ** 2) / 2.0))


def vortex(grid, amp=1.0):
    return sample_field(grid, lambda X, Y: amp * (X + 1j * Y) * np.exp(-(X ** 2 + Y ** 2) / 2.0))


def rel_l2(a, b):
    return float(np.sqrt(np.sum(np.abs(a - b) ** 2) / np.sum(np.abs(b) ** 2)))
