import pytest

from voronoi3.presets import delta_gl2, sym2_delta_gl3


@pytest.fixture(scope="session")
def delta():
    """Delta with a_n = tau(n) / n^(11/2), n <= 6000."""
    return delta_gl2(6000)


@pytest.fixture(scope="session")
def sym2():
    """Symmetric square of Delta with the shipped archimedean parameters."""
    return sym2_delta_gl3(6000)


@pytest.fixture(scope="session")
def sym2_table(sym2):
    return sym2.source.table((200, 200))
