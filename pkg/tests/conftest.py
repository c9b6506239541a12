import pytest

from pstchain.pipeline import STANDARD_FAMILIES, design_standard

SEED = 20260809


@pytest.fixture(scope="session")
def chains31():
    """The five standard designed chains at N = 31, max coupling normalized."""
    return {name: design_standard(name, 31) for name in STANDARD_FAMILIES}
