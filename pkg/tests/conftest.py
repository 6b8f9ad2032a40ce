import pytest

from exactur.innovations import SeedSpec
from exactur.limitsim import batch_wiener_functionals

LIMIT_REPS = 100_000
LIMIT_STEPS = 10_000


@pytest.fixture(scope="session")
def limit_functionals():
    """Full-size Brownian functional draws, shared because they take ~30 s."""
    return batch_wiener_functionals(LIMIT_REPS, LIMIT_STEPS, SeedSpec(1), threads="auto")
