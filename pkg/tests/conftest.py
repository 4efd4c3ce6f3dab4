import numpy as np
import pytest
from hypothesis import settings

from cenizk.rng import stream

# property tests run derandomized so the whole suite is reproducible
settings.register_profile("repro", derandomize=True)
settings.load_profile("repro")


@pytest.fixture
def rng():
    return stream(1234, "test")


def chi_square_uniform(counts, expected=None):
    """Chi-square statistic against a uniform (or given) expectation."""
    counts = np.asarray(counts, dtype=float)
    if expected is None:
        expected = np.full(len(counts), counts.sum() / len(counts))
    return float(np.sum((counts - expected) ** 2 / expected))


# critical values at p = 0.01; a statistic BELOW the value is consistent
# with the null at the 1% level
CHI2_CRIT_1DF = 6.635
CHI2_CRIT_3DF = 11.345
