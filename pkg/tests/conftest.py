import numpy as np
import pytest

from whmc import BetaFamily, BetaFamilyParams, BrownianMotion


@pytest.fixture(scope="session")
def asym_model():
    """Driftless pure-jump test model: unit weights/scales/shapes, tilted
    decay (alpha1=1, alpha2=2) so upward barrier crossings are frequent."""
    return BetaFamily(
        BetaFamilyParams(
            c1=1.0, alpha1=1.0, beta1=1.0, lambda1=1.0,
            c2=1.0, alpha2=2.0, beta2=1.0, lambda2=1.0,
        )
    )


@pytest.fixture(scope="session")
def bm_model():
    return BrownianMotion()


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
