import hypothesis
import pytest

hypothesis.settings.register_profile(
    "numeric", deadline=None, max_examples=60, derandomize=True
)
hypothesis.settings.load_profile("numeric")


@pytest.fixture
def base_params():
    """The finite-horizon reference parameter set used across the suite."""
    from ruintax import ModelParams

    return ModelParams(u=5.0, c=0.1, sigma=1.0, delta=0.05, gamma=0.1, horizon=20.0)
