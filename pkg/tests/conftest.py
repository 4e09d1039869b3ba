import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def bargmann():
    from toeplitz_wkb.kahler_models import make_model

    return make_model("bargmann")


@pytest.fixture(scope="session")
def cp1():
    from toeplitz_wkb.kahler_models import make_model

    return make_model("cp1")
