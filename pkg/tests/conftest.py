import gmpy2
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _reset_context():
    """Keep the ambient gmpy2 context at its default; the library must set
    its own context for every computation."""
    gmpy2.set_context(gmpy2.context())
    yield
