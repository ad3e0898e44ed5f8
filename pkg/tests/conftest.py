import pytest
from hypothesis import HealthCheck, settings

from subrank_gap.fields import ExtensionField, PrimeField, Rationals

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIELDS = [PrimeField(2), PrimeField(7), PrimeField(101), ExtensionField(2, 3),
          ExtensionField(3, 2), Rationals()]


@pytest.fixture(params=FIELDS, ids=lambda f: f.name)
def field(request):
    return request.param
