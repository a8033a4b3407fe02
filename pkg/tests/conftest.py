import json

import pytest
from hypothesis import HealthCheck, settings

from heatwiener.measures import validate

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def spec_of(geometry, **body):
    return validate({"geometry": geometry, **body})


def atomic(geometry, *pairs):
    return spec_of(geometry, type="atomic", atoms=[{"point": list(p) if isinstance(p, tuple) else p, "weight": w} for p, w in pairs])


def mixture(geometry, *parts):
    return spec_of(geometry, type="mixture", components=[{"coefficient": c, "measure": m} for c, m in parts])


@pytest.fixture
def write_spec(tmp_path):
    def _write(obj, name="spec.json"):
        path = tmp_path / name
        path.write_text(json.dumps(obj), encoding="utf-8")
        return str(path)

    return _write
