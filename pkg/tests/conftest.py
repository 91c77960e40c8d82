import json

import numpy as np
import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from cylfourier.core import CylinderGrid
from cylfourier.schemas import NAMES, load_schema


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def grid_small():
    return CylinderGrid(8, 64, 8.0)


@pytest.fixture(scope="session")
def grid_gauss():
    return CylinderGrid(8, 512, 16.0)


@pytest.fixture(scope="session")
def grid_solve():
    return CylinderGrid(32, 512, 16.0)


def _registry():
    resources = []
    for name in NAMES:
        schema = load_schema(name)
        resources.append((f"{name}.json", Resource.from_contents(schema)))
    return Registry().with_resources(resources)


REGISTRY = _registry()


def validate(payload, name):
    """Raise if ``payload`` (dict or JSON text) violates the shipped schema."""
    if isinstance(payload, str):
        payload = json.loads(payload)
    Draft202012Validator(load_schema(name), registry=REGISTRY).validate(payload)
    return payload


def _is_int(r):
    return r.denominator == 1


def l_condition(a, b, re_q, im_q):
    """Table verdict for d/dt + (a + ib) d/dx + q."""
    if b != 0:
        return not _is_int(a * re_q / b + im_q)
    if re_q != 0:
        return True
    return a == 0 and not _is_int(im_q)


def tilde_condition(a, b, re_q, im_q):
    """Table verdict for (a + ib) d/dt + d/dx + q."""
    if b != 0:
        return not _is_int(re_q / b)
    return re_q != 0
