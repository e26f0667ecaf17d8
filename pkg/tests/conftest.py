import importlib.resources

import pytest


def scenario_text(name: str) -> str:
    return (importlib.resources.files("ranloop.scenarios") / f"{name}.scn").read_text()


@pytest.fixture
def wobble_text():
    return scenario_text("wobble")


@pytest.fixture
def speed_text():
    return scenario_text("speed_sweep")


@pytest.fixture
def cho_text():
    return scenario_text("cho_chain")


@pytest.fixture
def kpm_text():
    return scenario_text("kpm_replay")


@pytest.fixture
def inventory_text():
    return (
        importlib.resources.files("ranloop.scenarios") / "x5g_inventory.inv"
    ).read_text()
