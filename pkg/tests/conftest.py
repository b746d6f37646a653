"""Common pytest fixtures and configuration for fairsim tests."""

import logging

import pytest

from fairsim.book.order_book import OrderBook
from fairsim.kernel.rng import RngStream
from fairsim.kernel.simulator import Kernel
from fairsim.scenarios.config import ScenarioConfig, parse_scenario
from tests.fixtures.scenarios import two_racers


@pytest.fixture(autouse=True)
def quiet_logging():
    """Keep per-event debug logging out of test output."""
    logging.getLogger("fairsim").setLevel(logging.WARNING)
    yield


@pytest.fixture
def kernel():
    return Kernel(seed=42)


@pytest.fixture
def rng():
    return RngStream(42, "test")


@pytest.fixture
def book():
    return OrderBook("main")


@pytest.fixture
def two_racer_config() -> ScenarioConfig:
    """Fast (5us) and slow (7us) honest racers on perfect infrastructure."""
    return parse_scenario(two_racers(count=20))


@pytest.fixture
def output_dir(tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    return out
