"""Shared fixtures: curve contexts are expensive, so they live for the whole session."""

import pytest
from hypothesis import settings

from mtlab.config import RunConfig
from mtlab.pipeline import create_context

settings.register_profile("mtlab", deadline=None, max_examples=25)
settings.load_profile("mtlab")


@pytest.fixture(scope="session")
def config():
    return RunConfig(precision=30)


@pytest.fixture(scope="session")
def ctx11(config):
    return create_context("11a1", config)


@pytest.fixture(scope="session")
def ctx37(config):
    return create_context("37a1", config)


@pytest.fixture(scope="session")
def ctx389(config):
    return create_context("389a1", config)


@pytest.fixture(scope="session")
def ctx701(config):
    return create_context("701a1", config)


@pytest.fixture(scope="session")
def contexts(ctx11, ctx37):
    return {"11a1": ctx11, "37a1": ctx37}


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-bound acceptance scans (deselect with -m 'not slow')")
