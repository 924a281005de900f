"""Shared fixtures; the expensive planner searches run once per session."""

import pytest

from winnow.planner import EveModel, binary_max_p0, max_correctable_p0


@pytest.fixture(scope="session")
def bb84_max():
    return max_correctable_p0(EveModel.BB84_BREIDBART, target_error=1e-6)


@pytest.fixture(scope="session")
def generic_max():
    return max_correctable_p0(EveModel.GENERIC, target_error=1e-6)


@pytest.fixture(scope="session")
def worst_max():
    return max_correctable_p0(EveModel.WORST_CASE, target_error=1e-6)


@pytest.fixture(scope="session")
def binary_bb84_max():
    return binary_max_p0(EveModel.BB84_BREIDBART, target_error=1e-6)
