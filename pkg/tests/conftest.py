"""Session fixtures: the three benchmark runs, shared across test modules."""

import pytest

from gendirsim.runner import run_reference_case


@pytest.fixture(scope="session")
def reference_runs():
    """All three benchmark presets at full scale."""
    return {case: run_reference_case(case, threads=2) for case in (1, 2, 3)}
