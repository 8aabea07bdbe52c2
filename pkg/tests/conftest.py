import functools
import os
import sys

import hypothesis
import pytest

sys.path.insert(0, os.path.dirname(__file__))

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=500, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@functools.lru_cache(maxsize=None)
def records_for(type_label):
    from cvtool.orbits import discover_reps
    return tuple(discover_reps(type_label))


@functools.lru_cache(maxsize=None)
def report_for(type_label):
    from cvtool.components import assemble_components
    return assemble_components(type_label, records=list(records_for(type_label)))


@pytest.fixture(scope="session")
def records():
    return records_for


@pytest.fixture(scope="session")
def reports():
    return report_for


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
