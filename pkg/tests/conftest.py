import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from gsemo import _backend  # noqa: E402

BACKENDS = ["python"] + (["compiled"] if _backend.COMPILED else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(test_acceptance.LINES):
            terminalreporter.write_line(test_acceptance.LINES[number])
