import sys
from pathlib import Path

import pytest

from nsfts import kernels

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    """Run the test once per available kernel backend."""
    prev = kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(prev)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
