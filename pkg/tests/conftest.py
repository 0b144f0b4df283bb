import pytest
from hypothesis import settings

from besiml import kernel

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(params=[m.BACKEND for m in kernel.backends()])
def backend(request):
    """Each available derivability kernel in turn."""
    return next(m for m in kernel.backends() if m.BACKEND == request.param)


_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """Record (and print) a one-line acceptance verdict."""
    def report(number: int, title: str, ok: bool, detail: str = ""):
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
        print(line)
        _CRITERIA.append(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
