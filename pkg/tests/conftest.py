import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

SHAPES = [(1,), (2,), (4,), (2, 3), (2, 3, 5), (1, 2, 4)]


@pytest.fixture(params=SHAPES, ids=lambda s: "x".join(map(str, s)))
def shape(request):
    from afpartial.matblock import BlockShape

    return BlockShape(request.param)


ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0][1:])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
