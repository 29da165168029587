import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mool import corpus  # noqa: E402
from mool.parser import parse_program  # noqa: E402


def parse_ok(source: str, file: str = "<test>"):
    program, diags = parse_program(source, file)
    errors = [d.render() for d in diags if d.severity == "error"]
    assert not errors, errors
    return program


@pytest.fixture(scope="session")
def auction():
    return parse_ok(corpus.read("auction.mool"), "auction.mool")


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    verdicts = getattr(module, "VERDICTS", None)
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for n in sorted(verdicts):
            terminalreporter.write_line(verdicts[n])
