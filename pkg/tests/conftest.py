import pytest

from cfrank.dataset import load_toy

ROWS = {name: i for i, name in enumerate("abcdefgh")}


@pytest.fixture(scope="session")
def toy():
    return load_toy()


@pytest.fixture(scope="session")
def lit(toy):
    """Literal-set builder by feature name, e.g. ``lit(sex="female", race="African")``."""

    def build(**pairs):
        return toy.schema.literals(pairs.items())

    return build


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
