import random

import pytest

from mod4sum.core import ProtocolChain


@pytest.fixture
def rng():
    return random.Random(20240601)


def random_chain(rng: random.Random, n_parties: int) -> ProtocolChain:
    return ProtocolChain.from_ints(
        [rng.randrange(16)] + [rng.randrange(256) for _ in range(n_parties - 2)]
    )


ACCEPTANCE: list[tuple[str, str, bool]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key, text, ok in sorted(ACCEPTANCE, key=lambda r: int(r[0].split(".")[0])):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key}: {text}")
