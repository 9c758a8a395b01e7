import random
from pathlib import Path

import pytest

from quadsys.corpus_checks import Corpus

CORPUS_DIR = Path(__file__).resolve().parents[1] / "src" / "quadsys" / "corpus"

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def corpus():
    return Corpus(CORPUS_DIR)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def accept():
    """record(n, ok, detail): one line per acceptance criterion, printed now and in the summary."""

    def record(n, ok, detail):
        prev = _ACCEPTANCE.get(n)
        if prev is not None:
            ok, detail = prev[0] and ok, f"{prev[1]}; {detail}"
        _ACCEPTANCE[n] = (ok, detail)
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
