import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from algevo.complexity import CtmTable, build_ctm_table, default_table  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def table32():
    return default_table()


@pytest.fixture(scope="session")
def table22():
    return build_ctm_table(2, 100)


@pytest.fixture(scope="session")
def table16():
    """Small imported table with 16-bit entries (4x4 blocks)."""
    return CtmTable.load(DATA / "ctm_fixture_16bit.tsv")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import _report

    if _report.LINES:
        terminalreporter.section("acceptance criteria")
        for line in _report.LINES:
            terminalreporter.write_line(line)
