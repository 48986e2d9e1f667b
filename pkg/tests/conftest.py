from __future__ import annotations

import pytest

from vpec.gf import field_build
from vpec.lincode import GrsParams, grs_build

# Witness returned by search_l_mds(GF(7), 5, 2, L=2, seed=1); frozen after an
# independent exhaustive re-check of the 2-MDS property.
WITNESS = GrsParams(alphas=(2, 0, 3, 5, 1), multipliers=(2, 6, 3, 2, 5))

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    _ACCEPTANCE[number] = (bool(passed), detail)


@pytest.fixture(scope="session")
def gf7():
    return field_build(7)


@pytest.fixture(scope="session")
def witness_code(gf7):
    return grs_build(gf7, 5, 2, WITNESS)


@pytest.fixture(scope="session")
def lmds_code(witness_code):
    from vpec import cons_lmds

    return cons_lmds.build(witness_code, 2, 2)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
