import pytest

from cubictwist.families import FAMILIES, make_family_field
from cubictwist.errors import CubicTwistError

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record the one-line verdict of an acceptance criterion."""

    def record(number, passed, detail):
        _ACCEPTANCE[number] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if passed else 'FAIL'}  {detail}")


def family_instances(lo=-40, hi=40, families=FAMILIES):
    """Every instance in the range whose integral basis gate passes."""
    out = []
    for fam in families:
        for n in range(lo, hi + 1):
            try:
                inst = make_family_field(fam, n)
            except CubicTwistError:
                continue
            if inst.integral_basis is not None:
                out.append(inst)
    return out


@pytest.fixture(scope="session")
def desk_instances():
    return family_instances()
