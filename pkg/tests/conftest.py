import functools

import pytest

from ellsoule.analytic import make_lattice
from ellsoule.quadfield import make_field

FIELDS = (1, 2, 3, 7, 11, 19, 43, 67, 163)

# filled by test_acceptance; printed once at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@functools.lru_cache(maxsize=None)
def lattice(d: int, bits: int = 256):
    return make_lattice(make_field(d), bits)


@functools.lru_cache(maxsize=None)
def epsilon(m: tuple, strict: bool = True, alpha: str = "3+2w"):
    """Level-one element over Q(i), p = 5; shared by several test modules."""
    from ellsoule.characters import epsilon_m1a
    from ellsoule.quadfield import split_prime

    k = make_field(1)
    return epsilon_m1a(split_prime(k, 5), m, k.parse(alpha), strict=strict)


@pytest.fixture(params=FIELDS, ids=lambda d: f"d{d}")
def ctx(request):
    return make_field(request.param)


@pytest.fixture
def gauss():
    return make_field(1)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
