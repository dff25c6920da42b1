import math

import pytest

from moebius_lab.core_mu import build_mu_recursive, build_mu_sieve, mertens_prefix

ACCEPTANCE_LINES: list[str] = []


def mu_bruteforce(n: int) -> int:
    """mu(n) straight from trial-division factorization."""
    if n == 1:
        return 1
    k = 0
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            k += 1
        p += 1
    if n > 1:
        k += 1
    return -1 if k % 2 else 1


def omega_bruteforce(n: int) -> int:
    return sum(1 for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, math.isqrt(p) + 1)))


@pytest.fixture(scope="session")
def sieve_1e6():
    return build_mu_sieve(10**6)


@pytest.fixture(scope="session")
def table_1e6():
    return build_mu_recursive(10**6)


@pytest.fixture(scope="session")
def mertens_1e6(sieve_1e6):
    return mertens_prefix(sieve_1e6[0])


@pytest.fixture
def acceptance_report():
    def record(number: int, name: str, ok: bool, detail: str = ""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {name}  {detail}".rstrip())

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
