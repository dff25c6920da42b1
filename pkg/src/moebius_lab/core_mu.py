"""Moebius function tables.

Three independent routes to mu(n):

* ``build_mu_recursive`` -- the divisor recursion
  ``mu(n) = -sum(mu(k) for k | n, k < n)`` evaluated as a forward sweep
  over multiples, so no factorization is ever performed;
* ``build_mu_sieve`` -- an Eratosthenes-based factor sieve that reads mu
  off the factorization and also yields omega(n), the number of distinct
  prime factors;
* ``mu_root_of_unity`` -- the sum of the primitive n-th roots of unity,
  usable for small n only.

All tables are 1-based: ``values[n]`` is mu(n) and ``values[0]`` is an
unused zero pad, the same convention as a classic ``is_prime`` array.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InvalidArgument, NumericalFailure, ResourceError

ROOT_OF_UNITY_BOUND = 10_000
ROOT_OF_UNITY_TOL = 1e-6
THREADS_ENV = "MOEBIUS_LAB_THREADS"

_SIEVE_SEGMENT = 1 << 18


class Provenance(enum.Enum):
    RECURSIVE = "recursive"
    SIEVE = "sieve"
    LOADED = "loaded"


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class MuTable:
    """mu(1..n_max) stored one signed byte per entry."""

    n_max: int
    values: np.ndarray
    provenance: Provenance = Provenance.LOADED

    def __post_init__(self):
        if self.values.dtype != np.int8 or self.values.shape != (self.n_max + 1,):
            raise InvalidArgument(
                f"values must be int8 of length n_max+1={self.n_max + 1}, "
                f"got {self.values.dtype} {self.values.shape}"
            )
        _readonly(self.values)

    @classmethod
    def from_values(cls, seq: Iterable[int], provenance: Provenance = Provenance.LOADED) -> MuTable:
        """Wrap mu(1), mu(2), ... given in order (no leading pad)."""
        body = np.asarray(list(seq) if not isinstance(seq, np.ndarray) else seq)
        if body.ndim != 1 or body.size == 0:
            raise InvalidArgument("need a nonempty 1-d sequence of values")
        values = np.zeros(body.size + 1, dtype=np.int8)
        values[1:] = body
        return cls(int(body.size), values, provenance)

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.n_max:
            raise IndexError(f"index {n} outside 1..{self.n_max}")
        return int(self.values[n])

    def __len__(self) -> int:
        return self.n_max

    def body(self) -> np.ndarray:
        """mu(1..n_max) as a 0-based view."""
        return self.values[1:]

    def first_invalid_index(self) -> int | None:
        """Smallest n whose stored value is not a trit, or None."""
        bad = np.flatnonzero(np.abs(self.values[1:].astype(np.int16)) > 1)
        return int(bad[0]) + 1 if bad.size else None


@dataclass(frozen=True)
class OmegaTable:
    n_max: int
    omega: np.ndarray  # omega[n] = number of distinct primes dividing n; omega[0] unused
    squarefree: np.ndarray  # bool, squarefree[n]; squarefree[0] unused (False)

    def __post_init__(self):
        _readonly(self.omega)
        _readonly(self.squarefree)


@dataclass(frozen=True)
class MertensSeries:
    n_max: int
    m: np.ndarray  # m[n] = M(n) as int64; m[0] = 0

    def __post_init__(self):
        _readonly(self.m)

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.n_max:
            raise IndexError(f"index {n} outside 1..{self.n_max}")
        return int(self.m[n])


def _check_n_max(n_max) -> int:
    if isinstance(n_max, bool) or int(n_max) != n_max:
        raise InvalidArgument(f"n_max must be an integer, got {n_max!r}")
    n_max = int(n_max)
    if n_max < 1:
        raise InvalidArgument(f"n_max must be >= 1, got {n_max}")
    return n_max


def _alloc(n: int, dtype, what: str) -> np.ndarray:
    try:
        return np.zeros(n, dtype=dtype)
    except (MemoryError, ValueError):
        raise ResourceError(n * np.dtype(dtype).itemsize, what) from None


def build_mu_recursive(n_max: int) -> MuTable:
    """Compute mu(1..n_max) from the divisor recursion alone.

    Every k pushes ``-mu(k)`` into an accumulator at each proper multiple
    of k; once all proper divisors of n have been pushed, the accumulator
    at n *is* mu(n).  Small k (up to sqrt(n_max)) are pushed one strided
    slice per k.  Past sqrt(n_max) the remaining k are handled in doubling
    blocks ``(a, 2a+1]``: every proper divisor of a number in that block
    is at most a, so the whole block is final at once, and its pushes are
    issued one slice per multiplier j instead of per k.  Same additions,
    O(sqrt(n_max)) array operations, O(n_max log n_max) element work.
    """
    n_max = _check_n_max(n_max)
    mu = _alloc(n_max + 1, np.int8, "mu table")
    # partial divisor sums can exceed the int8 range before they settle
    acc = _alloc(n_max + 1, np.int32, "divisor accumulator")

    acc[1] = 1
    root = math.isqrt(n_max)
    for k in range(1, root + 1):
        v = acc[k]
        mu[k] = v
        if v:
            acc[2 * k :: k] -= v

    a = root
    while a < n_max:
        b = min(2 * a + 1, n_max)
        mu[a + 1 : b + 1] = acc[a + 1 : b + 1]
        block = mu[a + 1 : b + 1]
        for j in range(2, n_max // (a + 1) + 1):
            top = min(b, n_max // j)
            acc[j * (a + 1) : j * top + 1 : j] -= block[: top - a]
        a = b

    del acc
    return MuTable(n_max, mu, Provenance.RECURSIVE)


def proper_divisors(n: int) -> list[int]:
    """Divisors k of n with k < n, by trial division up to sqrt(n)."""
    small, large = [], []
    for k in range(1, math.isqrt(n) + 1):
        if n % k == 0 and k < n:
            small.append(k)
            q = n // k
            if q != k and q != n:
                large.append(q)
    return small + large[::-1]


def mu_recursive_naive(n: int, prefix: MuTable) -> int:
    """One step of the recursion: -sum of prefix[k] over proper divisors k of n."""
    if n < 2:
        raise InvalidArgument(f"n must be >= 2, got {n}")
    if prefix.n_max < n - 1:
        raise InvalidArgument(f"prefix holds {prefix.n_max} values, need {n - 1}")
    return -sum(int(prefix.values[k]) for k in proper_divisors(n))


def small_primes(limit: int) -> np.ndarray:
    """Primes <= limit, plain sieve of Eratosthenes."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime)


def _sieve_segment(lo: int, hi: int, primes: np.ndarray):
    """mu and omega for lo <= n < hi, given all primes up to sqrt(hi - 1)."""
    size = hi - lo
    rem = np.arange(lo, hi, dtype=np.int64)
    omega = np.zeros(size, dtype=np.int8)
    squarefree = np.ones(size, dtype=bool)
    for p in primes.tolist():
        if p * p > hi - 1:
            break
        omega[(-lo) % p :: p] += 1
        pk = p
        while pk < hi:
            rem[(-lo) % pk :: pk] //= p
            pk *= p
        if p * p < hi:
            squarefree[(-lo) % (p * p) :: p * p] = False
    # all primes <= sqrt(n) are divided out, so a cofactor > 1 is one more prime
    omega += rem > 1
    mu = np.where(squarefree, 1 - 2 * (omega & 1), 0).astype(np.int8)
    return mu, omega, squarefree


def _worker_count(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(THREADS_ENV, "0") or 0)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def build_mu_sieve(n_max: int, workers: int | None = None) -> tuple[MuTable, OmegaTable]:
    """Factor-sieve oracle for mu and omega.

    mu(n) is 0 when some p*p divides n and (-1)**omega(n) otherwise.
    Segments are independent and may run on a thread pool; the output does
    not depend on the worker count.
    """
    n_max = _check_n_max(n_max)
    mu = _alloc(n_max + 1, np.int8, "mu table")
    omega = _alloc(n_max + 1, np.int8, "omega table")
    squarefree = _alloc(n_max + 1, bool, "squarefree mask")
    primes = small_primes(math.isqrt(n_max))
    bounds = [(lo, min(lo + _SIEVE_SEGMENT, n_max + 1)) for lo in range(1, n_max + 1, _SIEVE_SEGMENT)]

    def run(bound):
        lo, hi = bound
        mu[lo:hi], omega[lo:hi], squarefree[lo:hi] = _sieve_segment(lo, hi, primes)

    nworkers = min(_worker_count(workers), len(bounds))
    if nworkers > 1:
        with ThreadPoolExecutor(nworkers) as pool:
            list(pool.map(run, bounds))
    else:
        for bound in bounds:
            run(bound)
    return MuTable(n_max, mu, Provenance.SIEVE), OmegaTable(n_max, omega, squarefree)


def root_of_unity_sum(n: int, bound: int = ROOT_OF_UNITY_BOUND) -> complex:
    """Sum of exp(2 pi i k / n) over 1 <= k <= n with gcd(k, n) = 1."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgument(f"n must be a positive integer, got {n!r}")
    if n > bound:
        raise InvalidArgument(f"n={n} exceeds the roots-of-unity bound {bound}")
    k = np.arange(1, n + 1)
    k = k[np.gcd(k, n) == 1]
    theta = 2.0 * np.pi * k / n
    return complex(math.fsum(np.cos(theta)), math.fsum(np.sin(theta)))


def mu_root_of_unity(n: int, bound: int = ROOT_OF_UNITY_BOUND, tol: float = ROOT_OF_UNITY_TOL) -> int:
    z = root_of_unity_sum(n, bound)
    r = round(z.real)
    if abs(z.imag) >= tol or abs(z.real - r) >= tol or r not in (-1, 0, 1):
        raise NumericalFailure(f"roots-of-unity sum for n={n} is {z!r}, not within {tol} of a trit")
    return int(r)


def mertens_prefix(table: MuTable) -> MertensSeries:
    m = np.cumsum(table.values, dtype=np.int64)
    return MertensSeries(table.n_max, m)


def running_mean(series: MertensSeries) -> np.ndarray:
    """M(n)/n for n = 1..n_max (0-based result: element i is n = i + 1)."""
    n = np.arange(1, series.n_max + 1, dtype=np.float64)
    return series.m[1:] / n
