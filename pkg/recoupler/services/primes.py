"""
Sieve of Eratosthenes shared by the registry and the prime-counting analysis.
"""

from functools import lru_cache

import numpy as np

from recoupler.core.exceptions import SieveBoundError


class PrimeSieve:
    """Primality table and cumulative prime counts for 0..limit."""

    def __init__(self, limit: int):
        if limit < 2:
            raise ValueError(f"Sieve limit must be at least 2, got {limit}")
        self.limit = limit

        is_prime = np.ones(limit + 1, dtype=bool)
        is_prime[:2] = False
        for p in range(2, int(np.sqrt(limit)) + 1):
            if is_prime[p]:
                is_prime[p * p::p] = False
        is_prime.setflags(write=False)

        self.is_prime = is_prime
        self.primes = np.nonzero(is_prime)[0]
        self.pi_table = np.cumsum(is_prime, dtype=np.int32)

    def _check(self, x: int) -> None:
        if x > self.limit:
            raise SieveBoundError(x, self.limit)

    def pi(self, x: int) -> int:
        """Number of primes p <= x."""
        if x < 2:
            return 0
        self._check(x)
        return int(self.pi_table[x])

    def primes_between(self, low: int, high: int) -> np.ndarray:
        """Primes p with low < p <= high."""
        if high <= low:
            return self.primes[:0]
        self._check(high)
        start = np.searchsorted(self.primes, low, side="right")
        stop = np.searchsorted(self.primes, high, side="right")
        return self.primes[start:stop]


@lru_cache(maxsize=4)
def get_sieve(limit: int) -> PrimeSieve:
    """Cached sieve; limits are shared so repeated queries reuse one table."""
    return PrimeSieve(limit)
