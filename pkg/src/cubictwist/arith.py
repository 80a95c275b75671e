"""Integer helpers: trial-division factorisation and squarefree tests."""

from enum import Enum
from math import isqrt

TRIAL_DIVISION_BOUND = 10**6


class Tri(Enum):
    """Three-valued outcome for tests that may be undecided."""

    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __bool__(self):
        return self is Tri.TRUE

    @classmethod
    def of(cls, flag):
        return cls.TRUE if flag else cls.FALSE

    def and_(self, other):
        if self is Tri.FALSE or other is Tri.FALSE:
            return Tri.FALSE
        if self is Tri.UNKNOWN or other is Tri.UNKNOWN:
            return Tri.UNKNOWN
        return Tri.TRUE


def factorize(n, bound=None):
    """Factor ``|n|`` by trial division.

    Returns ``(factors, cofactor)`` where ``factors`` maps primes to exponents
    and ``cofactor`` is the unfactored remainder (1 when fully factored).  The
    cofactor is only non-trivial when ``bound`` is given and exceeded.
    """
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    factors = {}
    p = 2
    while p * p <= n:
        if bound is not None and p > bound:
            return factors, n
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors, 1


def is_prime(n):
    if n < 2:
        return False
    f, _ = factorize(n)
    return f == {n: 1}


def squarefree(n, bound=TRIAL_DIVISION_BOUND):
    """Squarefree test by trial division up to ``bound``.

    An unfactored cofactor that is larger than ``bound**2`` may hide a
    square, so the answer is then ``Tri.UNKNOWN`` unless a square factor
    was already found.
    """
    n = abs(int(n))
    if n == 0:
        return Tri.FALSE
    factors, cof = factorize(n, bound)
    if any(e > 1 for e in factors.values()):
        return Tri.FALSE
    if cof == 1:
        return Tri.TRUE
    r = isqrt(cof)
    if r * r == cof:
        return Tri.FALSE
    # every prime <= bound has been divided out, so a cofactor below bound**2 is prime
    if cof <= bound * bound:
        return Tri.TRUE
    return Tri.UNKNOWN


def divides_power(d, n, t):
    """True iff ``d`` divides ``n**t``."""
    return (n ** t) % d == 0 if d else False
