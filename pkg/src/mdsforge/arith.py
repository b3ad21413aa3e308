"""Small integer helpers: factorisation, sieves, squarefree splitting."""

from __future__ import annotations

from functools import lru_cache
from math import isqrt

import numpy as np


@lru_cache(maxsize=65536)
def factorint(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation of |n| as ((p, e), ...), increasing p."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    out = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    p = 5
    step = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += step
        step = 6 - step
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def prime_factors(n: int) -> list[int]:
    return [p for p, _ in factorint(n)]


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for _, e in factorint(n))


def is_cubefree(n: int) -> bool:
    return n != 0 and all(e <= 2 for _, e in factorint(n))


def rad(n: int) -> int:
    r = 1
    for p, _ in factorint(n):
        r *= p
    return r


def squarefree_split(n: int) -> tuple[int, int]:
    """n = n0 * n1**2 with n0 squarefree (sign kept on n0)."""
    if n == 0:
        raise ValueError("cannot split 0")
    n0, n1 = (1 if n > 0 else -1), 1
    for p, e in factorint(n):
        if e % 2:
            n0 *= p
        n1 *= p ** (e // 2)
    return n0, n1


def omega(n: int) -> int:
    return len(factorint(n))


def squarefree_divisors(n: int) -> list[int]:
    ds = [1]
    for p in prime_factors(n):
        ds += [d * p for d in ds]
    return sorted(ds)


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorint(n):
        ds = [d * p ** k for d in ds for k in range(e + 1)]
    return sorted(ds)


def is_prime(n: int) -> bool:
    return n >= 2 and factorint(n) == ((n, 1),)


@lru_cache(maxsize=8)
def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


@lru_cache(maxsize=4)
def smallest_prime_factor(n: int) -> np.ndarray:
    """spf[k] for 0 <= k <= n, with spf[0] = 0 and spf[1] = 1."""
    spf = np.zeros(n + 1, dtype=np.int64)
    spf[1] = 1
    for p in range(2, isqrt(n) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    idx = np.arange(n + 1, dtype=np.int64)
    zero = spf == 0
    zero[0] = False
    spf[zero] = idx[zero]
    return spf


def coprime_mask(M: int, modulus: int) -> np.ndarray:
    """Boolean array over 0..M marking integers coprime to ``modulus``."""
    mask = np.ones(M + 1, dtype=bool)
    mask[0] = False
    for p in prime_factors(modulus) if modulus > 1 else []:
        mask[::p] = False
    return mask


def squarefree_mask(M: int) -> np.ndarray:
    mask = np.ones(M + 1, dtype=bool)
    mask[0] = False
    for p in primes_up_to(isqrt(M) if M >= 4 else 1):
        mask[:: int(p) * int(p)] = False
    return mask
