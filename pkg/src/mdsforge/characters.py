"""Real Dirichlet characters, Kronecker symbols, Gauss sums and Dirichlet L-values.

Every real primitive character is stored through its fundamental
discriminant ``D``; its value at ``n`` is the Kronecker symbol ``(D/n)``.
A character ``chi_{d0} chi_a chi_c`` has ``D`` equal to ``m`` or ``4m`` with
``m = a * c * d0``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, pi, sqrt
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from .afe import afe_terms_needed, afe_value, gl1_gamma
from .arith import factorint, is_cubefree, is_squarefree, prime_factors, rad, squarefree_divisors

A_VALUES = (1, -1, 2, -2)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("Jacobi symbol needs odd positive n")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n) for all integers, not both zero."""
    d, n = int(d), int(n)
    if n == 0:
        if d == 0:
            raise ValueError("kronecker(0, 0) is undefined")
        return 1 if abs(d) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if d < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if d % 2 == 0:
            return 0
        if v % 2 and d % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * jacobi(d, n)


def jacobi_vec(a, n: np.ndarray) -> np.ndarray:
    """Vectorised Jacobi symbol (a/n) for arrays of odd positive n."""
    n = np.array(n, dtype=np.int64, copy=True)
    a = np.broadcast_to(np.asarray(a, dtype=np.int64), n.shape) % n
    a = np.array(a, copy=True)
    res = np.ones(n.shape, dtype=np.int8)
    active = a != 0
    while np.any(active):
        while True:
            ev = active & (a % 2 == 0)
            if not np.any(ev):
                break
            a[ev] //= 2
            flip = ev & ((n % 8 == 3) | (n % 8 == 5))
            res[flip] = -res[flip]
        idx = active
        flip = idx & (a % 4 == 3) & (n % 4 == 3)
        res[flip] = -res[flip]
        a_new = np.where(idx, n % np.where(a == 0, 1, a), a)
        n = np.where(idx, a, n)
        a = a_new
        active = a != 0
    return np.where(n == 1, res, 0).astype(np.int8)


def kronecker_vec(D: int, n: np.ndarray) -> np.ndarray:
    """Vectorised Kronecker symbol (D/n) for positive integer arrays n."""
    n = np.asarray(n, dtype=np.int64)
    v2 = np.zeros(n.shape, dtype=np.int64)
    odd = n.copy()
    while True:
        ev = odd % 2 == 0
        if not np.any(ev):
            break
        odd[ev] //= 2
        v2[ev] += 1
    out = jacobi_vec(D, odd).astype(np.int8)
    if D % 2 == 0:
        out[v2 > 0] = 0
    else:
        k2 = -1 if D % 8 in (3, 5) else 1
        if k2 == -1:
            out[v2 % 2 == 1] *= -1
    return out


def fundamental_discriminant(m: int) -> int:
    """Discriminant of the quadratic character attached to squarefree m."""
    if m == 1:
        return 1
    if not is_squarefree(m):
        raise ValueError("squarefree argument required")
    return m if m % 4 == 1 else 4 * m


@dataclass(frozen=True)
class CharSpec:
    """The real character chi_{d0} chi_a chi_c."""

    d0: int = 1
    a: int = 1
    c: int = 1

    def __post_init__(self):
        if self.a not in A_VALUES:
            raise ValueError("a must be one of 1, -1, 2, -2")
        if self.d0 == 0 or self.d0 % 2 == 0 or not is_squarefree(self.d0):
            raise ValueError("d0 must be odd and squarefree")
        if self.c <= 0 or self.c % 2 == 0 or not is_squarefree(self.c):
            raise ValueError("c must be positive, odd and squarefree")
        if gcd(self.c, self.d0) != 1:
            raise ValueError("c and d0 must be coprime")

    @property
    def m(self) -> int:
        return self.a * self.c * self.d0

    @property
    def discriminant(self) -> int:
        return fundamental_discriminant(self.m)

    @property
    def conductor(self) -> int:
        return abs(self.discriminant)

    @property
    def parity(self) -> int:
        """0 for even characters, 1 for odd ones."""
        return 0 if self.discriminant > 0 else 1

    @property
    def is_principal(self) -> bool:
        return self.discriminant == 1

    def __call__(self, n: int) -> int:
        return kronecker(self.discriminant, n)

    def values(self, n: np.ndarray) -> np.ndarray:
        return kronecker_vec(self.discriminant, n)

    def times(self, other: "CharSpec") -> "CharSpec":
        """Primitive character inducing the product (for coprime supports)."""
        return spec_from_m(self.m * other.m)

    def label(self) -> str:
        return f"d0={self.d0},a={self.a},c={self.c}"


def spec_from_m(m: int) -> CharSpec:
    """CharSpec whose quadratic field is Q(sqrt(m)) with c collected into d0."""
    if m == 0:
        raise ValueError("m must be nonzero")
    sign = -1 if m < 0 else 1
    m = abs(m)
    two = 0
    while m % 2 == 0:
        m //= 2
        two += 1
    m0 = 1
    for p, e in factorint(m) if m > 1 else ():
        if e % 2:
            m0 *= p
    a = 2 if two % 2 else 1
    return CharSpec(d0=sign * m0, a=a)


def chi_eval(spec: CharSpec, n: int) -> int:
    return spec(n)


def chi_tilde(n: int) -> CharSpec:
    """The character d -> (d/n) for odd positive squarefree n."""
    if n <= 0 or n % 2 == 0 or not is_squarefree(n):
        raise ValueError("odd positive squarefree n required")
    return CharSpec(d0=n if n % 4 == 1 else -n)


def chi_d(d: int) -> CharSpec:
    """n -> (d/n) for odd positive d, as the primitive character of d0."""
    if d <= 0 or d % 2 == 0:
        raise ValueError("odd positive d required")
    d0 = 1
    for p, e in factorint(d) if d > 1 else ():
        if e % 2:
            d0 *= p
    return CharSpec(d0=d0)


def check_level(N: int) -> None:
    if N <= 0 or N % 2 == 0:
        raise ValueError("unsupported level: even")
    if not is_cubefree(N):
        raise ValueError("unsupported level: not cubefree")


def div_set(N: int) -> list[tuple[int, int]]:
    """All (a, c) with a in (1, -1, 2, -2) and c | rad(N), a-major order."""
    check_level(N)
    return [(a, c) for a in A_VALUES for c in squarefree_divisors(rad(N))]


def ac_spec(ac: tuple[int, int], d0: int = 1) -> CharSpec:
    a, c = ac
    return CharSpec(d0=d0, a=a, c=c)


def conductor(spec: CharSpec) -> tuple[int, int]:
    Q = spec.conductor
    return Q, gcd(Q, 8)


def gauss_sum(spec: CharSpec, modulus: int | None = None) -> complex:
    """Normalised Gauss sum Q^{-1/2} sum_x chi(x) e(x/Q)."""
    Q = spec.conductor
    if modulus is not None and modulus != Q:
        raise ValueError("primitivity required")
    x = np.arange(Q, dtype=np.int64)
    vals = spec.values(np.maximum(x, 1)).astype(float)
    vals[0] = 1.0 if Q == 1 else 0.0
    return complex(np.sum(vals * np.exp(2j * np.pi * x / Q)) / np.sqrt(Q))


# Dirichlet L-functions ------------------------------------------------------

@dataclass(frozen=True)
class DirichletLValue:
    w: complex
    character: CharSpec
    value: complex
    method: str
    error: float


_EM_TERMS = 14
_BERN = [special.bernoulli(2 * _EM_TERMS)[2 * j] for j in range(1, _EM_TERMS + 1)]
_FACT = [float(special.factorial(2 * j)) for j in range(1, _EM_TERMS + 1)]


def _hurwitz_tail(w: complex, b: np.ndarray, principal: bool) -> np.ndarray:
    """sum_{k>=0} (k + b)^-w by Euler-Maclaurin, b >= ~|w| + 20.

    For non-principal sums the pole term is replaced by a regular function
    whose weighted sum is unchanged, because sum chi = 0.
    """
    logb = np.log(b)
    bw = np.exp(-w * logb)
    if principal:
        first = b * bw / (w - 1)
    elif abs(w - 1) < 1e-12:
        first = -logb
    else:
        first = np.expm1((1 - w) * logb) / (w - 1)
    total = first + 0.5 * bw
    rising = w
    power = bw / b
    for j in range(1, _EM_TERMS + 1):
        total = total + _BERN[j - 1] / _FACT[j - 1] * rising * power
        rising = rising * (w + 2 * j - 1) * (w + 2 * j)
        power = power / (b * b)
    return total


def _em_L(w: complex, spec: CharSpec) -> tuple[complex, float]:
    """Euler-Maclaurin evaluation valid for every w except the pole."""
    Q = spec.conductor
    K = int(abs(w)) + 24
    n = np.arange(1, K * Q + 1, dtype=np.int64)
    chi = spec.values(n).astype(float)
    head = np.sum(chi * np.exp(-w * np.log(n.astype(float))))
    r = np.arange(1, Q + 1, dtype=np.int64)
    chir = spec.values(r).astype(float)
    b = K + r / Q
    tail = np.sum(chir * _hurwitz_tail(w, b, spec.is_principal)) * Q ** (-w)
    err = abs(Q ** (-w)) * Q * (abs(w) + 2 * _EM_TERMS + 2) ** (2 * _EM_TERMS + 1) / (2 * pi * K) ** (2 * _EM_TERMS + 1) * K ** (-w.real)
    return complex(head + tail), float(err)


def fe_factor(w: complex, spec: CharSpec) -> complex:
    """L(w) / L(1-w) for a real primitive character."""
    Q = spec.conductor
    a = spec.parity
    logf = (0.5 - w) * np.log(Q / pi) + special.loggamma((1 - w + a) / 2) - special.loggamma((w + a) / 2)
    g = gauss_sum(spec) / (1j ** a)
    return complex(g * np.exp(logf))


def dirichlet_L(
    w: complex,
    spec: CharSpec,
    method: str = "auto",
    removed: Iterable[int] = (),
    tol: float = 1e-9,
) -> DirichletLValue:
    """L(w, chi) for real primitive chi, optionally without Euler factors at ``removed``."""
    w = complex(w)
    if spec.is_principal and abs(w - 1) < 1e-15:
        raise ValueError("pole at w=1")
    Q = spec.conductor
    if method == "auto":
        if Q > 400:
            method = "afe"
        else:
            method = "em" if w.real >= 0.5 else "reflected"
    if method == "em":
        val, err = _em_L(w, spec)
    elif method == "reflected":
        other, err = _em_L(1 - w, spec)
        f = fe_factor(w, spec)
        val, err = f * other, err * abs(f)
    elif method == "direct":
        if w.real <= 1.05:
            raise ArithmeticError("precision failure: direct summation needs Re(w) > 1")
        M = int(min(5e7, (tol * (w.real - 1)) ** (-1 / (w.real - 1)) + 10))
        val, err = _direct_sum(w, spec, M)
    elif method == "afe":
        if spec.is_principal:
            val, err = _em_L(w, spec)
        else:
            gd = gl1_gamma(Q, spec.parity)
            n = afe_terms_needed(w, gd, tol=tol * 1e-3)
            coeffs = spec.values(np.arange(1, n + 1)).astype(float)
            val, err = afe_value(coeffs, w, gd, 1.0), tol * 1e-3
    else:
        raise ValueError(f"unknown method {method}")
    for p in removed:
        val *= 1 - spec(p) * p ** (-w)
    return DirichletLValue(w, spec, complex(val), method, float(err))


def _direct_sum(w: complex, spec: CharSpec, M: int) -> tuple[complex, float]:
    n = np.arange(1, M + 1, dtype=np.int64)
    chi = spec.values(n).astype(float)
    val = np.sum(chi * np.exp(-w * np.log(n.astype(float))))
    err = M ** (1 - w.real) / (w.real - 1)
    return complex(val), float(err)


def dirichlet_fe_residual(w: complex, spec: CharSpec) -> float:
    """|L(w) - factor * L(1-w)| with both sides by Euler-Maclaurin."""
    lw = _em_L(complex(w), spec)[0]
    l1 = _em_L(1 - complex(w), spec)[0]
    return abs(lw - fe_factor(complex(w), spec) * l1)


def primitive_specs_up_to(Qmax: int) -> list[CharSpec]:
    """All real primitive characters with conductor <= Qmax, by discriminant."""
    out = []
    for D in range(-4 * Qmax, 4 * Qmax + 1):
        if abs(D) > Qmax or D == 0:
            continue
        if _is_fundamental(D):
            out.append(spec_from_m(D if D % 4 == 1 else D // 4))
    return sorted(out, key=lambda s: (s.conductor, s.discriminant))


def _is_fundamental(D: int) -> bool:
    if D == 1:
        return True
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False
