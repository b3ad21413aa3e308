"""Twisted GL(2) L-values, root numbers and symmetric-square values."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import pi
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from .afe import afe_sides, afe_terms_needed, gl2_gamma, solve_root_number
from .arith import prime_factors, primes_up_to
from .characters import CharSpec, fundamental_discriminant, kronecker, spec_from_m
from .newforms import Newform, satake, twisted_conductor

ROOT_TOL = 1e-3


@dataclass(frozen=True)
class LValue:
    s: complex
    form: str
    twist: CharSpec
    value: complex
    cutoff: int
    error: float
    root_number: int
    conductor: int
    flagged: bool = False


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("MDSFORGE_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items: Sequence):
    """Order-preserving map using MDSFORGE_THREADS worker threads."""
    k = thread_count()
    if k == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, items))


def twisted_coefficients(f: Newform, spec: CharSpec, M: int) -> np.ndarray:
    """lambda_f(n) chi(n) for n = 1..M (array index n-1)."""
    lam = f.lam_upto(M)[1:]
    if spec.is_principal:
        return lam.copy()
    return lam * spec.values(np.arange(1, M + 1, dtype=np.int64))


def gamma_for(f: Newform, spec: CharSpec):
    C = twisted_conductor(f, spec)
    return gl2_gamma(C, f.weight), C


def _split_ramified(f: Newform, spec: CharSpec) -> tuple[int, CharSpec]:
    """Write chi = chi_{c*} chi' with c* supported on primes of N."""
    D = spec.discriminant
    c = 1
    for p in prime_factors(f.level):
        if D % p == 0:
            c *= p
    cstar = c if c % 4 == 1 else -c
    rest = spec_from_m(spec.m * cstar) if c > 1 else spec
    return c, rest


def root_number_numeric(f: Newform, spec: CharSpec, s0: float = 0.6) -> tuple[int, float]:
    """Root number from the X-independence of the AFE split; (eps, deviation)."""
    gd, _ = gamma_for(f, spec)
    eps, dev = solve_root_number(lambda n: twisted_coefficients(f, spec, n), s0, gd)
    if dev > ROOT_TOL:
        raise ArithmeticError(f"root number unresolved (deviation {dev:.3g})")
    return int(eps), dev


def base_root_number(f: Newform, c: int = 1) -> int:
    """Numeric root number of f twisted by chi_{c*}, c | rad(N); cached."""
    key = ("eps", c)
    if key not in f._cache:
        cstar = c if c % 4 == 1 else -c
        spec = CharSpec() if c == 1 else spec_from_m(cstar)
        f._cache[key] = root_number_numeric(f, spec)[0]
        if c == 1:
            f.epsilon = f._cache[key]
    return f._cache[key]


def root_number(f: Newform, spec: CharSpec, numeric: bool = False) -> int:
    """Root number of the twist.

    By default the ramified part is computed numerically once and the rest is
    transported by the twisting formula for characters coprime to the level.
    """
    if numeric:
        return root_number_numeric(f, spec)[0]
    c, rest = _split_ramified(f, spec)
    eps_c = base_root_number(f, c)
    if rest.is_principal:
        return eps_c
    cstar = c if c % 4 == 1 else -c
    base_cond = twisted_conductor(f, spec_from_m(cstar) if c > 1 else CharSpec())
    return eps_c * kronecker(rest.discriminant, -base_cond)


def L_twisted(s: complex, f: Newform, spec: CharSpec = CharSpec(), X: float = 1.0,
              tol: float = 1e-12, eps: int | None = None) -> LValue:
    """L(s, f x chi) by the approximate functional equation."""
    s = complex(s)
    gd, C = gamma_for(f, spec)
    eps = root_number(f, spec) if eps is None else eps
    n = afe_terms_needed(s, gd, X, tol)
    coeffs = twisted_coefficients(f, spec, n)
    S1, S2 = afe_sides(coeffs, s, gd, X)
    val = S1 + eps * S2
    # crude error: size of what the dropped range could add, relative to tol
    err = tol * max(1.0, abs(S1) + abs(S2))
    return LValue(s, f.source, spec, val, n, err, eps, C)


def L_direct(s: complex, f: Newform, spec: CharSpec, M: int) -> complex:
    """Plain partial sum, for Re(s) > 1 oracles."""
    coeffs = twisted_coefficients(f, spec, M)
    n = np.arange(1, M + 1, dtype=float)
    return complex(np.sum(coeffs * np.exp(-complex(s) * np.log(n))))


def completed_Lambda(s: complex, f: Newform, spec: CharSpec = CharSpec(), **kw) -> complex:
    """c^{s/2} pi^{-s} Gamma((s+k)/2) Gamma((s+k+1)/2) L(s), k = (l-1)/2."""
    s = complex(s)
    lv = L_twisted(s, f, spec, **kw)
    k = (f.weight - 1) / 2
    logg = (s / 2) * np.log(lv.conductor) - s * np.log(pi) + special.loggamma((s + k) / 2) + special.loggamma((s + k + 1) / 2)
    return complex(np.exp(logg) * lv.value)


def fe_residual(s: complex, f: Newform, spec: CharSpec = CharSpec()) -> float:
    """|Lambda(s) - eps Lambda(1 - s)| relative to |Lambda(s)| (absolute if tiny)."""
    eps = root_number(f, spec)
    a = completed_Lambda(s, f, spec, X=1.3)
    b = completed_Lambda(1 - complex(s), f, spec, X=0.7)
    return abs(a - eps * b) / max(1.0, abs(a))


def central_values(f: Newform, specs: Sequence[CharSpec]) -> list[LValue]:
    return parallel_map(lambda sp: L_twisted(0.5, f, sp), list(specs))


# symmetric square -------------------------------------------------------------

def _sym2_prime_power_coeffs(lam2: float, K: int) -> list[float]:
    c = [1.0, lam2 - 1.0]
    e = lam2 - 1.0
    for k in range(2, K + 1):
        prev3 = c[k - 3] if k >= 3 else 0.0
        c.append(e * (c[k - 1] - c[k - 2]) + prev3)
    return c


def sym2_coefficients(f: Newform, M: int, removed: Iterable[int] = ()) -> np.ndarray:
    """Dirichlet coefficients of L^{(2N)}(s, Sym^2 f) for n <= M (index n)."""
    f.ensure(M)
    lam = f.lam
    bad = set(prime_factors(2 * f.level)) | set(removed)
    c = np.ones(M + 1)
    c[0] = 0.0
    for p in primes_up_to(M):
        p = int(p)
        if p in bad:
            c[p::p] = 0.0
            continue
        K = 1
        while p ** (K + 1) <= M:
            K += 1
        ck = _sym2_prime_power_coeffs(float(lam[p]) ** 2, K)
        idx = np.arange(p, M + 1, p)
        fac = np.full(len(idx), ck[1])
        pk = p * p
        k = 2
        while pk <= M:
            fac[(idx % pk) == 0] = ck[k]
            pk *= p
            k += 1
        c[idx] *= fac
    return c


def sym2_L(f: Newform, x: float = 1.0, cutoff: int = 200_000, removed: Iterable[int] = ()) -> tuple[float, float]:
    """L^{(2N)}(x, Sym^2 f) for real x >= 1 by a Gaussian-damped coefficient sum.

    The damping exp(-(n/Y)^2) has Mellin transform Gamma(u/2)/2, so the
    truncation error is O(Y^{-3/2}) at x = 1.  Returns (value, error estimate)
    where the estimate compares the sums at Y and Y/2.
    """
    key = ("sym2c", cutoff, tuple(sorted(removed)))
    if key not in f._cache:
        f._cache[key] = sym2_coefficients(f, cutoff, removed)
    c = f._cache[key]
    n = np.arange(len(c), dtype=float)
    n[0] = 1.0
    base = c * n ** (-x)
    Y = cutoff / 6.0

    def smoothed(Y):
        return float(np.sum(base * np.exp(-((n / Y) ** 2))))

    v1 = smoothed(Y)
    v2 = smoothed(Y / 2)
    err = abs(v1 - v2) / (2 ** 1.5 - 1)
    return v1, err


def sym2_L1(f: Newform, cutoff: int = 200_000) -> tuple[float, float]:
    val, err = sym2_L(f, 1.0, cutoff)
    if not val > 0:
        raise ArithmeticError("symmetric-square evaluation failed")
    return val, err
