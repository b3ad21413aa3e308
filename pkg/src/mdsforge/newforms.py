"""Hecke eigenform data: eta-product newforms, CSV ingestion, Satake parameters."""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from math import gcd
from pathlib import Path
from typing import Optional

import numpy as np

from .arith import factorint, is_prime, prime_factors, primes_up_to
from .characters import CharSpec, check_level

DEFAULT_LENGTH = 200_000

BUILTIN = {
    # tag: (level, weight, eta exponents {modulus: power})
    "level11w2": (11, 2, {1: 2, 11: 2}),
    "level9w4": (9, 4, {3: 8}),
}


def _euler_series(M: int, step: int) -> np.ndarray:
    """Coefficients of prod_{n>=1} (1 - q^{step n}) up to q^M (pentagonal theorem)."""
    out = np.zeros(M + 1, dtype=np.int64)
    k = 0
    while True:
        for kk in ((k,) if k == 0 else (k, -k)):
            e = step * kk * (3 * kk - 1) // 2
            if e <= M:
                out[e] += -1 if kk % 2 else 1
        if step * k * (3 * k - 1) // 2 > M and step * k * (3 * k + 1) // 2 > M:
            break
        k += 1
    return out


def _mul_sparse(dense: np.ndarray, sparse: np.ndarray) -> np.ndarray:
    """Truncated product of a dense series with a sparse one."""
    M = len(dense) - 1
    out = np.zeros_like(dense)
    for e in np.nonzero(sparse)[0]:
        c = sparse[e]
        out[e:] += c * dense[: M + 1 - e]
    return out


def eta_product_coefficients(exponents: dict[int, int], M: int) -> np.ndarray:
    """a(n) for n = 0..M of q^{sum m r / 24} prod_m eta-free part prod (1 - q^{m n})^{r_m}.

    The leading power of q is taken to be 1, so index n holds a(n).
    """
    shift = sum(m * r for m, r in exponents.items())
    if shift % 24:
        raise ValueError("eta quotient must have an integral leading exponent")
    lead = shift // 24
    L = M - lead
    series = np.zeros(L + 1, dtype=np.int64)
    series[0] = 1
    for m, r in sorted(exponents.items()):
        e = _euler_series(L, m)
        for _ in range(r):
            series = _mul_sparse(series, e)
    out = np.zeros(M + 1, dtype=np.int64)
    out[lead:] = series
    return out


def eta_product_by_modulus(exponents: dict[int, int], M: int) -> np.ndarray:
    """Independent expansion: multiply the factors (1 - q^k) one modulus at a time."""
    shift = sum(m * r for m, r in exponents.items())
    lead = shift // 24
    L = M - lead
    series = np.zeros(L + 1, dtype=np.int64)
    series[0] = 1
    for k in range(1, L + 1):
        for m, r in exponents.items():
            if k % m == 0:
                for _ in range(r):
                    series[k:] = series[k:] - series[: L + 1 - k].copy()
    out = np.zeros(M + 1, dtype=np.int64)
    out[lead:] = series
    return out


@dataclass(frozen=True)
class SatakeData:
    p: int
    kind: str  # "unramified" | "special" | "supercuspidal"
    alpha: Optional[complex] = None
    beta: Optional[complex] = None

    def local_factor_inverse(self, x: complex) -> complex:
        """1 / L_p at p^{-s} = x."""
        if self.kind == "unramified":
            return (1 - self.alpha * x) * (1 - self.beta * x)
        if self.kind == "special":
            return 1 - self.alpha * x
        return 1.0


@dataclass
class Newform:
    level: int
    weight: int
    coeffs: np.ndarray  # a(n), index n, a(0) = 0
    source: str = "external"
    epsilon: Optional[int] = None
    twist_minimal_assumed: bool = True
    _eta: Optional[dict] = field(default=None, repr=False)
    _lam: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        check_level(self.level)
        if self.weight <= 0 or self.weight % 2:
            raise ValueError("weight must be even and positive")
        if len(self.coeffs) < 2 or self.coeffs[1] != 1:
            raise ValueError("a(1) must be 1")
        self._cache: dict = {}

    @property
    def M(self) -> int:
        return len(self.coeffs) - 1

    @property
    def N0(self) -> int:
        return int(np.prod([p for p, e in factorint(self.level) if e == 1] or [1]))

    @property
    def N1(self) -> int:
        return int(np.prod([p for p, e in factorint(self.level) if e == 2] or [1]))

    @property
    def tag(self) -> str:
        return self.source

    def ensure(self, M: int) -> None:
        """Make sure a(n) is known for n <= M, extending eta forms on demand."""
        if M <= self.M:
            return
        if self._eta is None:
            raise ValueError(f"insufficient coefficients: need {M}, table has {self.M}")
        target = max(M, int(self.M * 1.5))
        self.coeffs = eta_product_coefficients(self._eta, target)
        self._lam = None
        self._cache.clear()

    @property
    def lam(self) -> np.ndarray:
        """lambda_f(n) = a(n) / n^{(l-1)/2} as floats, index n."""
        if self._lam is None:
            n = np.arange(len(self.coeffs), dtype=float)
            n[0] = 1.0
            self._lam = self.coeffs.astype(float) / n ** ((self.weight - 1) / 2)
            self._lam[0] = 0.0
        return self._lam

    def lam_upto(self, M: int) -> np.ndarray:
        self.ensure(M)
        return self.lam[: M + 1]

    def lam_p(self, p: int) -> float:
        self.ensure(p)
        return float(self.lam[p])


def eta_form(tag: str, M: int = DEFAULT_LENGTH) -> Newform:
    if tag not in BUILTIN:
        raise ValueError(f"unknown built-in form {tag!r}; choose from {sorted(BUILTIN)}")
    level, weight, exps = BUILTIN[tag]
    f = Newform(level, weight, eta_product_coefficients(exps, M), source=tag)
    f._eta = dict(exps)
    return f


_BUILTIN_CACHE: dict[str, Newform] = {}


def builtin_form(tag: str) -> Newform:
    """Shared instance of a built-in form (coefficients extended in place)."""
    if tag not in _BUILTIN_CACHE:
        _BUILTIN_CACHE[tag] = eta_form(tag, 20_000)
    return _BUILTIN_CACHE[tag]


def resolve_form(spec: str) -> Newform:
    """Built-in tag or path to a coefficient CSV."""
    if spec in BUILTIN:
        return builtin_form(spec)
    return load_coefficients(spec)


def load_coefficients(path: str | Path) -> Newform:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError("malformed file: missing header line")
    header = {}
    for tok in lines[0][1:].split():
        if "=" not in tok:
            raise ValueError(f"malformed header token {tok!r}")
        k, v = tok.split("=", 1)
        header[k.strip()] = int(v)
    try:
        level, weight, count = header["level"], header["weight"], header["count"]
    except KeyError as exc:
        raise ValueError(f"malformed header: missing {exc.args[0]}") from None
    check_level(level)
    coeffs = np.zeros(count + 1, dtype=np.int64)
    expected = 1
    for ln, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"malformed line {ln}: {line!r}")
        n, a = int(parts[0]), int(parts[1])
        if n != expected:
            raise ValueError(f"malformed file: expected n={expected} at line {ln}, got {n}")
        if n > count:
            raise ValueError("malformed file: more rows than count")
        coeffs[n] = a
        expected += 1
    if expected - 1 != count:
        raise ValueError(f"malformed file: {expected - 1} rows but count={count}")
    f = Newform(level, weight, coeffs, source=str(path))
    report = validate(f)
    if not report["pass"]:
        raise ValueError("validation failure: " + "; ".join(report["violations"][:5]))
    return f


def save_coefficients(f: Newform, path: str | Path, count: Optional[int] = None) -> None:
    count = f.M if count is None else count
    f.ensure(count)
    rows = [f"# level={f.level} weight={f.weight} count={count}"]
    rows += [f"{n},{int(f.coeffs[n])}" for n in range(1, count + 1)]
    Path(path).write_text("\n".join(rows) + "\n")


def _num_divisors(M: int) -> np.ndarray:
    d = np.zeros(M + 1, dtype=np.int64)
    for k in range(1, M + 1):
        d[k::k] += 1
    return d


def validate(f: Newform, n_max: Optional[int] = None) -> dict:
    """Hecke relations, multiplicativity, divisor bound and ramified constraints."""
    M = min(f.M, n_max or f.M)
    a = [int(x) for x in f.coeffs[: M + 1]]
    k1 = f.weight - 1
    violations: list[str] = []
    if a[1] != 1:
        violations.append("a(1) must be 1")
    # multiplicativity on coprime prime-power products
    for m in range(2, min(M, 1000) + 1):
        fac = factorint(m)
        if len(fac) < 2:
            continue
        p, e = fac[0]
        u = p ** e
        v = m // u
        if a[m] != a[u] * a[v]:
            violations.append(f"multiplicativity: a({m}) != a({u})a({v})")
    for p in primes_up_to(M):
        p = int(p)
        if f.level % p:
            pk, prev, cur, k = p, 1, a[p], 1
            while pk * p <= M:
                nxt = a[pk * p]
                if cur * a[p] != nxt + p ** k1 * prev:
                    violations.append(f"hecke recursion at p={p}, k={k}")
                    break
                prev, cur, pk, k = cur, nxt, pk * p, k + 1
        else:
            if (f.level // p) % p:  # special
                if a[p] ** 2 != p ** (k1 - 1):
                    violations.append(f"ramified: lambda({p})^2 != 1/{p}")
            elif a[p] != 0:
                violations.append(f"ramified: lambda({p}) != 0")
            pk = p
            while pk * p <= M:
                if a[pk * p] != a[pk] * a[p]:
                    violations.append(f"ramified power relation at p={p}")
                    break
                pk *= p
    lam = f.lam[: M + 1]
    dn = _num_divisors(M)
    bad = np.nonzero(np.abs(lam[1:]) > dn[1:] * (1 + 1e-12))[0]
    for i in bad[:10]:
        violations.append(f"divisor bound: |lambda({i + 1})| > d({i + 1})")
    return {"n_max": M, "violations": violations, "pass": not violations}


def satake(f: Newform, p: int) -> SatakeData:
    if not is_prime(p):
        raise ValueError("p must be prime")
    if p > f.M:
        f.ensure(p)
    lam = float(f.lam[p])
    if f.level % p == 0:
        if (f.level // p) % p == 0:
            return SatakeData(p, "supercuspidal")
        return SatakeData(p, "special", alpha=complex(lam))
    disc = cmath.sqrt(lam * lam - 4)
    return SatakeData(p, "unramified", alpha=(lam + disc) / 2, beta=(lam - disc) / 2)


def twisted_conductor(f: Newform, spec: CharSpec) -> int:
    """Conductor of f twisted by the primitive real character ``spec``.

    Local rules for a twist-minimal form at odd level: at p | N0 the special
    representation gives p, or p^2 after a ramified twist; at p | N1 the
    supercuspidal component keeps p^2; away from N the conductor is the
    square of the character's local conductor.
    """
    D = spec.discriminant
    cond = 1
    for p in set(prime_factors(f.level)) | set(prime_factors(D) if abs(D) > 1 else []):
        vD = 0
        x = abs(D)
        while x % p == 0:
            x //= p
            vD += 1
        if f.level % p:
            cond *= p ** (2 * vD)
        elif (f.level // p) % p:
            cond *= p if vD == 0 else p * p
        else:
            cond *= p * p
    return cond


def conductor_data(f: Newform, spec: Optional[CharSpec] = None) -> dict:
    spec = spec or CharSpec()
    if gcd(spec.d0, 2 * f.level) != 1:
        raise ValueError("character not coprime to level")
    return {
        "N0": f.N0,
        "N1": f.N1,
        "sym2_conductor": f.N0 ** 2 * f.N1 ** 3,
        "conductor_bound": 8 * f.level * spec.c * spec.d0 ** 2,
        "conductor": twisted_conductor(f, spec),
    }
