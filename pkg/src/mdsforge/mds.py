"""The double Dirichlet series over quadratic twists, its coefficient and
correction-polynomial data, three evaluation orders and the scattering
matrices of its functional equations."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, log, pi
from typing import Optional, Sequence

import numpy as np
from scipy import special

from .arith import factorint, is_squarefree, omega, prime_factors, primes_up_to, rad, squarefree_split
from .characters import (
    CharSpec,
    ac_spec,
    dirichlet_L,
    div_set,
    jacobi,
    kronecker,
    spec_from_m,
)
from .lfuncs import L_twisted, base_root_number, parallel_map, root_number
from .newforms import Newform, satake, twisted_conductor
from .weyl_cg import P_numeric, Q_numeric, cg_coefficient

# Orientation of the quadratic symbol inside the even-k factors of Qtilde_n.
# "p_over_m" uses (p / (n p^-k)), which is what the twisted multiplicativity
# of H produces; "m_over_p" is the transposed symbol.
Q_SYMBOL = "p_over_m"

CROSS_POINTS = ((3.0, 3.0), (3.0, 3.5), (3.5, 3.0), (4.0, 3.0), (3.5, 4.0))


# local data ---------------------------------------------------------------

class LocalTables:
    """Numeric local data of f at an odd prime p not dividing N."""

    def __init__(self, f: Newform, p: int):
        if f.level % p == 0 or p == 2:
            raise ValueError("local tables need p not dividing 2N")
        sat = satake(f, p)
        self.p = p
        self.alpha, self.beta = complex(sat.alpha), complex(sat.beta)
        self._a: dict = {}
        self._h: dict = {}
        self._P: dict = {}
        self._Q: dict = {}

    def a(self, k1: int, k2: int, j: int) -> float:
        key = (k1, k2, j)
        if key not in self._a:
            deg = max(16, k1 + k2 + j)
            self._a[key] = float(cg_coefficient(k1, k2, j, degree=deg).at_q(self.p))
        return self._a[key]

    def H(self, k1: int, k2: int, j: int) -> complex:
        return self.a(k1, k2, j) * self.alpha ** k1 * self.beta ** k2

    def h(self, k: int, j: int) -> float:
        """sum over k1 + k2 = k of H(p^k1, p^k2, p^j)."""
        key = (k, j)
        if key not in self._h:
            self._h[key] = sum(self.H(k1, k - k1, j) for k1 in range(k + 1)).real
        return self._h[key]

    def P(self, j: int, y: complex) -> complex:
        """P_j(y alpha, y beta; p)."""
        if j not in self._P:
            self._P[j] = P_numeric(j, self.p)
        return complex(self._P[j](y * self.alpha, y * self.beta))

    def Qsum(self, k: int, x: complex) -> complex:
        """sum over k1 + k2 = k of alpha^k1 beta^k2 Q_(k1,k2)(x; p)."""
        total = 0j
        for k1 in range(k + 1):
            key = (k1, k - k1)
            if key not in self._Q:
                self._Q[key] = Q_numeric(k1, k - k1, self.p)
            total += self.alpha ** k1 * self.beta ** (k - k1) * self._Q[key](x)
        return total


def local_tables(f: Newform, p: int) -> LocalTables:
    key = ("local", p)
    if key not in f._cache:
        f._cache[key] = LocalTables(f, p)
    return f._cache[key]


def _check_args(f: Newform, *args: int) -> None:
    for x in args:
        if x <= 0 or gcd(x, 2 * f.level) != 1:
            raise ValueError("arguments must be positive and coprime to 2N")


def _exponents(n: int) -> dict[int, int]:
    return dict(factorint(n)) if n > 1 else {}


def H(m1: int, m2: int, d: int, f: Newform) -> complex:
    """Coefficient H(m1, m2, d) of the series for f."""
    _check_args(f, m1, m2, d)
    e1, e2, ed = _exponents(m1), _exponents(m2), _exponents(d)
    m = m1 * m2
    val = 1 + 0j
    for p in set(e1) | set(e2) | set(ed):
        val *= local_tables(f, p).H(e1.get(p, 0), e2.get(p, 0), ed.get(p, 0))
        if val == 0:
            return 0j
    for p, j in ed.items():
        k = e1.get(p, 0) + e2.get(p, 0)
        val *= jacobi(p, m // p ** k) ** j
    return val


def grouped_coefficient(n: int, d: int, f: Newform) -> float:
    """C(n, d) = sum over m1 m2 = n of H(m1, m2, d)."""
    _check_args(f, n, d)
    en, ed = _exponents(n), _exponents(d)
    val = 1.0
    for p in set(en) | set(ed):
        val *= local_tables(f, p).h(en.get(p, 0), ed.get(p, 0))
        if val == 0:
            return 0.0
    for p, j in ed.items():
        val *= jacobi(p, n // p ** en.get(p, 0)) ** j
    return val


# correction polynomials ---------------------------------------------------

def P_d(s: complex, a1c1: CharSpec, f: Newform, d: int) -> complex:
    """Correction polynomial attached to d in the d-ordered representation."""
    _check_args(f, d)
    s = complex(s)
    val = 1 + 0j
    for p, j in _exponents(d).items():
        if j < 2:
            continue
        lt = local_tables(f, p)
        x = p ** (-s)
        if j % 2 == 0:
            x *= a1c1(p) * jacobi(d // p ** j, p)
        val *= lt.P(j, x)
    return val


def Qtilde_n(w: complex, a2c2: CharSpec, f: Newform, n: int, symbol: Optional[str] = None) -> complex:
    """Correction polynomial attached to n in the n-ordered representation.

    Every prime power in n contributes, including k = 1 where the factor is
    lambda_f(p); without it the n-ordered series would not depend on f at
    first order.
    """
    _check_args(f, n)
    symbol = symbol or Q_SYMBOL
    w = complex(w)
    val = 1 + 0j
    for p, k in _exponents(n).items():
        lt = local_tables(f, p)
        x = p ** (-w)
        if k % 2 == 0:
            rest = n // p ** k
            sym = jacobi(p, rest) if symbol == "p_over_m" else jacobi(rest, p)
            x *= a2c2(p) * sym
        val *= lt.Qsum(k, x)
    return val


# evaluation orders ---------------------------------------------------------

@dataclass
class ZEval:
    s: complex
    w: complex
    a2c2: tuple[int, int]
    a1c1: tuple[int, int]
    representation: str
    cutoffs: dict
    value: complex
    error: float
    residuals: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "s": [self.s.real, self.s.imag],
            "w": [self.w.real, self.w.imag],
            "chars": {"a2c2": list(self.a2c2), "a1c1": list(self.a1c1)},
            "representation": self.representation,
            "cutoffs": self.cutoffs,
            "value": [self.value.real, self.value.imag],
            "error": self.error,
            "residuals": self.residuals,
        }


def in_omega1(s: complex, w: complex) -> bool:
    return 2 * s.real + w.real > 2 and w.real > 1


def in_omega2(s: complex, w: complex) -> bool:
    return s.real + w.real > 1.5 and s.real > 1


def _coprime_range(M: int, N: int) -> np.ndarray:
    n = np.arange(1, M + 1, dtype=np.int64)
    return n[np.gcd(n, 2 * N) == 1]


def _legendre_table(p: int) -> np.ndarray:
    r = np.arange(p, dtype=object)
    vals = np.array([pow(int(x), (p - 1) // 2, p) for x in r], dtype=np.int64)
    vals[vals == p - 1] = -1
    return vals


def coefficient_matrix(f: Newform, Mn: int, Md: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(ns, ds, C) with C[i, k] = C(ns[i], ds[k]) over integers coprime to 2N."""
    key = ("cmat", Mn, Md)
    if key in f._cache:
        return f._cache[key]
    ns = _coprime_range(Mn, f.level)
    ds = _coprime_range(Md, f.level)
    lam = f.lam_upto(Mn)
    C = np.empty((len(ns), len(ds)))
    legendre: dict[int, np.ndarray] = {}
    for i, n in enumerate(ns):
        n = int(n)
        row = np.full(len(ds), lam[n])
        for p, e in _exponents(n).items():
            if e % 2:
                if p not in legendre:
                    legendre[p] = _legendre_table(p)
                row = row * legendre[p][ds % p]
        # pairs sharing a prime: general formula
        shared = np.nonzero(np.gcd(ds, rad(n)) > 1)[0] if n > 1 else []
        for k in shared:
            row[k] = grouped_coefficient(n, int(ds[k]), f)
        C[i] = row
    f._cache[key] = (ns, ds, C)
    return ns, ds, C


def _pair(ac) -> tuple[int, int]:
    if isinstance(ac, CharSpec):
        return (ac.a, ac.c)
    return (int(ac[0]), int(ac[1]))


def _tail_estimate(partials: Sequence[complex], rate: float) -> float:
    """Geometric extrapolation of the truncation error from halved cutoffs.

    ``partials`` holds the sums at M, M/2, M/4, ...; the worst successive
    difference (rescaled to the last halving) guards against a single
    difference that happens to be small for oscillating terms.
    """
    if rate <= 0:
        return float("inf")
    diffs = [abs(a - b) * 2.0 ** (-rate * i) for i, (a, b) in enumerate(zip(partials, partials[1:]))]
    return max(diffs) / (2 ** rate - 1)


def Z_raw(s, w, a2c2=(1, 1), a1c1=(1, 1), f: Newform = None, cutoff: int = 4000,
          cutoff_d: Optional[int] = None) -> ZEval:
    """Truncated triple sum, grouped by n = m1 m2."""
    s, w = complex(s), complex(w)
    if s.real < 2 or w.real < 2:
        raise ValueError("region guard: the raw sum needs Re s, Re w >= 2")
    a2c2, a1c1 = _pair(a2c2), _pair(a1c1)
    Md = cutoff_d or max(200, cutoff // 2)
    ns, ds, C = coefficient_matrix(f, cutoff, Md)
    chi1 = ac_spec(a1c1).values(ns).astype(float)
    chi2 = ac_spec(a2c2).values(ds).astype(float)
    vn = chi1 * np.exp(-s * np.log(ns.astype(float)))
    vd = chi2 * np.exp(-w * np.log(ds.astype(float)))
    value = complex(vn @ C @ vd)
    part_n = [value] + [complex(vn[ns <= cutoff // k] @ C[ns <= cutoff // k] @ vd) for k in (2, 4)]
    part_d = [value] + [complex(vn @ C[:, ds <= Md // k] @ vd[ds <= Md // k]) for k in (2, 4)]
    err = _tail_estimate(part_n, s.real - 1) + _tail_estimate(part_d, w.real - 1)
    return ZEval(s, w, a2c2, a1c1, "raw", {"n": cutoff, "d": Md}, value, err)


def _local_inverse(f: Newform, p: int, chi_p: int, x: complex) -> complex:
    """1 / L_p(s, f x chi) at x = p^-s."""
    lam = f.lam_p(p)
    if f.level % p:
        return 1 - lam * chi_p * x + chi_p * chi_p * x * x
    return 1 - lam * chi_p * x


def _powmod(base: np.ndarray, e: np.ndarray, m: np.ndarray) -> np.ndarray:
    out = np.ones_like(m)
    base = base % m
    e = e.copy()
    while np.any(e):
        odd = (e & 1).astype(bool)
        out = np.where(odd, out * base % m, out)
        base = base * base % m
        e >>= 1
    return out


def _kronecker_at_primes(D: int, ps: np.ndarray, cache: dict) -> np.ndarray:
    """(D / p) for an array of odd primes p < 3e6, one cached row per prime of D."""
    out = np.ones(len(ps))
    if D < 0:
        out *= np.where(ps % 4 == 1, 1.0, -1.0)
    x = abs(D)
    while x % 2 == 0:
        x //= 2
        out *= np.where((ps % 8 == 1) | (ps % 8 == 7), 1.0, -1.0)
    for q in prime_factors(x) if x > 1 else []:
        key = ("legendre", q, len(ps))
        if key not in cache:
            r = _powmod(np.full(len(ps), q, dtype=np.int64), (ps - 1) // 2, ps)
            cache[key] = np.where(r == 1, 1, np.where(r == 0, 0, -1)).astype(np.int8)
        out = out * cache[key]
    return out


def _euler_primes(f: Newform, sigma: float, tol: float):
    P = int(min(2e6, max(1e3, (tol * (sigma - 1) * 10) ** (1 / (1 - sigma)))))
    key = ("eulerp", P)
    if key not in f._cache:
        ps = primes_up_to(P)
        ps = ps[np.gcd(ps, 2 * f.level) == 1]
        f.ensure(int(ps[-1]))
        f._cache[key] = (ps, f.lam[ps], np.log(ps.astype(float)))
    return f._cache[key]


def _euler_product_L(s: complex, f: Newform, spec: CharSpec, tol: float = 1e-13) -> complex:
    """L^{(2N)}(s, f x chi) from a truncated Euler product (Re s > 2)."""
    ps, lam, lp = _euler_primes(f, s.real, tol)
    chi = _kronecker_at_primes(spec.discriminant, ps, f._cache)
    x = np.exp(-s * lp)
    return complex(np.exp(-np.sum(np.log(1 - lam * chi * x + chi * chi * x * x))))


def _euler_product_dirichlet(w: complex, f: Newform, spec: CharSpec, tol: float = 1e-13) -> complex:
    """L^{(2N)}(w, chi) from a truncated Euler product (Re w > 2)."""
    ps, _, lp = _euler_primes(f, w.real, tol)
    chi = _kronecker_at_primes(spec.discriminant, ps, f._cache)
    return complex(np.exp(-np.sum(np.log(1 - chi * np.exp(-w * lp)))))


def L_2N(s: complex, f: Newform, spec: CharSpec) -> tuple[complex, float]:
    """L^{(2N)}(s, f x chi) with its error estimate."""
    s = complex(s)
    if s.real >= 2.5:
        return _euler_product_L(s, f, spec), 1e-12
    lv = L_twisted(s, f, spec)
    val = lv.value
    for p in [2] + prime_factors(f.level):
        val *= _local_inverse(f, p, spec(p), p ** (-s))
    return complex(val), lv.error


def Z_rep1(s, w, a2c2=(1, 1), a1c1=(1, 1), f: Newform = None, cutoff: int = 1000,
           _cache: Optional[dict] = None) -> ZEval:
    """d-ordered representation: twisted L-values times P_d."""
    s, w = complex(s), complex(w)
    if not in_omega1(s, w):
        raise ValueError("region guard: (s, w) outside the d-ordered domain")
    a2c2, a1c1 = _pair(a2c2), _pair(a1c1)
    chi2 = ac_spec(a2c2)
    ds = [int(d) for d in _coprime_range(cutoff, f.level)]
    split = {d: squarefree_split(d) for d in ds}
    d0s = sorted({split[d][0] for d in ds})
    lcache = _cache if _cache is not None else {}
    missing = [d0 for d0 in d0s if (s, a1c1, d0) not in lcache]
    vals = parallel_map(lambda d0: L_2N(s, f, ac_spec(a1c1, d0)), missing)
    for d0, v in zip(missing, vals):
        lcache[(s, a1c1, d0)] = v
    spec1 = ac_spec(a1c1)
    terms = np.zeros(len(ds), dtype=complex)
    lerr = 0.0
    for i, d in enumerate(ds):
        L, e = lcache[(s, a1c1, split[d][0])]
        c = chi2(d) * P_d(s, spec1, f, d) * d ** (-w)
        terms[i] = L * c
        lerr += e * abs(c)
    value = complex(terms.sum())
    parts = [value] + [complex(terms[np.array(ds) <= cutoff // k].sum()) for k in (2, 4)]
    rate = min(w.real - 1, w.real + 2 * s.real - 2)
    err = _tail_estimate(parts, rate) + lerr
    return ZEval(s, w, a2c2, a1c1, "rep1", {"d": cutoff}, value, err)


def Z_rep2(s, w, a2c2=(1, 1), a1c1=(1, 1), f: Newform = None, cutoff: int = 4000,
           symbol: Optional[str] = None) -> ZEval:
    """n-ordered representation: Dirichlet L-values times Qtilde_n."""
    s, w = complex(s), complex(w)
    a2c2, a1c1 = _pair(a2c2), _pair(a1c1)
    if not in_omega2(s, w):
        raise ValueError("region guard: (s, w) outside the n-ordered domain")
    if a2c2 == (1, 1) and abs(w - 1) < 1e-12:
        raise ValueError("polar hyperplane w=1")
    chi1 = ac_spec(a1c1)
    chi2 = ac_spec(a2c2)
    removed = [2] + prime_factors(f.level)
    ns = [int(n) for n in _coprime_range(cutoff, f.level)]
    split = {n: squarefree_split(n) for n in ns}
    n0s = sorted({split[n][0] for n in ns})

    def lval(n0):
        spec = chi2.times(CharSpec(d0=n0 if n0 % 4 == 1 else -n0))
        if w.real >= 2.5:
            return _euler_product_dirichlet(w, f, spec), 1e-12
        r = dirichlet_L(w, spec, removed=removed)
        return r.value, r.error

    lv = dict(zip(n0s, parallel_map(lval, n0s)))
    terms = np.zeros(len(ns), dtype=complex)
    lerr = 0.0
    for i, n in enumerate(ns):
        c = chi1(n) * Qtilde_n(w, chi2, f, n, symbol) * n ** (-s)
        L, e = lv[split[n][0]]
        terms[i] = L * c
        lerr += e * abs(c)
    value = complex(terms.sum())
    parts = [value] + [complex(terms[np.array(ns) <= cutoff // k].sum()) for k in (2, 4)]
    rate = min(s.real - 1, s.real + w.real - 1.5)
    err = _tail_estimate(parts, rate) + lerr
    return ZEval(s, w, a2c2, a1c1, "rep2", {"n": cutoff}, value, err)


def cross_check(f: Newform, points=CROSS_POINTS, pairs=None, cutoff: int = 4000) -> list[dict]:
    """Compare the three evaluation orders; each record carries a pass flag."""
    pairs = pairs or default_char_pairs(f.level)
    out = []
    for s, w in points:
        for a2c2, a1c1 in pairs:
            zr = Z_raw(s, w, a2c2, a1c1, f, cutoff=cutoff)
            z1 = Z_rep1(s, w, a2c2, a1c1, f, cutoff=cutoff // 4)
            z2 = Z_rep2(s, w, a2c2, a1c1, f, cutoff=cutoff)
            tol = max(zr.error + z1.error + z2.error, 1e-12)
            d1, d2 = abs(zr.value - z1.value), abs(zr.value - z2.value)
            out.append({
                "point": [s, w], "a2c2": list(a2c2), "a1c1": list(a1c1),
                "raw": zr.value, "rep1": z1.value, "rep2": z2.value,
                "diff_rep1": d1, "diff_rep2": d2, "error": tol,
                "pass": d1 <= tol and d2 <= tol and tol <= 1e-6,
            })
    return out


def default_char_pairs(N: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    divs = div_set(N)
    c = divs[1][1] if len(divs) > 4 else 1
    return [((1, 1), (1, 1)), ((-1, 1), (1, 1)), ((1, 1), (2, 1)), ((2, c), (-1, 1)), ((-2, 1), (-2, c))]


def residue_check(f: Newform, s: float = 2.0, ks=(2, 3, 4), cutoff: int = 2000) -> dict:
    """Extrapolate (w - 1) Z_rep2(s, w) to w = 1 and compare with the Sym^2 residue."""
    from .lfuncs import sym2_L

    hs, vals = [], []
    for k in ks:
        h = 10.0 ** (-k)
        z = Z_rep2(s, 1 + h, (1, 1), (1, 1), f, cutoff=cutoff)
        hs.append(h)
        vals.append((h * z.value).real)
    # quadratic fit in h, value at h = 0
    coef = np.polyfit(hs, vals, len(hs) - 1)
    limit = float(coef[-1])
    sym, sym_err = sym2_L(f, 2 * s, cutoff=20000)
    expected = sym * float(np.prod([1 - 1 / p for p in [2] + prime_factors(f.level)]))
    rel = abs(limit - expected) / abs(expected)
    return {"s": s, "samples": dict(zip([float(h) for h in hs], vals)), "limit": limit,
            "expected": expected, "relative_error": rel, "pass": rel < 0.01}


# scattering matrices -------------------------------------------------------

def _two_adic(m: int) -> tuple[int, int]:
    """(chi_m(2), (conductor, 8)) for the quadratic character of Q(sqrt m)."""
    D = spec_from_m(m).discriminant
    return kronecker(D, 2), gcd(abs(D), 8)


def _dyadic_ratio(f: Newform, m: int, s: complex) -> complex:
    """L(1 - s, f_2 x chi_m) / L(s, f_2 x chi_m)."""
    chi2, _ = _two_adic(m)
    return _local_inverse(f, 2, chi2, 2 ** (-s)) / _local_inverse(f, 2, chi2, 2 ** (s - 1))


def _gamma_ratio(f: Newform, s: complex) -> complex:
    k = (f.weight - 1) / 2
    num = special.gamma((1 - s + k) / 2) * special.gamma((1 - s + k + 1) / 2)
    den = special.gamma((s + k) / 2) * special.gamma((s + k + 1) / 2)
    if not np.isfinite(num) or den == 0 or not np.isfinite(den):
        raise ArithmeticError("entry pole")
    return num / den


def _star(c: int) -> int:
    return c if c % 4 == 1 else -c


def special_product(f: Newform, c1: int, c2: int, c2p: int) -> int:
    """Product of p | N where ord_p(c2 c2' cond(f x chi_{c1*})) is odd."""
    cond = twisted_conductor(f, spec_from_m(_star(c1)) if c1 > 1 else CharSpec())
    x = c2 * c2p * cond
    out = 1
    for p in prime_factors(f.level):
        e = 0
        while x % p == 0:
            x //= p
            e += 1
        if e % 2:
            out *= p
    return out


def phi_entry(s: complex, a1c1, a2c2, a2c2p, f: Newform, zero_local: bool = False) -> complex:
    """Closed-form entry of the gamma_1 scattering matrix."""
    s = complex(s)
    a1, c1 = _pair(a1c1)
    a2, c2 = _pair(a2c2)
    a2p, c2p = _pair(a2c2p)
    N0 = f.N0
    Nc = special_product(f, c1, c2, c2p)
    reduced = N0 // gcd(c1, N0)
    if reduced % Nc:
        return 0j
    sign1 = 1 if c1 % 4 == 1 else -1
    cond = twisted_conductor(f, spec_from_m(_star(c1)) if c1 > 1 else CharSpec())
    eps = base_root_number(f, c1)
    val = 0.25 * eps * kronecker(spec_from_m(sign1 * a1).discriminant, -cond)
    val *= cond ** (0.5 - s) * pi ** (-1 + 2 * s) * _gamma_ratio(f, s)
    val *= kronecker(ac_spec((a1, c1)).discriminant, Nc)
    chi_aa = spec_from_m(a2 * a2p).discriminant
    _, ct1 = _two_adic(sign1 * a1)
    _, ct3 = _two_adic(sign1 * a1 * 3)
    m = a1 * c1
    br1 = ct1 ** (1 - 2 * s) * (_dyadic_ratio(f, m, s) + kronecker(chi_aa, 5) * _dyadic_ratio(f, 5 * m, s))
    sign3 = -1 if (cond * Nc) % 4 == 3 else 1
    br2 = ct3 ** (1 - 2 * s) * sign3 * (
        kronecker(chi_aa, 3) * _dyadic_ratio(f, 3 * m, s) + kronecker(chi_aa, 7) * _dyadic_ratio(f, 7 * m, s)
    )
    val *= br1 + br2
    local = 1 + 0j
    for p in prime_factors(Nc) if Nc > 1 else []:
        alpha = f.lam_p(p)
        local *= alpha * (p ** (-(1 - s)) - p ** (-s)) / (1 - p ** (-3 + 2 * s))
    for p in prime_factors(reduced // Nc) if reduced // Nc > 1 else []:
        local *= (1 - p ** -2.0) / (1 - p ** (-3 + 2 * s))
    if zero_local:
        local = 0
    return complex(val * local)


def class_representatives(N: int) -> list[int]:
    """Smallest positive squarefree integers coprime to 2N, one for each class
    of (Z / 8 rad N)^x modulo squares."""
    ps = prime_factors(N)
    want = 4 * 2 ** len(ps)
    seen: dict[tuple, int] = {}
    d = 1
    while len(seen) < want:
        if d == 1 or (gcd(d, 2 * N) == 1 and is_squarefree(d)):
            key = (d % 8,) + tuple(jacobi(d, p) for p in ps)
            seen.setdefault(key, d)
        d += 2
    return sorted(seen.values())


def phi_class_sum(s: complex, a1c1, a2c2, a2c2p, f: Newform) -> complex:
    """The same entry assembled class by class from the twisted functional equations."""
    s = complex(s)
    a1, c1 = _pair(a1c1)
    k = omega(f.level)
    total = 0j
    chi_a = ac_spec(_pair(a2c2)).discriminant
    chi_b = ac_spec(_pair(a2c2p)).discriminant
    for D in class_representatives(f.level):
        weight = kronecker(chi_a, D) * kronecker(chi_b, D)
        if weight == 0:
            continue
        spec = CharSpec(d0=D, a=a1, c=c1)
        eps = root_number(f, spec)
        C = twisted_conductor(f, spec)
        t = eps * C ** (0.5 - s) * D ** (2 * s - 1) * pi ** (2 * s - 1) * _gamma_ratio(f, s)
        for p in [2] + prime_factors(f.level):
            chi_p = spec(p)
            t *= _local_inverse(f, p, chi_p, p ** (-s)) / _local_inverse(f, p, chi_p, p ** (s - 1))
        total += weight * t
    return total / 2 ** (k + 2)


def phi_matrix(s: complex, a1c1, f: Newform, method: str = "closed", zero_local: bool = False) -> np.ndarray:
    divs = div_set(f.level)
    M = np.zeros((len(divs), len(divs)), dtype=complex)
    for i, x in enumerate(divs):
        for j, y in enumerate(divs):
            if method == "closed":
                M[i, j] = phi_entry(s, a1c1, x, y, f, zero_local=zero_local)
            else:
                M[i, j] = phi_class_sum(s, a1c1, x, y, f)
    return M


def _L2(w: complex, m: int) -> complex:
    chi2, _ = _two_adic(m)
    return 1 / (1 - chi2 * 2 ** (-w))


def psi_entry(w: complex, a2c2, a1c1, a1c1p, f: Newform) -> complex:
    """Closed-form entry of the gamma_2 scattering matrix."""
    w = complex(w)
    a2, c2 = _pair(a2c2)
    a1, c1 = _pair(a1c1)
    a1p, c1p = _pair(a1c1p)
    g_even = special.gamma((1 - w) / 2) / special.gamma(w / 2)
    g_odd = special.gamma((2 - w) / 2) / special.gamma((w + 1) / 2)
    if not (np.isfinite(g_even) and np.isfinite(g_odd)):
        raise ArithmeticError("entry pole")
    g = gcd(c1, c1p)
    e = c1 * c1p // (g * g)
    chi = kronecker(ac_spec((a2, c2)).discriminant, e)
    if chi == 0:
        return 0j
    val = 0.25 * c2 ** (0.5 - w) * pi ** (-0.5 + w) * chi
    for p in prime_factors(e) if e > 1 else []:
        val *= (p ** (-(1 - w)) - p ** (-w)) / (1 - p ** (-2 * (1 - w)))
    rest = rad(f.level) // e
    for p in prime_factors(rest) if rest > 1 else []:
        val *= (1 - 1 / p) / (1 - p ** (-2 * (1 - w)))
    m = a2 * c2
    chi_aa = spec_from_m(a1 * a1p).discriminant

    def ratio(mm):
        return _L2(1 - w, mm) / _L2(w, mm)

    first, second = (g_even, g_odd) if a2 > 0 else (g_odd, g_even)
    _, ct = _two_adic(m)
    _, ct3 = _two_adic(-3 * m)
    br = ct ** (0.5 - w) * first * (ratio(m) + kronecker(chi_aa, 5) * ratio(5 * m))
    br += ct3 ** (0.5 - w) * second * (kronecker(chi_aa, 3) * ratio(-3 * m) + kronecker(chi_aa, 7) * ratio(-7 * m))
    return complex(val * br)


def psi_matrix(w: complex, a2c2, f: Newform) -> np.ndarray:
    divs = div_set(f.level)
    return np.array([[psi_entry(w, a2c2, x, y, f) for y in divs] for x in divs], dtype=complex)


def z_vector(s, w, a1c1, f: Newform, cutoff: int = 400, lcache: Optional[dict] = None) -> np.ndarray:
    lcache = {} if lcache is None else lcache
    return np.array([Z_rep1(s, w, a2c2, a1c1, f, cutoff=cutoff, _cache=lcache).value
                     for a2c2 in div_set(f.level)])


def check_fe_gamma1(f: Newform, point=(0.8, 2.5), a1c1=(1, 1), cutoff: int = 400) -> dict:
    """Residual of Z(s, w) = Phi(s) Z(1 - s, w + 2s - 1) on the d-ordered domain."""
    s, w = complex(point[0]), complex(point[1])
    s2, w2 = 1 - s, w + 2 * s - 1
    if not (in_omega1(s, w) and in_omega1(s2, w2)):
        raise ValueError("region guard: both points must lie in the d-ordered domain")
    lcache: dict = {}
    lhs = z_vector(s, w, a1c1, f, cutoff, lcache)
    rhs = z_vector(s2, w2, a1c1, f, cutoff, lcache)
    scale = np.max(np.abs(lhs))

    def resid(M):
        return float(np.max(np.abs(lhs - M @ rhs)) / scale)

    out = {
        "point": [s.real, w.real],
        "image": [s2.real, w2.real],
        "a1c1": list(_pair(a1c1)),
        "cutoff": cutoff,
        "residual": resid(phi_matrix(s, a1c1, f)),
        "residual_class_sum": resid(phi_matrix(s, a1c1, f, method="class")),
        "residual_zeroed_local": resid(phi_matrix(s, a1c1, f, zero_local=True)),
    }
    out["pass"] = out["residual"] < 1e-3
    out["sensitive"] = out["residual_zeroed_local"] > 0.1
    return out


def correction_fe_residuals(f: Newform, d_values=(9, 25, 225), s_grid=None, w_grid=None) -> dict:
    """Max residuals of the functional equations of P_d and Qtilde_n."""
    s_grid = s_grid or [0.3 + 0.5j, 0.1, 0.7 - 2j, 1.5 + 1j, -0.4 + 3j]
    w_grid = w_grid or s_grid
    worst_p = worst_q = 0.0
    for a1c1 in div_set(f.level):
        chi = ac_spec(a1c1)
        for d in d_values:
            if gcd(d, 2 * f.level) != 1:
                continue
            d1 = squarefree_split(d)[1]
            for s in s_grid:
                lhs = P_d(s, chi, f, d)
                rhs = d1 ** (2 - 4 * complex(s)) * P_d(1 - complex(s), chi, f, d)
                worst_p = max(worst_p, abs(lhs - rhs) / max(1.0, abs(lhs)))
            for w in w_grid:
                lhs = Qtilde_n(w, chi, f, d)
                rhs = d1 ** (1 - 2 * complex(w)) * Qtilde_n(1 - complex(w), chi, f, d)
                worst_q = max(worst_q, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return {"P": worst_p, "Q": worst_q}
