"""Approximate functional equation for self-dual L-functions with one gamma factor.

An L-function is described by ``Lambda(s) = A**s * Gamma(b*s + c) * L(s)`` with
``Lambda(s) = eps * Lambda(1 - s)`` and real Dirichlet coefficients.  With the
trivial test function the completed value splits as

    Lambda(s) = I_X(s) + eps * I_{1/X}(1 - s),
    I_X(s) = A**s * sum a_n n**-s * Gamma(b s + c, (n / (A X))**(1/b)).

The split is exact for every X > 0, which is what the root-number solver
exploits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special


def upper_gamma(a: complex, x: np.ndarray) -> np.ndarray:
    """Non-regularised upper incomplete gamma Gamma(a, x) for x > 0."""
    x = np.asarray(x, dtype=float)
    a = complex(a)
    if abs(a.imag) < 1e-300:
        return _upper_gamma_real(a.real, x).astype(complex)
    return _upper_gamma_complex(a, x)


def _upper_gamma_real(a: float, x: np.ndarray) -> np.ndarray:
    if 0 < a < 1e-15:
        # Gamma(a, x) - E1(x) is O(a); Gamma(a) itself may overflow here
        return special.exp1(x)
    if a > 0:
        # scipy's regularised form loses everything once Gamma(a) overflows
        if a < 150:
            out = special.gammaincc(a, x) * special.gamma(a)
            # for tiny a the regularised value underflows long before Gamma(a, x) does
            lost = (out < 1e-290) & (x > 1.0)
            if np.any(lost):
                out[lost] = _gamma_cf(complex(a), x[lost]).real
            return out
        return _upper_gamma_complex(complex(a), x).real
    if a == 0.0:
        return special.exp1(x)
    # recurse upward: Gamma(a, x) = (Gamma(a+1, x) - x**a e**-x) / a
    k = int(np.ceil(-a))
    top = a + k
    val = special.exp1(x) if top == 0 else special.gammaincc(top, x) * special.gamma(top)
    for i in range(k - 1, -1, -1):
        ai = a + i
        val = (val - x ** ai * np.exp(-x)) / ai
    # the recursion cancels badly once x is large; the continued fraction does not
    far = x > abs(a) + 2.0
    if np.any(far):
        val = np.asarray(val, dtype=float).copy()
        val[far] = _gamma_cf(complex(a), x[far]).real
    return val


def _upper_gamma_complex(a: complex, x: np.ndarray) -> np.ndarray:
    out = np.empty(x.shape, dtype=complex)
    big = x > max(1.0, abs(a) - 2.0) + 1.0
    if np.any(big):
        out[big] = _gamma_cf(a, x[big])
    if np.any(~big):
        out[~big] = special.gamma(a) - _lower_gamma_series(a, x[~big])
    return out


def _lower_gamma_series(a: complex, x: np.ndarray) -> np.ndarray:
    # gamma(a, x) = x^a e^-x sum_k x^k / (a (a+1) ... (a+k))
    term = np.full(x.shape, 1.0 / a, dtype=complex)
    total = term.copy()
    for k in range(1, 2000):
        term = term * x / (a + k)
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return np.exp(a * np.log(x) - x) * total


def _gamma_cf(a: complex, x: np.ndarray) -> np.ndarray:
    # modified Lentz on Gamma(a,x) = e^-x x^a / (x + 1 - a - 1(1-a)/(x + 3 - a - ...))
    tiny = 1e-300
    b = x + 1.0 - a
    c = np.full(x.shape, 1.0 / tiny, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    idx = np.arange(x.size)  # entries still iterating
    for i in range(1, 5000):
        an = -i * (i - a)
        b = b + 2.0
        dd = an * d[idx] + b
        dd = np.where(np.abs(dd) < tiny, tiny, dd)
        cc = b + an / c[idx]
        cc = np.where(np.abs(cc) < tiny, tiny, cc)
        dd = 1.0 / dd
        delta = dd * cc
        h[idx] *= delta
        d[idx], c[idx] = dd, cc
        keep = np.abs(delta - 1.0) >= 4e-16
        if not np.any(keep):
            break
        idx, b = idx[keep], b[keep]
    return np.exp(a * np.log(x) - x) * h


@dataclass(frozen=True)
class GammaData:
    """Lambda(s) = A**s Gamma(b s + c) L(s)."""

    A: float
    b: float
    c: float

    def log_gamma_factor(self, s: complex) -> complex:
        return s * np.log(self.A) + special.loggamma(self.b * s + self.c)


def gl2_gamma(conductor: float, weight: int) -> GammaData:
    """Holomorphic weight-l form: Gamma_C(s + (l-1)/2) up to a constant."""
    return GammaData(np.sqrt(conductor) / (2 * np.pi), 1.0, (weight - 1) / 2)


def gl1_gamma(conductor: float, parity: int) -> GammaData:
    """Dirichlet character: Gamma_R(s + a) up to a constant."""
    return GammaData(np.sqrt(conductor / np.pi), 0.5, parity / 2)


def _envelope_cutoff(a: complex, sigma: float, gd: GammaData, X: float, log_tol: float) -> int:
    """Smallest n beyond which the smoothed terms are negligible in total."""
    grid = np.geomspace(1.0, 1e13, 800)
    x = (grid / (gd.A * X)) ** (1.0 / gd.b)
    with np.errstate(all="ignore"):
        ug = np.abs(upper_gamma(a, np.maximum(x, 1e-300)))
        log_env = np.log(ug) - sigma * np.log(grid) + np.log(grid) + np.log(np.log(grid + 2.0))
    bad = np.nonzero(~(log_env < log_tol))[0]
    if len(bad) == 0:
        return 1
    last = bad[-1]
    if last + 1 >= len(grid):
        raise ArithmeticError("precision failure: AFE does not converge at this point")
    return int(np.ceil(grid[last + 1]))


def afe_terms_needed(s: complex, gd: GammaData, X: float = 1.0, tol: float = 1e-13) -> int:
    """Number of coefficients needed for absolute accuracy about tol."""
    s = complex(s)
    a1 = gd.b * s + gd.c
    a2 = gd.b * (1 - s) + gd.c
    lg = special.loggamma(a1).real
    log_tol = np.log(tol) + lg
    n1 = _envelope_cutoff(a1, s.real, gd, X, log_tol)
    n2 = _envelope_cutoff(a2, 1 - s.real, gd, 1.0 / X, log_tol + (2 * s.real - 1) * np.log(gd.A))
    return max(n1, n2)


def afe_sides(coeffs: np.ndarray, s: complex, gd: GammaData, X: float = 1.0) -> tuple[complex, complex]:
    """Return (S1, S2) with L(s) = S1 + eps * S2 for the given unbalancing X."""
    s = complex(s)
    n = np.arange(1, len(coeffs) + 1, dtype=float)
    a1 = gd.b * s + gd.c
    a2 = gd.b * (1 - s) + gd.c
    x1 = (n / (gd.A * X)) ** (1.0 / gd.b)
    x2 = (n * X / gd.A) ** (1.0 / gd.b)
    lg1 = special.loggamma(a1)
    logn = np.log(n)
    nz = coeffs != 0
    w1 = upper_gamma(a1, x1[nz])
    w2 = upper_gamma(a2, x2[nz])
    c = coeffs[nz]
    S1 = np.sum(c * np.exp(-s * logn[nz]) * w1) * np.exp(-lg1)
    S2 = np.sum(c * np.exp((s - 1) * logn[nz]) * w2) * np.exp((1 - 2 * s) * np.log(gd.A) - lg1)
    return complex(S1), complex(S2)


def afe_value(coeffs: np.ndarray, s: complex, gd: GammaData, eps: float, X: float = 1.0) -> complex:
    S1, S2 = afe_sides(coeffs, s, gd, X)
    return S1 + eps * S2


def solve_root_number(coeffs_for, s0: complex, gd: GammaData, Xs=(1.0, 1.35, 0.8)) -> tuple[float, float]:
    """Root number from the X-independence of the split.

    ``coeffs_for(n)`` must return the first n coefficients.  Returns the
    rounded root number and the worst deviation of the raw estimates from it.
    """
    sides = []
    n = max(afe_terms_needed(s0, gd, X) for X in Xs)
    coeffs = coeffs_for(n)
    for X in Xs:
        sides.append(afe_sides(coeffs, s0, gd, X))
    ests = []
    for i in range(len(Xs)):
        for j in range(i + 1, len(Xs)):
            (a1, b1), (a2, b2) = sides[i], sides[j]
            ests.append((a1 - a2) / (b2 - b1))
    est = np.mean(ests)
    eps = float(np.sign(est.real)) if est.real != 0 else 0.0
    dev = max(abs(e - eps) for e in ests)
    return eps, float(dev)
