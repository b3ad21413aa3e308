"""First moment of quadratic-twist central values and the least-twist search.

Twists are indexed by odd squarefree d0 > 0 coprime to 2N, and chi_{d0} is the
character of Q(sqrt(d0)) restricted to integers coprime to 2d0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, sqrt
from typing import Callable

import numpy as np
from scipy import integrate

from .arith import is_squarefree, prime_factors, squarefree_split
from .characters import CharSpec
from .lfuncs import L_twisted, base_root_number, parallel_map, root_number, sym2_L1
from .mds import L_2N, P_d
from .newforms import Newform

NONVANISHING = 1e-4
VANISHING = 1e-6


def _bump(x: float) -> float:
    if not 1 < x < 2:
        return 0.0
    return float(np.exp(4 - 1 / ((x - 1) * (2 - x))))


def _narrow_bump(x: float) -> float:
    if not 1 < x < 2:
        return 0.0
    t = 2 * x - 3
    return float(np.exp(2 - 2 / (1 - t * t)))


@dataclass(frozen=True)
class SmoothWeight:
    name: str
    fn: Callable[[float], float]

    def __call__(self, x: float) -> float:
        return self.fn(x)

    def mellin(self, w: float) -> float:
        """int_0^inf W(x) x^{w-1} dx."""
        val, _ = integrate.quad(lambda x: self.fn(x) * x ** (w - 1), 1, 2, epsabs=1e-14, epsrel=1e-12, limit=200)
        return val


WEIGHTS = {"bump": SmoothWeight("bump", _bump), "narrow": SmoothWeight("narrow", _narrow_bump)}


def weight(name: str) -> SmoothWeight:
    if name not in WEIGHTS:
        raise ValueError(f"unknown weight {name!r}; choose from {sorted(WEIGHTS)}")
    return WEIGHTS[name]


@dataclass
class MomentReport:
    X: float
    form: str
    weight: str
    M: float
    main: float
    deviation: float
    terms: list = field(default_factory=list)  # (d0, central value, root number)

    def to_dict(self) -> dict:
        return {
            "X": self.X, "form": self.form, "weight": self.weight, "M": self.M,
            "main_term": self.main, "relative_deviation": self.deviation,
            "convention": "odd squarefree d0 coprime to 2N",
            "terms": [{"d0": d, "L": v, "root_number": e} for d, v, e in self.terms],
        }


def _central_2N(f: Newform, d0: int) -> tuple[float, int]:
    spec = CharSpec(d0=d0)
    eps = root_number(f, spec)
    try:
        val, _ = L_2N(0.5, f, spec)
    except ArithmeticError as exc:
        raise ArithmeticError(f"precision failure at d0={d0}: {exc}") from None
    return val.real, eps


def moment_terms(f: Newform, X: float, W: SmoothWeight):
    ds = [d for d in range(int(np.ceil(X)), int(2 * X) + 1) if d % 2 and gcd(d, f.level) == 1]
    ds = [d for d in ds if W(d / X) > 0]
    d0s = sorted({squarefree_split(d)[0] for d in ds})
    vals = dict(zip(d0s, parallel_map(lambda d0: _central_2N(f, d0), d0s)))
    triv = CharSpec()
    total = 0.0
    for d in ds:
        d0 = squarefree_split(d)[0]
        total += W(d / X) * d ** -0.5 * vals[d0][0] * P_d(0.5, triv, f, d).real
    return total, [(d0, vals[d0][0], vals[d0][1]) for d0 in d0s]


def moment_M(f: Newform, X: float, W: SmoothWeight | None = None) -> float:
    if X < 4:
        raise ValueError("X must be at least 4")
    return moment_terms(f, X, W or WEIGHTS["bump"])[0]


def main_term(f: Newform, X: float, W: SmoothWeight | None = None, sym2_cutoff: int = 200_000) -> float:
    W = W or WEIGHTS["bump"]
    eps = base_root_number(f)
    square = int(round(sqrt(f.level))) ** 2 == f.level
    factor = 1 + (eps if square else 0)
    sym2, _ = sym2_L1(f, sym2_cutoff)
    local = float(np.prod([1 - 1 / p for p in [2] + prime_factors(f.level)]))
    return sqrt(X) * factor * W.mellin(0.5) * sym2 * local


def moment_report(f: Newform, X: float, W: SmoothWeight | None = None) -> MomentReport:
    W = W or WEIGHTS["bump"]
    M, terms = moment_terms(f, X, W)
    main = main_term(f, X, W)
    dev = abs(M - main) / abs(main) if main else float("inf")
    return MomentReport(X, f.source, W.name, M, main, dev, terms)


@dataclass
class TwistSearch:
    d0: int | None
    status: str  # "found" | "obstructed" | "none found" | "inconclusive"
    skipped: list = field(default_factory=list)  # (d0, reason, root number, value)
    value: float | None = None

    def to_dict(self) -> dict:
        return {
            "d0": self.d0, "status": self.status, "value": self.value,
            "convention": "odd squarefree d0 coprime to 2N",
            "skipped": [{"d0": d, "reason": r, "root_number": e, "value": v} for d, r, e, v in self.skipped],
        }


def least_twist(f: Newform, d_max: int = 200) -> TwistSearch:
    """Smallest d0 with L(1/2, f x chi_{d0}) visibly nonzero."""
    eps_f = base_root_number(f)
    square = int(round(sqrt(f.level))) ** 2 == f.level
    skipped = []
    if square and eps_f == -1:
        # chi_{d0}(-N) = 1 for every admissible d0, so every root number is -1
        return TwistSearch(None, "obstructed", [(1, "root number -1 for every twist", -1, None)])
    indeterminate = 0
    for d0 in range(1, d_max + 1, 2):
        if gcd(d0, f.level) != 1 or not is_squarefree(d0):
            continue
        spec = CharSpec(d0=d0)
        eps = root_number(f, spec)
        if eps == -1:
            skipped.append((d0, "root number -1", -1, 0.0))
            continue
        val = L_twisted(0.5, f, spec, eps=eps).value.real
        if abs(val) > NONVANISHING:
            return TwistSearch(d0, "found", skipped, val)
        if abs(val) < VANISHING:
            skipped.append((d0, "vanishes with root number +1", 1, val))
        else:
            indeterminate += 1
            skipped.append((d0, "indeterminate", 1, val))
    if skipped and indeterminate == len(skipped):
        return TwistSearch(None, "inconclusive", skipped)
    return TwistSearch(None, "none found", skipped)
