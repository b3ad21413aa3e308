"""The A3 Weyl group action on rational functions and the invariant function g.

Variables are ``(z1, z2, z3, u)`` with ``u**2 = q``.  Node 3 is the central
node of the A3 diagram, so the adjacency is {1-3, 2-3}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .exact import (
    CoordMap,
    MultiRat,
    Poly,
    TruncSeries,
    UPoly,
    partial_expand,
    rf_equal,
    series_expand,
)

Z1, Z2, Z3, U = 0, 1, 2, 3
ADJACENT = {1: (3,), 2: (3,), 3: (1, 2)}
# orders of sigma_i sigma_j
RELATION_ORDER = {(1, 1): 1, (2, 2): 1, (3, 3): 1, (1, 2): 2, (1, 3): 3, (2, 3): 3}

WeylWord = tuple[int, ...]


def _check_word(word: Iterable[int]) -> WeylWord:
    w = tuple(int(i) for i in word)
    for i in w:
        if i not in (1, 2, 3):
            raise ValueError(f"generator index {i} out of range")
    return w


def _var(i: int) -> Poly:
    return Poly.var(i)


z1, z2, z3, u = (_var(i) for i in range(4))
q = u * u


def sigma_map(i: int) -> CoordMap:
    """Coordinate map of sigma_i: z_i -> 1/(q z_i), neighbours z_j -> u z_i z_j."""
    imgs = []
    for j in range(4):
        e = [0, 0, 0, 0]
        if j == U:
            e[U] = 1
            imgs.append((1, tuple(e)))
        elif j == i - 1:
            e[j] = -1
            e[U] = -2
            imgs.append((1, tuple(e)))
        elif (j + 1) in ADJACENT[i]:
            e[j] = 1
            e[i - 1] = 1
            e[U] = 1
            imgs.append((1, tuple(e)))
        else:
            e[j] = 1
            imgs.append((1, tuple(e)))
    return CoordMap(tuple(imgs))


def eps_map(i: int) -> CoordMap:
    """Sign flip of the variables adjacent to node i."""
    imgs = []
    for j in range(4):
        e = tuple(int(j == t) for t in range(4))
        sign = -1 if j != U and (j + 1) in ADJACENT[i] else 1
        imgs.append((sign, e))
    return CoordMap(tuple(imgs))


def word_map(word: Sequence[int]) -> CoordMap:
    """Composite coordinate map sigma_{i1} o sigma_{i2} o ... of a word."""
    m = CoordMap.identity()
    for i in reversed(_check_word(word)):
        m = sigma_map(i).then(m)
    return m


def plus_minus(h: MultiRat, i: int) -> tuple[MultiRat, MultiRat]:
    """Even and odd parts of h under the sign flip attached to node i."""
    he = h.substitute(eps_map(i).images)
    return (h + he) * Fraction(1, 2), (h - he) * Fraction(1, 2)


def act_simple(h: MultiRat, i: int) -> MultiRat:
    """Apply one simple reflection sigma_i to h."""
    zi = MultiRat.from_poly(_var(i - 1))
    sig = sigma_map(i)
    hs = h.substitute(sig.images)
    hes = h.substitute(eps_map(i).then(sig).images)
    hp = (hs + hes) * Fraction(1, 2)
    hm = (hs - hes) * Fraction(1, 2)
    qz = MultiRat.from_poly(q) * zi
    c_plus = -(1 - qz) / (qz * (1 - zi))
    c_minus = (MultiRat.from_poly(u) * zi).inverse()
    return c_plus * hp + c_minus * hm


def act(h: MultiRat, word: Sequence[int]) -> MultiRat:
    """Right action h | sigma_{i1} | sigma_{i2} | ... applied left to right."""
    for i in _check_word(word):
        h = act_simple(h, i)
    return h


def verify_group_relations(max_len: int = 6) -> dict:
    """Check that every defining relation word has identity coordinate map."""
    checked = []
    violations = []
    for (i, j), r in sorted(RELATION_ORDER.items()):
        word = (i, j) * r if i != j else (i,) * 2
        if len(word) > max_len:
            continue
        ok = word_map(word).is_identity()
        checked.append({"word": list(word), "identity": ok})
        if not ok:
            violations.append(list(word))
    # braid forms of the order-3 relations
    for i, j in ((1, 3), (2, 3)):
        ok = word_map((i, j, i)) == word_map((j, i, j))
        checked.append({"word": [i, j, i], "equals": [j, i, j], "identity": ok})
        if not ok:
            violations.append([i, j, i])
    return {"checked": checked, "violations": violations, "pass": not violations}


def _g_numerator() -> Poly:
    return (
        1 - z1 * z3 - z2 * z3 + z1 * z2 * z3 + q * z1 * z2 * z3 ** 2 - q * z1 ** 2 * z2 * z3 ** 2
        - q * z1 * z2 ** 2 * z3 ** 2 + q * z1 ** 2 * z2 ** 2 * z3 ** 3
    )


def g_denominator_factors() -> list[Poly]:
    return [
        1 - z1,
        1 - z2,
        1 - z3,
        1 - q * z1 ** 2 * z3 ** 2,
        1 - q * z2 ** 2 * z3 ** 2,
        1 - q * q * z1 ** 2 * z2 ** 2 * z3 ** 2,
    ]


@lru_cache(maxsize=1)
def g_A3() -> MultiRat:
    """The closed form of the invariant rational function g."""
    g = MultiRat.from_poly(_g_numerator())
    for f in g_denominator_factors():
        g = g / MultiRat.from_poly(f)
    return g


def a_parity(n: int) -> int:
    return n % 2


def uniqueness_checks(g: MultiRat | None = None) -> dict:
    """The normalisation g(0) = 1 and the z_i independence conditions."""
    g = g if g is not None else g_A3()
    out = {"constant_term_one": g.specialize_zero((Z1, Z2, Z3)).evaluate((0, 0, 0, 2)) == 1}
    for i in (1, 2, 3):
        zeroed = tuple(j - 1 for j in ADJACENT[i])
        h = g.specialize_zero(zeroed) * (1 - MultiRat.from_poly(_var(i - 1)))
        out[f"independent_of_z{i}"] = h.diff(i - 1).is_zero()
    out["pass"] = all(out.values())
    return out


@dataclass
class CGFunction:
    """g with a cached Taylor expansion in (z1, z2, z3)."""

    degree: int = 16
    g: MultiRat = field(default_factory=g_A3)
    _series: TruncSeries | None = field(default=None, repr=False)

    @property
    def series(self) -> TruncSeries:
        if self._series is None or self._series.D < self.degree:
            self._series = series_expand(self.g, self.degree)
        return self._series

    def extend(self, degree: int) -> None:
        if degree > self.degree:
            self.degree = degree
            self._series = None

    def coefficient(self, k1: int, k2: int, j: int) -> UPoly:
        if k1 + k2 + j > self.degree:
            raise KeyError("expand further")
        return self.series[(k1, k2, j)]


_CG_CACHE: dict[int, CGFunction] = {}


def cg_function(degree: int = 16) -> CGFunction:
    for d, cg in _CG_CACHE.items():
        if d >= degree:
            return cg
    cg = CGFunction(degree)
    _CG_CACHE[degree] = cg
    return cg


def cg_coefficient(k1: int, k2: int, j: int, degree: int = 16) -> UPoly:
    """Exact a(k1, k2, j; q) as a polynomial in u."""
    if min(k1, k2, j) < 0:
        raise ValueError("indices must be nonnegative")
    if k1 + k2 + j > degree:
        raise KeyError("expand further")
    return cg_function(degree).coefficient(k1, k2, j)


class CorrectionPolyTable:
    """P_j(z1, z2; q) and Q_k(z3; q) extracted from g, built lazily."""

    def __init__(self, j_max: int = 8, k_max: int = 8):
        self.j_max = j_max
        self.k_max = k_max
        self._P: dict[int, Poly] = {}
        self._Q: dict[tuple[int, int], Poly] = {}
        self._Tz3: tuple[dict[int, Poly], Poly] | None = None
        self._Tz12: tuple[dict[int, Poly], Poly] | None = None

    def _ensure_P(self, j: int) -> None:
        if j in self._P:
            return
        if self._Tz3 is None or max(self._Tz3[0]) < j:
            self._Tz3 = partial_expand(g_A3(), (Z3,), max(j, self.j_max))
            self._P.clear()
        T, d0 = self._Tz3
        for jj in range(max(T) + 1):
            part = T[jj].shift((0, 0, -jj, 0))
            if any(e[Z3] for e in part.terms):
                raise ArithmeticError("decomposition violated")
            power = jj if jj % 2 == 0 else jj + 1
            try:
                self._P[jj] = part.div_exact(d0 ** power)
            except ArithmeticError as exc:
                raise ArithmeticError("decomposition violated") from exc

    def _ensure_Q(self, d: int) -> None:
        if self._Tz12 is None or max(self._Tz12[0]) < d:
            self._Tz12 = partial_expand(g_A3(), (Z1, Z2), max(d, self.k_max))
            self._Q.clear()
        T, d0 = self._Tz12
        for dd in range(max(T) + 1):
            if (0, dd) in self._Q or (dd, 0) in self._Q:
                continue
            groups = T[dd].coefficient_in((Z1, Z2))
            power = dd if dd % 2 == 0 else dd + 1
            den = d0 ** power
            for k1 in range(dd + 1):
                k = (k1, dd - k1)
                part = groups.get(k, Poly(nvars=4))
                try:
                    self._Q[k] = part.div_exact(den) if part else part
                except ArithmeticError as exc:
                    raise ArithmeticError("decomposition violated") from exc

    def P(self, j: int) -> Poly:
        if j < 0:
            raise ValueError("index must be nonnegative")
        self._ensure_P(j)
        return self._P[j]

    def Q(self, k1: int, k2: int) -> Poly:
        if min(k1, k2) < 0:
            raise ValueError("indices must be nonnegative")
        self._ensure_Q(k1 + k2)
        return self._Q[(k1, k2)]


@lru_cache(maxsize=1)
def default_table() -> CorrectionPolyTable:
    return CorrectionPolyTable()


def extract_P(j: int) -> Poly:
    return default_table().P(j)


def extract_Q(k1: int, k2: int) -> Poly:
    return default_table().Q(k1, k2)


def _fe_map(var: int) -> CoordMap:
    imgs = []
    for t in range(4):
        e = [int(t == s) for s in range(4)]
        if t == var:
            e = [0, 0, 0, 0]
            e[var] = -1
            e[U] = -2
        imgs.append((1, tuple(e)))
    return CoordMap(tuple(imgs))


def _fe_holds(p: Poly, var: int, exponent: int) -> bool:
    lhs = p.substitute(_fe_map(var).images)
    mono = [0, 0, 0, 0]
    mono[var] = exponent
    mono[U] = exponent
    return lhs.shift(tuple(mono)) == p


def check_formal_fe(kind: str, index) -> bool:
    """Exact functional equation of P_j (both variables) or Q_k."""
    if kind == "P":
        j = int(index)
        p = extract_P(j)
        n = j - a_parity(j)
        return _fe_holds(p, Z1, n) and _fe_holds(p, Z2, n)
    if kind == "Q":
        k1, k2 = index
        n = k1 + k2 - a_parity(k1 + k2)
        return _fe_holds(extract_Q(k1, k2), Z3, n)
    raise ValueError("kind must be 'P' or 'Q'")


def residue_factor_check(perturb: bool = False) -> bool:
    """Exact identity for the even part of g at (alpha t, t/alpha, 1/q).

    Works in variables (t, alpha, unused, u).
    """
    g = g_A3()
    gp, _ = plus_minus(g, 3)
    images = (
        (1, (1, 1, 0, 0)),
        (1, (1, -1, 0, 0)),
        (1, (0, 0, 0, -2)),
        (1, (0, 0, 0, 1)),
    )
    lhs = gp.substitute(images)
    if not perturb:
        lhs = lhs * (1 - MultiRat.from_poly(Poly.var(U, power=-2)))
    t = Poly.var(0)
    al = Poly.var(1)
    rhs = MultiRat.const(1)
    for f in (1 - t * t, 1 - al * al * t * t, 1 - al ** -2 * t * t):
        rhs = rhs / MultiRat.from_poly(f)
    return rf_equal(lhs, rhs)


def P_numeric(j: int, p: int):
    """Callable (x1, x2) -> P_j(x1, x2; p) with floating coefficients."""
    return _numeric_in(extract_P(j), p, (Z1, Z2))


def Q_numeric(k1: int, k2: int, p: int):
    return _numeric_in(extract_Q(k1, k2), p, (Z3,))


def _numeric_in(poly: Poly, p: int, vars_: tuple[int, ...]):
    import numpy as np

    sq = p ** 0.5
    acc: dict[tuple[int, ...], float] = {}
    for e, c in poly.terms.items():
        key = tuple(e[v] for v in vars_)
        acc[key] = acc.get(key, 0.0) + float(c) * sq ** e[U]
    keys = list(acc)
    exps = np.array(keys, dtype=float).reshape(len(keys), len(vars_))
    coefs = np.array([acc[k] for k in keys])

    def f(*xs):
        val = 0
        for c, e in zip(coefs, exps):
            t = c
            for x, k in zip(xs, e):
                if k:
                    t = t * x ** int(k)
            val = val + t
        return val

    return f


def coefficient_facts(degree: int = 16) -> dict:
    """Exact checks of a(k1, k2, j) over k1 + k2 + j <= degree.

    min(k1 + k2, j) = 0 gives 1, min(k1 + k2, j) = 1 gives 0, and odd k1 + k2
    with odd j gives 0.
    """
    counts = {"monomial": 0, "min_one": 0, "odd_odd": 0}
    violations = []
    for total in range(degree + 1):
        for j in range(total + 1):
            for k1 in range(total - j + 1):
                k2 = total - j - k1
                a = cg_coefficient(k1, k2, j, degree)
                coeffs = [(e, c) for e, c in a.coefficients if c]
                k = k1 + k2
                if min(k, j) == 0:
                    counts["monomial"] += 1
                    if coeffs != [(0, 1)]:
                        violations.append(("monomial", k1, k2, j))
                if min(k, j) == 1:
                    counts["min_one"] += 1
                    if coeffs:
                        violations.append(("min_one", k1, k2, j))
                if k % 2 == 1 and j % 2 == 1:
                    counts["odd_odd"] += 1
                    if coeffs:
                        violations.append(("odd_odd", k1, k2, j))
    return {"degree": degree, "checked": counts, "violations": violations, "pass": not violations}
