"""Exact sparse Laurent polynomials, rational functions and truncated series.

Polynomials live in a fixed number of variables.  The A3 layer uses four:
``(z1, z2, z3, u)`` with ``u`` standing for the square root of ``q``, so all
``q``-content sits in even powers of ``u``.  Exponents may be negative
(Laurent) so that coordinate maps such as ``z -> 1/(q z)`` stay monomial.

Rational functions keep their denominator as a multiset of polynomial
factors.  No polynomial gcd is ever taken; equality is decided by
cross-multiplication over a common multiple of the factor lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

Coeff = int | Fraction
Exps = tuple[int, ...]

NVARS = 4
U = 3  # index of the sqrt(q) variable in the default layout


def _norm_coeff(c: Coeff) -> Coeff:
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


class Poly:
    """Sparse Laurent polynomial with exact rational coefficients."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, terms: Mapping[Exps, Coeff] | None = None, nvars: int = NVARS):
        self.nvars = nvars
        clean: dict[Exps, Coeff] = {}
        if terms:
            for e, c in terms.items():
                if c:
                    if len(e) != nvars:
                        raise ValueError("exponent length does not match nvars")
                    clean[tuple(e)] = _norm_coeff(c)
        self.terms = clean
        self._hash = None

    # constructors
    @classmethod
    def const(cls, c: Coeff, nvars: int = NVARS) -> "Poly":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def var(cls, i: int, nvars: int = NVARS, power: int = 1) -> "Poly":
        e = [0] * nvars
        e[i] = power
        return cls({tuple(e): 1}, nvars)

    @classmethod
    def monomial(cls, exps: Sequence[int], c: Coeff = 1) -> "Poly":
        return cls({tuple(exps): c}, len(exps))

    @classmethod
    def _raw(cls, terms: dict[Exps, Coeff], nvars: int) -> "Poly":
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(other, self.nvars)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def sorted_terms(self) -> list[tuple[Exps, Coeff]]:
        return sorted(self.terms.items(), reverse=True)

    def __repr__(self) -> str:
        if not self.terms:
            return "Poly(0)"
        names = ["z1", "z2", "z3", "u"] if self.nvars == 4 else [f"x{i}" for i in range(self.nvars)]
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"{n}^{k}" if k != 1 else n for n, k in zip(names, e) if k)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return "Poly(" + " + ".join(parts) + ")"

    def lead(self) -> tuple[Exps, Coeff]:
        e = max(self.terms)
        return e, self.terms[e]

    def min_exps(self) -> Exps:
        ks = list(self.terms)
        return tuple(min(k[i] for k in ks) for i in range(self.nvars))

    def max_exps(self) -> Exps:
        ks = list(self.terms)
        return tuple(max(k[i] for k in ks) for i in range(self.nvars))

    def degree(self, var: int) -> int:
        return max(k[var] for k in self.terms) if self.terms else -1

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_polynomial(self) -> bool:
        return all(min(e) >= 0 for e in self.terms) if self.terms else True

    def content(self) -> Fraction:
        """Positive rational g with self/g having coprime integer coefficients."""
        nums = 0
        dens = 1
        for c in self.terms.values():
            f = Fraction(c)
            nums = gcd(nums, f.numerator)
            dens = lcm(dens, f.denominator)
        return Fraction(nums, dens) if nums else Fraction(1)

    # arithmetic
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("mixed variable counts")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other, self.nvars)
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = _norm_coeff(v)
            else:
                out.pop(e, None)
        return Poly._raw(out, self.nvars)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly._raw({}, self.nvars)
            return Poly._raw({e: _norm_coeff(c * other) for e, c in self.terms.items()}, self.nvars)
        other = self._coerce(other)
        if len(self.terms) < len(other.terms):
            a, b = self.terms, other.terms
        else:
            a, b = other.terms, self.terms
        out: dict[Exps, Coeff] = {}
        n = self.nvars
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(ea[i] + eb[i] for i in range(n))
                out[e] = out.get(e, 0) + ca * cb
        return Poly._raw({e: _norm_coeff(c) for e, c in out.items() if c}, n)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            if self.is_monomial():
                (e, c), = self.terms.items()
                return Poly._raw({tuple(x * k for x in e): Fraction(c) ** k}, self.nvars).normalized_coeffs()
            raise ValueError("negative power of a non-monomial")
        result = Poly.const(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def normalized_coeffs(self) -> "Poly":
        return Poly._raw({e: _norm_coeff(c) for e, c in self.terms.items()}, self.nvars)

    def shift(self, exps: Sequence[int]) -> "Poly":
        """Multiply by the monomial with the given exponents."""
        n = self.nvars
        return Poly._raw({tuple(e[i] + exps[i] for i in range(n)): c for e, c in self.terms.items()}, n)

    # structural operations
    def substitute(self, images: Sequence[tuple[Coeff, Exps]]) -> "Poly":
        """Replace variable i by the monomial ``images[i] = (coef, exps)``.

        Target variable count is the length of the image exponent tuples.
        """
        m = len(images[0][1])
        out: dict[Exps, Coeff] = {}
        for e, c in self.terms.items():
            coef: Coeff = c
            ne = [0] * m
            for i, k in enumerate(e):
                if not k:
                    continue
                ic, ie = images[i]
                if ic != 1:
                    coef = coef * (Fraction(ic) ** k if k < 0 else ic ** k)
                for t in range(m):
                    if ie[t]:
                        ne[t] += k * ie[t]
            key = tuple(ne)
            out[key] = out.get(key, 0) + coef
        return Poly._raw({e: _norm_coeff(c) for e, c in out.items() if c}, m)

    def specialize_zero(self, vars_: Iterable[int]) -> "Poly":
        vs = tuple(vars_)
        for e in self.terms:
            if any(e[v] < 0 for v in vs):
                raise ValueError("cannot set a variable with negative exponent to zero")
        return Poly._raw({e: c for e, c in self.terms.items() if all(e[v] == 0 for v in vs)}, self.nvars)

    def diff(self, var: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            if e[var]:
                ne = list(e)
                ne[var] -= 1
                out[tuple(ne)] = c * e[var]
        return Poly._raw(out, self.nvars)

    def coefficient_in(self, vars_: Sequence[int]) -> dict[Exps, "Poly"]:
        """Group terms by the exponents of ``vars_``; values keep the other variables."""
        out: dict[Exps, dict[Exps, Coeff]] = {}
        for e, c in self.terms.items():
            key = tuple(e[v] for v in vars_)
            rest = list(e)
            for v in vars_:
                rest[v] = 0
            out.setdefault(key, {})[tuple(rest)] = c
        return {k: Poly._raw(v, self.nvars) for k, v in out.items()}

    def evaluate(self, values: Sequence) -> complex | float | Fraction:
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(values, e):
                if k:
                    t = t * x ** k
            total = total + t
        return total

    def div_exact(self, other: "Poly") -> "Poly":
        """Exact quotient of polynomials; raises ArithmeticError on a remainder."""
        if not (self.is_polynomial() and other.is_polynomial()):
            raise ValueError("div_exact needs nonnegative exponents")
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        le, lc = other.lead()
        n = self.nvars
        rem = dict(self.terms)
        quot: dict[Exps, Coeff] = {}
        oterms = list(other.terms.items())
        while rem:
            re_ = max(rem)
            rc = rem[re_]
            qe = tuple(re_[i] - le[i] for i in range(n))
            qc = Fraction(rc) / Fraction(lc)
            if any(x < 0 for x in qe):
                raise ArithmeticError("division is not exact")
            quot[qe] = _norm_coeff(qc)
            for oe, oc in oterms:
                e = tuple(qe[i] + oe[i] for i in range(n))
                v = rem.get(e, 0) - qc * oc
                if v:
                    rem[e] = _norm_coeff(v)
                else:
                    rem.pop(e, None)
        return Poly._raw(quot, n)


def _split_monomial(p: Poly) -> tuple[Exps, Poly]:
    """Write p = x^m * p0 with p0 having componentwise minimum exponent 0."""
    m = p.min_exps()
    if any(m):
        return m, p.shift(tuple(-x for x in m))
    return m, p


def _canonical_factor(p: Poly) -> tuple[Coeff, Exps, Poly]:
    """p = c * x^m * f with f content-free, leading coefficient positive."""
    m, p0 = _split_monomial(p)
    cont = p0.content()
    if p0.lead()[1] < 0:
        cont = -cont
    f = p0 * (1 / cont) if cont != 1 else p0
    return _norm_coeff(cont), m, f


class MultiRat:
    """Exact rational function ``num / prod(factor^mult)``.

    ``num`` may carry negative exponents; every denominator factor is a
    genuine (non-monomial) polynomial in canonical form, so monomials and
    constants are always folded into the numerator.
    """

    __slots__ = ("num", "factors")

    def __init__(self, num: Poly, den: Poly | None = None):
        self.num = num
        self.factors: tuple[tuple[Poly, int], ...] = ()
        if den is not None:
            r = MultiRat.from_poly(num) * MultiRat.from_poly(den).inverse()
            self.num, self.factors = r.num, r.factors

    @classmethod
    def _make(cls, num: Poly, factors: Iterable[tuple[Poly, int]]) -> "MultiRat":
        r = cls.__new__(cls)
        merged: dict[Poly, int] = {}
        for f, k in factors:
            if k:
                merged[f] = merged.get(f, 0) + k
        r.num = num
        r.factors = tuple(sorted(((f, k) for f, k in merged.items() if k), key=lambda fk: fk[0].sorted_terms()))
        return r

    @classmethod
    def from_poly(cls, p: Poly) -> "MultiRat":
        return cls._make(p, ())

    @classmethod
    def const(cls, c: Coeff, nvars: int = NVARS) -> "MultiRat":
        return cls._make(Poly.const(c, nvars), ())

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @property
    def denominator(self) -> Poly:
        """Expanded denominator times the monomial needed to clear the numerator."""
        d = Poly.const(1, self.nvars)
        for f, k in self.factors:
            d = d * f ** k
        m = self.num.min_exps() if self.num.terms else (0,) * self.nvars
        shift = tuple(-min(x, 0) for x in m)
        return d.shift(shift)

    @property
    def numerator(self) -> Poly:
        m = self.num.min_exps() if self.num.terms else (0,) * self.nvars
        shift = tuple(-min(x, 0) for x in m)
        return self.num.shift(shift)

    def den_product(self) -> Poly:
        d = Poly.const(1, self.nvars)
        for f, k in self.factors:
            d = d * f ** k
        return d

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return not self.factors

    def __repr__(self) -> str:
        den = " * ".join(f"({f})^{k}" for f, k in self.factors) or "1"
        return f"MultiRat({self.num} / {den})"

    # arithmetic
    def _coerce(self, other) -> "MultiRat":
        if isinstance(other, MultiRat):
            return other
        if isinstance(other, Poly):
            return MultiRat.from_poly(other)
        if isinstance(other, (int, Fraction)):
            return MultiRat.const(other, self.nvars)
        raise TypeError(f"cannot combine MultiRat with {type(other).__name__}")

    def _lcm_with(self, other: "MultiRat") -> tuple[dict[Poly, int], Poly, Poly]:
        a = dict(self.factors)
        b = dict(other.factors)
        common = dict(a)
        for f, k in b.items():
            common[f] = max(common.get(f, 0), k)
        one = Poly.const(1, self.nvars)
        ma, mb = one, one
        for f, k in common.items():
            if k - a.get(f, 0):
                ma = ma * f ** (k - a.get(f, 0))
            if k - b.get(f, 0):
                mb = mb * f ** (k - b.get(f, 0))
        return common, ma, mb

    def __add__(self, other) -> "MultiRat":
        other = self._coerce(other)
        common, ma, mb = self._lcm_with(other)
        return MultiRat._make(self.num * ma + other.num * mb, common.items())

    __radd__ = __add__

    def __neg__(self) -> "MultiRat":
        return MultiRat._make(-self.num, self.factors)

    def __sub__(self, other) -> "MultiRat":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiRat":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MultiRat":
        other = self._coerce(other)
        return MultiRat._make(self.num * other.num, list(self.factors) + list(other.factors))

    __rmul__ = __mul__

    def inverse(self) -> "MultiRat":
        if self.num.is_zero():
            raise ZeroDivisionError("degenerate action input: division by zero rational function")
        c, m, f = _canonical_factor(self.num)
        num = self.den_product().shift(tuple(-x for x in m)) * (Fraction(1) / Fraction(c))
        facs = [] if f == Poly.const(1, self.nvars) else [(f, 1)]
        return MultiRat._make(num.normalized_coeffs(), facs)

    def __truediv__(self, other) -> "MultiRat":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "MultiRat":
        return self._coerce(other) / self

    def __pow__(self, k: int) -> "MultiRat":
        if k < 0:
            return self.inverse() ** (-k)
        return MultiRat._make(self.num ** k, [(f, m * k) for f, m in self.factors])

    # structural operations
    def substitute(self, images: Sequence[tuple[Coeff, Exps]]) -> "MultiRat":
        num = self.num.substitute(images)
        factors = []
        for f, k in self.factors:
            g = f.substitute(images)
            if g.is_zero():
                raise ZeroDivisionError("degenerate action input: denominator vanishes")
            c, m, h = _canonical_factor(g)
            num = num.shift(tuple(-x * k for x in m)) * (Fraction(1) / Fraction(c) ** k)
            if not (h.is_monomial() and h == Poly.const(1, h.nvars)):
                if h.is_monomial():
                    (e, hc), = h.terms.items()
                    num = num.shift(tuple(-x * k for x in e)) * (Fraction(1) / Fraction(hc) ** k)
                else:
                    factors.append((h, k))
        return MultiRat._make(num.normalized_coeffs(), factors)

    def specialize_zero(self, vars_: Iterable[int]) -> "MultiRat":
        vs = tuple(vars_)
        factors = []
        num = self.num.specialize_zero(vs)
        for f, k in self.factors:
            g = f.specialize_zero(vs)
            if g.is_zero():
                raise ZeroDivisionError("denominator vanishes under specialization")
            c, m, h = _canonical_factor(g)
            num = num.shift(tuple(-x * k for x in m)) * (Fraction(1) / Fraction(c) ** k)
            if len(h) > 1:
                factors.append((h, k))
            else:
                (e, hc), = h.terms.items()
                num = num.shift(tuple(-x * k for x in e)) * (Fraction(1) / Fraction(hc) ** k)
        return MultiRat._make(num.normalized_coeffs(), factors)

    def diff(self, var: int) -> "MultiRat":
        d = self.den_product()
        return MultiRat._make(self.num.diff(var) * d - self.num * d.diff(var), [(f, 2 * k) for f, k in self.factors])

    def evaluate(self, values: Sequence):
        return self.num.evaluate(values) / self.den_product().evaluate(values)

    def canonical(self) -> tuple[Poly, Poly]:
        """Deterministic (numerator, denominator) pair with nonnegative exponents.

        Strips the common monomial and the rational content and makes the
        leading denominator coefficient positive.
        """
        num, den = self.numerator, self.denominator
        if num.is_zero():
            return num, Poly.const(1, self.nvars)
        m = tuple(min(a, b) for a, b in zip(num.min_exps(), den.min_exps()))
        num, den = num.shift(tuple(-x for x in m)), den.shift(tuple(-x for x in m))
        c = den.content()
        if den.lead()[1] < 0:
            c = -c
        return (num * (1 / c)).normalized_coeffs(), (den * (1 / c)).normalized_coeffs()


def rf_equal(a: MultiRat, b: MultiRat) -> bool:
    """Exact equality by cross-multiplication over a common denominator."""
    common, ma, mb = a._lcm_with(b)
    return (a.num * ma - b.num * mb).is_zero()


# coordinate maps -----------------------------------------------------------

@dataclass(frozen=True)
class CoordMap:
    """Per-variable monomial images ``var i -> coef * x^exps``."""

    images: tuple[tuple[Coeff, Exps], ...]

    @classmethod
    def identity(cls, nvars: int = NVARS) -> "CoordMap":
        return cls(tuple((1, tuple(int(i == j) for j in range(nvars))) for i in range(nvars)))

    def then(self, other: "CoordMap") -> "CoordMap":
        """Map whose substitution equals substituting self, then other."""
        out = []
        for c, e in self.images:
            p = Poly.monomial(e, c).substitute(other.images)
            (ne, nc), = p.terms.items()
            out.append((nc, ne))
        return CoordMap(tuple(out))

    def is_identity(self) -> bool:
        return self == CoordMap.identity(len(self.images))


def substitute(rf: MultiRat | Poly, cmap: CoordMap | Sequence[tuple[Coeff, Exps]]):
    images = cmap.images if isinstance(cmap, CoordMap) else tuple(cmap)
    return rf.substitute(images)


# polynomials in u -----------------------------------------------------------

class UPoly:
    """Polynomial in u over the rationals, stored as increasing (exponent, coeff)."""

    __slots__ = ("coefficients",)

    def __init__(self, coeffs: Mapping[int, Coeff] | Iterable[tuple[int, Coeff]] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[int, Coeff] = {}
        for e, c in items:
            acc[e] = acc.get(e, 0) + c
        self.coefficients: tuple[tuple[int, Coeff], ...] = tuple(
            (e, _norm_coeff(c)) for e, c in sorted(acc.items()) if c
        )

    @classmethod
    def from_poly(cls, p: Poly, var: int = U) -> "UPoly":
        out: dict[int, Coeff] = {}
        for e, c in p.terms.items():
            if any(x for i, x in enumerate(e) if i != var):
                raise ValueError("polynomial depends on variables other than u")
            out[e[var]] = out.get(e[var], 0) + c
        return cls(out)

    def to_poly(self, nvars: int = NVARS, var: int = U) -> Poly:
        return Poly({tuple(e if i == var else 0 for i in range(nvars)): c for e, c in self.coefficients}, nvars)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, UPoly):
            return self.coefficients == other.coefficients
        if isinstance(other, (int, Fraction)):
            return self.coefficients == UPoly({0: other}).coefficients
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __repr__(self) -> str:
        if not self.coefficients:
            return "UPoly(0)"
        return "UPoly(" + " + ".join(f"{c}*u^{e}" if e else f"{c}" for e, c in self.coefficients) + ")"

    def is_zero(self) -> bool:
        return not self.coefficients

    def is_even(self) -> bool:
        return all(e % 2 == 0 for e, _ in self.coefficients)

    def degree(self) -> int:
        return self.coefficients[-1][0] if self.coefficients else -1

    def __call__(self, u):
        return sum(c * u ** e for e, c in self.coefficients) if self.coefficients else 0

    def at_q(self, q):
        """Value at u = sqrt(q); exact when q is rational and only even powers occur."""
        if self.is_even():
            return sum(c * q ** (e // 2) for e, c in self.coefficients) if self.coefficients else 0
        return self(q ** 0.5)


class TruncSeries:
    """Taylor coefficients of a function of (z1, z2, z3) up to total degree D."""

    __slots__ = ("D", "coeffs")

    def __init__(self, D: int, coeffs: Mapping[tuple[int, int, int], UPoly]):
        for k in coeffs:
            if sum(k) > D:
                raise ValueError("stored key exceeds the degree bound")
        self.D = D
        self.coeffs = {k: v for k, v in coeffs.items() if not v.is_zero()}

    def __getitem__(self, k: tuple[int, int, int]) -> UPoly:
        if sum(k) > self.D:
            raise KeyError("expand further")
        return self.coeffs.get(tuple(k), UPoly())

    def restrict(self, D: int) -> "TruncSeries":
        return TruncSeries(D, {k: v for k, v in self.coeffs.items() if sum(k) <= D})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.D == other.D and self.coeffs == other.coeffs


def _graded(p: Poly, vars_: Sequence[int]) -> dict[int, Poly]:
    out: dict[int, dict] = {}
    for e, c in p.terms.items():
        d = sum(e[v] for v in vars_)
        out.setdefault(d, {})[e] = c
    return {d: Poly._raw(t, p.nvars) for d, t in out.items()}


def partial_expand(rf: MultiRat, vars_: Sequence[int], D: int) -> tuple[dict[int, Poly], Poly]:
    """Expand rf in the variables ``vars_`` up to total degree D.

    Returns ``(T, D0)`` where ``D0`` is the denominator at ``vars_ = 0`` and the
    degree-d homogeneous part of rf equals ``T[d] / D0**(d+1)``.  The other
    variables stay symbolic.
    """
    num = rf.num
    if any(e[v] < 0 for e in num.terms for v in vars_):
        raise ValueError("not expandable at origin")
    den = rf.den_product()
    nd = _graded(num, vars_)
    dd = _graded(den, vars_)
    d0 = dd.get(0)
    if d0 is None or d0.is_zero():
        raise ValueError("not expandable at origin")
    T: dict[int, Poly] = {}
    d0_pow = [Poly.const(1, rf.nvars)]
    for d in range(D + 1):
        d0_pow.append(d0_pow[-1] * d0)
    for d in range(D + 1):
        acc = nd.get(d, Poly._raw({}, rf.nvars)) * d0_pow[d]
        for k in range(1, d + 1):
            dk = dd.get(k)
            if dk is not None and d - k in T:
                acc = acc - dk * T[d - k] * d0_pow[k - 1]
        T[d] = acc
    return T, d0


def series_expand(rf: MultiRat, D: int, zvars: Sequence[int] = (0, 1, 2), uvar: int = U) -> TruncSeries:
    """Exact Taylor coefficients of rf in ``zvars`` up to total degree D."""
    den = rf.den_product()
    d0 = _graded(den, zvars).get(0)
    if d0 is None or d0.is_zero():
        raise ValueError("not expandable at origin")
    if not d0.is_monomial():
        raise ValueError("not expandable at origin: constant term is not a unit")
    (e0, c0), = d0.terms.items()
    inv0 = (Fraction(1) / Fraction(c0), tuple(-x for x in e0))
    num = rf.num
    if any(e[v] < 0 for e in num.terms for v in zvars):
        raise ValueError("not expandable at origin")
    nd = _graded(num, zvars)
    dd = _graded(den, zvars)
    S: dict[int, Poly] = {}
    zero = Poly._raw({}, rf.nvars)
    for d in range(D + 1):
        acc = nd.get(d, zero)
        for k in range(1, d + 1):
            dk = dd.get(k)
            if dk is not None and S.get(d - k):
                acc = acc - dk * S[d - k]
        S[d] = (acc.shift(inv0[1]) * inv0[0]).normalized_coeffs()
    out: dict[tuple[int, int, int], dict[int, Coeff]] = {}
    for d, p in S.items():
        for e, c in p.terms.items():
            key = tuple(e[v] for v in zvars)
            out.setdefault(key, {})[e[uvar]] = c
    return TruncSeries(D, {k: UPoly(v) for k, v in out.items()})
