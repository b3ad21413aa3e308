import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy.functions.combinatorial.numbers import jacobi_symbol
from sympy.functions.combinatorial.numbers import kronecker_symbol

from mdsforge.characters import (
    CharSpec, ac_spec, chi_d, chi_tilde, check_level, dirichlet_L, dirichlet_fe_residual, div_set,
    fundamental_discriminant, gauss_sum, jacobi, jacobi_vec, kronecker, kronecker_vec,
    primitive_specs_up_to, spec_from_m,
)

odd_pos = st.integers(1, 10 ** 6).map(lambda k: 2 * k + 1)


@given(st.integers(-10 ** 6, 10 ** 6), odd_pos)
def test_jacobi_matches_sympy(a, n):
    assert jacobi(a, n) == jacobi_symbol(a, n)


@given(st.integers(-10 ** 5, 10 ** 5), st.integers(-10 ** 5, 10 ** 5))
def test_kronecker_matches_sympy(d, n):
    if d == n == 0:
        with pytest.raises(ValueError):
            kronecker(0, 0)
        return
    assert kronecker(d, n) == kronecker_symbol(d, n)


@settings(max_examples=30)
@given(st.integers(-500, 500).filter(lambda d: d % 4 in (0, 1) and d != 0))
def test_vectorised_kronecker(D):
    n = np.arange(1, 400)
    assert kronecker_vec(D, n).tolist() == [kronecker_symbol(D, int(k)) for k in n]


@settings(max_examples=30)
@given(st.integers(-300, 300))
def test_vectorised_jacobi(a):
    n = np.arange(1, 400, 2)
    assert jacobi_vec(a, n).tolist() == [jacobi_symbol(a, int(k)) for k in n]


@given(st.integers(-10 ** 4, 10 ** 4), odd_pos, odd_pos)
def test_jacobi_multiplicative_in_modulus(a, m, n):
    assert jacobi(a, m * n) == jacobi(a, m) * jacobi(a, n)


@given(odd_pos, odd_pos)
def test_quadratic_reciprocity(m, n):
    from math import gcd
    if gcd(m, n) == 1:
        sign = -1 if (m % 4 == 3 and n % 4 == 3) else 1
        assert jacobi(m, n) * jacobi(n, m) == sign


def test_jacobi_rejects_even_modulus():
    with pytest.raises(ValueError):
        jacobi(3, 10)


@pytest.mark.parametrize("m,D", [(1, 1), (-1, -4), (2, 8), (-2, -8), (3, 12), (5, 5), (-3, -3), (-15, -15), (6, 24)])
def test_fundamental_discriminant(m, D):
    assert fundamental_discriminant(m) == D


def test_charspec_validation():
    for bad in (dict(a=3), dict(d0=2), dict(d0=9), dict(c=3, d0=3), dict(c=-1)):
        with pytest.raises(ValueError):
            CharSpec(**bad)


@settings(max_examples=50)
@given(st.sampled_from([1, -1, 2, -2]), st.sampled_from([1, 3, 5, 15, 7]), st.sampled_from([1, -1, 11, -11, 13]))
def test_charspec_is_character_of_field(a, c, d0):
    from math import gcd
    if gcd(c, d0) != 1:
        return
    spec = CharSpec(d0=d0, a=a, c=c)
    D = spec.discriminant
    for n in range(1, 120):
        assert spec(n) == kronecker_symbol(D, n)
    # same field as spec_from_m
    assert spec_from_m(spec.m).discriminant == D


def test_parity_and_conductor():
    assert CharSpec(a=-1).parity == 1 and CharSpec(a=-1).conductor == 4
    assert CharSpec(a=2).conductor == 8 and CharSpec(a=2).parity == 0
    assert CharSpec(d0=5).conductor == 5
    assert CharSpec().is_principal


def test_chi_tilde_and_chi_d():
    for n in (1, 3, 5, 15, 21):
        spec = chi_tilde(n)
        for d in range(1, 200, 2):
            assert spec(d) == jacobi(d, n)
    for d in (9, 45, 75, 121):
        spec = chi_d(d)
        for n in range(1, 200, 2):
            if np.gcd(n, d) == 1:
                assert spec(n) == jacobi(d, n)
    with pytest.raises(ValueError):
        chi_tilde(9)


def test_div_set_size_and_order():
    assert len(div_set(11)) == 8
    assert len(div_set(9)) == 8
    assert len(div_set(3 * 5 * 49)) == 4 * 2 ** 3
    assert div_set(15)[:4] == [(1, 1), (1, 3), (1, 5), (1, 15)]
    assert ac_spec((-2, 3)).m == -6


@pytest.mark.parametrize("N,msg", [(12, "even"), (27, "cubefree"), (8, "even")])
def test_unsupported_levels(N, msg):
    with pytest.raises(ValueError, match=msg):
        check_level(N)


@pytest.mark.parametrize("spec", primitive_specs_up_to(60))
def test_gauss_sum_normalisation(spec):
    g = gauss_sum(spec)
    target = 1 if spec.parity == 0 else 1j
    assert abs(g - target) < 1e-10


def test_gauss_sum_requires_primitivity():
    with pytest.raises(ValueError):
        gauss_sum(CharSpec(d0=5), modulus=10)


def _mp_L(w, spec):
    D = spec.discriminant
    Q = abs(D)
    if Q == 1:
        return complex(mpmath.zeta(w))
    chi = [int(kronecker_symbol(D, k)) for k in range(Q)]
    return complex(mpmath.dirichlet(w, chi))


@pytest.mark.parametrize("w", [0.5, 0.3 + 2j, 1.7, -0.4 + 0.5j, 2.5])
@pytest.mark.parametrize("m", [1, -1, 2, -2, 5, -3, -7, 13, -15, 6])
def test_dirichlet_L_matches_mpmath(w, m):
    spec = spec_from_m(m)
    got = dirichlet_L(w, spec).value
    assert abs(got - _mp_L(w, spec)) < 1e-9 * max(1, abs(got))


def test_dirichlet_L_methods_agree_for_large_conductor():
    spec = spec_from_m(-431)
    a = dirichlet_L(0.5 + 1j, spec, method="afe", tol=1e-11).value
    b = dirichlet_L(0.5 + 1j, spec, method="em").value
    assert abs(a - b) < 1e-8
    c = dirichlet_L(3.0, spec, method="direct").value
    d = dirichlet_L(3.0, spec, method="em").value
    assert abs(c - d) < 1e-8


def test_removed_euler_factors():
    spec = spec_from_m(5)
    full = dirichlet_L(2.0, spec).value
    red = dirichlet_L(2.0, spec, removed=[2, 3]).value
    assert abs(red - full * (1 - spec(2) / 4) * (1 - spec(3) / 9)) < 1e-13


def test_pole_guard():
    with pytest.raises(ValueError, match="pole"):
        dirichlet_L(1.0, CharSpec())


@pytest.mark.parametrize("spec", primitive_specs_up_to(120))
def test_dirichlet_functional_equation(spec):
    for w in (0.3 + 0.7j, 0.8, -0.5 + 3j):
        assert dirichlet_fe_residual(w, spec) <= 1e-9
