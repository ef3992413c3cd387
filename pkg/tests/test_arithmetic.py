import cmath
import math

import numpy as np
import pytest
import sympy

from voronoi3.arithmetic import (
    FiniteSequence,
    chi_hat_relation_check,
    divisors,
    enumerate_characters,
    euler_phi,
    exponential_sum_residuals,
    factorize,
    finite_fourier,
    gauss_sum,
    kloosterman,
    mobius,
    mobius_sieve,
    modinv,
    primitive_characters,
    ramanujan_closed_form,
    ramanujan_sum,
    twisted_gauss_sum,
)


@pytest.mark.parametrize("n", [1, 2, 12, 97, 360, 1001, 2**10, 9973 * 3])
def test_number_theory_against_sympy(n):
    assert factorize(n) == dict(sympy.factorint(n))
    assert divisors(n) == sympy.divisors(n)
    assert mobius(n) == sympy.mobius(n)
    assert euler_phi(n) == sympy.totient(n)


def test_mobius_sieve_matches_pointwise():
    mu = mobius_sieve(500)
    assert all(mu[n] == mobius(n) for n in range(1, 501))


def test_modinv():
    assert (7 * modinv(7, 30)) % 30 == 1
    assert (-3 * modinv(-3, 8)) % 8 == 1
    with pytest.raises(ValueError):
        modinv(4, 10)


def naive_kloosterman(n, m, c):
    return sum(cmath.exp(2j * math.pi * (n * x + m * pow(x, -1, c)) / c)
               for x in range(c) if math.gcd(x, c) == 1).real


@pytest.mark.parametrize("n,m,c", [(1, 1, 7), (2, 5, 12), (0, 3, 9), (4, 4, 25), (-3, 2, 11)])
def test_kloosterman_naive(n, m, c):
    assert abs(kloosterman(n, m, c) - naive_kloosterman(n, m, c)) < 1e-10


def test_kloosterman_weil_bound():
    for c in (7, 11, 13, 101):
        for n in range(1, 6):
            assert abs(kloosterman(n, 1, c)) <= 2 * math.sqrt(c) + 1e-9


def test_kloosterman_modulus_one():
    assert kloosterman(3, 4, 1) == pytest.approx(1.0)


def test_ramanujan_sum():
    for c in range(1, 40):
        for k in range(-5, 30):
            assert ramanujan_sum(k, c) == ramanujan_closed_form(k, c)
    assert ramanujan_sum(0, 12) == euler_phi(12)


def test_character_counts():
    for q in range(1, 40):
        chars = enumerate_characters(q)
        assert len(chars) == euler_phi(q)
    # number of primitive characters mod q is the Dirichlet convolution mu * phi
    for q in range(1, 40):
        expected = sum(mobius(d) * euler_phi(q // d) for d in divisors(q))
        assert len(primitive_characters(q)) == expected


def test_no_primitive_characters_mod_2():
    assert primitive_characters(2) == []


@pytest.mark.parametrize("q", [5, 8, 12, 15, 16])
def test_character_invariants(q):
    for chi in enumerate_characters(q):
        units = [n for n in range(q) if math.gcd(n, q) == 1]
        for a in units:
            for b in units:
                assert abs(chi(a * b) - chi(a) * chi(b)) < 1e-12
        assert all(chi(n) == 0 for n in range(q) if math.gcd(n, q) > 1)
        assert abs(chi(-1) - (-1) ** chi.eps) < 1e-12
        assert chi.primitive == (chi.conductor() == q)


def test_character_order_is_deterministic():
    a = [c.values for c in enumerate_characters(24)]
    b = [c.values for c in enumerate_characters(24)]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27])
def test_gauss_sums(q):
    for chi in primitive_characters(q):
        g = gauss_sum(chi)
        assert abs(abs(g) ** 2 - q) < 1e-10
        assert chi_hat_relation_check(chi) < 1e-10
        for n in range(-3, 8):
            assert abs(twisted_gauss_sum(chi, n) - np.conj(chi(n)) * g) < 1e-10


def test_finite_fourier_sign_convention():
    a = FiniteSequence(6, np.arange(6.0))
    hat = finite_fourier(a).entries
    ref = [sum(cmath.exp(2j * math.pi * k * l / 6) * l for l in range(6)) for k in range(6)]
    assert np.allclose(hat, ref, atol=1e-12)
    neg = finite_fourier(FiniteSequence(-6, np.arange(6.0))).entries
    assert np.allclose(neg, np.conj(ref), atol=1e-12)


def test_finite_sequence_shape():
    with pytest.raises(ValueError):
        FiniteSequence(5, np.zeros(4))


def test_exponential_sum_suite():
    res = exponential_sum_residuals()
    assert set(res) == {"kloosterman_symmetry", "ramanujan", "gauss_a", "gauss_b"}
    assert max(res.values()) <= 1e-10
