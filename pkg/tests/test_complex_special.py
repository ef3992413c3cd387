import math

import mpmath
import numpy as np
import pytest

from voronoi3.coefficients import GL3Parameters
from voronoi3.complex_special import (
    g_delta,
    g_delta_integral,
    gamma,
    gamma_C,
    gamma_R,
    gamma_product,
    identity_grid,
    identity_residuals,
    log_g_delta,
    log_g_delta_via_ratio,
    log_gamma,
    log_gamma_R,
)
from voronoi3.errors import PoleError

POINTS = [0.5, 0.3 + 4j, -2.7 + 0.5j, 7.1 - 12j, 1e-3 + 1e-3j, -10.5 + 25j]


@pytest.mark.parametrize("z", POINTS)
def test_gamma_matches_mpmath(z):
    ref = complex(mpmath.gamma(z))
    assert abs(gamma(z) - ref) <= 1e-13 * abs(ref)


@pytest.mark.parametrize("z", POINTS)
def test_gamma_R_and_C_definitions(z):
    ref_r = complex(mpmath.pi ** (-z / 2) * mpmath.gamma(z / 2))
    ref_c = complex(2 * (2 * mpmath.pi) ** (-z) * mpmath.gamma(z))
    assert abs(gamma_R(z) - ref_r) <= 1e-13 * abs(ref_r)
    assert abs(gamma_C(z) - ref_c) <= 1e-13 * abs(ref_c)


def test_log_gamma_is_continuous_along_vertical_line():
    t = np.linspace(0, 200, 4001)
    lg = log_gamma(0.5 + 1j * t)
    assert np.max(np.abs(np.diff(lg.imag))) < 1.0


def test_large_imaginary_part_does_not_overflow():
    s = 0.5 + 1e4j
    v = log_gamma_R(s)
    ref = -s / 2 * mpmath.log(mpmath.pi) + mpmath.loggamma(s / 2)
    assert np.isfinite(v)
    assert abs(v.real - float(ref.real)) < 1e-9 * abs(float(ref.real))


@pytest.mark.parametrize("z", [0, -1, -7])
def test_gamma_poles(z):
    with pytest.raises(PoleError):
        log_gamma(z)


def test_gamma_R_poles_only_at_even_nonpositive():
    with pytest.raises(PoleError):
        log_gamma_R(-4)
    assert np.isfinite(log_gamma_R(-3))


@pytest.mark.parametrize("delta", [0, 1])
@pytest.mark.parametrize("s", [0.5, 0.2 + 3j, 2.5 - 1j, -3.3 + 0.1j])
def test_g_delta_two_forms_agree(s, delta):
    a = log_g_delta(s, delta)
    b = log_g_delta_via_ratio(s, delta)
    assert abs(np.exp(a - b) - 1) < 1e-12


def test_g_delta_closed_form_mpmath():
    s = 0.3 + 2j
    gc = 2 * (2 * mpmath.pi) ** (-s) * mpmath.gamma(s)
    assert abs(g_delta(s, 0) - complex(gc * mpmath.cos(mpmath.pi * s / 2))) < 1e-12 * abs(g_delta(s, 0))
    assert abs(g_delta(s, 1) - complex(1j * gc * mpmath.sin(mpmath.pi * s / 2))) < 1e-12 * abs(g_delta(s, 1))


def test_g_delta_pole_set():
    with pytest.raises(PoleError):
        log_g_delta(-2, 0)
    with pytest.raises(PoleError):
        log_g_delta(-1, 1)
    # cos(pi s/2) cancels the Gamma pole at odd negative integers
    assert np.isfinite(log_g_delta(-1, 0))


@pytest.mark.parametrize("delta", [0, 1])
def test_integral_definition(delta):
    assert abs(g_delta_integral(0.5, delta) - g_delta(0.5, delta)) < 1e-6


def test_integral_definition_strip_only():
    with pytest.raises(ValueError):
        g_delta_integral(1.5, 0)


def test_gamma_product_is_product_of_g():
    p = GL3Parameters((0.3 + 1j, -0.1, -0.2 - 1j), (1, 0, 1))
    s = 0.4 + 0.7j
    prod = 1.0
    for lam, d in zip(p.lam, p.delta):
        prod *= g_delta(s + lam, d)
    assert abs(gamma_product(s, p) - prod) < 1e-12 * abs(prod)


def test_identity_grid_has_400_points():
    assert identity_grid().size == 400


def test_identity_residuals_small():
    res = identity_residuals()
    assert set(res) == {"duplication", "reflection", "ratio", "pair"}
    assert max(res.values()) < 1e-10


def test_identity_residuals_catch_sign_bug():
    def flipped(s, delta):
        return log_g_delta(s, delta) + (1j * math.pi if delta else 0)

    res = identity_residuals(log_g=flipped)
    assert res["ratio"] > 0.1 or res["pair"] > 0.1
