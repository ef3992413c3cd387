"""Complex Gamma function and the Gamma-factor algebra used by the kernels.

Everything here is vectorised over numpy arrays and works in log space where
the individual factors would overflow.  The convention is

    Gamma_R(s) = pi^(-s/2) Gamma(s/2),    Gamma_C(s) = 2 (2 pi)^(-s) Gamma(s),
    G_0(s) = Gamma_C(s) cos(pi s / 2),    G_1(s) = i Gamma_C(s) sin(pi s / 2).
"""

from __future__ import annotations

import numpy as np
from scipy import special

from .errors import PoleError

POLE_TOL = 1e-9

LOG_PI = np.log(np.pi)
LOG_2PI = np.log(2.0 * np.pi)


def _as_complex(z):
    return np.asarray(z, dtype=complex)


def _near_nonpositive_integer(z, tol=POLE_TOL):
    z = _as_complex(z)
    nearest = np.round(z.real)
    return (nearest <= 0) & (np.abs(z.real - nearest) < tol) & (np.abs(z.imag) < tol)


def log_gamma(z):
    """Principal branch of log Gamma(z); PoleError within 1e-9 of a nonpositive integer.

    >>> float(log_gamma(4.0).real)  # log 6
    1.791759469228055
    """
    z = _as_complex(z)
    mask = _near_nonpositive_integer(z)
    if np.any(mask):
        raise PoleError(f"log_gamma has a pole at {np.ravel(z[mask] if z.ndim else z)[0]!r}")
    return special.loggamma(z)


def gamma(z):
    return np.exp(log_gamma(z))


def log_gamma_R(s):
    s = _as_complex(s)
    if np.any(_near_nonpositive_integer(s / 2.0)):
        raise PoleError("Gamma_R has a pole at s in -2Z_{>=0}")
    return -0.5 * s * LOG_PI + log_gamma(s / 2.0)


def log_gamma_C(s):
    s = _as_complex(s)
    if np.any(_near_nonpositive_integer(s)):
        raise PoleError("Gamma_C has a pole at s in Z_{<=0}")
    return np.log(2.0) - s * LOG_2PI + log_gamma(s)


def gamma_R(s):
    """Gamma_R(s) = pi^(-s/2) Gamma(s/2)."""
    return np.exp(log_gamma_R(s))


def gamma_C(s):
    """Gamma_C(s) = 2 (2 pi)^(-s) Gamma(s)."""
    return np.exp(log_gamma_C(s))


def _log_cos(z):
    # exact rewrites of cos z that never overflow
    z = _as_complex(z)
    up = z.imag >= 0
    e = np.exp(2j * np.where(up, z, -z))
    with np.errstate(divide="ignore"):
        return np.where(up, -1j * z, 1j * z) - np.log(2.0) + np.log(1.0 + e)


def _log_sin(z):
    z = _as_complex(z)
    up = z.imag >= 0
    e = np.exp(2j * np.where(up, z, -z))
    with np.errstate(divide="ignore"):
        return (
            np.where(up, -1j * z + np.log(0.5j), 1j * z + np.log(-0.5j))
            + np.log(1.0 - e)
        )


def _g_pole_mask(s, delta):
    s = _as_complex(s)
    nearest = np.round(s.real)
    on_int = (np.abs(s.real - nearest) < POLE_TOL) & (np.abs(s.imag) < POLE_TOL)
    return on_int & (nearest <= 0) & ((nearest.astype(int) - delta) % 2 == 0)


def log_g_delta_via_ratio(s, delta):
    """log G_delta(s) from i^delta Gamma_R(s+delta) / Gamma_R(1-s+delta).

    1/Gamma_R is entire, so this form has no removable singularities; zeros of
    G come out as a real part of -inf.
    """
    s = _as_complex(s)
    delta = int(delta) % 2
    if np.any(_g_pole_mask(s, delta)):
        raise PoleError(f"G_{delta} has a pole in the pole set (2Z+{delta}) n Z<=0")
    num = log_gamma_R(s + delta)
    den_arg = 1.0 - s + delta
    zero = _near_nonpositive_integer(den_arg / 2.0)
    safe = np.where(zero, 1.0, den_arg)
    den = log_gamma_R(safe)
    out = delta * 0.5j * np.pi + num - den
    return np.where(zero, -np.inf + 0j, out)


def log_g_delta(s, delta):
    """log G_delta(s), from Gamma_C(s) times cos or sin.

    At the removable points (nonpositive integers outside the pole set) the
    Gamma_C pole meets a trigonometric zero; those points are routed through
    the Gamma_R ratio form.
    """
    s = _as_complex(s)
    delta = int(delta) % 2
    if np.any(_g_pole_mask(s, delta)):
        raise PoleError(f"G_{delta} has a pole in the pole set (2Z+{delta}) n Z<=0")
    removable = _near_nonpositive_integer(s, tol=1e-6)
    if np.any(removable):
        safe = np.where(removable, 0.5, s)
        main = log_g_delta(safe, delta)
        alt = log_g_delta_via_ratio(np.where(removable, s, 0.5), delta)
        return np.where(removable, alt, main)
    trig = _log_cos(0.5 * np.pi * s) if delta == 0 else 0.5j * np.pi + _log_sin(0.5 * np.pi * s)
    return log_gamma_C(s) + trig


def g_delta(s, delta):
    """G_delta(s); delta is reduced mod 2."""
    return np.exp(log_g_delta(s, delta))


def _params_lambda_delta(params):
    lam = tuple(complex(x) for x in params.lam)
    delta = tuple(int(d) % 2 for d in params.delta)
    return lam, delta


def log_gamma_product(s, params, eps=0):
    """log of prod_j G_{eps+delta_j}(s + lambda_j)."""
    lam, delta = _params_lambda_delta(params)
    s = _as_complex(s)
    total = np.zeros_like(s)
    for j, (l, d) in enumerate(zip(lam, delta)):
        try:
            total = total + log_g_delta(s + l, (eps + d) % 2)
        except PoleError as exc:
            raise PoleError(f"factor j={j + 1}: {exc}") from None
    return total


def gamma_product(s, params, eps=0):
    """prod_{j=1}^3 G_{eps+delta_j}(s + lambda_j)."""
    return np.exp(log_gamma_product(s, params, eps))


def reduced_parities(params, eta):
    """delta'_j in {0,1} with delta'_j = delta_j + eta mod 2."""
    return tuple((int(d) + int(eta)) % 2 for d in params.delta)


def log_kernel_gamma_product(s, params, eta):
    """log of prod_j G_{eta+delta_j}(s - lambda_j + 1) via the G_delta definition."""
    lam, delta = _params_lambda_delta(params)
    s = _as_complex(s)
    total = np.zeros_like(s)
    for j, (l, d) in enumerate(zip(lam, delta)):
        try:
            total = total + log_g_delta(s - l + 1.0, (eta + d) % 2)
        except PoleError as exc:
            raise PoleError(f"factor j={j + 1}: {exc}") from None
    return total


def log_kernel_gamma_ratio(s, params, eta):
    """log of pi^(-3/2-3s) prod_j i^d'_j pi^l_j Gamma((s+1-l_j+d'_j)/2) / Gamma((-s+l_j+d'_j)/2).

    Same function as log_kernel_gamma_product, written with plain Gamma ratios;
    zeros of the product (poles of a denominator Gamma) give -inf.
    """
    lam, _ = _params_lambda_delta(params)
    dprime = reduced_parities(params, eta)
    s = _as_complex(s)
    total = (-1.5 - 3.0 * s) * LOG_PI
    for l, d in zip(lam, dprime):
        den_arg = 0.5 * (-s + l + d)
        zero = _near_nonpositive_integer(den_arg)
        den = log_gamma(np.where(zero, 1.0, den_arg))
        term = d * 0.5j * np.pi + l * LOG_PI + log_gamma(0.5 * (s + 1.0 - l + d)) - den
        total = total + np.where(zero, -np.inf + 0j, term)
    return total


def r_factor(s, k):
    """R(s) = i^k (2 pi)^(2s-1) Gamma(1-s+(k-1)/2) / Gamma(s+(k-1)/2) for weight k."""
    s = _as_complex(s)
    h = 0.5 * (k - 1)
    return (1j) ** k * np.exp((2.0 * s - 1.0) * LOG_2PI + log_gamma(1.0 - s + h) - log_gamma(s + h))


# ----------------------------------------------------------- identity suite


def g_delta_integral(s: complex, delta: int) -> complex:
    """G_delta(s) from its defining integral of e(x) |x|^(s-1) sg(x)^delta, 0 < Re s < 1.

    Independent of the closed forms: on [0, 1] the singular part of the even
    integrand is integrated exactly, and [1, inf) goes through QUADPACK's
    Fourier-integral routine.
    """
    from scipy import integrate

    s = complex(s)
    if not 0.0 < s.real < 1.0:
        raise ValueError("the integral converges only for 0 < Re s < 1")
    delta = int(delta) % 2
    w = 2.0 * np.pi

    def part(fn, a, b, **kw):
        re = integrate.quad(lambda x: (fn(x) * x ** (s - 1.0)).real, a, b, **kw)[0]
        im = integrate.quad(lambda x: (fn(x) * x ** (s - 1.0)).imag, a, b, **kw)[0]
        return re + 1j * im

    if delta == 0:
        head = part(lambda x: np.cos(w * x) - 1.0, 0.0, 1.0, limit=200, epsabs=1e-14) + 1.0 / s
    else:
        head = part(lambda x: np.sin(w * x), 0.0, 1.0, limit=200, epsabs=1e-14)
    weight = "cos" if delta == 0 else "sin"
    tail_re = integrate.quad(lambda x: (x ** (s - 1.0)).real, 1.0, np.inf, weight=weight, wvar=w)[0]
    tail_im = integrate.quad(lambda x: (x ** (s - 1.0)).imag, 1.0, np.inf, weight=weight, wvar=w)[0]
    half = head + tail_re + 1j * tail_im
    return complex(2.0 * half * (1j if delta else 1.0))


def identity_grid(n_re: int = 20, n_im: int = 20) -> np.ndarray:
    """n_re x n_im points in |Re s| <= 5, |Im s| <= 20, off the integers."""
    re = np.linspace(-4.9, 4.9, n_re) + 0.0137
    im = np.linspace(-20.0, 20.0, n_im)
    return (re[:, None] + 1j * im[None, :]).ravel()


def _rel(log_a, log_b):
    return np.abs(np.expm1(log_a - log_b))


def identity_residuals(grid=None, log_g=None) -> dict[str, float]:
    """Max relative residual of each Gamma identity over the grid.

    duplication: Gamma_C = Gamma_R(s) Gamma_R(s+1); reflection: G(s) G(1-s) = (-1)^d;
    ratio: G_d(s) = i^d Gamma_R(s+d) / Gamma_R(1-s+d); pair: the Gamma_C pairing
    of two G-factors.  `log_g` replaces log_g_delta (used to test the checker).
    """
    s = identity_grid() if grid is None else np.asarray(grid, dtype=complex)
    log_g = log_g_delta if log_g is None else log_g
    out = {}
    out["duplication"] = float(np.max(_rel(log_gamma_C(s), log_gamma_R(s) + log_gamma_R(s + 1))))
    refl, ratio = 0.0, 0.0
    for d in (0, 1):
        lhs = log_g(s, d) + log_g(1 - s, d)
        refl = max(refl, float(np.max(np.abs(np.exp(lhs) - (-1) ** d))))
        rhs = d * 0.5j * np.pi + log_gamma_R(s + d) - log_gamma_R(1 - s + d)
        ratio = max(ratio, float(np.max(_rel(log_g(s, d), rhs))))
    out["reflection"] = refl
    out["ratio"] = ratio
    pair = 0.0
    base = 0.31 + 0.17j
    for d1, d2 in ((0, 0), (1, 0), (0, 1), (1, 1)):
        gap = 2 + (d1 - d2 + 1) % 2  # lambda_1 - lambda_2 in 2Z + d1 - d2 + 1
        l1, l2 = base + gap, base
        lhs = log_g(s + l1, d1) + log_g(s + l2, d2)
        rhs = 0.5j * np.pi * (gap + 1) + log_gamma_C(s + l1) - log_gamma_C(1 - s - l2)
        pair = max(pair, float(np.max(_rel(lhs, rhs))))
    out["pair"] = pair
    return out
