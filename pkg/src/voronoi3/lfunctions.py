"""Twisted GL(3) L-functions and numerical checks of their functional equation.

Values inside the critical strip come from a smoothed approximate functional
equation: with Lambda(s) = q^(3s/2) gamma(s) L(s) and the Gamma-factor algebra
of complex_special,

    Lambda(s) = sum_n b_n I_n(s, X) + W^-1 sum_n b~_n I~_n(1 - s, 1/X),

where I_n is the vertical-line integral of q^(3(s+w)/2) gamma(s+w) n^(-s-w)
X^w dw / w.  No extra damping weight is used: gamma alone decays exponentially
in Im w and makes I_n decay exponentially in n, whereas a Gaussian weight would
slow the decay in n to exp(-(log n)^2 / 4).  The line integral is done by the
trapezoid rule, which converges geometrically for this analytic integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .arithmetic import DirichletCharacter, gauss_sum
from .coefficients import CoefficientTable, GL2Form, GL3Parameters, HeckeSource, sym2_source
from .complex_special import log_g_delta, log_gamma_C, log_gamma_R, log_gamma_product
from .errors import ConvergenceError, PoleError

# ---------------------------------------------------------------- series


def _row_col(table) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(table, HeckeSource):
        return np.asarray(table.row, dtype=complex), np.asarray(table.col, dtype=complex)
    if isinstance(table, CoefficientTable):
        return table.row(1).astype(complex), table.column(1).astype(complex)
    raise TypeError(f"unsupported coefficient source {type(table).__name__}")


def _trivial_character() -> DirichletCharacter:
    return DirichletCharacter(1, np.ones(1, dtype=complex), True, 0, 0)


@dataclass(frozen=True)
class LSeries:
    """Dirichlet series sum b_n chi(n) n^-s; coefficients[n] = b_n for n = 0..N.

    `dual_coefficients` are those of the contragredient side; they are needed
    only for values inside the critical strip.  `growth` is an exponent theta
    with |b_n| <= C n^theta, used for the tail bound of partial sums.
    """

    coefficients: np.ndarray = field(repr=False)
    character: DirichletCharacter | None = None
    direction: str = "standard"
    growth: float = 0.5
    dual_coefficients: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.direction not in ("standard", "contragredient"):
            raise ValueError(f"unknown direction {self.direction!r}")
        object.__setattr__(self, "coefficients", np.asarray(self.coefficients, dtype=complex))
        if self.dual_coefficients is not None:
            object.__setattr__(
                self, "dual_coefficients", np.asarray(self.dual_coefficients, dtype=complex)
            )

    @classmethod
    def from_table(cls, table, chi: DirichletCharacter | None = None,
                   direction: str = "standard", growth: float = 0.5) -> "LSeries":
        """standard: b_n = a_{1,n}; contragredient: b_n = a_{n,1}."""
        row, col = _row_col(table)
        own, dual = (row, col) if direction == "standard" else (col, row)
        return cls(own, chi, direction, growth, dual)

    @property
    def N(self) -> int:
        return len(self.coefficients) - 1

    @property
    def chi(self) -> DirichletCharacter:
        return self.character if self.character is not None else _trivial_character()

    def twisted(self, N: int | None = None) -> np.ndarray:
        """b_n chi(n) for n = 0..N."""
        N = self.N if N is None else N
        n = np.arange(N + 1)
        return self.coefficients[: N + 1] * self.chi(n)

    def dual(self) -> "LSeries":
        """The series on the other side of the functional equation (character conjugated)."""
        if self.dual_coefficients is None:
            raise ValueError("series carries no dual coefficients")
        other = "contragredient" if self.direction == "standard" else "standard"
        return LSeries(self.dual_coefficients, self.chi.conj(), other, self.growth,
                       self.coefficients)

    def tail_bound(self, sigma: float, N: int) -> float:
        """Bound C N^(1+theta-sigma) / (sigma-1-theta) for sum_{n>N} |b_n| n^-sigma."""
        excess = sigma - 1.0 - self.growth
        if excess <= 0:
            return math.inf
        n = np.arange(1, self.N + 1)
        C = float(np.max(np.abs(self.coefficients[1:]) * n ** (-self.growth)))
        return C * N ** (-excess) / excess


def l_partial(series: LSeries, s: complex, N: int | None = None) -> complex:
    """sum_{n <= N} b_n chi(n) n^-s."""
    N = series.N if N is None else N
    if N > series.N:
        raise ValueError(f"series only has {series.N} coefficients")
    b = series.twisted(N)[1:]
    n = np.arange(1, N + 1, dtype=float)
    return complex(np.sum(b * np.exp(-complex(s) * np.log(n))))


# ------------------------------------------------------ Gamma factors


@dataclass(frozen=True)
class CompletedGamma:
    """gamma(s) = prod Gamma_R(s + mu) * prod Gamma_C(s + nu)."""

    real_shifts: tuple[complex, ...] = ()
    complex_shifts: tuple[complex, ...] = ()

    def log(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.zeros_like(s)
        for mu in self.real_shifts:
            out = out + log_gamma_R(s + mu)
        for nu in self.complex_shifts:
            out = out + log_gamma_C(s + nu)
        return out

    def __call__(self, s):
        return np.exp(self.log(s))


@dataclass(frozen=True)
class GammaFactorization:
    """prod_j G_{eps+delta_j}(s + lambda_j) = const * gamma(s) / gamma_dual(1 - s)."""

    const: complex
    gamma: CompletedGamma
    gamma_dual: CompletedGamma


def _is_even_integer(z: complex, tol: float = 1e-9) -> bool:
    return abs(z.imag) < tol and abs(z.real / 2 - round(z.real / 2)) < tol


def _factorization_for(lam, d, pair) -> GammaFactorization:
    const = 1.0 + 0j
    real, real_dual, cplx, cplx_dual = [], [], [], []
    if pair is not None:
        big, small = pair
        const *= np.exp(0.5j * np.pi * (lam[big] - lam[small] + 1))
        cplx.append(lam[big])
        cplx_dual.append(-lam[small])
    for j in range(3):
        if pair is not None and j in pair:
            continue
        const *= 1j ** d[j]
        real.append(lam[j] + d[j])
        real_dual.append(-lam[j] + d[j])
    return GammaFactorization(
        complex(const),
        CompletedGamma(tuple(real), tuple(cplx)),
        CompletedGamma(tuple(real_dual), tuple(cplx_dual)),
    )


def _leftmost_shift(fac: GammaFactorization) -> float:
    g, gd = fac.gamma, fac.gamma_dual
    shifts = g.real_shifts + g.complex_shifts + gd.real_shifts + gd.complex_shifts
    return min(x.real for x in shifts)


def gamma_factorization(params: GL3Parameters, eps: int) -> GammaFactorization:
    """Split the product of G-factors into Gamma_R / Gamma_C pieces.

    A pair (i, j) with lambda_i - lambda_j - (d_i - d_j) - 1 an even integer
    (d = eps + delta mod 2) merges into i^(lambda_i-lambda_j+1) Gamma_C(s+lambda_i)
    / Gamma_C(1-s-lambda_j); i is the entry with the larger real part.  Each
    remaining factor is i^d Gamma_R(s+lambda+d) / Gamma_R(1-s-lambda+d).

    All admissible pairings give the same product; the one whose Gamma
    factors have their poles furthest to the left is returned (first found on
    ties), since the approximate functional equation needs gamma(s) free of
    poles in the right half-plane.
    """
    lam = [complex(x) for x in params.lam]
    d = [(int(eps) + int(x)) % 2 for x in params.delta]
    options = [None]
    for i in range(3):
        for j in range(i + 1, 3):
            if _is_even_integer(lam[i] - lam[j] - (d[i] - d[j]) - 1):
                options.append((i, j) if lam[i].real >= lam[j].real else (j, i))
    facs = [_factorization_for(lam, d, pair) for pair in options]
    best = max(range(len(facs)), key=lambda k: (_leftmost_shift(facs[k]), -k))
    return facs[best]


# ------------------------------------------- approximate functional equation


@dataclass(frozen=True)
class AFEContour:
    """Trapezoid rule on |Im w + Im s| <= T with step h.

    The line sits a distance c to the right of w = 0 or of the rightmost pole
    of the Gamma factor, whichever is further right.
    """

    c: float = 1.5
    T: float = 45.0
    h: float = 0.1

    def halved(self) -> "AFEContour":
        return AFEContour(self.c, self.T, self.h / 2)


def _root_number(fac: GammaFactorization, chi: DirichletCharacter) -> complex:
    """W with Lambda~(1 - s) = W Lambda(s)."""
    return fac.const * chi.q**1.5 / gauss_sum(chi) ** 3


def _afe_side(coeffs: np.ndarray, gamma: CompletedGamma, q: int, s: complex, X: float,
              contour: AFEContour, rel_tol: float) -> tuple[complex, int]:
    """sum_n coeffs[n] (1/2 pi i) int q^(3(s+w)/2) gamma(s+w) n^(-s-w) X^w dw/w."""
    # nodes symmetric about 0 so the w = 0 pole stays centred between them
    k = math.ceil((contour.T + abs(s.imag)) / contour.h)
    t = contour.h * np.arange(-k, k + 1)
    # Each I_n may sit on any line right of w = 0 and of the poles of
    # gamma(s + w); the closest such line keeps cancellation in the integral low.
    shifts = gamma.real_shifts + gamma.complex_shifts
    rightmost = -s.real - min(x.real for x in shifts) if shifts else -math.inf
    c = contour.c + max(0.0, rightmost)
    w = c + 1j * t
    z = s + w
    try:
        log_amp = 1.5 * z * math.log(q) + gamma.log(z) + w * math.log(X)
    except PoleError:
        raise PoleError(f"contour through s + w hits a Gamma pole (s={s!r})") from None
    amp = contour.h / (2 * np.pi) * np.exp(log_amp) / w
    N = len(coeffs) - 1
    n = np.arange(1, N + 1, dtype=float)
    logn = np.log(n)
    terms = np.zeros(N, dtype=complex)
    nz = np.flatnonzero(coeffs[1:] != 0)
    block = 256
    for start in range(0, len(nz), block):
        idx = nz[start : start + block]
        terms[idx] = np.exp(-np.outer(logn[idx], z)) @ amp * coeffs[1:][idx]
    # how many terms actually matter
    total = np.sum(terms)
    scale = max(abs(total), float(np.max(np.abs(terms))) if N else 0.0, 1e-300)
    if N >= 16:
        tail = float(np.max(np.abs(terms[-max(N // 10, 8) :])))
        if tail > rel_tol * scale:
            raise ConvergenceError(
                f"approximate functional equation needs more than {N} coefficients "
                f"(last terms {tail:.2e} vs {scale:.2e})"
            )
    used = int(np.flatnonzero(np.abs(terms) > rel_tol * scale * 1e-3).max() + 1) if N else 0
    return complex(total), used


@dataclass(frozen=True)
class SmoothedValue:
    value: complex
    terms: int
    dual_terms: int
    completed: complex


def l_smoothed(series: LSeries, s: complex, params: GL3Parameters, X: float = 1.0,
               contour: AFEContour = AFEContour(), rel_tol: float = 1e-14) -> SmoothedValue:
    """L(s, .) anywhere in C (away from Gamma poles) by the smoothed functional equation.

    `params` are the archimedean parameters of the standard side; for a
    contragredient series the contragredient parameters are used.  X balances
    the two sums; the value does not depend on it.
    """
    s = complex(s)
    if series.dual_coefficients is None:
        raise ValueError("l_smoothed needs the dual coefficients")
    p = params if series.direction == "standard" else params.contragredient()
    chi = series.chi
    if not chi.primitive:
        raise ValueError("character must be primitive")
    fac = gamma_factorization(p, chi.eps)
    W = _root_number(fac, chi)
    dual = series.dual()
    main, n1 = _afe_side(series.twisted(), fac.gamma, chi.q, s, X, contour, rel_tol)
    other, n2 = _afe_side(dual.twisted(), fac.gamma_dual, chi.q, 1 - s, 1 / X, contour, rel_tol)
    completed = main + other / W
    log_front = 1.5 * s * math.log(chi.q) + fac.gamma.log(s)
    return SmoothedValue(complex(completed * np.exp(-log_front)), n1, n2, complex(completed))


# ------------------------------------------------------ functional equation


@dataclass(frozen=True)
class FEResult:
    lhs: complex
    rhs: complex

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def _fe_constant(chi: DirichletCharacter, gauss: str) -> complex:
    g = gauss_sum(chi)
    if gauss == "direct":
        return g ** -3
    if gauss == "conjugate":
        # g_chi^-1 = chi(-1) g_chibar / q for primitive chi
        return gauss_sum(chi.conj()) ** 3 * complex(chi(-1)) ** 3 / chi.q**3
    raise ValueError(f"unknown Gauss-constant form {gauss!r}")


def functional_equation(table, params: GL3Parameters, chi: DirichletCharacter, s: complex,
                        X: tuple[float, float] = (1.25, 1.25), contour: AFEContour = AFEContour(),
                        gauss: str = "direct") -> FEResult:
    """Both sides of L(1-s, dual x chibar) = q^(3s) g^-3 prod G(s + lambda_j) L(s, . x chi).

    The two L-values are computed independently (balance X[0] for the left, X[1]
    for the right), so agreement is a genuine test of the Gamma factors.
    """
    if not chi.primitive:
        raise ValueError("character must be primitive")
    s = complex(s)
    std = LSeries.from_table(table, chi, "standard")
    lhs = l_smoothed(std.dual(), 1 - s, params, X[0], contour).value
    L = l_smoothed(std, s, params, X[1], contour).value
    front = np.exp(3 * s * math.log(chi.q) + log_gamma_product(s, params, chi.eps))
    return FEResult(complex(lhs), complex(front * _fe_constant(chi, gauss) * L))


def functional_equation_residual(table, params: GL3Parameters, chi: DirichletCharacter,
                                 s: complex, **kw) -> float:
    return functional_equation(table, params, chi, s, **kw).residual


@dataclass(frozen=True)
class SigmaRhoResult:
    lhs: complex
    rhs: complex
    multiplier: complex  # factor multiplying L(1-s, dual x chibar) on the right

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def normalized(self) -> float:
        """Residual divided by |multiplier|: directly comparable to the FE residual."""
        return self.residual / abs(self.multiplier)


def sigma_rho_fourier_check(table, params: GL3Parameters, chi: DirichletCharacter, s: complex,
                            X: tuple[float, float] = (1.25, 1.25),
                            contour: AFEContour = AFEContour()) -> SigmaRhoResult:
    """Mellin-level form of the twisted sigma/rho Fourier identity.

    Left:  2 (-1)^eps g_chibar q^(2s+l2+l3-1) G_{eps+d3}(s+l3) L(s, . x chi).
    Right: (-1)^(eps+d2) g_chi q^(s+l2-1) G_{eps+d2}(1-s-l2)
           * 2 (-1)^(eps+d1) g_chi q^(1-2s-l1-l2) G_{eps+d1}(1-s-l1) L(1-s, dual x chibar).
    """
    if not chi.primitive:
        raise ValueError("character must be primitive")
    s = complex(s)
    q, eps = chi.q, chi.eps
    l1, l2, l3 = params.lam
    d1, d2, d3 = params.delta
    logq = math.log(q)
    std = LSeries.from_table(table, chi, "standard")
    L = l_smoothed(std, s, params, X[1], contour).value
    Ld = l_smoothed(std.dual(), 1 - s, params, X[0], contour).value
    g, gbar = gauss_sum(chi), gauss_sum(chi.conj())
    lhs = (2 * (-1) ** eps * gbar * np.exp((2 * s + l2 + l3 - 1) * logq
                                             + log_g_delta(s + l3, eps + d3)) * L)
    mult = ((-1) ** (eps + d2) * g * np.exp((s + l2 - 1) * logq + log_g_delta(1 - s - l2, eps + d2))
            * 2 * (-1) ** (eps + d1) * g
            * np.exp((1 - 2 * s - l1 - l2) * logq + log_g_delta(1 - s - l1, eps + d1)))
    return SigmaRhoResult(complex(lhs), complex(mult * Ld), complex(mult))


# ----------------------------------------------------------- sym^2 preset


def sym2_candidates(weight: int) -> list[GL3Parameters]:
    """lambda in {(k-1, 0, 1-k), (1-k, 0, k-1)} x the four admissible delta."""
    k = weight
    lams = [(k - 1, 0, 1 - k), (1 - k, 0, k - 1)]
    deltas = [(0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)]
    return [GL3Parameters(l, d) for l, d in product(lams, deltas)]


@dataclass(frozen=True)
class PresetSearch:
    params: GL3Parameters
    residuals: tuple[tuple[GL3Parameters, float], ...]


class PresetValidationError(ConvergenceError):
    """No archimedean candidate passes the functional-equation oracle."""


def search_sym2_preset(form: GL2Form, N: int = 600, s: complex = 0.5 + 2j,
                       threshold: float = 1e-6) -> PresetSearch:
    """Pick the candidate with the smallest trivial-character FE residual.

    Ties (candidates that describe the same multiset of (lambda_j, delta_j))
    go to the first in enumeration order.  Raises PresetValidationError when
    the best residual is not below `threshold`.
    """
    source = sym2_source(form, N)
    chi = _trivial_character()
    results = []
    for p in sym2_candidates(form.weight):
        try:
            r = functional_equation_residual(source, p, chi, s)
        except (PoleError, ConvergenceError):
            r = math.inf
        results.append((p, float(r) if np.isfinite(r) else math.inf))
    best = min(range(len(results)), key=lambda i: results[i][1])
    if not results[best][1] < threshold:
        raise PresetValidationError(
            f"no sym^2 candidate has FE residual below {threshold:g}: "
            + ", ".join(f"{p.lam}/{p.delta}: {r:.3g}" for p, r in results)
        )
    return PresetSearch(results[best][0], tuple(results))


__all__ = [
    "AFEContour",
    "CompletedGamma",
    "FEResult",
    "GammaFactorization",
    "LSeries",
    "PresetSearch",
    "PresetValidationError",
    "SigmaRhoResult",
    "SmoothedValue",
    "functional_equation",
    "functional_equation_residual",
    "gamma_factorization",
    "l_partial",
    "l_smoothed",
    "search_sym2_preset",
    "sigma_rho_fourier_check",
    "sym2_candidates",
]
