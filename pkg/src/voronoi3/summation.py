"""Both sides of the GL(2) and GL(3) Voronoi formulas, and the Kloosterman-weighted variant.

Sums run over n != 0 in the order n = 1, 2, ..., then n = -1, -2, ...,
and are reduced with numpy's pairwise summation, so repeated runs are
bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arithmetic import divisors, kloosterman, modinv, ramanujan_sum, roots_of_unity
from .coefficients import CoefficientTable, GL2Form, GL3Parameters, HeckeSource
from .errors import AdmissibilityError, ConvergenceError
from .kernels import (
    KernelFunction,
    TestFunction,
    gl2_admissible,
    gl2_kernel_function,
    gl3_admissible,
    gl3_kernel_function,
)

DEFAULT_TAIL_TARGET = 1e-12

# |a_n| <= C n^theta for the coefficient families used here
GL2_BOUND = (2.0, 0.5)  # divisor bound d(n) <= 2 sqrt(n)
GL3_BOUND = (4.0, 1.0)  # d_3(n) <= d(n)^2 <= 4 n, per index


@dataclass(frozen=True)
class TwistSpec:
    a: int
    c: int
    q: int = 1
    abar: int | None = None

    def __post_init__(self):
        if self.c == 0:
            raise ValueError("c must be nonzero")
        if self.q <= 0:
            raise ValueError("q must be positive")
        if math.gcd(self.a, self.c) != 1:
            raise ValueError(f"a={self.a} and c={self.c} are not coprime")
        abar = modinv(self.a, self.c) if self.abar is None else int(self.abar)
        if (self.a * abar - 1) % abs(self.c):
            raise ValueError("a * abar is not 1 mod c")
        object.__setattr__(self, "abar", abar)


@dataclass(frozen=True)
class VoronoiReport:
    lhs: complex
    rhs: complex
    residual: float
    lhs_terms: int
    rhs_terms: int
    tail_lhs: float
    tail_rhs: float
    kernel_error: float
    rhs_terms_by_d: dict | None = None

    @property
    def tail_estimate(self) -> float:
        return self.tail_lhs + self.tail_rhs

    @property
    def budget(self) -> float:
        """Numerical error allowance: 10 (tails + kernel quadrature error)."""
        return 10.0 * (self.tail_lhs + self.tail_rhs + self.kernel_error)


# ----------------------------------------------------------------- tails


def gaussian_tail(N: int, scale: float, power: float, C: float = 1.0) -> float:
    """sum_{n > N} C n^power exp(-pi (n/scale)^2), summed until the terms are negligible."""
    n0 = N + 1
    total = 0.0
    peak = 0.0
    # terms increase up to n* = scale sqrt(power / (2 pi)) and decrease after it
    nstar = scale * math.sqrt(max(power, 0.0) / (2 * math.pi))
    block = max(64, int(scale))
    while True:
        n = np.arange(n0, n0 + block, dtype=float)
        logt = power * np.log(n) - math.pi * (n / scale) ** 2
        t = np.exp(logt)
        total += float(np.sum(t))
        peak = max(peak, float(t.max()))
        n0 += block
        if n0 > nstar and t[-1] <= 1e-20 * max(total, 1e-300):
            # remaining terms decrease faster than a geometric series with ratio t[-1]/t[-2]
            ratio = t[-1] / t[-2] if t[-2] > 0 else 0.0
            if ratio < 1:
                total += t[-1] * ratio / (1 - ratio)
            break
        if n0 > 1e9:
            raise ConvergenceError("Gaussian tail did not converge")
    return C * total


def geometric_tail(magnitudes: np.ndarray, N: int, block: int = 32) -> float:
    """Tail beyond index N of a series whose term sizes |t_1|, ..., |t_M| are known.

    Known terms past N are summed; beyond M the last two blocks fix a geometric
    ratio.  Non-increasing in N.
    """
    mags = np.asarray(magnitudes, dtype=float)
    M = len(mags)
    known = float(np.sum(mags[N:])) if N < M else 0.0
    if M < 2 * block:
        return known + (float(mags[-1]) * M if M else 0.0)
    b1 = float(np.sum(mags[M - 2 * block : M - block]))
    b2 = float(np.sum(mags[M - block :]))
    if b1 == 0.0:
        return known
    ratio = b2 / b1
    extra = b2 * ratio / (1 - ratio) if ratio < 1 else b2 * 1e6
    return known + extra


def tail_estimate(kind: str, N: int, model: str = "gaussian", **kw) -> float:
    """Tail bound for a truncated side of a summation formula.

    model="gaussian": terms bounded by C n^theta |f(n)| for the Gaussian test
    function (keywords f: TestFunction, bound: (C, theta)).  model="geometric":
    keywords magnitudes (the computed term sizes).  kind is "gl2" or "gl3" and
    selects the default coefficient bound.
    """
    if model == "gaussian":
        f: TestFunction = kw["f"]
        C, theta = kw.get("bound", GL2_BOUND if kind == "gl2" else GL3_BOUND)
        sides = 1 if kw.get("one_sided", False) else 2
        return sides * gaussian_tail(N, f.scale, theta + f.a.real, C)
    if model == "geometric":
        return geometric_tail(kw["magnitudes"], N, kw.get("block", 32))
    raise ValueError(f"unknown tail model {model!r}")


def lhs_length(f: TestFunction, kind: str, target: float, one_sided: bool = False, **kw) -> int:
    """Smallest N with Gaussian tail bound below target."""
    N = max(8, int(f.scale))
    while tail_estimate(kind, N, "gaussian", f=f, one_sided=one_sided, **kw) > target:
        N = int(N * 1.25) + 1
    return N


def _e_index(idx: np.ndarray, c: int) -> np.ndarray:
    m = abs(c)
    idx = np.mod(idx if c > 0 else -idx, m)
    return roots_of_unity(m)[idx]


def _signed_order(N: int, both_signs: bool) -> np.ndarray:
    pos = np.arange(1, N + 1)
    return np.concatenate([pos, -pos]) if both_signs else pos


def _run_dual(
    K: KernelFunction,
    weights,
    arg,
    target: float,
    both_signs: bool,
    N: int | None,
    bound: tuple[float, float],
    start: int = 64,
):
    """Accumulate sum_n weights(n) F(arg(n)) over blocks of doubling length.

    weights(n) and arg(n) return arrays (arg as exact Fractions).  Stops once the
    geometric tail bound of the coefficient-bounded terms is below target, or at N.
    """
    n_max = start if N is None else N
    while True:
        ns = np.arange(1, n_max + 1)
        keys = [arg(int(k)) for k in ns]
        xs = np.array([float(k) for k in keys])
        Fp = K.cached(keys, xs)
        errs = K.cached_error(keys)
        C, theta = bound
        mags = C * ns.astype(float) ** theta / ns * np.abs(Fp)
        tail = geometric_tail(mags, n_max) * (2 if both_signs else 1)
        if N is not None or tail < target or n_max > 10**6:
            break
        n_max *= 2
    sign = -1.0 if K.eta else 1.0
    order = _signed_order(n_max, both_signs)
    Fall = np.concatenate([Fp, sign * Fp]) if both_signs else Fp
    terms = weights(order) * Fall
    kerr = float(np.sum(np.abs(weights(order)) * np.concatenate([errs, errs] if both_signs else [errs])))
    return complex(np.sum(terms)), len(order), tail, kerr


# -------------------------------------------------------------- GL(2)


def _gl2_checks(form: GL2Form, f: TestFunction) -> None:
    if not gl2_admissible(form.nu, f):
        raise AdmissibilityError(
            f"test function with a={f.a}, eta={f.eta} is not in |x|^(-nu) S(R) for nu={form.nu}"
        )


def gl2_lhs(form: GL2Form, twist: TwistSpec, f: TestFunction, N: int | None = None,
            target: float = DEFAULT_TAIL_TARGET) -> tuple[complex, int, float]:
    """sum_{n != 0} a_n e(-n a / c) f(n); returns (value, terms, tail bound)."""
    _gl2_checks(form, f)
    both = form.kind != "holomorphic"
    if N is None:
        N = lhs_length(f, "gl2", target, one_sided=not both)
    order = _signed_order(N, both)
    terms = form.a(order) * _e_index(-order * twist.a, twist.c) * f(order)
    tail = tail_estimate("gl2", N, "gaussian", f=f, one_sided=not both)
    return complex(np.sum(terms)), len(order), tail


def gl2_rhs(form: GL2Form, twist: TwistSpec, F: KernelFunction, N: int | None = None,
            target: float = DEFAULT_TAIL_TARGET) -> tuple[complex, int, float, float]:
    """|c| sum_{n != 0} (a_n / |n|) e(n abar / c) F(n / c^2); returns (value, terms, tail, kernel error)."""
    c = twist.c
    both = form.kind != "holomorphic"
    c2 = c * c

    def weights(n):
        return abs(c) * form.a(n) / np.abs(n) * _e_index(n * twist.abar, c)

    val, terms, tail, kerr = _run_dual(
        F, weights, lambda k: Fraction(k, c2), target, both, N, GL2_BOUND
    )
    return val, terms, abs(c) * tail, abs(c) * kerr


def gl2_voronoi(form: GL2Form, twist: TwistSpec, f: TestFunction,
                F: KernelFunction | None = None, target: float = DEFAULT_TAIL_TARGET) -> VoronoiReport:
    _gl2_checks(form, f)
    F = F or gl2_kernel_function(form.nu, f.eta, f)
    lhs, nl, tl = gl2_lhs(form, twist, f, target=target)
    rhs, nr, tr, ke = gl2_rhs(form, twist, F, target=target)
    return VoronoiReport(lhs, rhs, abs(lhs - rhs), nl, nr, tl, tr, ke)


def kloosterman_weighted_sum(form: GL2Form, k: int, c: int, f: TestFunction,
                             N: int | None = None, F: KernelFunction | None = None,
                             target: float = DEFAULT_TAIL_TARGET) -> tuple[complex, complex]:
    """(direct, dual) for sum a_n f(n) S(n,k;c) = |c| sum (a_n/|n|) F(n/c^2) r_c(k - n).

    The direct side uses Kloosterman sums; the dual side uses Ramanujan sums.
    """
    _gl2_checks(form, f)
    both = form.kind != "holomorphic"
    m = abs(c)
    if N is None:
        N = lhs_length(f, "gl2", target, one_sided=not both)
    order = _signed_order(N, both)
    kl = np.array([kloosterman(r, k, c) for r in range(m)])
    direct = complex(np.sum(form.a(order) * f(order) * kl[np.mod(order, m)]))
    F = F or gl2_kernel_function(form.nu, f.eta, f)
    rs = np.array([ramanujan_sum(k - r, c) for r in range(m)], dtype=float)

    def weights(n):
        return m * form.a(n) / np.abs(n) * rs[np.mod(n, m)]

    dual, _, _, _ = _run_dual(F, weights, lambda j: Fraction(j, c * c), target, both, None, GL2_BOUND)
    return direct, dual


# -------------------------------------------------------------- GL(3)


def _entries(table, r, s):
    if isinstance(table, HeckeSource):
        return table.entries(r, s)
    if isinstance(table, CoefficientTable):
        R, S = table.shape
        if np.max(np.abs(r)) > R or np.max(np.abs(s)) > S:
            raise IndexError("coefficient table too small for the requested sum")
        return table(r, s)
    raise TypeError("expected a CoefficientTable or HeckeSource")


def _kloosterman_by_residue(m: int, modulus: int) -> np.ndarray:
    """S(m, r; modulus) for r = 0 .. modulus-1."""
    return np.array([kloosterman(m, r, modulus) for r in range(modulus)])


def gl3_voronoi(
    table,
    params: GL3Parameters,
    twist: TwistSpec,
    f: TestFunction,
    N: int | None = None,
    F: KernelFunction | None = None,
    target: float = DEFAULT_TAIL_TARGET,
) -> VoronoiReport:
    """Both sides of the GL(3) formula

        sum_{n != 0} a_{q,n} e(-n a/c) f(n)
          = sum_{d | cq} |c/d| sum_{n != 0} (a_{n,d}/|n|) S(q abar, n; qc/d) F(n d^2 / (c^3 q)).

    `table` is a CoefficientTable or a HeckeSource.  N caps both sides when
    given; otherwise each side is cut where its tail bound drops below target.
    """
    if not gl3_admissible(params, f):
        raise AdmissibilityError(
            f"test function with a={f.a}, eta={f.eta} does not satisfy the hypothesis for"
            f" lambda_3={params.lam[2]}, delta_3={params.delta[2]}"
        )
    a, c, q = twist.a, twist.c, twist.q
    F = F or gl3_kernel_function(params, f.eta, f)

    # |a_{q,n}| <= d_3(q) d_3(n)
    lbound = (GL3_BOUND[0] ** 2 * q ** GL3_BOUND[1], GL3_BOUND[1])
    nl = N if N is not None else lhs_length(f, "gl3", target, bound=lbound)
    order = _signed_order(nl, True)
    lhs_terms = _entries(table, q, order) * _e_index(-order * a, c) * f(order)
    lhs = complex(np.sum(lhs_terms))
    tail_l = tail_estimate("gl3", nl, "gaussian", f=f, bound=lbound)

    c3q = c**3 * q
    parts, per_d, tail_r, kerr = [], {}, 0.0, 0.0
    for d in divisors(c * q):
        modulus = q * abs(c) // d
        kl = _kloosterman_by_residue(q * twist.abar % modulus, modulus)
        scale = abs(Fraction(c, d))

        def weights(n, d=d, kl=kl, modulus=modulus, scale=scale):
            return float(scale) * _entries(table, n, d) / np.abs(n) * kl[np.mod(n, modulus)]

        bound = (GL3_BOUND[0] * float(scale) * d ** GL3_BOUND[1] * modulus, GL3_BOUND[1])
        val, terms, tail, ke = _run_dual(
            F, weights, lambda k, d=d: Fraction(k * d * d, c3q), target / 4, True, N, bound
        )
        parts.append(val)
        per_d[d] = terms
        tail_r += tail
        kerr += ke
    rhs = complex(np.sum(np.array(parts)))
    return VoronoiReport(
        lhs, rhs, abs(lhs - rhs), len(order), sum(per_d.values()), tail_l, tail_r, kerr, per_d
    )
