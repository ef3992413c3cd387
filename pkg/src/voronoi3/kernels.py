"""Test functions, signed Mellin transforms and the Voronoi kernel transforms.

A kernel F is defined through its signed Mellin transform,

    M_eta F(s) = m(s) M_eta f(-s),

where m is a ratio of Gamma functions, and recovered by inverting on a
vertical line:

    F(x) = sg(x)^eta / (4 pi) * int M_eta F(sigma + i t) |x|^(-sigma - i t) dt.

The integrand is entire in a strip around the line and decays exponentially,
so the uniform trapezoid rule converges geometrically in the step size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .coefficients import GL3Parameters
from .complex_special import LOG_PI, log_gamma, log_gamma_R, reduced_parities
from .errors import AdmissibilityError, ContourError, ConvergenceError, PoleError

_EPS = 1e-9


# ------------------------------------------------------------ test functions


@dataclass(frozen=True)
class TestFunction:
    """f(x) = sg(x)^eta |x|^a exp(-pi (x / scale)^2)."""

    __test__ = False  # not a pytest class

    eta: int
    a: complex = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.eta not in (0, 1):
            raise ValueError("eta must be 0 or 1")
        if complex(self.a).real <= -1:
            raise ValueError("need Re a > -1 for integrability at 0")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        object.__setattr__(self, "a", complex(self.a))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            mag = np.where(ax > 0, ax.astype(complex) ** self.a, 0.0)
        val = mag * np.exp(-np.pi * (x / self.scale) ** 2)
        if self.eta:
            val = val * np.sign(x)
        return val if self.a.imag else val.real

    def log_mellin(self, s):
        """log M_eta f(s) = (s + a) log(scale) + log Gamma_R(s + a)."""
        s = np.asarray(s, dtype=complex)
        return (s + self.a) * math.log(self.scale) + log_gamma_R(s + self.a)

    def mellin(self, s):
        return np.exp(self.log_mellin(s))

    def rescaled(self, scale: float) -> "TestFunction":
        return TestFunction(self.eta, self.a, scale)


def make_test_function(eta: int, a: complex = 0.0, scale: float = 1.0) -> TestFunction:
    return TestFunction(eta, a, scale)


def signed_mellin_numeric(
    f: Callable, eta: int, s: complex, cutoff: float = np.inf, tol: float = 1e-11
) -> complex:
    """int f(x) sg(x)^eta |x|^(s-1) dx by adaptive quadrature in u = log|x|.

    The two half-lines are folded: the integrand is (f(x) + (-1)^eta f(-x)) x^(s-1)
    on x > 0.  Raises ConvergenceError when quad reports a failure.
    """
    s = complex(s)
    sign = -1.0 if eta % 2 else 1.0

    def integrand(u):
        x = math.exp(u)
        fx = complex(np.asarray(f(x)).ravel()[0]) + sign * complex(np.asarray(f(-x)).ravel()[0])
        return fx * np.exp(s * u)

    upper = math.log(cutoff) if np.isfinite(cutoff) else 6.0
    lower = -60.0
    val, err, *rest = integrate.quad(
        integrand, lower, upper, complex_func=True, epsabs=tol, epsrel=tol, limit=400,
        full_output=1,
    )
    info = rest[0] if rest else {}
    real_info = info.get("real", (None,)) if isinstance(info, dict) else None
    if isinstance(real_info, tuple) and len(real_info) > 1 and "roundoff" not in str(real_info[1]):
        raise ConvergenceError(f"signed Mellin quadrature failed: {real_info[1]}")
    return complex(val)


# --------------------------------------------------------- Gamma ratios


@dataclass(frozen=True)
class GammaRatio:
    """exp(const + slope * s) * prod Gamma(alpha s + beta) / prod Gamma(alpha' s + beta').

    Every Gamma argument has alpha = +-1/2, so poles and zeros come in
    progressions of step 2 in s.
    """

    const: complex
    slope: complex
    numer: tuple[tuple[float, complex], ...]
    denom: tuple[tuple[float, complex], ...]

    def __mul__(self, other: "GammaRatio") -> "GammaRatio":
        return GammaRatio(
            self.const + other.const,
            self.slope + other.slope,
            self.numer + other.numer,
            self.denom + other.denom,
        )

    def log(self, s):
        s = np.asarray(s, dtype=complex)
        out = self.const + self.slope * s
        for al, be in self.numer:
            out = out + log_gamma(al * s + be)
        for al, be in self.denom:
            z = al * s + be
            zero = _near_nonpos_int(z)
            out = out - np.where(zero, 0.0, log_gamma(np.where(zero, 1.0, z)))
            out = np.where(zero, -np.inf + 0j, out)
        return out

    def __call__(self, s):
        return np.exp(self.log(s))

    def singular_points(self, window: float = 200.0) -> list[tuple[complex, int]]:
        """Net pole orders (positive) and zero orders (negative) with |Re s| <= window."""
        counts: dict[tuple[float, float], int] = {}
        keys: list[tuple[complex, int]] = []

        def progression(al, be):
            # alpha s + beta = -k  ->  s = (-k - beta) / alpha
            pts = []
            for k in range(int(2 * window) + 4):
                p = (-k - be) / al
                if abs(p.real) <= window:
                    pts.append(p)
            return pts

        for group, sign in ((self.numer, 1), (self.denom, -1)):
            for al, be in group:
                for p in progression(al, complex(be)):
                    key = (round(p.real, 7), round(p.imag, 7))
                    counts[key] = counts.get(key, 0) + sign
        for (re, im), order in sorted(counts.items()):
            if order:
                keys.append((complex(re, im), order))
        return keys


def _near_nonpos_int(z, tol=_EPS):
    z = np.asarray(z, dtype=complex)
    n = np.round(z.real)
    return (n <= 0) & (np.abs(z.real - n) < tol) & (np.abs(z.imag) < tol)


def gl2_multiplier(nu: complex, eta: int) -> GammaRatio:
    """(-1)^eta pi^(-1-2s) G((1+s+eta+nu)/2) G((1+s+eta-nu)/2) / (G((-s+eta+nu)/2) G((-s+eta-nu)/2))."""
    nu = complex(nu)
    return GammaRatio(
        const=1j * np.pi * eta - LOG_PI,
        slope=-2.0 * LOG_PI,
        numer=((0.5, (1 + eta + nu) / 2), (0.5, (1 + eta - nu) / 2)),
        denom=((-0.5, (eta + nu) / 2), (-0.5, (eta - nu) / 2)),
    )


def gl3_multiplier(params: GL3Parameters, eta: int) -> GammaRatio:
    """(-1)^eta pi^(-3/2-3s) prod_j i^d'_j pi^l_j G((s+1-l_j+d'_j)/2) / G((-s+l_j+d'_j)/2)."""
    dprime = reduced_parities(params, eta)
    const = 1j * np.pi * eta - 1.5 * LOG_PI
    numer, denom = [], []
    for lam, d in zip(params.lam, dprime):
        const += 0.5j * np.pi * d + lam * LOG_PI
        numer.append((0.5, (1 - lam + d) / 2))
        denom.append((-0.5, (lam + d) / 2))
    return GammaRatio(const, -3.0 * LOG_PI, tuple(numer), tuple(denom))


def reflected_mellin_factor(f: TestFunction) -> GammaRatio:
    """M_eta f(-s) = scale^(a-s) pi^(-(a-s)/2) Gamma((a-s)/2) as a GammaRatio."""
    ls = math.log(f.scale)
    return GammaRatio(
        const=f.a * ls - 0.5 * f.a * LOG_PI,
        slope=-ls + 0.5 * LOG_PI,
        numer=((-0.5, f.a / 2),),
        denom=(),
    )


# --------------------------------------------------------------- kernels

_BLOCK = 64


def _trig_sum(m: np.ndarray, t0: float, step: float, logx: np.ndarray) -> np.ndarray:
    """sum_k m_k exp(-i (t0 + k step) logx) for every entry of logx.

    Node index k = 64 j + r splits the phase into exp(-i r step logx) and
    exp(-i (t0 + 64 j step) logx); the double sum is a matrix product.
    """
    nblk = -(-len(m) // _BLOCK)
    mm = np.zeros(nblk * _BLOCK, dtype=complex)
    mm[: len(m)] = m
    mm = mm.reshape(nblk, _BLOCK).T  # (r, j)
    lx = np.asarray(logx, dtype=float)[:, None]
    inner = np.exp(-1j * step * np.arange(_BLOCK)[None, :] * lx)
    outer = np.exp(-1j * (t0 + _BLOCK * step * np.arange(nblk))[None, :] * lx)
    return np.sum((inner @ mm) * outer, axis=1)


@dataclass(frozen=True)
class ContourSpec:
    """Vertical line Re s = sigma; sigma=None selects the line per x, T=None adapts the height."""

    sigma: float | None = None
    h: float = 0.1
    T: float | None = None
    tol: float = 1e-12
    # candidate lines for automatic selection are rho + offsets
    max_offset: float = 40.0


@dataclass
class KernelFunction:
    """F with M_eta F(s) = multiplier(s) * M_eta f(-s)."""

    eta: int
    f: TestFunction
    multiplier: GammaRatio
    contour: ContourSpec = field(default_factory=ContourSpec)
    label: str = ""
    _integrand: GammaRatio = field(init=False, repr=False)
    rho: float = field(init=False)
    _cache: dict = field(init=False, repr=False, default_factory=dict)
    _lines: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        if self.f.eta != self.eta:
            raise ValueError("test function parity differs from kernel parity")
        self._integrand = self.multiplier * reflected_mellin_factor(self.f)
        self.rho = self._analyse_poles()
        if self.contour.sigma is not None:
            self.check_contour(self.contour.sigma)

    # --- pole structure

    def _analyse_poles(self) -> float:
        """Real part of the rightmost pole of M_eta F; fails if poles run off to +inf."""
        pts = self._integrand.singular_points()
        right_family = [p for p, o in pts if o > 0 and p.real > 0]
        # a right-running progression that survives to the window edge means
        # M_eta f(-s) has uncancelled poles: f is not admissible for this kernel.
        tail = [p for p in right_family if p.real > 100]
        if tail:
            raise AdmissibilityError(
                f"M_eta F has poles at arbitrarily large Re s (first at {min(p.real for p in right_family):.4g});"
                " the test function is not admissible for these parameters"
            )
        poles = [p.real for p, o in pts if o > 0]
        return max(poles) if poles else -np.inf

    def pole_orders(self) -> list[tuple[complex, int]]:
        return [(p, o) for p, o in self._integrand.singular_points() if o > 0]

    def check_contour(self, sigma: float) -> None:
        if not sigma > self.rho + 1e-6:
            raise ContourError(
                f"line Re s = {sigma} is not to the right of the pole at Re s = {self.rho}"
            )

    def _guard(self, sigma: float) -> float:
        """Shift sigma by +0.1 while a Gamma argument on the real axis sits within 1e-6 of a pole."""
        for _ in range(20):
            bad = False
            for al, be in self._integrand.numer + self._integrand.denom:
                z = al * sigma + be
                if abs(z.imag) < 1e-6 and z.real < 0.5 and abs(z.real - round(z.real)) < 1e-6:
                    bad = True
            if not bad:
                return sigma
            sigma += 0.1
        raise PoleError(f"could not move the line away from Gamma poles near {sigma}")

    # --- quadrature on one line

    def _height(self, sigma: float) -> float:
        """Half-height beyond which the integrand is below e^-46 of its peak."""
        if self.contour.T is not None:
            return self.contour.T
        T = 20.0
        while T < 5000:
            probe = self._integrand.log(sigma + 1j * np.array([-T, T])).real
            peak = self._integrand.log(sigma + 1j * np.linspace(-T, T, 201)).real.max()
            if probe.max() < peak - 46.0:
                break
            T *= 1.5
        return T

    def _line(self, sigma: float) -> dict:
        key = round(sigma, 12)
        line = self._lines.get(key)
        if line is None:
            T = self._height(sigma)
            h = self.contour.h
            n = int(math.ceil(2 * T / h))
            # coarse samples for the size of int |M_eta F| dt
            tc = np.linspace(-T, T, max(int(2 * T / 0.25), 16) + 1)
            lc = self._integrand.log(sigma + 1j * tc).real
            peak = float(lc.max())
            loga = peak + math.log((tc[1] - tc[0]) * np.sum(np.exp(lc - peak)))
            line = {"T": T, "n": n, "peak": peak, "loga": loga, "levels": {}}
            self._lines[key] = line
        return line

    def _level_nodes(self, sigma: float, line: dict, level: int):
        """Start, spacing and normalised integrand values of the nodes added at a refinement level."""
        h, T, n = self.contour.h, line["T"], line["n"]
        if level == 0:
            t0, step, count = -T, h, n + 1
        else:
            step = h / 2 ** (level - 1)
            t0, count = -T + step / 2, n * 2 ** (level - 1)
        if level not in line["levels"]:
            t = t0 + step * np.arange(count)
            line["levels"][level] = np.exp(self._integrand.log(sigma + 1j * t) - line["peak"])
        return t0, step, line["levels"][level]

    def _eval_line(self, sigma: float, logx: np.ndarray, max_level: int = 4):
        """Trapezoid rule on one line, halving h until successive values agree.

        Returns values and the last difference |F_h - F_{h/2}| as error estimate.
        """
        line = self._line(sigma)
        scale = np.exp(line["peak"] - sigma * logx) / (4 * np.pi)
        floor = 1e3 * np.finfo(float).eps * np.exp(line["loga"] - sigma * logx) / (4 * np.pi)
        t0, step, m = self._level_nodes(sigma, line, 0)
        total = _trig_sum(m, t0, step, logx)
        h = self.contour.h
        value = h * total * scale
        err = np.full(len(logx), np.inf)
        for level in range(1, max_level + 1):
            t0, step, m = self._level_nodes(sigma, line, level)
            total = total + _trig_sum(m, t0, step, logx)
            h = h / 2
            new = h * total * scale
            err = np.abs(new - value)
            value = new
            if np.all(err <= np.maximum(self.contour.tol * np.abs(value), floor)):
                break
        return value, err

    def candidate_lines(self) -> list[float]:
        base = self.rho if np.isfinite(self.rho) else -1.0
        offs = np.arange(0.5, self.contour.max_offset + 0.25, 0.5)
        return sorted({self._guard(float(base + o)) for o in offs})

    def choose_sigma(self, x: np.ndarray) -> np.ndarray:
        """Per-x line minimising |x|^-sigma int |M_eta F(sigma+it)| dt (the rounding-error scale)."""
        if self.contour.sigma is not None:
            return np.full(len(x), self._guard(self.contour.sigma))
        lines = self.candidate_lines()
        loga = np.array([self._line(s)["loga"] for s in lines])
        lx = np.log(np.abs(x))
        cost = loga[None, :] - np.array(lines)[None, :] * lx[:, None]
        return np.array(lines)[np.argmin(cost, axis=1)]

    def evaluate(self, x, with_error: bool = False):
        """F(x) for an array of nonzero reals; optionally an error estimate per point."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x == 0):
            raise ValueError("F is evaluated at nonzero x only")
        sig = self.choose_sigma(x)
        vals = np.empty(len(x), dtype=complex)
        errs = np.empty(len(x))
        for s in np.unique(sig):
            idx = np.flatnonzero(sig == s)
            v, e = self._eval_line(float(s), np.log(np.abs(x[idx])))
            vals[idx], errs[idx] = v, e
        if self.eta:
            vals = vals * np.sign(x)
        return (vals, errs) if with_error else vals

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        v = self.evaluate(x)
        return complex(v[0]) if scalar else v

    def cached(self, keys: Sequence, xs: np.ndarray) -> np.ndarray:
        """Evaluate at xs, reusing values stored under the hashable keys (e.g. exact fractions)."""
        todo = [i for i, k in enumerate(keys) if k not in self._cache]
        if todo:
            new_x = np.array([xs[i] for i in todo], dtype=float)
            vals, errs = self.evaluate(new_x, with_error=True)
            for i, v, e in zip(todo, vals, errs):
                self._cache[keys[i]] = (complex(v), float(e))
        out = np.array([self._cache[k][0] for k in keys], dtype=complex)
        return out

    def cached_error(self, keys: Sequence) -> np.ndarray:
        return np.array([self._cache[k][1] for k in keys])

    def mellin(self, s):
        """Closed-form M_eta F(s)."""
        return np.exp(self._integrand.log(s))


def gl2_kernel_function(
    nu: complex, eta: int, f: TestFunction, contour: ContourSpec | None = None
) -> KernelFunction:
    nu = complex(nu)
    if abs(nu.imag) < _EPS and nu.real > 0.5 and abs(nu.real - round(nu.real)) < _EPS:
        raise ValueError("nu in Z_{>0} does not occur for cusp forms and is rejected")
    return KernelFunction(eta, f, gl2_multiplier(nu, eta), contour or ContourSpec(), "gl2")


def gl3_kernel_function(
    params: GL3Parameters, eta: int, f: TestFunction, contour: ContourSpec | None = None
) -> KernelFunction:
    return KernelFunction(eta, f, gl3_multiplier(params, eta), contour or ContourSpec(), "gl3")


def gl2_kernel(x, nu, eta, f, contour=None):
    """F(x) for GL(2) with spectral parameter nu (holomorphic weight k: nu = -(k-1)/2)."""
    return gl2_kernel_function(nu, eta, f, contour)(x)


def gl3_kernel(x, params, eta, f, contour=None):
    """F(x) of the GL(3) Voronoi formula."""
    return gl3_kernel_function(params, eta, f, contour)(x)


# ---------------------------------------------------- admissibility helpers


def gl2_admissible(nu: complex, f: TestFunction) -> bool:
    """f in |x|^(-nu) S(R): a + nu must be a nonnegative integer of parity eta."""
    m = f.a + complex(nu)
    if abs(m.imag) > _EPS or abs(m.real - round(m.real)) > _EPS:
        return False
    m = int(round(m.real))
    return m >= 0 and m % 2 == f.eta % 2


def gl3_admissible(params: GL3Parameters, f: TestFunction) -> bool:
    """sg^d3 |x|^(-l3) f Schwartz: a - l3 a nonnegative integer congruent to eta + d3."""
    m = f.a - params.lam[2]
    if abs(m.imag) > _EPS or abs(m.real - round(m.real)) > _EPS:
        return False
    m = int(round(m.real))
    return m >= 0 and m % 2 == (f.eta + params.delta[2]) % 2


# ------------------------------------------------ singularity classifier


def _preceq(p1: tuple[complex, int], p2: tuple[complex, int]) -> bool:
    """(a1, e1) <= (a2, e2) iff a2 - a1 is a nonnegative integer of parity e1 + e2."""
    diff = complex(p2[0]) - complex(p1[0])
    if abs(diff.imag) > _EPS or abs(diff.real - round(diff.real)) > _EPS:
        return False
    k = int(round(diff.real))
    return k >= 0 and (k - p1[1] - p2[1]) % 2 == 0


@dataclass(frozen=True)
class SingularityClass:
    """Which expansion applies near x = 0, with leading exponents and log powers.

    `terms` lists (exponent, log power) in the order of the sorted permutation.
    `leading` is the term that dominates as x -> 0 (smallest real exponent,
    ties broken by the higher log power).
    """

    kind: str
    permutation: tuple[int, ...]
    terms: tuple[tuple[complex, int], ...]

    @property
    def leading(self) -> tuple[complex, int]:
        return min(self.terms, key=lambda e: (e[0].real, -e[1]))


def classify_singularity(params: GL3Parameters, eta: int = 0) -> SingularityClass:
    """Classify the behaviour of the GL(3) kernel at the origin.

    Pairs (lambda_j, delta_j) are compared in the partial order; all
    incomparable gives 'voru', a chain of length two 'vorv', a full chain
    'vorw'.  Exponents are 1 - lambda_j.
    """
    pairs = list(zip(params.lam, params.delta))
    perm = tuple(sorted(range(3), key=lambda j: (pairs[j][0].real, j)))
    sp = [pairs[j] for j in perm]
    le = lambda i, j: _preceq(sp[i], sp[j])  # noqa: E731
    exps = [1 - sp[j][0] for j in range(3)]
    if le(0, 1) and le(1, 2):
        return SingularityClass("vorw", perm, tuple((exps[j], 2 - j) for j in range(3)))
    comparable = any(_preceq(pairs[i], pairs[j]) for i in range(3) for j in range(3) if i != j)
    if not comparable:
        return SingularityClass("voru", perm, tuple((e, 0) for e in exps))
    # exactly one comparable pair among the sorted entries: the smaller carries a log
    logs = [0, 0, 0]
    for i in range(3):
        for j in range(3):
            if i != j and le(i, j):
                logs[i] = max(logs[i], 1)
    return SingularityClass("vorv", perm, tuple((exps[j], logs[j]) for j in range(3)))


def gl2_singular_exponents(nu: complex) -> tuple[tuple[complex, int], ...]:
    """Exponents of |x| in the expansion of the GL(2) kernel at 0, with log powers."""
    nu = complex(nu)
    is_int = abs(nu.imag) < _EPS and abs(nu.real - round(nu.real)) < _EPS
    if is_int and round(nu.real) > 0:
        raise ValueError("nu in Z_{>0} is not supported")
    return ((1 - nu, 1 if is_int else 0), (1 + nu, 0))


def empirical_exponent(F: Callable, x: float) -> float:
    """log2 |F(x)| - log2 |F(x/2)|, the local power of |x|."""
    a, b = abs(F(x)), abs(F(x / 2))
    return math.log(a / b) / math.log(2.0)


# ---------------------------------------------------- nested oracle


def nested_kernel_oracle(t: float, lam1: float, tol: float = 1e-10) -> float:
    """Kernel for lambda = (lam1, 0, -lam1), delta = 0, eta = 0, f = |x|^-lam1 exp(-pi x^2).

    Evaluates the threefold repeated oscillatory integral in its stated
    order.  The innermost integral is a Gaussian Fourier transform, leaving

        h(w) = 2 int_0^inf exp(-pi/y^2) y^(-lam1-1) cos(2 pi w y) dy,
        F(t) = |t|^(1-lam1) 2 int_0^inf h(1/z) z^(-lam1-1) cos(2 pi t z) dz,

    both computed with QAWF on the oscillatory tails.  Needs 0 < lam1 < 1.
    Intended as a low-accuracy cross-check only.
    """
    if not 0 < lam1 < 1:
        raise ValueError("oracle requires 0 < lam1 < 1")
    p = -lam1 - 1.0
    split = 4.0

    def h(w):
        g = lambda y: math.exp(-math.pi / (y * y)) * y**p if y > 0 else 0.0  # noqa: E731
        head, _ = integrate.quad(lambda y: g(y) * math.cos(2 * math.pi * w * y), 0, split, limit=400, epsabs=tol)
        if w == 0:
            tail, _ = integrate.quad(g, split, np.inf, epsabs=tol)
        else:
            tail, _ = integrate.quad(g, split, np.inf, weight="cos", wvar=2 * math.pi * w, epsabs=tol)
        return 2.0 * (head + tail)

    outer = lambda z: h(1.0 / z) * z**p  # noqa: E731
    w = 2 * math.pi * abs(t)
    # h(w) is below 1e-20 for w > 40, so the head starts at z = 1/40
    head, _ = integrate.quad(lambda z: outer(z) * math.cos(w * z), 1.0 / 40, split, limit=400, epsabs=tol)
    tail, _ = integrate.quad(outer, split, np.inf, weight="cos", wvar=w, epsabs=tol, limlst=100)
    return abs(t) ** (1 - lam1) * 2.0 * (head + tail)
