"""Hecke coefficient tables for GL(3) and the cusp-form sources that feed them."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import gmpy2
import numpy as np

from .arithmetic import mobius_sieve, primes_upto
from .errors import ConvergenceError


@dataclass(frozen=True)
class GL3Parameters:
    """Archimedean parameters (lambda, delta) of a GL(3) form."""

    lam: tuple[complex, complex, complex]
    delta: tuple[int, int, int]

    def __post_init__(self):
        lam = tuple(complex(x) for x in self.lam)
        delta = tuple(int(d) for d in self.delta)
        if len(lam) != 3 or len(delta) != 3:
            raise ValueError("need three lambda and three delta entries")
        if abs(sum(lam)) > 1e-12:
            raise ValueError(f"lambda entries must sum to 0, got {sum(lam)!r}")
        if any(d not in (0, 1) for d in delta):
            raise ValueError("delta entries must be 0 or 1")
        if sum(delta) % 2:
            raise ValueError("delta entries must sum to 0 mod 2")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "delta", delta)

    def contragredient(self) -> "GL3Parameters":
        """(-lambda_3, -lambda_2, -lambda_1) with the parities reversed."""
        l1, l2, l3 = self.lam
        d1, d2, d3 = self.delta
        return GL3Parameters((-l3, -l2, -l1), (d3, d2, d1))


@dataclass(frozen=True)
class GL2Form:
    """Hecke eigenform on SL(2, Z); coeffs[n] = a_n for 0 <= n <= N (coeffs[0] = 0)."""

    kind: str
    coeffs: np.ndarray = field(repr=False)
    weight: int | None = None
    nu: complex = 0.0
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("holomorphic", "maass"):
            raise ValueError(f"unknown form kind {self.kind!r}")
        if self.kind == "holomorphic":
            if self.weight is None:
                raise ValueError("holomorphic form needs a weight")
            object.__setattr__(self, "nu", complex(-(self.weight - 1) / 2))
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def a(self, n):
        """a_n with a_{-n} = 0 for holomorphic forms and a_{-n} = a_n for even Maass forms."""
        n = np.asarray(n)
        m = np.abs(n)
        if np.any(m > self.N):
            raise IndexError(f"coefficient index beyond N={self.N}")
        vals = self.coeffs[m]
        if self.kind == "holomorphic":
            vals = np.where(n > 0, vals, 0.0)
        return vals


@dataclass(frozen=True)
class CoefficientTable:
    """Dense table a[r, s] for 0 <= r <= R, 0 <= s <= S (row and column 0 are zero).

    Square tables have R = S = N.  Negative indices follow a_{r,s} = a_{-r,s} = a_{r,-s}.
    """

    a: np.ndarray = field(repr=False)
    normalized: bool = True

    @property
    def N(self) -> int:
        return min(self.a.shape) - 1

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape[0] - 1, self.a.shape[1] - 1

    def __call__(self, r, s):
        return self.a[np.abs(r), np.abs(s)]

    def row(self, r: int = 1) -> np.ndarray:
        return self.a[abs(r)]

    def column(self, s: int = 1) -> np.ndarray:
        return self.a[:, abs(s)]

    def transpose(self) -> "CoefficientTable":
        return CoefficientTable(np.ascontiguousarray(self.a.T), self.normalized)

    def with_entry(self, r: int, s: int, value) -> "CoefficientTable":
        a = self.a.copy()
        a[r, s] = value
        return CoefficientTable(a, self.normalized)


# --------------------------------------------------------------- tables


def build_table(
    a_first_row: Sequence[complex],
    a_first_col: Sequence[complex],
    N: int,
    shape: tuple[int, int] | None = None,
) -> CoefficientTable:
    """Fill a_{r,s} = sum_{d | (r,s)} mu(d) a_{r/d,1} a_{1,s/d}.

    a_first_row[s] = a_{1,s} and a_first_col[r] = a_{r,1}, both indexed from 0.
    `shape` = (R, S) builds a rectangular block instead of the N x N square.
    """
    R, S = shape if shape is not None else (N, N)
    row = np.asarray(a_first_row, dtype=complex)
    col = np.asarray(a_first_col, dtype=complex)
    if len(row) < S + 1 or len(col) < R + 1:
        raise ValueError("first row/column shorter than requested table")
    if abs(row[1] - 1) > 1e-12 or abs(col[1] - 1) > 1e-12:
        raise ValueError("a_{1,1} must equal 1")
    row = row[: S + 1].copy()
    col = col[: R + 1].copy()
    row[0] = col[0] = 0.0
    a = np.outer(col, row)
    mu = mobius_sieve(max(min(R, S), 1))
    for d in range(2, min(R, S) + 1):
        if mu[d] == 0:
            continue
        a[d::d, d::d] += mu[d] * np.outer(col[1 : R // d + 1], row[1 : S // d + 1])
    return CoefficientTable(a, normalized=True)


def hecke_action_check(table: CoefficientTable, p: int) -> float:
    """Largest violation of a_{1,p} a_{r,s} = a_{r/p,s} + a_{rp,s/p} + a_{r,sp} at one prime.

    Terms with a nonintegral index are omitted; r and s range over rp <= R, sp <= S.
    """
    A = table.a
    R, S = table.shape
    mr, ms = R // p, S // p
    if mr < 1 or ms < 1:
        return 0.0
    lhs = A[1, p] * A[1 : mr + 1, 1 : ms + 1]
    t3 = A[1 : mr + 1, p : ms * p + 1 : p]
    t1 = np.zeros_like(lhs)
    t1[p - 1 :: p, :] = A[1 : mr // p + 1, 1 : ms + 1]
    t2 = np.zeros_like(lhs)
    t2[:, p - 1 :: p] = A[p : mr * p + 1 : p, 1 : ms // p + 1]
    return float(np.max(np.abs(lhs - t1 - t2 - t3)))


def four_term_check(table: CoefficientTable) -> float:
    """Maximum violation of the four-term relations over all primes in range."""
    R, S = table.shape
    worst = 0.0
    for p in primes_upto(min(R, S)):
        worst = max(worst, hecke_action_check(table, int(p)))
    return worst


def _spf(n: int) -> np.ndarray:
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in primes_upto(n):
        blk = spf[p::p]
        blk[blk == 0] = p
    return spf


def multiplicative_extend(local: Mapping[int, Sequence[complex]], N: int) -> np.ndarray:
    """b_n = prod b_{p^k} over the prime powers exactly dividing n; local[p][k] = b_{p^k}."""
    out = np.zeros(N + 1, dtype=complex)
    if N < 1:
        return out
    out[1] = 1.0
    spf = _spf(N)
    for n in range(2, N + 1):
        p = int(spf[n])
        m, k = n, 0
        while m % p == 0:
            m //= p
            k += 1
        out[n] = out[m] * local[p][k]
    return out


def euler_local(e1: complex, e2: complex, kmax: int) -> np.ndarray:
    """Power-series coefficients of (1 - e1 X + e2 X^2 - X^3)^(-1) up to X^kmax."""
    b = np.zeros(kmax + 1, dtype=complex)
    b[0] = 1.0
    for k in range(1, kmax + 1):
        b[k] = e1 * b[k - 1]
        if k >= 2:
            b[k] -= e2 * b[k - 2]
        if k >= 3:
            b[k] += b[k - 3]
    return b


def euler_series(
    a_1p: Mapping[int, complex],
    a_p1: Mapping[int, complex],
    which: str,
    N: int,
) -> np.ndarray:
    """Dirichlet coefficients (index 0..N) of prod_p (1 - a_{1,p} p^-s + a_{p,1} p^-2s - p^-3s)^-1.

    which="row" gives the series of a_{1,n}; "column" swaps the roles of
    a_{1,p} and a_{p,1} and gives the series of a_{n,1}.
    """
    if which not in ("row", "column"):
        raise ValueError("which must be 'row' or 'column'")
    local = {}
    for p in primes_upto(N):
        p = int(p)
        e1, e2 = (a_1p[p], a_p1[p]) if which == "row" else (a_p1[p], a_1p[p])
        kmax = int(math.log(N) / math.log(p) + 1e-9)
        local[p] = euler_local(e1, e2, kmax)
    return multiplicative_extend(local, N)


def coefficient_tail(N: int, sigma: float, C: float = 3.0, theta: float = 0.5) -> float:
    """Bound for sum_{n > N} C n^(theta - sigma), integral comparison."""
    if sigma - theta <= 1:
        raise ConvergenceError(f"series does not converge absolutely at Re s = {sigma}")
    return C * N ** (theta + 1 - sigma) / (sigma - theta - 1)


@dataclass(frozen=True)
class DoubleDirichletResult:
    lhs: complex
    rhs: complex
    residual: float
    tail: float


def double_dirichlet_check(
    table: CoefficientTable, s1: complex, s2: complex, N: int | None = None
) -> DoubleDirichletResult:
    """Compare sum a_{m,n} m^-s1 n^-s2 with L(s2) L~(s1) / zeta(s1+s2).

    Every series is cut at index N, so the residual measures the truncation
    tails; `tail` is an a-priori bound on them.
    """
    N = table.N if N is None else N
    if N > table.N:
        raise ValueError("N exceeds table size")
    n = np.arange(1, N + 1, dtype=float)
    u = n ** (-complex(s1))
    v = n ** (-complex(s2))
    block = table.a[1 : N + 1, 1 : N + 1]
    lhs = complex(u @ block @ v)
    L = complex(np.sum(table.a[1, 1 : N + 1] * v))
    Lt = complex(np.sum(table.a[1 : N + 1, 1] * u))
    mu = mobius_sieve(N)[1:]
    inv_zeta = complex(np.sum(mu * n ** (-(complex(s1) + complex(s2)))))
    rhs = L * Lt * inv_zeta
    sig = min(complex(s1).real, complex(s2).real)
    tail = 4.0 * coefficient_tail(N, sig) * (1.0 + coefficient_tail(1, sig))
    return DoubleDirichletResult(lhs, rhs, abs(lhs - rhs), tail)


def renormalize(c_table: CoefficientTable, params: GL3Parameters) -> CoefficientTable:
    """a_{r,s} = c_{r,s} r^lambda_1 s^(-lambda_3) on positive indices."""
    R, S = c_table.shape
    l1, _, l3 = params.lam
    r = np.arange(R + 1, dtype=float)
    s = np.arange(S + 1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        fr = np.where(r > 0, r.astype(complex) ** l1, 0.0)
        fs = np.where(s > 0, s.astype(complex) ** (-l3), 0.0)
    return CoefficientTable(c_table.a * np.outer(fr, fs), c_table.normalized)


def denormalize(a_table: CoefficientTable, params: GL3Parameters) -> CoefficientTable:
    """Inverse of renormalize."""
    R, S = a_table.shape
    l1, _, l3 = params.lam
    r = np.arange(R + 1, dtype=float)
    s = np.arange(S + 1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        fr = np.where(r > 0, r.astype(complex) ** (-l1), 0.0)
        fs = np.where(s > 0, s.astype(complex) ** l3, 0.0)
    return CoefficientTable(a_table.a * np.outer(fr, fs), a_table.normalized)


# ------------------------------------------------------------- CSV io


def write_table_csv(table: CoefficientTable, path) -> None:
    R, S = table.shape
    with open(path, "w", newline="") as fh:
        fh.write("r,s,re,im\n")
        for r in range(1, R + 1):
            for s in range(1, S + 1):
                v = table.a[r, s]
                fh.write("%d,%d,%.17g,%.17g\n" % (r, s, v.real, v.imag))


def read_table_csv(path) -> CoefficientTable:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["r", "s", "re", "im"]:
            raise ValueError(f"unexpected header {reader.fieldnames}")
        for rec in reader:
            rows.append((int(rec["r"]), int(rec["s"]), float(rec["re"]), float(rec["im"])))
    R = max(r for r, _, _, _ in rows)
    S = max(s for _, s, _, _ in rows)
    a = np.zeros((R + 1, S + 1), dtype=complex)
    for r, s, re, im in rows:
        a[r, s] = complex(re, im)
    return CoefficientTable(a, normalized=abs(a[1, 1] - 1) < 1e-12)


# --------------------------------------------------- concrete sources


def _encode(coeffs: Sequence[int], bits: int) -> gmpy2.mpz:
    """sum c_k 2^(bits k) for signed integer c_k."""
    nbytes = bits // 8
    pos = bytearray(nbytes * len(coeffs))
    neg = bytearray(nbytes * len(coeffs))
    for k, c in enumerate(coeffs):
        c = int(c)
        if c > 0:
            pos[k * nbytes : (k + 1) * nbytes] = c.to_bytes(nbytes, "little")
        elif c < 0:
            neg[k * nbytes : (k + 1) * nbytes] = (-c).to_bytes(nbytes, "little")
    return gmpy2.mpz(int.from_bytes(pos, "little")) - gmpy2.mpz(int.from_bytes(neg, "little"))


def _decode(x: gmpy2.mpz, bits: int, count: int) -> list[int]:
    """Signed base-2^bits digits of a nonnegative x (lowest `count` of them)."""
    nbytes = bits // 8
    low = gmpy2.f_mod_2exp(x, bits * (count + 1))
    raw = int(low).to_bytes(nbytes * (count + 1), "little")
    half, full = 1 << (bits - 1), 1 << bits
    out, carry = [], 0
    for k in range(count):
        d = int.from_bytes(raw[k * nbytes : (k + 1) * nbytes], "little") + carry
        if d >= half:
            d -= full
            carry = 1
        else:
            carry = 0
        out.append(d)
    return out


def _square_truncated(coeffs: list[int], count: int, bits: int) -> list[int]:
    x = _encode(coeffs, bits)
    return _decode(x * x, bits, count)


def tau_ramanujan(N: int) -> list[int]:
    """[tau(0)=0, tau(1), ..., tau(N)] from q prod (1 - q^n)^24.

    prod (1 - q^n)^3 = sum_k (-1)^k (2k+1) q^(k(k+1)/2) is squared three
    times with Kronecker substitution (128-bit slots, enough for N <= 10^5).
    """
    if N < 1:
        return [0] * (N + 1)
    if N > 100_000:
        raise ValueError("tau_ramanujan supports N <= 10^5")
    m = N  # coefficients of q^0 .. q^(N-1) of prod (1-q^n)^24
    cube = [0] * m
    k = 0
    while k * (k + 1) // 2 < m:
        cube[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    series = cube
    for _ in range(3):
        series = _square_truncated(series, m, 128)
    return [0] + series


def delta_form(N: int) -> GL2Form:
    """Delta with Hecke-normalised coefficients tau(n) / n^(11/2)."""
    tau = tau_ramanujan(N)
    n = np.arange(N + 1, dtype=float)
    coeffs = np.zeros(N + 1)
    coeffs[1:] = np.array([float(t) for t in tau[1:]]) / n[1:] ** 5.5
    return GL2Form("holomorphic", coeffs, weight=12, name="Delta")


def satake_alpha(lam_p: float) -> complex:
    """alpha with alpha + 1/alpha = lam_p (|alpha| = 1 when |lam_p| <= 2)."""
    return (lam_p + np.sqrt(complex(lam_p * lam_p - 4.0))) / 2.0


def _h_sym2(alpha: complex, k: int) -> complex:
    """Complete homogeneous symmetric polynomial h_k(alpha^2, 1, alpha^-2)."""
    a2 = alpha * alpha
    total = 0j
    for i in range(k + 1):
        for l in range(k - i + 1):
            total += a2 ** (i - l)
    return total


def sym2_default_params(weight: int) -> GL3Parameters:
    """Archimedean preset for the symmetric square of a weight-k holomorphic form."""
    return GL3Parameters((weight - 1, 0, 1 - weight), (1, 1, 0))


def sym2_row(form: GL2Form, N: int) -> np.ndarray:
    """a_{1,n} of the symmetric-square lift, n = 0..N."""
    if N > form.N:
        raise ValueError(f"form only has {form.N} coefficients")
    local = {}
    for p in primes_upto(N):
        p = int(p)
        alpha = satake_alpha(form.coeffs[p])
        kmax = int(math.log(N) / math.log(p) + 1e-9)
        local[p] = [_h_sym2(alpha, k).real for k in range(kmax + 1)]
    return multiplicative_extend(local, N).real.astype(complex)


def sym_square_lift(
    form: GL2Form,
    N: int,
    params: GL3Parameters | None = None,
    shape: tuple[int, int] | None = None,
) -> tuple[GL3Parameters, CoefficientTable]:
    """Symmetric-square lift of a level-one Hecke eigenform.

    a_{1,p^k} = h_k(alpha_p^2, 1, alpha_p^-2) and a_{n,1} = a_{1,n}.  The
    archimedean parameters default to sym2_default_params, which
    lfunctions.search_sym2_preset re-derives from the functional equation.
    """
    if form.kind != "holomorphic" or form.weight is None:
        raise ValueError("symmetric-square lift implemented for level-one holomorphic forms")
    R, S = shape if shape is not None else (N, N)
    row = sym2_row(form, max(R, S))
    params = params if params is not None else sym2_default_params(form.weight)
    return params, build_table(row, row, N, shape=(R, S))


def table_from_primes(table: CoefficientTable) -> tuple[dict[int, complex], dict[int, complex]]:
    """(a_{1,p}, a_{p,1}) for all primes p within the table."""
    N = table.N
    ps = [int(p) for p in primes_upto(N)]
    return {p: table.a[1, p] for p in ps}, {p: table.a[p, 1] for p in ps}


def lambda_squares_oracle(form: GL2Form, N: int) -> np.ndarray:
    """Coefficients of zeta(2s) sum lambda(n^2) n^-s up to N, via Hecke multiplicativity.

    lambda(p^(2k)) comes from the three-term recursion on prime powers, so this
    path never touches Satake parameters.
    """
    lam = form.coeffs
    local_sq = {}
    for p in primes_upto(N):
        p = int(p)
        kmax = int(math.log(N) / math.log(p) + 1e-9)
        pw = [1.0, lam[p]]
        for _ in range(2, 2 * kmax + 1):
            pw.append(lam[p] * pw[-1] - pw[-2])
        local_sq[p] = [pw[2 * k] for k in range(kmax + 1)]
    sq = multiplicative_extend(local_sq, N).real
    out = np.zeros(N + 1)
    for m in range(1, math.isqrt(N) + 1):
        out[m * m :: m * m] += sq[1 : N // (m * m) + 1]
    return out


def iter_positive_indices(table: CoefficientTable) -> Iterable[tuple[int, int]]:
    R, S = table.shape
    for r in range(1, R + 1):
        for s in range(1, S + 1):
            yield r, s


@dataclass(frozen=True)
class HeckeSource:
    """First row a_{1,n} and first column a_{n,1}; entries with one small index on demand.

    Avoids the dense table when one index runs far beyond the other.
    """

    row: np.ndarray = field(repr=False)
    col: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return min(len(self.row), len(self.col)) - 1

    def entries(self, r, s) -> np.ndarray:
        """a_{r,s} for an integer r and an array s, or an array r and an integer s (signs dropped)."""
        r_arr, s_arr = np.broadcast_arrays(np.abs(np.asarray(r)), np.abs(np.asarray(s)))
        small = int(np.max(r_arr)) if np.ndim(r) == 0 else int(np.max(s_arr))
        if np.max(r_arr) >= len(self.col) or np.max(s_arr) >= len(self.row):
            raise IndexError(f"coefficient index beyond N={self.N}")
        out = np.zeros(r_arr.shape, dtype=complex)
        mu = mobius_sieve(max(small, 1))
        for d in range(1, small + 1):
            if mu[d] == 0:
                continue
            mask = (r_arr % d == 0) & (s_arr % d == 0)
            out[mask] += mu[d] * self.col[r_arr[mask] // d] * self.row[s_arr[mask] // d]
        return out

    def table(self, shape: tuple[int, int]) -> CoefficientTable:
        return build_table(self.row, self.col, 0, shape=shape)


def sym2_source(form: GL2Form, N: int) -> HeckeSource:
    row = sym2_row(form, N)
    return HeckeSource(row, row)
