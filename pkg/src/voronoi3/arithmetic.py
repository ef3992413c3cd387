"""Integer and modular arithmetic: Moebius, exponential sums, Dirichlet characters."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

# ---------------------------------------------------------------- integers


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation of |n| by trial division."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    """Positive divisors of |n| in increasing order."""
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius is defined for n >= 1")
    fac = factorize(n)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


def euler_phi(n: int) -> int:
    n = abs(int(n))
    out = n
    for p in factorize(n):
        out = out // p * (p - 1)
    return out


def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def mobius_sieve(n: int) -> np.ndarray:
    """mu(k) for 0 <= k <= n (entry 0 is set to 0)."""
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes_upto(n):
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def modinv(a: int, c: int) -> int:
    """Inverse of a modulo |c|, in [0, |c|)."""
    m = abs(int(c))
    if m == 0:
        raise ValueError("modulus must be nonzero")
    if math.gcd(int(a), m) != 1:
        raise ValueError(f"{a} is not invertible modulo {c}")
    if m == 1:
        return 0
    return pow(int(a), -1, m)


# ------------------------------------------------------ exponential sums


@lru_cache(maxsize=256)
def roots_of_unity(m: int) -> np.ndarray:
    """e(k/m) for k = 0..m-1 (read-only, cached per modulus)."""
    k = np.arange(m)
    out = np.exp(2j * np.pi * k / m)
    # exact values at the quarter points keep symmetric sums clean
    for num, val in ((0, 1.0), (m / 2, -1.0), (m / 4, 1j), (3 * m / 4, -1j)):
        if float(num).is_integer():
            out[int(num)] = val
    out.setflags(write=False)
    return out


@lru_cache(maxsize=256)
def units_and_inverses(m: int) -> tuple[np.ndarray, np.ndarray]:
    m = abs(int(m))
    if m == 1:
        u = np.array([0], dtype=np.int64)
        return u, u
    u = np.array([x for x in range(1, m) if math.gcd(x, m) == 1], dtype=np.int64)
    inv = np.array([pow(int(x), -1, m) for x in u], dtype=np.int64)
    u.setflags(write=False)
    inv.setflags(write=False)
    return u, inv


def _e_over(idx: np.ndarray, c: int) -> np.ndarray:
    """e(idx / c) for integer idx and nonzero c (sign of c respected)."""
    m = abs(c)
    idx = np.mod(idx if c > 0 else -idx, m)
    return roots_of_unity(m)[idx]


def kloosterman(n: int, m: int, c: int) -> float:
    """S(n, m; c) = sum over units x mod c of e((n x + m xbar) / c)."""
    if c == 0:
        raise ValueError("c must be nonzero")
    u, inv = units_and_inverses(abs(c))
    idx = (int(n) % abs(c)) * u + (int(m) % abs(c)) * inv
    val = np.sum(_e_over(idx, c))
    if abs(val.imag) > 1e-9:
        raise ArithmeticError(f"Kloosterman sum has imaginary part {val.imag!r}")
    return float(val.real)


def ramanujan_closed_form(k: int, c: int) -> int:
    """sum_{d | (k, c)} d mu(c/d), exact integer arithmetic."""
    m = abs(int(c))
    g = math.gcd(int(k), m)
    return sum(d * mobius(m // d) for d in divisors(g))


def ramanujan_sum(k: int, c: int) -> int:
    """sum over units d mod c of e(k d / c), from the exponential sum.

    The value is an integer; it is rounded after checking it is within 1e-8
    of one.
    """
    if c == 0:
        raise ValueError("c must be nonzero")
    u, _ = units_and_inverses(abs(c))
    val = np.sum(_e_over((int(k) % abs(c)) * u, c))
    r = round(val.real)
    if abs(val - r) > 1e-8:
        raise ArithmeticError(f"Ramanujan sum not integral: {val!r}")
    return int(r)


# --------------------------------------------------------- characters


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    """A Dirichlet character modulo q stored as its full value table."""

    q: int
    values: np.ndarray = field(repr=False)  # chi(n) for n = 0..q-1
    primitive: bool
    eps: int
    index: int = 0

    def __call__(self, n):
        return self.values[np.mod(n, self.q)]

    @property
    def is_trivial(self) -> bool:
        return bool(np.all((self.values == 0) | (np.abs(self.values - 1) < 1e-12)))

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.values.imag) < 1e-12))

    def conj(self) -> "DirichletCharacter":
        return DirichletCharacter(self.q, np.conj(self.values), self.primitive, self.eps, self.index)

    def conductor(self) -> int:
        for d in divisors(self.q):
            if _factors_through(self.values, self.q, d):
                return d
        return self.q


def _primitive_root(pe: int, p: int) -> int:
    phi = pe // p * (p - 1)
    qs = list(factorize(phi))
    for g in range(2, pe):
        if math.gcd(g, pe) == 1 and all(pow(g, phi // r, pe) != 1 for r in qs):
            return g
    raise ArithmeticError(f"no primitive root mod {pe}")


def _cyclic_factors(p: int, e: int) -> list[tuple[int, dict[int, int]]]:
    """Cyclic decomposition of (Z/p^e)^*: list of (order, discrete log table)."""
    pe = p**e
    if p != 2:
        g = _primitive_root(pe, p)
        order = pe // p * (p - 1)
        logs, x = {}, 1
        for k in range(order):
            logs[x] = k
            x = x * g % pe
        return [(order, logs)]
    if e == 1:
        return []
    if e == 2:
        return [(2, {1: 0, 3: 1})]
    # n = (-1)^s 5^k mod 2^e
    order5 = pe // 4
    log_m1, log_5 = {}, {}
    x = 1
    for k in range(order5):
        for s in (0, 1):
            v = x if s == 0 else (-x) % pe
            log_m1[v] = s
            log_5[v] = k
        x = x * 5 % pe
    return [(2, log_m1), (order5, log_5)]


def _factors_through(values: np.ndarray, q: int, d: int) -> bool:
    """True when chi(n) = 1 for every unit n = 1 mod d."""
    for n in range(1, q, d):
        if math.gcd(n, q) == 1 and abs(values[n] - 1) > 1e-9:
            return False
    return True


def _is_primitive(values: np.ndarray, q: int) -> bool:
    if q == 1:
        return True
    return not any(_factors_through(values, q, q // p) for p in factorize(q))


@lru_cache(maxsize=64)
def enumerate_characters(q: int) -> tuple[DirichletCharacter, ...]:
    """All phi(q) characters mod q in a fixed order; index 0 is trivial.

    Built from the CRT decomposition with the smallest primitive root for each
    odd prime power and the generators {-1, 5} for powers of 2.  Characters are
    ordered lexicographically by their exponent vector.
    """
    if q < 1:
        raise ValueError("modulus must be positive")
    factors = []
    for p, e in sorted(factorize(q).items()) if q > 1 else []:
        pe = p**e
        for order, logs in _cyclic_factors(p, e):
            factors.append((pe, order, logs))
    units = [n for n in range(q) if math.gcd(n, q) == 1] if q > 1 else [0]
    log_mat = np.array(
        [[logs[n % pe] for (pe, _, logs) in factors] for n in units], dtype=np.int64
    ).reshape(len(units), len(factors))
    orders = [order for (_, order, _) in factors]
    out = []
    for idx, js in enumerate(product(*[range(o) for o in orders])):
        phase = np.zeros(len(units))
        for col, (j, o) in enumerate(zip(js, orders)):
            phase = phase + j * log_mat[:, col] / o
        vals = np.zeros(q, dtype=complex)
        vals[units] = np.exp(2j * np.pi * phase)
        # snap to exact values where the phase is a multiple of 1/4
        vals = np.where(np.abs(vals.real) < 1e-15, 1j * vals.imag, vals)
        vals = np.where(np.abs(vals.imag) < 1e-15, vals.real + 0j, vals)
        vals.setflags(write=False)
        chi_m1 = vals[(q - 1) % q] if q > 1 else 1.0
        eps = 0 if abs(chi_m1 - 1) < 1e-9 else 1
        out.append(DirichletCharacter(q, vals, _is_primitive(vals, q), eps, idx))
    return tuple(out)


def primitive_characters(q: int) -> list[DirichletCharacter]:
    return [chi for chi in enumerate_characters(q) if chi.primitive]


def gauss_sum(chi: DirichletCharacter) -> complex:
    """g_chi = sum_k chi(k) e(k / q)."""
    return complex(np.sum(chi.values * roots_of_unity(chi.q)))


def twisted_gauss_sum(chi: DirichletCharacter, n: int) -> complex:
    """sum_k chi(k) e(n k / q)."""
    k = np.arange(chi.q)
    return complex(np.sum(chi.values * roots_of_unity(chi.q)[(n * k) % chi.q]))


# ------------------------------------------------------------ Fourier


@dataclass(frozen=True)
class FiniteSequence:
    """Values a_k on Z/|n|Z; the sign of n enters the transform."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        if self.n == 0:
            raise ValueError("modulus must be nonzero")
        arr = np.asarray(self.entries, dtype=complex)
        if arr.shape != (abs(self.n),):
            raise ValueError(f"expected {abs(self.n)} entries, got shape {arr.shape}")
        object.__setattr__(self, "entries", arr)

    def __getitem__(self, k):
        return self.entries[np.mod(k, abs(self.n))]


def finite_fourier(a: FiniteSequence) -> FiniteSequence:
    """hat a_k = sum_l e(k l / n) a_l, unnormalised and unconjugated."""
    m = abs(a.n)
    if a.n > 0:
        out = np.fft.ifft(a.entries) * m
    else:
        out = np.fft.fft(a.entries)
    return FiniteSequence(a.n, out)


def chi_hat_relation_check(chi: DirichletCharacter) -> float:
    """max_l |hat(chi)_l - g_chi conj(chi(l))| for primitive chi."""
    if not chi.primitive:
        raise ValueError("character must be primitive")
    hat = finite_fourier(FiniteSequence(chi.q, chi.values)).entries
    return float(np.max(np.abs(hat - gauss_sum(chi) * np.conj(chi.values))))


# ------------------------------------------------------------ check suite


def exponential_sum_residuals(nm_max: int = 10, c_max: int = 50, q_max: int = 30) -> dict[str, float]:
    """Max residuals of the exponential-sum identities.

    kloosterman_symmetry: S(n,m;c) = S(m,n;c) for n, m <= nm_max, c <= c_max;
    ramanujan: S(0,k;c) against the Moebius closed form; gauss_a / gauss_b:
    chi(-1) g_chibar = conj(g_chi) = q / g_chi and the twisted-sum identity,
    for every primitive chi with q <= q_max.
    """
    sym, ram = 0.0, 0.0
    for c in range(1, c_max + 1):
        for n in range(0, nm_max + 1):
            for m in range(n, nm_max + 1):
                sym = max(sym, abs(kloosterman(n, m, c) - kloosterman(m, n, c)))
            ram = max(ram, abs(kloosterman(0, n, c) - ramanujan_closed_form(n, c)))
    ga, gb = 0.0, 0.0
    for q in range(1, q_max + 1):
        for chi in primitive_characters(q):
            g = gauss_sum(chi)
            gbar = gauss_sum(chi.conj())
            ga = max(ga, abs(chi(-1) * gbar - np.conj(g)), abs(np.conj(g) - q / g))
            for n in range(-q, 2 * q):
                gb = max(gb, abs(twisted_gauss_sum(chi, n) - np.conj(chi(n)) * g))
    return {"kloosterman_symmetry": sym, "ramanujan": ram, "gauss_a": float(ga), "gauss_b": float(gb)}
