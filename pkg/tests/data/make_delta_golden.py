"""Regenerate delta_gl2_coeffs_N100.csv from the naive product q prod (1 - q^n)^24.

Independent of the package: exact integer polynomial arithmetic, then
a_n = tau(n) / n^(11/2) written with 17 significant digits.
"""

from pathlib import Path

import numpy as np

N = 100


def naive_tau(N):
    poly = [1] + [0] * N  # prod (1 - q^n)^24 truncated at q^(N-1)
    for n in range(1, N):
        for _ in range(24):
            for k in range(N, n - 1, -1):
                poly[k] -= poly[k - n]
    return [0] + poly[:N]  # tau(m) = coefficient of q^(m-1)


if __name__ == "__main__":
    tau = naive_tau(N)
    n = np.arange(1, N + 1, dtype=float)
    a = np.array([float(t) for t in tau[1:]]) / n ** 5.5
    lines = ["n,re,im"] + ["%d,%.17g,%.17g" % (k, v, 0.0) for k, v in zip(range(1, N + 1), a)]
    out = Path(__file__).with_name("delta_gl2_coeffs_N100.csv")
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
