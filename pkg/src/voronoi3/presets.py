"""Shipped forms: Delta on GL(2) and its symmetric square on GL(3).

Ramanujan tau values can be cached on disk: when VORONOI3_SEED_CACHE names a
directory, tau(1..N) is read from (or written to) `tau.txt` there, one exact
integer per line.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .coefficients import GL2Form, GL3Parameters, HeckeSource, sym2_default_params, sym2_source, tau_ramanujan

CACHE_ENV = "VORONOI3_SEED_CACHE"
DELTA_WEIGHT = 12


def _cache_file() -> Path | None:
    root = os.environ.get(CACHE_ENV)
    return Path(root) / "tau.txt" if root else None


def tau_values(N: int) -> list[int]:
    """[0, tau(1), ..., tau(N)], from the cache when it is long enough."""
    path = _cache_file()
    if path is not None and path.exists():
        vals = [int(line) for line in path.read_text().split()]
        if len(vals) >= N:
            return [0] + vals[:N]
    tau = tau_ramanujan(N)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text("".join(f"{t}\n" for t in tau[1:]))
        tmp.replace(path)
    return tau


def delta_gl2(N: int) -> GL2Form:
    """Delta with a_n = tau(n) / n^(11/2), so nu = -11/2."""
    tau = tau_values(N)
    n = np.arange(N + 1, dtype=float)
    coeffs = np.zeros(N + 1)
    coeffs[1:] = np.array([float(t) for t in tau[1:]]) / n[1:] ** 5.5
    return GL2Form("holomorphic", coeffs, weight=DELTA_WEIGHT, name="Delta")


@dataclass(frozen=True)
class GL3Preset:
    params: GL3Parameters
    source: HeckeSource
    name: str


def sym2_delta_gl3(N: int) -> GL3Preset:
    """Symmetric square of Delta with the archimedean preset lambda = (11, 0, -11), delta = (1, 1, 0).

    The preset is the candidate selected by lfunctions.search_sym2_preset; the
    test suite re-runs that search.
    """
    form = delta_gl2(N)
    return GL3Preset(sym2_default_params(DELTA_WEIGHT), sym2_source(form, N), "sym2(Delta)")


PRESETS = {"delta_gl2": "gl2", "sym2_delta_gl3": "gl3"}
