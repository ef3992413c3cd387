"""Command-line driver: JSON configs in, CSV reports out.

Every subcommand writes one CSV (UTF-8, '\\n' line endings, floats with 17
significant digits) and exits with status 0 exactly when every row is within
its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import presets
from .arithmetic import exponential_sum_residuals, primitive_characters
from .coefficients import CoefficientTable, GL3Parameters, HeckeSource, read_table_csv, write_table_csv
from .complex_special import g_delta, g_delta_integral, identity_residuals
from .errors import ConfigError, Voronoi3Error
from .kernels import ContourSpec, TestFunction, gl2_kernel_function, gl3_kernel_function
from .lfunctions import functional_equation
from .summation import DEFAULT_TAIL_TARGET, TwistSpec, gl2_voronoi, gl3_voronoi

# ------------------------------------------------------------------ config

_NUM = {"type": "number"}
_PAIR = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["name", "form"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "form": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "preset": {"enum": sorted(presets.PRESETS)},
                "lam": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
                "delta": {"type": "array", "items": {"enum": [0, 1]}, "minItems": 3, "maxItems": 3},
                "coefficients": {"type": "string"},
            },
        },
        "twists": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["a", "c"],
                "additionalProperties": False,
                "properties": {
                    "a": {"type": "integer"},
                    "c": {"type": "integer"},
                    "q": {"type": "integer", "minimum": 1},
                },
            },
        },
        "test_function": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "eta": {"enum": [0, 1]},
                "a": _NUM,
                "scale": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "contour": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "sigma": {"type": ["number", "null"]},
                "h": {"type": "number", "exclusiveMinimum": 0},
                "T": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "truncation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "coefficients": {"type": "integer", "minimum": 10},
                "N": {"type": ["integer", "null"], "minimum": 1},
                "tail_target": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "tolerance": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: {"type": "number", "exclusiveMinimum": 0}
                           for k in ("voronoi", "lfe", "kernel")},
        },
        "lfe": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "moduli": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "s": {"type": "array", "items": _PAIR},
            },
        },
        "kernel_tab": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "x_min": {"type": "number", "exclusiveMinimum": 0},
                "x_max": {"type": "number", "exclusiveMinimum": 0},
                "points": {"type": "integer", "minimum": 2},
            },
        },
        "coeffs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"N": {"type": "integer", "minimum": 1}},
        },
    },
}


@dataclass
class RunConfig:
    name: str
    kind: str  # "gl2" or "gl3"
    preset: str | None
    params: GL3Parameters | None
    coefficient_file: Path | None
    twists: list[TwistSpec]
    test_function: TestFunction
    contour: ContourSpec
    coefficients: int
    N: int | None
    tail_target: float
    tolerance: dict[str, float]
    lfe_moduli: list[int] = field(default_factory=list)
    lfe_points: list[complex] = field(default_factory=list)
    kernel_grid: tuple[float, float, int] = (1e-4, 10.0, 200)
    coeffs_N: int = 100

    # --- form loading

    def gl2_form(self):
        return presets.delta_gl2(self.coefficients)

    def gl3_form(self) -> tuple[GL3Parameters, HeckeSource | CoefficientTable]:
        if self.preset is not None:
            p = presets.sym2_delta_gl3(self.coefficients)
            return p.params, p.source
        return self.params, read_table_csv(self.coefficient_file)


DEFAULT_TOLERANCE = {"voronoi": 1e-6, "lfe": 1e-5, "kernel": 1e-8}


def parse_config(raw: dict, base: Path | None = None) -> RunConfig:
    """Validate a config dict against the schema and the model constraints."""
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config: {exc.message} at {'/'.join(map(str, exc.absolute_path))}") from None
    form = raw["form"]
    preset = form.get("preset")
    try:
        if preset is not None:
            if set(form) != {"preset"}:
                raise ConfigError("a preset form takes no other keys")
            kind, params, cfile = presets.PRESETS[preset], None, None
        else:
            if not {"lam", "delta", "coefficients"} <= set(form):
                raise ConfigError("an explicit form needs lam, delta and coefficients")
            kind = "gl3"
            params = GL3Parameters(tuple(form["lam"]), tuple(form["delta"]))
            cfile = Path(form["coefficients"])
            if base is not None and not cfile.is_absolute():
                cfile = base / cfile
        twists = [TwistSpec(t["a"], t["c"], t.get("q", 1)) for t in raw.get("twists", [])]
        if kind == "gl2" and any(t.q != 1 for t in twists):
            raise ConfigError("GL(2) twists take q = 1 only")
        tf = raw.get("test_function", {})
        default_a = 5.5 if kind == "gl2" else 1.0
        f = TestFunction(tf.get("eta", 0), tf.get("a", default_a), tf.get("scale", 1.0))
        ct = raw.get("contour", {})
        contour = ContourSpec(ct.get("sigma"), ct.get("h", 0.1), ct.get("T"), ct.get("tol", 1e-12))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"config: {exc}") from None
    tr = raw.get("truncation", {})
    tol = dict(DEFAULT_TOLERANCE)
    tol.update(raw.get("tolerance", {}))
    lfe = raw.get("lfe", {})
    kt = raw.get("kernel_tab", {})
    grid = (kt.get("x_min", 1e-4), kt.get("x_max", 10.0), kt.get("points", 200))
    if grid[0] >= grid[1]:
        raise ConfigError("kernel_tab needs x_min < x_max")
    return RunConfig(
        name=raw["name"],
        kind=kind,
        preset=preset,
        params=params,
        coefficient_file=cfile,
        twists=twists,
        test_function=f,
        contour=contour,
        coefficients=tr.get("coefficients", 6000),
        N=tr.get("N"),
        tail_target=tr.get("tail_target", DEFAULT_TAIL_TARGET),
        tolerance=tol,
        lfe_moduli=list(lfe.get("moduli", [1])),
        lfe_points=[complex(re, im) for re, im in lfe.get("s", [[0.5, 0.0]])],
        kernel_grid=grid,
        coeffs_N=raw.get("coeffs", {}).get("N", 100),
    )


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        # bare names resolve to the shipped configs
        shipped = resources.files("voronoi3") / "configs" / path.name
        if not shipped.is_file():
            shipped = resources.files("voronoi3") / "configs" / f"{path.name}.json"
        if not shipped.is_file():
            raise ConfigError(f"config file {path} not found")
        return parse_config(json.loads(shipped.read_text()), None)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(raw, path.parent)


# ------------------------------------------------------------------- output


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return "%.17g" % float(x)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


# -------------------------------------------------------------- subcommands


def cmd_gamma_check(out: Path, tolerance: float | None = None, log_g=None) -> bool:
    """Gamma identity grid plus the integral definition at s = 1/2."""
    tol = 1e-10 if tolerance is None else tolerance
    res = identity_residuals(log_g=log_g)
    rows = [[name, val, tol, val <= tol] for name, val in res.items()]
    integral = max(abs(g_delta_integral(0.5, d) - g_delta(0.5, d)) for d in (0, 1))
    rows.append(["integral", integral, max(tol, 1e-6), integral <= max(tol, 1e-6)])
    write_csv(out / "gamma_check.csv", ["identity", "max_residual", "tolerance", "pass"], rows)
    for name, val, t, ok in rows:
        _log(f"{name:12s} {val:.3e} (tol {t:.0e}) {'ok' if ok else 'FAIL'}")
    return all(r[3] for r in rows)


def cmd_sums_check(out: Path, tolerance: float | None = None) -> bool:
    tol = 1e-10 if tolerance is None else tolerance
    res = exponential_sum_residuals()
    rows = [[name, val, tol, val <= tol] for name, val in res.items()]
    write_csv(out / "sums_check.csv", ["identity", "max_residual", "tolerance", "pass"], rows)
    for name, val, t, ok in rows:
        _log(f"{name:20s} {val:.3e} (tol {t:.0e}) {'ok' if ok else 'FAIL'}")
    return all(r[3] for r in rows)


VORONOI_HEADER = ["side", "a", "c", "q", "re", "im", "residual", "tail", "terms"]


def voronoi_rows(cfg: RunConfig, threads: int = 1) -> tuple[list[list], list[float]]:
    f = cfg.test_function
    if cfg.kind == "gl2":
        form = cfg.gl2_form()

        def run(tw):
            F = gl2_kernel_function(form.nu, f.eta, f, cfg.contour)
            return gl2_voronoi(form, tw, f, F, target=cfg.tail_target)
    else:
        params, table = cfg.gl3_form()

        def run(tw):
            F = gl3_kernel_function(params, f.eta, f, cfg.contour)
            return gl3_voronoi(table, params, tw, f, N=cfg.N, F=F, target=cfg.tail_target)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        reports = list(pool.map(run, cfg.twists))
    rows, residuals = [], []
    for tw, rep in zip(cfg.twists, reports):
        for side, val, tail, terms in (
            ("lhs", rep.lhs, rep.tail_lhs, rep.lhs_terms),
            ("rhs", rep.rhs, rep.tail_rhs, rep.rhs_terms),
        ):
            rows.append([side, tw.a, tw.c, tw.q, val.real, val.imag, rep.residual, tail, terms])
        residuals.append(rep.residual)
    return rows, residuals


def cmd_voronoi_verify(cfg: RunConfig, out: Path, tolerance: float | None = None,
                       threads: int = 1) -> bool:
    tol = cfg.tolerance["voronoi"] if tolerance is None else tolerance
    rows, residuals = voronoi_rows(cfg, threads)
    write_csv(out / f"{cfg.name}_voronoi.csv", VORONOI_HEADER, rows)
    for tw, r in zip(cfg.twists, residuals):
        _log(f"(a,c,q)=({tw.a},{tw.c},{tw.q}) residual {r:.3e} {'ok' if r <= tol else 'FAIL'}")
    return all(r <= tol for r in residuals)


LFE_HEADER = ["q", "chi_index", "s_re", "s_im", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"]


def cmd_lfe_verify(cfg: RunConfig, out: Path, tolerance: float | None = None,
                   threads: int = 1) -> bool:
    if cfg.kind != "gl3":
        raise ConfigError("lfe-verify needs a GL(3) form")
    tol = cfg.tolerance["lfe"] if tolerance is None else tolerance
    params, table = cfg.gl3_form()
    jobs = [(q, chi, s) for q in cfg.lfe_moduli for chi in primitive_characters(q)
            for s in cfg.lfe_points]

    def run(job):
        q, chi, s = job
        return functional_equation(table, params, chi, s)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(run, jobs))
    rows = []
    for (q, chi, s), r in zip(jobs, results):
        rows.append([q, chi.index, s.real, s.imag, r.lhs.real, r.lhs.imag,
                     r.rhs.real, r.rhs.imag, r.residual])
        _log(f"q={q} chi={chi.index} s={s} residual {r.residual:.3e}"
             f" {'ok' if r.residual <= tol else 'FAIL'}")
    write_csv(out / f"{cfg.name}_lfe.csv", LFE_HEADER, rows)
    return all(r.residual <= tol for r in results)


def cmd_coeffs(cfg: RunConfig, out: Path) -> bool:
    N = cfg.coeffs_N
    path = out / f"{cfg.name}_coeffs.csv"
    if cfg.kind == "gl2":
        form = presets.delta_gl2(N)
        rows = [[n, form.coeffs[n], 0.0] for n in range(1, N + 1)]
        write_csv(path, ["n", "re", "im"], rows)
    else:
        _, source = cfg.gl3_form()
        table = source.table((N, N)) if isinstance(source, HeckeSource) else source
        write_table_csv(table, path)
    _log(f"wrote {path}")
    return True


KERNEL_HEADER = ["x", "re_F", "im_F", "abs_err_est"]

_PLOT_SCRIPT = """\
# gnuplot script for {csv}
set datafile separator ","
set key autotitle columnhead
set logscale x
set xlabel "x"
set ylabel "F(x)"
set title "{title}"
set terminal pngcairo size 900,600
set output "{png}"
plot "{csv}" using 1:2 with lines title "Re F", \\
     "{csv}" using 1:3 with lines title "Im F"
"""


def cmd_kernel_tab(cfg: RunConfig, out: Path, tolerance: float | None = None) -> bool:
    tol = cfg.tolerance["kernel"] if tolerance is None else tolerance
    f = cfg.test_function
    if cfg.kind == "gl2":
        # the kernel depends on the form only through nu
        F = gl2_kernel_function(presets.delta_gl2(1).nu, f.eta, f, cfg.contour)
    else:
        params = cfg.params if cfg.preset is None else presets.sym2_delta_gl3(10).params
        F = gl3_kernel_function(params, f.eta, f, cfg.contour)
    lo, hi, n = cfg.kernel_grid
    x = np.logspace(np.log10(lo), np.log10(hi), n)
    vals, errs = F.evaluate(x, with_error=True)
    rows = [[xi, v.real, v.imag, e] for xi, v, e in zip(x, vals, errs)]
    csv_path = out / f"{cfg.name}_kernel.csv"
    write_csv(csv_path, KERNEL_HEADER, rows)
    script = _PLOT_SCRIPT.format(csv=csv_path.name, png=f"{cfg.name}_kernel.png",
                                 title=f"kernel F for {cfg.name}")
    (out / f"{cfg.name}_kernel.gp").write_text(script, encoding="utf-8")
    bad = int(np.sum(errs > tol))
    _log(f"wrote {csv_path} ({n} points, {bad} above error tolerance {tol:.0e})")
    return bad == 0


# --------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="voronoi3", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory (default: current)")
    common.add_argument("--tolerance", type=float, default=None, help="override the row tolerance")
    common.add_argument("--threads", type=int, default=1, help="worker threads")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("gamma-check", parents=[common], help="Gamma-factor identity grid")
    sub.add_parser("sums-check", parents=[common], help="Kloosterman, Ramanujan and Gauss sums")
    for name, help_ in (
        ("coeffs", "write a coefficient table"),
        ("kernel-tab", "tabulate the transformed test function F"),
        ("voronoi-verify", "both sides of the Voronoi formula per twist"),
        ("lfe-verify", "functional equation of the twisted L-functions"),
    ):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("--config", required=True,
                        help="JSON config path, or the name of a shipped config")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    t0 = time.perf_counter()
    try:
        if args.command == "gamma-check":
            ok = cmd_gamma_check(out, args.tolerance)
        elif args.command == "sums-check":
            ok = cmd_sums_check(out, args.tolerance)
        else:
            cfg = load_config(args.config)
            if args.command == "coeffs":
                ok = cmd_coeffs(cfg, out)
            elif args.command == "kernel-tab":
                ok = cmd_kernel_tab(cfg, out, args.tolerance)
            elif args.command == "voronoi-verify":
                ok = cmd_voronoi_verify(cfg, out, args.tolerance, args.threads)
            else:
                ok = cmd_lfe_verify(cfg, out, args.tolerance, args.threads)
    except (Voronoi3Error, IndexError) as exc:
        # IndexError: a coefficient table shorter than the requested sums
        print(f"voronoi3: {exc}", file=sys.stderr)
        return 2
    _log(f"{args.command}: {'pass' if ok else 'FAIL'} in {time.perf_counter() - t0:.2f} s")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
