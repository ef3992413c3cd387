import numpy as np
import pytest

from voronoi3.coefficients import (
    CoefficientTable,
    GL2Form,
    GL3Parameters,
    HeckeSource,
    build_table,
    denormalize,
    double_dirichlet_check,
    euler_series,
    four_term_check,
    hecke_action_check,
    lambda_squares_oracle,
    read_table_csv,
    renormalize,
    sym2_row,
    table_from_primes,
    tau_ramanujan,
    write_table_csv,
)
from voronoi3.presets import CACHE_ENV, tau_values


def naive_tau(N):
    poly = [1] + [0] * N
    for n in range(1, N):
        for _ in range(24):
            for k in range(N, n - 1, -1):
                poly[k] -= poly[k - n]
    return [0] + poly[:N]


def test_tau_known_values():
    tau = tau_ramanujan(10)
    assert tau[1:] == [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]


def test_tau_against_naive_product():
    assert tau_ramanujan(300) == naive_tau(300)


def test_tau_multiplicative_and_hecke():
    tau = tau_ramanujan(2000)
    assert tau[6] == tau[2] * tau[3]
    assert tau[77] == tau[7] * tau[11]
    for p in (2, 3, 5, 7):
        assert tau[p * p] == tau[p] ** 2 - p**11


def test_tau_cache_roundtrip(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    first = tau_values(50)
    assert (tmp_path / "tau.txt").exists()
    assert tau_values(40) == first[:41]
    assert tau_values(50) == tau_ramanujan(50)


def test_gl3_parameter_constraints():
    with pytest.raises(ValueError):
        GL3Parameters((1, 0, 0), (0, 0, 0))
    with pytest.raises(ValueError):
        GL3Parameters((0, 0, 0), (1, 0, 0))
    p = GL3Parameters((0.5, 0.1, -0.6), (1, 1, 0))
    assert p.contragredient().lam == (0.6, -0.1, -0.5)
    assert p.contragredient().delta == (0, 1, 1)


def test_gl2_form_negative_indices():
    f = GL2Form("holomorphic", np.arange(6.0), weight=12)
    assert f.nu == -5.5
    assert np.array_equal(f.a(np.array([-2, 2])), [0.0, 2.0])
    g = GL2Form("maass", np.arange(6.0))
    assert np.array_equal(g.a(np.array([-2, 2])), [2.0, 2.0])
    with pytest.raises(IndexError):
        f.a(6)


def test_zero_table_is_rejected_by_build():
    # a_{1,1} = 1 is part of the normalisation
    with pytest.raises(ValueError):
        build_table(np.zeros(5), np.zeros(5), 4)


def test_delta_row_is_not_hecke_consistent():
    # a_{1,p} = 0 with a_{1,1} = 1 breaks the relation at (r, s) = (p, 1)
    row = np.zeros(11)
    row[1] = 1.0
    table = build_table(row, row, 10)
    assert four_term_check(table) == pytest.approx(1.0)


def test_four_term_relations(sym2_table):
    scale = np.max(np.abs(sym2_table.a))
    assert four_term_check(sym2_table) <= 1e-10 * scale


def test_four_term_detects_corruption(sym2_table):
    bad = sym2_table.with_entry(6, 10, sym2_table(6, 10) + 1e-3)
    assert four_term_check(bad) > 1e-4
    assert hecke_action_check(bad, 2) > 1e-4 or hecke_action_check(bad, 3) > 1e-4


def test_table_symmetry_for_self_dual(sym2_table):
    assert np.allclose(sym2_table.a, sym2_table.transpose().a)


def test_sym2_row_against_lambda_squares(delta):
    row = sym2_row(delta, 1000)
    oracle = lambda_squares_oracle(delta, 1000)
    assert np.max(np.abs(row.real[1:] - oracle[1:])) < 1e-10


def test_euler_series_roundtrip(sym2_table):
    a1p, ap1 = table_from_primes(sym2_table)
    assert np.max(np.abs(euler_series(a1p, ap1, "row", 200) - sym2_table.row(1)[:201])) < 1e-10
    assert np.max(np.abs(euler_series(a1p, ap1, "column", 200) - sym2_table.column(1)[:201])) < 1e-10


def test_euler_series_non_self_dual():
    # row and column differ when a_{1,p} != a_{p,1}
    ps = [2, 3, 5, 7, 11, 13]
    a1p = {p: 0.3 + 0.2j for p in ps}
    ap1 = {p: 0.3 - 0.2j for p in ps}
    row = euler_series(a1p, ap1, "row", 13)
    col = euler_series(a1p, ap1, "column", 13)
    table = build_table(row, col, 13)
    assert four_term_check(table) < 1e-12
    assert np.allclose(col, np.conj(row))


def test_double_dirichlet(sym2_table):
    r = double_dirichlet_check(sym2_table, 6, 6, 200)
    assert r.residual <= 1e-8
    assert r.residual <= r.tail


def test_hecke_source_matches_dense_table(sym2, sym2_table):
    r = np.arange(1, 40)
    assert np.allclose(sym2.source.entries(r, 12), sym2_table(r, 12))
    assert np.allclose(sym2.source.entries(6, -r), sym2_table(6, r))
    with pytest.raises(IndexError):
        sym2.source.entries(1, 10**6)


def test_renormalize_roundtrip(sym2_table):
    p = GL3Parameters((0.2 + 1j, 0.1, -0.3 - 1j), (0, 1, 1))
    back = denormalize(renormalize(sym2_table, p), p)
    assert np.allclose(back.a, sym2_table.a, rtol=1e-13, atol=1e-15)


def test_csv_roundtrip(tmp_path, sym2_table):
    small = CoefficientTable(sym2_table.a[:8, :6])
    path = tmp_path / "t.csv"
    write_table_csv(small, path)
    back = read_table_csv(path)
    assert back.shape == (7, 5)
    assert np.array_equal(back.a, small.a)


def test_rectangular_source_table():
    row = np.zeros(31, dtype=complex)
    row[1] = 1
    t = HeckeSource(row, row).table((3, 30))
    assert t.shape == (3, 30)


def test_double_dirichlet_perturbation_is_linear(sym2_table):
    eps = 1e-3
    bad = sym2_table.with_entry(2, 3, sym2_table(2, 3) + eps)
    r = double_dirichlet_check(bad, 6, 6, 200)
    assert r.residual == pytest.approx(eps * 2.0**-6 * 3.0**-6, rel=1e-9)


def test_double_dirichlet_unit_table():
    # only a_{1,1} = 1: not a Hecke table, so the check reports |1 - 1/zeta_N(12)|
    a = np.zeros((201, 201), dtype=complex)
    a[1, 1] = 1
    r = double_dirichlet_check(CoefficientTable(a), 6, 6, 200)
    from voronoi3.arithmetic import mobius_sieve

    n = np.arange(1, 201, dtype=float)
    inv_zeta = np.sum(mobius_sieve(200)[1:] * n**-12.0)
    assert r.residual == pytest.approx(abs(1 - inv_zeta), rel=1e-12)


def test_degenerate_euler_factor_gives_cubes():
    from voronoi3.arithmetic import primes_upto

    ps = [int(p) for p in primes_upto(200)]
    b = euler_series({p: 0 for p in ps}, {p: 0 for p in ps}, "row", 200)
    cubes = {k**3 for k in range(1, 6)}
    assert all(b[n] == (1 if n in cubes else 0) for n in range(1, 201))


def test_diagonal_entries(sym2_table):
    for p in (2, 3, 5, 7):
        assert sym2_table(p, p) == pytest.approx(sym2_table(p, 1) * sym2_table(1, p) - 1)
    assert sym2_table(4, 9) == pytest.approx(sym2_table(4, 1) * sym2_table(1, 9))
