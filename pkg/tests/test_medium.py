import numpy as np
import pytest
from conftest import ICE_TABLE

from cherenkov_wigner.medium import (EV_PER_ME, AnalyticMedium,
                                     ConstantMedium, DegenerateGroupVelocity,
                                     OutOfDomain, TabulatedMedium,
                                     TableFormatError, dispersion_params,
                                     group_velocity, index, load_index_table,
                                     omega_hessian_factor,
                                     weak_dispersion_check)


def quadratic_medium():
    return AnalyticMedium(lambda w: 1.3 + 0.01 * w ** 2,
                          lambda w: 0.02 * w,
                          lambda w: 0.02)


def test_constant_index():
    med = ConstantMedium(1.5)
    assert index(med, 0.123) == (1.5, 0.0, 0.0)
    assert index(med, 5.0) == (1.5, 0.0, 0.0)


def test_constant_dispersion_params_vanish():
    med = ConstantMedium(1.5)
    for w in np.geomspace(1e-8, 1.0, 25):
        dp = dispersion_params(med, w)
        assert dp.d_param == 0.0 and dp.e_param == 0.0


def test_tabulated_matches_analytic():
    ws = np.linspace(0.5, 3.0, 120)
    med = TabulatedMedium(ws, 1.3 + 0.01 * ws ** 2)
    for w in np.linspace(0.8, 2.7, 13):
        n, n1, n2 = med.index(w)
        assert abs(n - (1.3 + 0.01 * w * w)) < 1e-6
        assert abs(n1 - 0.02 * w) < 1e-4 * abs(0.02 * w)
        assert abs(n2 - 0.02) < 1e-4 * 0.02


def test_tabulated_reproduces_nodes_exactly():
    ws = np.linspace(0.5, 3.0, 40)
    ns = 1.3 + 0.05 * np.sin(ws)
    med = TabulatedMedium(ws, ns)
    for w, n in zip(ws, ns):
        assert abs(med.index(float(w))[0] - n) < 1e-13


def test_tabulated_c2_continuity():
    ws = np.linspace(0.5, 3.0, 40)
    med = TabulatedMedium(ws, 1.3 + 0.05 * np.sin(ws))
    # second derivative continuous across interior knots
    for w in ws[1:-1]:
        left = med.index(float(w) - 1e-9)[2]
        right = med.index(float(w) + 1e-9)[2]
        assert abs(left - right) < 1e-6 * (abs(left) + 1e-12)


def test_ice_table_dispersion_strength():
    med = load_index_table(ICE_TABLE)
    w = 4.0 / EV_PER_ME
    n, _, _ = med.index(w)
    dp = med.dispersion_params(w)
    assert abs(n - 1.35) < 5e-3
    assert abs(dp.d_param + 13.65) < 0.3
    assert abs(dp.e_param) < 0.5


def test_sodium_eit_dispersion_strength():
    omega0 = 2e-5
    med = AnalyticMedium.from_dispersion_params(1.001, omega0, 5e6)
    dp = med.dispersion_params(omega0)
    assert abs(dp.d_param - 5e6) < 1.0
    assert abs(dp.e_param) < 1e-9
    u = group_velocity(med, np.array([0.0, 0.0, 1.0]), omega0)
    assert abs(np.linalg.norm(u) - 2e-7) < 2e-9  # slow light


def test_group_velocity_constant():
    med = ConstantMedium(1.5)
    u = group_velocity(med, np.array([0.0, 0.0, 1.0]), 1e-5)
    assert abs(np.linalg.norm(u) - 2.0 / 3.0) < 1e-15


def test_group_velocity_weak_dispersion_limit():
    med = AnalyticMedium(lambda w: 1.5, lambda w: 0.0, lambda w: 0.0)
    u = group_velocity(med, np.array([1.0, 0.0, 0.0]), 0.3)
    assert abs(u[0] - 1.0 / 1.5) < 1e-15


def test_group_velocity_degenerate():
    # D = -1 makes n (1 + D) vanish
    med = AnalyticMedium.from_dispersion_params(1.5, 1e-5, -1.0)
    with pytest.raises(DegenerateGroupVelocity):
        group_velocity(med, np.array([0.0, 0.0, 1.0]), 1e-5)


def test_group_velocity_magnitude_bound(rng):
    for _ in range(30):
        n = rng.uniform(1.05, 2.0)
        d = rng.uniform(0.0, 2.0)
        med = AnalyticMedium.from_dispersion_params(n, 1e-5, d)
        u = np.linalg.norm(group_velocity(med, np.array([0, 0, 1.0]), 1e-5))
        assert u < 1.0


def test_hessian_factor_constant():
    med = ConstantMedium(1.4)
    for w in (1e-6, 1e-3, 0.5):
        assert abs(omega_hessian_factor(med, w) - 1.4 ** 2) < 1e-15


def test_hessian_factor_analytic():
    # hand expansion of xi = n w^2 n'' + (n' w)^2 + n^2 + 4 n n' w at w = 2
    med = quadratic_medium()
    n = 1.3 + 0.01 * 4.0
    expected = n * 4.0 * 0.02 + (0.04 * 2.0) ** 2 + n * n + 4 * n * 0.04 * 2.0
    assert abs(omega_hessian_factor(med, 2.0) - expected) < 1e-12
    assert abs(expected - 2.3380) < 1e-4


def test_weak_dispersion_check():
    assert weak_dispersion_check(ConstantMedium(1.5), 1e-5) == (0.0, True)
    med = load_index_table(ICE_TABLE)
    ratio, weak = weak_dispersion_check(med, 4.0 / EV_PER_ME)
    assert not weak
    assert abs(ratio - 13.65) < 0.3
    # boundary |D| = 0.01 is strictly non-weak
    boundary = AnalyticMedium.from_dispersion_params(1.5, 1e-5, 0.01)
    ratio, weak = weak_dispersion_check(boundary, 1e-5)
    assert abs(ratio - 0.01) < 1e-12
    assert not weak


def test_out_of_domain():
    ws = np.linspace(0.5, 3.0, 10)
    med = TabulatedMedium(ws, np.full(10, 1.4))
    with pytest.raises(OutOfDomain):
        med.index(0.1)
    with pytest.raises(OutOfDomain):
        med.index(3.5)


def test_table_validation():
    with pytest.raises(TableFormatError):
        TabulatedMedium([1.0, 2.0, 3.0], [1.1, 1.2, 1.3])  # too few
    with pytest.raises(TableFormatError):
        TabulatedMedium([1.0, 2.0, 2.0, 3.0], [1.1, 1.2, 1.3, 1.4])


def test_loader_reports_line_numbers(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("# header\n1.0,1.3\n2.0\n3.0,1.4\n4.0,1.5\n")
    with pytest.raises(TableFormatError, match=r":3:"):
        load_index_table(bad)
    nonnum = tmp_path / "nonnum.csv"
    nonnum.write_text("1.0,1.3\n2.0,abc\n3.0,1.4\n4.0,1.5\n")
    with pytest.raises(TableFormatError, match=r":2:"):
        load_index_table(nonnum)


def test_loader_converts_ev(tmp_path):
    table = tmp_path / "ok.csv"
    table.write_text("# comment\n1.0,1.30\n2.0,1.31\n3.0,1.32\n4.0,1.33\n")
    med = load_index_table(table)
    lo, hi = med.domain()
    assert abs(lo - 1.0 / EV_PER_ME) < 1e-20
    assert abs(med.index(2.5 / EV_PER_ME)[0] - 1.315) < 1e-3
