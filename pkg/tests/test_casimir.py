import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import spherical_jn

from krein_casimir.casimir import (
    ASYMPTOTE_SPHERE_PLATE,
    ASYMPTOTE_TWO_SPHERES,
    EnergyResult,
    GeometryQuery,
    fermionic_energy_exact,
    fermionic_energy_sphere_plate_approx,
    fermionic_energy_two_sphere_approx,
    fig2_normalization,
    pfa_sphere_plate,
    pfa_two_spheres_leading,
    scalar_energy_sphere_plate,
    scalar_energy_two_spheres,
    scalar_semiclassical_two_bounce,
)
from krein_casimir.geometry import FermiGas

from oracles import semiclassical_energy_closed

J1_ROOT = 4.493409457909064


# --- closed-form fermionic approximants ---------------------------------------


def test_two_sphere_approx_example():
    e = fermionic_energy_two_sphere_approx(1.0, 10.0, 1.0)
    assert e.value == pytest.approx(-spherical_jn(1, 16.0) / (2 * math.pi * 80), rel=1e-13)
    assert e.value == pytest.approx(-1.169e-4, rel=2e-3)
    assert e.units == "mu"


def test_sphere_plate_approx_example():
    e = fermionic_energy_sphere_plate_approx(1.0, 6.0, 1.0)
    assert e.value == pytest.approx(-spherical_jn(1, 10.0) / (10 * math.pi), rel=1e-13)
    assert e.value == pytest.approx(-2.498e-3, rel=2e-3)


def test_approx_nodes_at_j1_root():
    assert fermionic_energy_two_sphere_approx(1.0, 10.0, J1_ROOT / 16).value == pytest.approx(0, abs=1e-15)
    assert fermionic_energy_sphere_plate_approx(1.0, 6.0, J1_ROOT / 10).value == pytest.approx(0, abs=1e-15)


@given(st.floats(0.2, 3.0), st.floats(2.5, 20.0), st.floats(0.1, 3.0))
def test_two_sphere_approx_scaling(a, ratio, k_f):
    r = ratio * a
    one = fermionic_energy_two_sphere_approx(a, r, k_f).value
    two = fermionic_energy_two_sphere_approx(2 * a, 2 * r, k_f / 2).value
    assert two == pytest.approx(one, rel=1e-12, abs=1e-300)
    nu = fermionic_energy_two_sphere_approx(a, r, k_f, nu_deg=3).value
    assert nu == pytest.approx(3 * one, rel=1e-13, abs=1e-300)


def test_sphere_plate_approx_large_a():
    # fixed gap, growing a: value / a is a function of the gap only
    vals = [fermionic_energy_sphere_plate_approx(a, a + 3.0, 1.0).value / a for a in (10.0, 100.0, 1000.0)]
    assert vals[0] == pytest.approx(vals[2], rel=1e-12)


def test_approx_preconditions():
    with pytest.raises(ValueError):
        fermionic_energy_two_sphere_approx(1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        fermionic_energy_sphere_plate_approx(1.0, 1.0, 1.0)


# --- exact fermionic energy -------------------------------------------------


def test_fermionic_exact_vs_semiclassical():
    q = GeometryQuery("two-spheres", 1.0, 10.0)
    e = fermionic_energy_exact(q, FermiGas(k_f=2.0))
    approx = fermionic_energy_two_sphere_approx(1.0, 10.0, 2.0)
    assert e.value == pytest.approx(approx.value, rel=0.25)
    assert e.error >= 0 and e.l_max >= 4
    assert e.context["scan_resolved"]


def test_fermionic_exact_empty_sea_limit():
    q = GeometryQuery("two-spheres", 1.0, 10.0)
    e1 = fermionic_energy_exact(q, FermiGas(k_f=0.01)).value
    e2 = fermionic_energy_exact(q, FermiGas(k_f=0.02)).value
    # in units of mu the energy is O(k_F), so in absolute units O(k_F^3)
    assert abs(e1) < 1e-3
    assert e2 / e1 == pytest.approx(2.0, rel=0.02)


def test_fermionic_exact_sign_change_along_r():
    k_f = 1.0
    # 2 (r - 2a) k_F = 3.8 and 5.2 straddle the first j_1 root
    vals = []
    for r in (2.0 + 3.8 / 2, 2.0 + 5.2 / 2):
        q = GeometryQuery("two-spheres", 1.0, r)
        vals.append(fermionic_energy_exact(q, FermiGas(k_f=k_f), tol=1e-6).value)
    assert vals[0] * vals[1] < 0


def test_fermionic_exact_degeneracy():
    q = GeometryQuery("two-spheres", 1.0, 6.0)
    one = fermionic_energy_exact(q, FermiGas(k_f=0.5))
    two = fermionic_energy_exact(q, FermiGas(k_f=0.5, nu_deg=2))
    assert two.value == pytest.approx(2 * one.value, rel=1e-12)
    assert two.to_units("mu_per_channel").value == pytest.approx(one.value, rel=1e-12)


def test_fermionic_exact_continuous_in_kf():
    q = GeometryQuery("two-spheres", 1.0, 4.0)
    ks = [1.0, 1.0 + 1e-4]
    e = [fermionic_energy_exact(q, FermiGas(k_f=k), tol=1e-8).value for k in ks]
    assert abs(e[1] - e[0]) < 1e-4 * max(abs(e[0]), 1e-6) * 50


def test_fermionic_exact_sphere_plate_vs_approx():
    q = GeometryQuery("sphere-plate", 1.0, 6.0)
    k_f = 3 * J1_ROOT / 10 / 2  # well away from the node of j_1(2 L k_F)
    e = fermionic_energy_exact(q, FermiGas(k_f=k_f))
    approx = fermionic_energy_sphere_plate_approx(1.0, 6.0, k_f)
    assert np.sign(e.value) == np.sign(approx.value)
    assert e.value == pytest.approx(approx.value, rel=0.3)


def test_geometry_query_gap_checks():
    assert GeometryQuery("two-spheres", 1.0, 5.0).gap == 3.0
    assert GeometryQuery("sphere-plate", 1.0, 5.0).gap == 4.0
    for kind, r in (("two-spheres", 2.0), ("sphere-plate", 0.5)):
        with pytest.raises(ValueError):
            GeometryQuery(kind, 1.0, r)
    with pytest.raises(ValueError):
        GeometryQuery("n-spheres")
    with pytest.raises(ValueError):
        GeometryQuery("cube", 1.0, 3.0)


# --- EnergyResult ------------------------------------------------------------


def test_negative_error_rejected():
    with pytest.raises(ValueError):
        EnergyResult(1.0, "mu", "exact", error=-1.0)


@given(st.floats(-1e3, 1e3), st.floats(0.1, 5.0), st.floats(0.01, 50.0))
def test_units_round_trip(value, a, gap):
    e = EnergyResult(value, "hbar_c_over_a", "exact", error=0.5, context={"a": a, "L": gap})
    back = e.to_units("fig2").to_units("hbar_c_over_a")
    assert back.value == pytest.approx(value, rel=1e-15, abs=1e-300)
    assert back.error == pytest.approx(0.5, rel=1e-15)
    f = EnergyResult(value, "mu", "exact", context={"nu_deg": 4})
    assert f.to_units("mu_per_channel").to_units("mu").value == pytest.approx(value, rel=1e-15, abs=1e-300)


def test_unit_families_do_not_mix():
    e = EnergyResult(1.0, "mu", "exact")
    with pytest.raises(ValueError):
        e.to_units("fig2")


# --- PFA -------------------------------------------------------------------


@pytest.mark.parametrize("basis", ["plate-based", "sphere-based"])
def test_pfa_leading_order(basis):
    e = pfa_sphere_plate(1.0, 1e-5, basis)
    assert e.to_units("fig2").value == pytest.approx(1.0, rel=1e-4)


def test_pfa_closed_forms():
    for x in (0.25, 1.0, 2.0, 7.0):
        plate = pfa_sphere_plate(1.0, x, "plate-based").to_units("fig2").value
        sphere = pfa_sphere_plate(1.0, x, "sphere-based").to_units("fig2").value
        assert plate == pytest.approx(1 / (1 + x), rel=1e-13)
        assert sphere == pytest.approx((1 + 2 * x) / (1 + x) ** 2, rel=1e-13)


def test_pfa_bases_ratio_at_two():
    plate = pfa_sphere_plate(1.0, 2.0, "plate-based").value
    sphere = pfa_sphere_plate(1.0, 2.0, "sphere-based").value
    assert sphere / plate == pytest.approx(5.0 / 3.0, rel=1e-13)


def test_pfa_radial_quadrature():
    from scipy.integrate import quad

    a, L = 1.3, 0.7
    e = lambda d: -(math.pi**2) / (1440 * d**3)
    plate = quad(lambda rho: 2 * math.pi * rho * e(L + a - math.sqrt(a * a - rho * rho)), 0, a)[0]
    sphere = quad(lambda t: 2 * math.pi * a * a * math.sin(t) * math.cos(t) * e(L + a * (1 - math.cos(t))), 0, math.pi / 2)[0]
    assert pfa_sphere_plate(a, L, "plate-based").value / a == pytest.approx(plate, rel=1e-10)
    # the vertical gap weights each patch by its projected area
    assert pfa_sphere_plate(a, L, "sphere-based").value / a == pytest.approx(
        quad(lambda t: 2 * math.pi * a * a * math.sin(t) * e(L + a * (1 - math.cos(t))), 0, math.pi / 2)[0], rel=1e-10
    )
    assert sphere < 0


def test_pfa_monotone():
    xs = np.geomspace(0.05, 64, 40)
    for basis in ("plate-based", "sphere-based"):
        v = [pfa_sphere_plate(1.0, x, basis).to_units("fig2").value for x in xs]
        assert np.all(np.diff(v) < 0)


def test_pfa_bad_input():
    with pytest.raises(ValueError):
        pfa_sphere_plate(1.0, 0.0)
    with pytest.raises(ValueError):
        pfa_sphere_plate(1.0, 1.0, "cylinder-based")


def test_two_sphere_leading_pfa():
    e = pfa_two_spheres_leading(1.0, 2.0 + 1e-4)
    # standard two-sphere PFA at small gap is half the sphere-plate value
    assert e.value == pytest.approx(-(math.pi**3) / (2880 * 1e-8), rel=1e-3)


# --- semiclassical two-bounce ---------------------------------------------


@pytest.mark.parametrize("kind, gap", [("sphere-plate", 0.5), ("sphere-plate", 6.0), ("two-spheres", 1.0)])
def test_semiclassical_matches_closed_form(kind, gap):
    e = scalar_semiclassical_two_bounce(1.0, gap, kind)
    assert e.value == pytest.approx(semiclassical_energy_closed(1.0, gap, kind), rel=1e-7)


def test_semiclassical_single_repeat_closed():
    e = scalar_semiclassical_two_bounce(1.0, 3.0, "sphere-plate", repeats=1)
    assert e.value == pytest.approx(semiclassical_energy_closed(1.0, 3.0, "sphere-plate", w_max=1), rel=1e-8)


def test_semiclassical_zeta4_at_short_distance():
    gap = 1e-3
    one = scalar_semiclassical_two_bounce(1.0, gap, repeats=1).value
    many = scalar_semiclassical_two_bounce(1.0, gap).value
    assert many / one == pytest.approx(math.pi**4 / 90, rel=0.01)


def test_semiclassical_repeats_unimportant_far():
    # the second repeat carries a relative weight of about 1 / (4 Lambda)
    excess = []
    for gap in (20.0, 200.0):
        one = scalar_semiclassical_two_bounce(1.0, gap, repeats=1).value
        many = scalar_semiclassical_two_bounce(1.0, gap).value
        excess.append(many / one - 1)
    assert 0 < excess[1] < 1e-3
    assert excess[1] < excess[0] / 5


def test_semiclassical_two_sphere_far_form():
    a, r = 1.0, 200.0
    e = scalar_semiclassical_two_bounce(a, r - 2 * a, "two-spheres", repeats=1).value
    assert e == pytest.approx(-(a * a) / (16 * math.pi * r * r * (r - 2 * a)), rel=0.03)


def test_asymptote_constants():
    assert ASYMPTOTE_SPHERE_PLATE == pytest.approx(2 * 90 / math.pi**4, rel=1e-15)
    assert ASYMPTOTE_TWO_SPHERES == pytest.approx(2 * ASYMPTOTE_SPHERE_PLATE, rel=1e-15)


def test_fig2_normalization():
    assert fig2_normalization(2.0, 0.5) == pytest.approx(-(math.pi**3) * 2 / (1440 * 0.25), rel=1e-15)


# --- scalar energies ---------------------------------------------------------


@pytest.mark.parametrize("r", [3.0, 6.0, 20.0])
def test_scalar_two_spheres_negative(r):
    e = scalar_energy_two_spheres(1.0, r, tol=1e-6)
    assert e.value < 0 and e.error >= 0 and e.units == "hbar_c_over_a"


@pytest.mark.parametrize("gap", [0.5, 2.0, 8.0])
def test_scalar_sphere_plate_negative(gap):
    assert scalar_energy_sphere_plate(1.0, gap, tol=1e-6).value < 0


def test_swave_large_r_asymptotic():
    a = 1.0
    for r, tol in ((100.0, 0.02), (400.0, 0.006)):
        e = scalar_energy_two_spheres(a, r, l_max=0, tol=1e-9).value
        assert e * 4 * math.pi * r * r * (r - 2 * a) / (a * a) == pytest.approx(-1.0, rel=tol)


def test_swave_vs_exact_converges_with_r():
    devs = []
    for r in (6.0, 24.0):
        ex = scalar_energy_two_spheres(1.0, r, tol=1e-7).value
        sw = scalar_energy_two_spheres(1.0, r, tol=1e-7, l_max=0).value
        devs.append(abs(ex - sw) / abs(ex))
    assert devs[1] < devs[0] < 1


def test_exact_two_spheres_far_ratio_to_leading_pfa():
    r = 60.0
    ratio = scalar_energy_two_spheres(1.0, r, tol=1e-8).value / pfa_two_spheres_leading(1.0, r).value
    assert ratio == pytest.approx(ASYMPTOTE_TWO_SPHERES, rel=0.05)


def test_sphere_plate_far_ratio():
    e = scalar_energy_sphere_plate(1.0, 24.0, tol=1e-8).to_units("fig2").value
    assert e == pytest.approx(ASYMPTOTE_SPHERE_PLATE, rel=0.10)


def test_sphere_plate_close_ratio_near_normalization():
    e = scalar_energy_sphere_plate(1.0, 0.25, tol=1e-6).to_units("fig2").value
    assert e == pytest.approx(1.0, rel=0.15)


def test_sphere_plate_gap_growth():
    # |E| grows as the gap closes, steeper than 1/L
    e1 = scalar_energy_sphere_plate(1.0, 1.0, tol=1e-6).value
    e2 = scalar_energy_sphere_plate(1.0, 0.5, tol=1e-6).value
    assert e2 / e1 > 2.0


def test_scalar_integrand_finite_and_decaying():
    from krein_casimir.casimir import GeometryQuery, _kappa_logdet

    f = _kappa_logdet(GeometryQuery("two-spheres", 1.0, 3.0), None, 1e-12, [0])
    vals = [f(k) for k in (0.0, 0.5, 1.0, 2.0, 4.0, 8.0)]
    assert all(np.isfinite(vals)) and vals[0] < 0
    assert np.all(np.diff(np.abs(vals)) < 0)
