import math

import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from krein_casimir.specfun import (
    derivative_from_orders,
    log_double_factorial,
    rotation_matrix_zyz,
    spherical_bessel_j,
    spherical_hankel1,
    spherical_harmonic,
    spherical_harmonics_all,
    spherical_table,
    wigner_3j,
    wigner_rotation,
)

from oracles import (
    h1_3_closed,
    jl_series,
    racah_fraction_squared,
    rotation_about,
    sph_h1,
    sph_j,
    wigner_3j_sympy,
    ylm_scipy,
)


# --- spherical Bessel / Hankel ------------------------------------------


def test_j0_closed_form():
    assert spherical_bessel_j(0, 2.0)[0].real == pytest.approx(math.sin(2) / 2, rel=1e-14)
    assert spherical_bessel_j(0, 2.0)[0] == pytest.approx(0.4546487134, abs=1e-10)


def test_j1_first_root():
    assert abs(spherical_bessel_j(1, 4.493409458)[1]) < 1e-8


def test_j5_small_argument_series():
    got = spherical_bessel_j(5, 0.1)[5].real
    assert got == pytest.approx(jl_series(5, 0.1), rel=1e-12)


@pytest.mark.parametrize(
    "x, expected",
    [(1.0, complex(math.sin(1), -math.cos(1))), (2.0j, -math.exp(-2) / 2)],
)
def test_h0_closed_form(x, expected):
    assert spherical_hankel1(0, x)[0] == pytest.approx(expected, rel=1e-13)


def test_h3_closed_form():
    assert spherical_hankel1(3, 5.0)[3] == pytest.approx(h1_3_closed(5.0), rel=1e-11)


def test_zero_argument_rejected():
    with pytest.raises(ValueError):
        spherical_bessel_j(3, 0.0)
    with pytest.raises(ValueError):
        spherical_hankel1(3, 0.0)


def test_lower_half_plane_rejected():
    with pytest.raises(ValueError):
        spherical_hankel1(2, 1.0 - 0.5j)


@pytest.mark.parametrize("x", [1e-3, 0.05, 0.7, 3.0, 12.0, 45.0, 300.0])
def test_matches_scipy_real_axis(x):
    l_max = 40
    j = spherical_bessel_j(l_max, x)
    h = spherical_hankel1(l_max, x)
    for l in range(l_max + 1):
        ref_j = sph_j(l, x)
        if ref_j != 0 and abs(ref_j) > 1e-290:
            assert j[l].real == pytest.approx(ref_j, rel=1e-10)
        ref_h = sph_h1(l, x)
        if np.isfinite(ref_h):
            assert h[l] == pytest.approx(ref_h, rel=1e-10)


def _wronskian_residual(l_max, x):
    j = spherical_bessel_j(l_max + 1, x)
    h = spherical_hankel1(l_max + 1, x)
    dj = derivative_from_orders(j, x)
    dh = derivative_from_orders(h, x)
    target = 1j / x**2
    return np.abs((j[:-1] * dh - dj * h[:-1]) / target - 1.0)


def test_wronskian_log_grid():
    worst = 0.0
    for x in np.geomspace(1e-3, 1e3, 100):
        worst = max(worst, float(_wronskian_residual(30, x).max()))
    assert worst < 1e-10


@given(
    st.floats(min_value=1e-3, max_value=1e3),
    st.floats(min_value=0.0, max_value=math.pi / 2),
)
def test_wronskian_upper_half_plane(mod, arg):
    x = mod * complex(math.cos(arg), math.sin(arg))
    if arg == math.pi / 2 or x.imag > 500.0:
        x = complex(0.0, min(mod, 500.0))
    assert _wronskian_residual(12, x).max() < 1e-10


def test_far_off_axis_rejected():
    with pytest.raises(ValueError):
        spherical_hankel1(3, 400.0 + 700.0j)
    with pytest.raises(ValueError):
        spherical_bessel_j(3, 800.0j)


@given(st.floats(min_value=1e-3, max_value=500.0))
def test_imaginary_axis_reality(kappa):
    x = 1j * kappa
    j = spherical_bessel_j(25, x)
    h = spherical_hankel1(25, x)
    ls = np.arange(26)
    jr = j * (1j) ** (-ls)
    # h1_l(i k) = -(2/pi) i^{-l} k_l(k): real after multiplying by i^l
    hr = h * (1j) ** ls
    assert np.all(np.abs(jr.imag) <= 1e-12 * np.abs(jr) + 1e-300)
    assert np.all(np.abs(hr.imag) <= 1e-12 * np.abs(hr) + 1e-300)


def test_modified_bessel_oracle():
    from scipy.special import spherical_in, spherical_kn

    kappa = 3.7
    j = spherical_bessel_j(10, 1j * kappa)
    h = spherical_hankel1(10, 1j * kappa)
    for l in range(11):
        # j_l(i x) = i^l i_l(x); h1_l(i x) = -(2/pi) i^{-l} k_l(x)
        assert j[l] == pytest.approx((1j) ** l * spherical_in(l, kappa), rel=1e-12)
        assert h[l] == pytest.approx(-(2 / math.pi) * (1j) ** (-l) * spherical_kn(l, kappa), rel=1e-12)


def test_no_overflow_at_high_order():
    j = spherical_bessel_j(80, 0.01)
    h = spherical_hankel1(80, 500.0j)
    assert np.all(np.isfinite(j[:40])) and np.all(np.isfinite(h[:20]))


def test_table_is_read_only():
    t = spherical_table(4, 1.5)
    assert t.order_max == 4 and t.values_j.shape == (5,)
    with pytest.raises(ValueError):
        t.values_j[0] = 0.0


def test_deterministic():
    a = spherical_hankel1(20, 3.3 + 0.2j)
    b = spherical_hankel1(20, 3.3 + 0.2j)
    assert a.tobytes() == b.tobytes()


def test_log_double_factorial():
    assert log_double_factorial(7) == pytest.approx(math.log(105))
    assert log_double_factorial(-1) == 0.0
    assert log_double_factorial(0) == 0.0


# --- Wigner 3j ----------------------------------------------------------


@pytest.mark.parametrize(
    "args, expected",
    [
        ((0, 0, 0, 0, 0, 0), 1.0),
        ((1, 1, 0, 0, 0, 0), -1 / math.sqrt(3)),
        ((2, 1, 1, 0, 0, 0), math.sqrt(2 / 15)),
    ],
)
def test_3j_examples(args, expected):
    assert wigner_3j(*args) == pytest.approx(expected, rel=1e-15)


def test_3j_selection_rules():
    assert wigner_3j(1, 1, 3, 0, 0, 0) == 0.0
    assert wigner_3j(2, 2, 2, 1, 1, 0) == 0.0
    assert wigner_3j(1, 1, 1, 0, 0, 0) == 0.0  # odd l-sum with m = 0


def test_3j_malformed():
    with pytest.raises(ValueError):
        wigner_3j(1, 1, 1, 2, -2, 0)


labels = st.tuples(
    st.integers(0, 12), st.integers(0, 12), st.integers(0, 12), st.integers(-12, 12), st.integers(-12, 12)
).filter(lambda t: abs(t[3]) <= t[0] and abs(t[4]) <= t[1])


@given(labels)
def test_3j_against_sympy(t):
    l1, l2, l3, m1, m2 = t
    m3 = -m1 - m2
    if abs(m3) > l3:
        return
    assert wigner_3j(l1, l2, l3, m1, m2, m3) == pytest.approx(
        wigner_3j_sympy(l1, l2, l3, m1, m2, m3), rel=1e-13, abs=1e-15
    )


@pytest.mark.parametrize("args", [(40, 38, 30, 7, -3, -4), (45, 44, 3, 0, 1, -1), (60, 60, 60, 0, 0, 0)])
def test_3j_exact_at_high_order(args):
    sign, sq = racah_fraction_squared(*args)
    assert wigner_3j(*args) == pytest.approx(sign * math.sqrt(sq), rel=1e-14)


@given(labels)
def test_3j_permutation_symmetry(t):
    l1, l2, l3, m1, m2 = t
    m3 = -m1 - m2
    if abs(m3) > l3:
        return
    v = wigner_3j(l1, l2, l3, m1, m2, m3)
    assert wigner_3j(l2, l3, l1, m2, m3, m1) == v
    assert wigner_3j(l3, l1, l2, m3, m1, m2) == v
    odd = (-1) ** (l1 + l2 + l3)
    assert wigner_3j(l2, l1, l3, m2, m1, m3) == pytest.approx(odd * v, abs=1e-15)
    assert wigner_3j(l1, l2, l3, -m1, -m2, -m3) == pytest.approx(odd * v, abs=1e-15)


@pytest.mark.parametrize("l1, l2", [(1, 1), (3, 2), (6, 6), (10, 7)])
def test_3j_orthogonality(l1, l2):
    for l3 in range(abs(l1 - l2), l1 + l2 + 1):
        for m3 in range(-l3, l3 + 1):
            s = sum(
                (2 * l3 + 1) * wigner_3j(l1, l2, l3, m1, m3_ - m1, -m3_) ** 2
                for m1 in range(-l1, l1 + 1)
                for m3_ in (m3,)
                if abs(m3_ - m1) <= l2
            )
            assert s == pytest.approx(1.0, abs=1e-12)


# --- spherical harmonics ------------------------------------------------


def test_ylm_examples():
    z = (0.0, 0.0, 1.0)
    assert spherical_harmonic(0, 0, (0.6, 0.0, 0.8)) == pytest.approx(1 / math.sqrt(4 * math.pi), rel=1e-15)
    assert spherical_harmonic(1, 0, z) == pytest.approx(math.sqrt(3 / (4 * math.pi)), rel=1e-15)
    assert spherical_harmonic(2, 1, z) == 0


def test_ylm_rejects_non_unit():
    with pytest.raises(ValueError):
        spherical_harmonic(1, 0, (0.0, 0.0, 1.001))


unit_vectors = st.tuples(
    st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)
).filter(lambda v: np.linalg.norm(v) > 0.1).map(lambda v: tuple(np.asarray(v) / np.linalg.norm(v)))


@given(unit_vectors)
@example(tuple(np.array([0.0, 1e-5, 1.0]) / math.hypot(1e-5, 1.0)))
def test_ylm_against_scipy(n):
    y = spherical_harmonics_all(8, n)
    for l in range(9):
        for m in range(-l, l + 1):
            assert y[l, 8 + m] == pytest.approx(ylm_scipy(l, m, n), abs=1e-12)


@given(unit_vectors)
def test_ylm_addition_theorem(n):
    y = spherical_harmonics_all(10, n)
    for l in range(11):
        assert np.sum(np.abs(y[l]) ** 2) == pytest.approx((2 * l + 1) / (4 * math.pi), abs=1e-12)


# --- rotations ------------------------------------------------------------


angles = st.tuples(
    st.floats(-math.pi, math.pi), st.floats(0, math.pi), st.floats(-math.pi, math.pi)
)


def test_rotation_trivial_blocks():
    assert np.array_equal(wigner_rotation(0, (0.3, 1.1, -2.0)), np.ones((1, 1)))
    assert np.allclose(wigner_rotation(1, (0.0, 0.0, 0.0)), np.eye(3), atol=1e-15)


@given(angles, st.integers(0, 12))
def test_rotation_unitary(e, l):
    d = wigner_rotation(l, e)
    assert np.allclose(d @ d.conj().T, np.eye(2 * l + 1), atol=1e-10)


def _euler(rot):
    from krein_casimir.geometry import euler_from_matrix

    return euler_from_matrix(rot)


@given(angles, angles, st.integers(1, 6))
def test_rotation_composition(e1, e2, l):
    r1, r2 = rotation_matrix_zyz(*e1), rotation_matrix_zyz(*e2)
    lhs = wigner_rotation(l, e1) @ wigner_rotation(l, e2)
    rhs = wigner_rotation(l, _euler(r1 @ r2))
    assert np.allclose(lhs, rhs, atol=1e-9)


def test_rotation_z_to_x_matches_harmonics(rng):
    # active rotation taking z to x: +90 degrees about y
    rot = rotation_about((0, 1, 0), math.pi / 2)
    assert np.allclose(rot @ [0, 0, 1], [1, 0, 0], atol=1e-15)
    d = wigner_rotation(1, _euler(rot))
    for _ in range(10):
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        # Y_l^m(R^{-1} n) = sum_m' Y_l^{m'}(n) D_{m'm}(R)
        lhs = spherical_harmonics_all(1, rot.T @ n)[1]
        rhs = spherical_harmonics_all(1, n)[1] @ d
        assert np.allclose(lhs, rhs, atol=1e-12)


@given(angles, unit_vectors, st.integers(0, 7))
def test_rotation_transforms_harmonics(e, n, l):
    rot = rotation_matrix_zyz(*e)
    lhs = spherical_harmonics_all(l, rot.T @ np.asarray(n))[l]
    rhs = spherical_harmonics_all(l, n)[l] @ wigner_rotation(l, e)
    assert np.allclose(lhs, rhs, atol=1e-10)
