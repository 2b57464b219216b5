"""Special-function kernels for the multiple-scattering matrix.

Spherical Bessel and Hankel functions of integer order for real or
upper-half-plane complex arguments, Wigner 3j symbols, spherical harmonics
(Condon-Shortley phase) and Wigner rotation matrices (z-y-z Euler angles,
active rotations).

The Bessel kernels work internally with power-scaled functions

    jhat_l(x) = j_l(x) * (2l+1)!! / x**l
    hhat_l(x) = h1_l(x) * x**(l+1) / (2l-1)!!

which stay O(1) near the origin and for l >> |x|, so the matrix assembly can
combine orders in log space without intermediate overflow.  On the positive
imaginary axis both scaled families are evaluated by real recurrences
(``jhat`` real, ``hhat`` = -i * real), so the i-power bookkeeping is exact.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = [
    "SphericalFunctionTable",
    "spherical_bessel_j",
    "spherical_hankel1",
    "spherical_table",
    "scaled_bessel_j",
    "scaled_hankel1",
    "log_double_factorial",
    "derivative_from_orders",
    "wigner_3j",
    "spherical_harmonic",
    "spherical_harmonics_all",
    "wigner_rotation",
    "rotation_matrix_zyz",
]

OFF_AXIS_IMAG_MAX = 600.0

_I_POWERS = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


def ipow(n: int) -> complex:
    """Exact i**n for integer n."""
    return _I_POWERS[n % 4]


def _is_imaginary_axis(x: complex) -> bool:
    return x.real == 0.0 and x.imag > 0.0


def _check_argument(x) -> complex:
    x = complex(x)
    if x == 0:
        raise ValueError("spherical Bessel functions are evaluated at x != 0 only")
    if not (math.isfinite(x.real) and math.isfinite(x.imag)):
        raise ValueError(f"non-finite argument {x!r}")
    if x.real != 0.0 and abs(x.imag) > OFF_AXIS_IMAG_MAX:
        # the unscaled trigonometric normalization would overflow
        raise ValueError(f"|Im x| > {OFF_AXIS_IMAG_MAX} off the imaginary axis: {x!r}")
    return x


@lru_cache(maxsize=None)
def log_double_factorial(n: int) -> float:
    """log(n!!) for n >= -1, with (-1)!! = 0!! = 1."""
    if n <= 0:
        return 0.0
    if n % 2:
        k = (n + 1) // 2
        # (2k-1)!! = (2k)! / (2**k k!)
        return math.lgamma(2 * k + 1) - k * math.log(2.0) - math.lgamma(k + 1)
    k = n // 2
    return k * math.log(2.0) + math.lgamma(k + 1)


def _miller_start(l_max: int, ax: float) -> int:
    top = max(l_max, int(ax))
    return top + 20 + int(math.sqrt(40.0 * (top + 1)))


def _jhat_series(l: int, z2: complex, terms: int = 30) -> complex:
    # jhat_l = sum_k (-z2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
    term = 1.0 + 0j
    total = term
    for k in range(1, terms):
        term *= -z2 / (2.0 * k * (2 * l + 2 * k + 1))
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return total


def scaled_bessel_j(l_max: int, x) -> np.ndarray:
    """Power-scaled regular functions ``jhat_l(x)`` for l = 0..l_max.

    Miller downward recurrence normalized against the closed form of
    ``jhat_0`` or ``jhat_1``, whichever is better conditioned.
    """
    x = _check_argument(x)
    if l_max < 0:
        raise ValueError("l_max must be >= 0")
    if abs(x.imag) > OFF_AXIS_IMAG_MAX:
        # j_l grows like exp(|Im x|) and leaves double range near 700
        raise ValueError(f"|Im x| > {OFF_AXIS_IMAG_MAX}: j_l(x) is not representable")
    axis = _is_imaginary_axis(x)
    if axis:
        zeta = x.imag
        x2 = -zeta * zeta
    else:
        x2 = x * x
    n_start = _miller_start(l_max, abs(x))
    vals = np.empty(n_start + 2, dtype=float if axis else complex)
    vals[n_start + 1] = 0.0
    vals[n_start] = 1.0
    for l in range(n_start, 0, -1):
        vals[l - 1] = vals[l] - vals[l + 1] * x2 / ((2 * l + 1) * (2 * l + 3))
        if abs(vals[l - 1]) > 1e250:
            vals[l - 1 :] *= 1e-250
    # closed forms for the normalization
    if abs(x) < 0.5:
        ref0 = _jhat_series(0, x2)
        ref1 = _jhat_series(1, x2)
        if axis:
            ref0, ref1 = ref0.real, ref1.real
    elif axis:
        ref0 = math.sinh(zeta) / zeta
        ref1 = 3.0 * (zeta * math.cosh(zeta) - math.sinh(zeta)) / zeta**3
    else:
        s, c = np.sin(x), np.cos(x)
        ref0 = s / x
        ref1 = 3.0 * (s - x * c) / x**3
    if abs(ref0) >= abs(ref1) or abs(vals[1]) == 0.0:
        scale = ref0 / vals[0]
    else:
        scale = ref1 / vals[1]
    out = vals[: l_max + 1] * scale
    if axis:
        return out.astype(float)
    return out.astype(complex)


def scaled_hankel1(l_max: int, x) -> np.ndarray:
    """Power-scaled outgoing functions ``hhat_l(x)`` for l = 0..l_max.

    Upward recurrence; the outgoing solution dominates for l > |x| and the
    recurrence is neutral below, so this is stable for Im x >= 0.
    """
    x = _check_argument(x)
    if x.imag < 0:
        raise ValueError("h1 is only evaluated in the upper half plane (Im x >= 0)")
    if l_max < 0:
        raise ValueError("l_max must be >= 0")
    out = np.empty(l_max + 1, dtype=complex)
    if _is_imaginary_axis(x):
        zeta = x.imag
        e = math.exp(-zeta)
        # hhat_l(i zeta) = -i khat_l(zeta), khat real
        kh = np.empty(l_max + 1)
        kh[0] = e
        if l_max >= 1:
            kh[1] = e * (1.0 + zeta)
        for l in range(1, l_max):
            kh[l + 1] = kh[l] + kh[l - 1] * zeta * zeta / ((2 * l + 1) * (2 * l - 1))
        out[:] = -1j * kh
        return out
    e = np.exp(1j * x)
    out[0] = -1j * e
    if l_max >= 1:
        out[1] = -e * (x + 1j)
    x2 = x * x
    for l in range(1, l_max):
        out[l + 1] = out[l] - out[l - 1] * x2 / ((2 * l + 1) * (2 * l - 1))
    return out


def _log_power_phase(x: complex, p: int) -> tuple[float, complex]:
    """Return (log|x**p|, phase of x**p) without forming x**p."""
    logmag = p * math.log(abs(x))
    if x.imag == 0.0:
        phase = 1.0 + 0j if (x.real > 0 or p % 2 == 0) else -1.0 + 0j
    elif _is_imaginary_axis(x):
        phase = ipow(p)
    else:
        phase = complex(np.exp(1j * p * np.angle(x)))
    return logmag, phase


def spherical_bessel_j(l_max: int, x) -> np.ndarray:
    """Spherical Bessel functions j_l(x), l = 0..l_max, as a complex array.

    ``x = 0`` is rejected; the caller handles j_l(0) = delta_{l0}.
    """
    x = _check_argument(x)
    jh = scaled_bessel_j(l_max, x)
    out = np.empty(l_max + 1, dtype=complex)
    for l in range(l_max + 1):
        logmag, phase = _log_power_phase(x, l)
        out[l] = jh[l] * phase * math.exp(logmag - log_double_factorial(2 * l + 1))
    return out


def spherical_hankel1(l_max: int, x) -> np.ndarray:
    """Spherical Hankel functions of the first kind h1_l(x), l = 0..l_max."""
    x = _check_argument(x)
    hh = scaled_hankel1(l_max, x)
    out = np.empty(l_max + 1, dtype=complex)
    for l in range(l_max + 1):
        logmag, phase = _log_power_phase(x, l + 1)
        out[l] = hh[l] / phase * math.exp(log_double_factorial(2 * l - 1) - logmag)
    return out


class SphericalFunctionTable:
    """j_l and h1_l tabulated for one argument, l = 0..order_max."""

    __slots__ = ("order_max", "argument", "values_j", "values_h1")

    def __init__(self, order_max: int, argument: complex):
        self.order_max = order_max
        self.argument = complex(argument)
        self.values_j = spherical_bessel_j(order_max, argument)
        self.values_h1 = spherical_hankel1(order_max, argument)
        self.values_j.flags.writeable = False
        self.values_h1.flags.writeable = False

    def __repr__(self) -> str:
        return f"SphericalFunctionTable(order_max={self.order_max}, argument={self.argument!r})"


def spherical_table(order_max: int, argument) -> SphericalFunctionTable:
    return SphericalFunctionTable(order_max, argument)


def derivative_from_orders(values: np.ndarray, x: complex) -> np.ndarray:
    """d/dx f_l from an order table of a spherical Bessel-type family.

    Uses f_0' = -f_1 and f_l' = f_{l-1} - (l+1)/x f_l; the last entry of the
    result is dropped since it needs f_{l_max+1}.
    """
    n = len(values) - 1
    der = np.empty(n, dtype=complex)
    der[0] = -values[1]
    for l in range(1, n):
        der[l] = values[l - 1] - (l + 1) / x * values[l]
    return der


# ---------------------------------------------------------------------------
# Wigner 3j
# ---------------------------------------------------------------------------


def _racah_exact(l1, l2, l3, m1, m2, m3) -> float:
    # Racah sum with every term scaled to an integer: S = (sum_k (-1)^k t_k) / X
    f = math.factorial
    a = l1 + l2 - l3
    b = l1 - m1
    c = l2 + m2
    d = l3 - l2 + m1
    e = l3 - l1 - m2
    kmin = max(0, -d, -e)
    kmax = min(a, b, c)
    fb, fc = f(b), f(c)
    fd, fe = f(d + kmax), f(e + kmax)
    total = 0
    for k in range(kmin, kmax + 1):
        t = math.comb(a, k) * (fb // f(b - k)) * (fc // f(c - k)) * (fd // f(d + k)) * (fe // f(e + k))
        total += -t if k % 2 else t
    if total == 0:
        return 0.0
    x = f(a) * fb * fc * fd * fe
    num = (
        f(a) * f(l1 - l2 + l3) * f(-l1 + l2 + l3)
        * f(l1 + m1) * f(l1 - m1) * f(l2 + m2) * f(l2 - m2) * f(l3 + m3) * f(l3 - m3)
        * total * total
    )
    den = f(l1 + l2 + l3 + 1) * x * x
    sign = -1.0 if ((l1 - l2 - m3) % 2) else 1.0
    if total < 0:
        sign = -sign
    # int / int is correctly rounded
    return sign * math.sqrt(num / den)


@lru_cache(maxsize=None)
def _wigner_3j_cached(l1, l2, l3, m1, m2, m3) -> float:
    if m1 + m2 + m3 != 0:
        return 0.0
    if l3 < abs(l1 - l2) or l3 > l1 + l2:
        return 0.0
    if m1 == 0 and m2 == 0 and (l1 + l2 + l3) % 2:
        return 0.0
    return _racah_exact(l1, l2, l3, m1, m2, m3)


def wigner_3j(l1: int, l2: int, l3: int, m1: int, m2: int, m3: int) -> float:
    """Wigner 3j symbol by the Racah single-sum formula.

    The square of the symbol is formed exactly as a rational number and
    rounded once, so the result is correctly rounded up to the final sqrt.
    Zero whenever the selection rules fail.
    """
    for l, m in ((l1, m1), (l2, m2), (l3, m3)):
        if l < 0 or abs(m) > l:
            raise ValueError(f"malformed quantum numbers (l={l}, m={m})")
    return _wigner_3j_cached(int(l1), int(l2), int(l3), int(m1), int(m2), int(m3))


# ---------------------------------------------------------------------------
# Spherical harmonics
# ---------------------------------------------------------------------------


def _unit(direction) -> np.ndarray:
    n = np.asarray(direction, dtype=float).reshape(3)
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise ValueError(f"direction {n} is not a unit vector")
    return n


def _legendre_normalized(l_max: int, cos_t, sin_t) -> np.ndarray:
    """Normalized associated Legendre table P[l, m(, ...)] for m >= 0.

    Normalized so Y_l^m = P[l, m] e^{i m phi}, Condon-Shortley phase included.
    ``cos_t``/``sin_t`` may be arrays; trailing axes follow their shape.
    """
    cos_t = np.asarray(cos_t, dtype=float)
    sin_t = np.asarray(sin_t, dtype=float)
    p = np.zeros((l_max + 1, l_max + 1) + cos_t.shape)
    p[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
    for m in range(1, l_max + 1):
        p[m, m] = -math.sqrt((2 * m + 1) / (2.0 * m)) * sin_t * p[m - 1, m - 1]
    for m in range(0, l_max):
        p[m + 1, m] = math.sqrt(2 * m + 3) * cos_t * p[m, m]
    for m in range(0, l_max + 1):
        for l in range(m + 2, l_max + 1):
            a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            p[l, m] = a * (cos_t * p[l - 1, m] - b * p[l - 2, m])
    return p


def spherical_harmonics_all(l_max: int, direction) -> np.ndarray:
    """Table Y[l, m + l_max] of Y_l^m(direction) for all |m| <= l <= l_max."""
    n = _unit(direction)
    cos_t = max(-1.0, min(1.0, n[2]))
    rho = math.hypot(n[0], n[1])
    sin_t = rho
    phi = math.atan2(n[1], n[0]) if rho > 0 else 0.0
    p = _legendre_normalized(l_max, cos_t, sin_t)
    out = np.zeros((l_max + 1, 2 * l_max + 1), dtype=complex)
    for m in range(0, l_max + 1):
        e = complex(math.cos(m * phi), math.sin(m * phi))
        sgn = -1.0 if m % 2 else 1.0
        for l in range(m, l_max + 1):
            out[l, l_max + m] = p[l, m] * e
            if m:
                out[l, l_max - m] = sgn * p[l, m] * e.conjugate()
    return out


def spherical_harmonic(l: int, m: int, direction) -> complex:
    """Y_l^m at a unit direction, Condon-Shortley phase, orthonormal on the sphere."""
    if l < 0 or abs(m) > l:
        raise ValueError(f"malformed (l, m) = ({l}, {m})")
    return complex(spherical_harmonics_all(l, direction)[l, l + m])


# ---------------------------------------------------------------------------
# Rotations
# ---------------------------------------------------------------------------


def rotation_matrix_zyz(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Cartesian active rotation R = Rz(alpha) Ry(beta) Rz(gamma)."""

    def rz(t):
        c, s = math.cos(t), math.sin(t)
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])

    c, s = math.cos(beta), math.sin(beta)
    ry = np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    return rz(alpha) @ ry @ rz(gamma)


@lru_cache(maxsize=None)
def _jy_eigensystem(l: int):
    ms = np.arange(l, -l - 1, -1)  # row index 0 <-> m = l
    jp = np.zeros((2 * l + 1, 2 * l + 1))
    for i in range(1, 2 * l + 1):
        m = ms[i]
        jp[i - 1, i] = math.sqrt(l * (l + 1) - m * (m + 1))
    jy = (jp - jp.T) / 2j
    w, v = np.linalg.eigh(jy)
    w.flags.writeable = False
    v.flags.writeable = False
    return w, v


def wigner_rotation(l: int, euler_angles) -> np.ndarray:
    """Wigner matrix D^l_{m', m}(alpha, beta, gamma), indices m', m = -l..l.

    D_{m'm} = <l m'| exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz) |l m>,
    so that Y_l^m(R^{-1} n) = sum_{m'} Y_l^{m'}(n) D_{m'm}(R).  Row/column 0
    corresponds to m = -l.
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    alpha, beta, gamma = (float(t) for t in euler_angles)
    if l == 0:
        return np.ones((1, 1), dtype=complex)
    w, v = _jy_eigensystem(l)
    d = (v * np.exp(-1j * beta * w)) @ v.conj().T
    # eigensystem built with m descending; flip to ascending
    d = d[::-1, ::-1]
    ms = np.arange(-l, l + 1)
    return np.exp(-1j * alpha * ms)[:, None] * d * np.exp(-1j * gamma * ms)[None, :]
