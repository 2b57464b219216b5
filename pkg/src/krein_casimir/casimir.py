"""Casimir energy pipelines.

Fermionic energies are E_C = -int_0^mu dE N_C(E) = -mu int_0^1 2x n_c(x k_F) dx
(E = mu x^2), reported in units of mu with the degeneracy already applied.
Scalar Dirichlet energies use the imaginary-axis form

    E_C = (hbar c / 2 pi) int_0^inf dkappa ln det M(i kappa),

reported in hbar c / a and in the normalization of -hbar c pi^3 a / (1440 L^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .geometry import Configuration, FermiGas, two_spheres
from .numerics import (
    LogDet,
    integrate_adaptive,
    sample_grid,
    unwrap_scan,
)
from .scattering import (
    converge_logdet,
    logdet_m,
    logdet_m_converged,
    logdet_sphere_plate,
    two_bounce_stability,
)
from .specfun import spherical_bessel_j

__all__ = [
    "EnergyResult",
    "GeometryQuery",
    "fermionic_energy_exact",
    "fermionic_energy_two_sphere_approx",
    "fermionic_energy_sphere_plate_approx",
    "scalar_energy_two_spheres",
    "scalar_energy_sphere_plate",
    "pfa_sphere_plate",
    "pfa_two_spheres_leading",
    "scalar_semiclassical_two_bounce",
    "fig2_normalization",
    "ASYMPTOTE_SPHERE_PLATE",
    "ASYMPTOTE_TWO_SPHERES",
]

ZETA4 = math.pi**4 / 90.0
ASYMPTOTE_SPHERE_PLATE = 2.0 / ZETA4
ASYMPTOTE_TWO_SPHERES = 4.0 / ZETA4

FERMI_UNITS = ("mu", "mu_per_channel")
SCALAR_UNITS = ("hbar_c_over_a", "fig2")


@dataclass(frozen=True)
class EnergyResult:
    """An energy with its unit convention and provenance.

    ``context`` carries what a unit conversion needs (a, L, nu_deg).
    """

    value: float
    units: str
    method: str
    error: float = 0.0
    l_max: int | None = None
    context: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.error < 0:
            raise ValueError("error estimate must be non-negative")

    def _scale(self, units: str) -> float:
        """Value in ``units`` equals base value times this factor."""
        if units in FERMI_UNITS:
            nu = self.context.get("nu_deg", 1)
            return 1.0 if units == "mu" else 1.0 / nu
        if units in SCALAR_UNITS:
            if units == "hbar_c_over_a":
                return 1.0
            a, gap = self.context["a"], self.context["L"]
            return 1.0 / fig2_normalization(a, gap)
        raise ValueError(f"unknown units {units!r}")

    def to_units(self, units: str) -> "EnergyResult":
        family = FERMI_UNITS if self.units in FERMI_UNITS else SCALAR_UNITS
        if units not in family:
            raise ValueError(f"cannot convert {self.units} to {units}")
        factor = self._scale(units) / self._scale(self.units)
        return replace(self, value=self.value * factor, error=self.error * abs(factor), units=units)


@dataclass(frozen=True)
class GeometryQuery:
    """two-spheres (a, r center distance), sphere-plate (a, r center-plate
    distance) or n-spheres (config)."""

    kind: str
    a: float = 1.0
    r: float = 0.0
    config: Configuration | None = None
    l_max: int | None = None  # fixes the truncation instead of converging it

    def __post_init__(self):
        if self.kind not in ("two-spheres", "sphere-plate", "n-spheres"):
            raise ValueError(f"unknown geometry kind {self.kind!r}")
        if self.kind == "n-spheres":
            if self.config is None:
                raise ValueError("n-spheres query needs a configuration")
        elif not self.gap > 0:
            raise ValueError(f"{self.kind}: gap must be positive (a={self.a}, r={self.r})")

    @property
    def gap(self) -> float:
        if self.kind == "two-spheres":
            return self.r - 2.0 * self.a
        if self.kind == "sphere-plate":
            return self.r - self.a
        return self.config.min_gap()

    def logdet(self, k, tol: float) -> tuple[LogDet, int]:
        """Truncation-converged ln det for this geometry at wavenumber k."""
        if self.l_max is not None:
            if self.kind == "sphere-plate":
                return logdet_sphere_plate(self.a, self.r, k, self.l_max), self.l_max
            config = self.config if self.kind == "n-spheres" else two_spheres(self.a, self.r)
            return logdet_m(config, k, self.l_max), self.l_max
        if self.kind == "sphere-plate":
            start = int(math.ceil(abs(k) * self.a)) + 8
            return converge_logdet(
                lambda L: logdet_sphere_plate(self.a, self.r, k, L), start, tol, step=2, l_cap=80
            )
        config = self.config if self.kind == "n-spheres" else two_spheres(self.a, self.r)
        return logdet_m_converged(config, k, tol, l_cap=80)


def fig2_normalization(a: float, gap: float) -> float:
    """Leading sphere-plate PFA energy -pi^3 a / (1440 L^2) in hbar c units."""
    return -math.pi**3 * a / (1440.0 * gap * gap)


# ---------------------------------------------------------------------------
# fermionic
# ---------------------------------------------------------------------------


def fermionic_energy_exact(
    query: GeometryQuery,
    fermi: FermiGas,
    tol: float = 1e-6,
    logdet_tol: float = 1e-10,
    per_period: int = 8,
) -> EnergyResult:
    """-mu int_0^1 2x n_c(x k_F) dx with n_c from the converged ln det M.

    The phase branch is fixed on a k grid with at least ``per_period``
    points per period of the shortest two-bounce action 2 L k; the adaptive
    quadrature then continues every new phase onto that branch.
    """
    k_f = fermi.k_f
    period = math.pi / query.gap
    grid = sample_grid(0.0, k_f, period, per_period, minimum=9)
    l_used = [0]

    def evaluate(k):
        ld, l_max = query.logdet(k, logdet_tol)
        l_used[0] = max(l_used[0], l_max)
        return ld

    raw = [(0.0, LogDet(0.0, 0.0))] + [(float(k), evaluate(k)) for k in grid[1:]]
    scan = unwrap_scan(raw, refine=evaluate)

    def integrand(x):
        if x == 0.0:
            return 0.0
        k = x * k_f
        ld = evaluate(k)
        n_c = -scan.branch(k, ld.imag_part) / math.pi
        return 2.0 * x * n_c

    res = integrate_adaptive(integrand, 0.0, 1.0, tol=tol, abs_floor=1e-14, breakpoints=scan.ks[1:-1] / k_f)
    nu = fermi.nu_deg
    # |delta n_c| <= logdet_tol / pi per node and int_0^1 2x dx = 1
    truncation = 0.0 if query.l_max is not None else logdet_tol / math.pi
    return EnergyResult(
        value=-nu * res.value,
        units="mu",
        method="exact",
        error=nu * (res.error + truncation),
        l_max=l_used[0],
        context={"nu_deg": nu, "k_f": k_f, "gap": query.gap, "scan_resolved": scan.resolved},
    )


def fermionic_energy_two_sphere_approx(a: float, r: float, k_f: float, nu_deg: int = 1) -> EnergyResult:
    """-nu mu a^2 / (2 pi r (r-2a)) j_1[2(r-2a) k_F]."""
    if not r > 2 * a:
        raise ValueError("need r > 2a")
    x = 2.0 * (r - 2.0 * a) * k_f
    j1 = spherical_bessel_j(1, x)[1].real
    value = -nu_deg * a * a / (2.0 * math.pi * r * (r - 2.0 * a)) * j1
    return EnergyResult(value, "mu", "semiclassical(1)", context={"nu_deg": nu_deg})


def fermionic_energy_sphere_plate_approx(a: float, r: float, k_f: float, nu_deg: int = 1) -> EnergyResult:
    """-nu mu a / (2 pi (r-a)) j_1[2(r-a) k_F]."""
    if not r > a:
        raise ValueError("need r > a")
    x = 2.0 * (r - a) * k_f
    j1 = spherical_bessel_j(1, x)[1].real
    value = -nu_deg * a / (2.0 * math.pi * (r - a)) * j1
    return EnergyResult(value, "mu", "semiclassical(1)", context={"nu_deg": nu_deg})


# ---------------------------------------------------------------------------
# scalar Dirichlet
# ---------------------------------------------------------------------------


def _kappa_cutoff(gap: float, tol: float) -> float:
    # ln det ~ exp(-2 kappa gap); the tail beyond the cutoff is below tol * peak
    return (math.log(1.0 / tol) + 10.0) / (2.0 * gap)


def _kappa_breaks(gap: float, kappa_max: float) -> list[float]:
    return [0.25 / gap * 2**i for i in range(12) if 0.25 / gap * 2**i < kappa_max]


def _imaginary_axis_energy(logdet: Callable[[float], float], gap: float, tol: float):
    """(1/2pi) int_0^inf ln det(i kappa) dkappa with a decay-based cutoff."""
    kappa_max = _kappa_cutoff(gap, tol)
    res = integrate_adaptive(
        logdet, 0.0, kappa_max, tol=tol, abs_floor=1e-300, breakpoints=_kappa_breaks(gap, kappa_max)
    )
    return res.value / (2.0 * math.pi), res.error / (2.0 * math.pi)


def _scalar_result(value, error, a, gap, method, l_max):
    return EnergyResult(
        value * a,
        "hbar_c_over_a",
        method,
        error=error * a,
        l_max=l_max,
        context={"a": a, "L": gap},
    )


KAPPA_FLOOR = 1e-12  # kappa -> 0 is the finite static limit; evaluate just off zero
L_CAP_IMAG = 120


def _kappa_logdet(
    query: GeometryQuery, l_fixed: int | None, logdet_tol: float, l_used: list, tol: float = 1e-7
):
    """ln det M(i kappa) as a function of kappa for the imaginary-axis integral.

    Without ``l_fixed`` the truncation is converged once on a set of probe
    points (kappa = 0, the quadrature breakpoints and the cutoff) to an
    absolute tolerance ``max(logdet_tol, tol / 10) * |ln det(0)|``; each
    quadrature node then uses the larger order of its two bracketing probes.
    """
    if query.kind == "sphere-plate":
        def at(kappa, l_max):
            return logdet_sphere_plate(query.a, query.r, 1j * max(kappa, KAPPA_FLOOR), l_max).real_part
    else:
        config = query.config if query.kind == "n-spheres" else two_spheres(query.a, query.r)

        def at(kappa, l_max):
            return logdet_m(config, 1j * max(kappa, KAPPA_FLOOR), l_max).real_part

    if l_fixed is not None:
        fixed = lambda kappa: at(kappa, l_fixed)
        fixed.truncation_error = 0.0
        return fixed

    gap = query.gap
    kappa_max = _kappa_cutoff(gap, tol)
    probes = [0.0, *_kappa_breaks(gap, kappa_max), kappa_max]

    def converge(kappa, l_start, atol):
        ld, l_max = converge_logdet(
            lambda L: LogDet(at(kappa, L), 0.0), max(l_start, 2), atol, step=2, l_cap=L_CAP_IMAG
        )
        return ld.real_part, l_max

    # the static limit is the integrand peak and the hardest point in l
    l_start = int(math.ceil(4.0 * query.a / gap)) + 4
    atol = max(logdet_tol, 0.1 * tol) * max(abs(at(0.0, l_start)), 1e-300)
    _, l0 = converge(0.0, l_start, atol)
    orders = [l0]
    for kappa in probes[1:]:
        orders.append(converge(kappa, orders[-1] - 6, atol)[1])
    l_used[0] = max(l_used[0], max(orders))
    probe_arr = np.asarray(probes)

    def f(kappa):
        i = int(np.searchsorted(probe_arr, kappa, side="right"))
        lo, hi = orders[max(i - 1, 0)], orders[min(i, len(orders) - 1)]
        return at(kappa, max(lo, hi))

    # per-node truncation bound integrated over [0, kappa_max], with the 1/2pi
    f.truncation_error = atol * kappa_max / (2.0 * math.pi)
    return f


def scalar_energy_two_spheres(
    a: float, r: float, tol: float = 1e-7, logdet_tol: float = 1e-10, l_max: int | None = None
) -> EnergyResult:
    """Dirichlet scalar energy of two spheres of radius a, center distance r.

    ``l_max`` fixes the truncation (``0`` gives the s-wave curve); by default
    each quadrature node converges its own truncation.
    """
    query = GeometryQuery("two-spheres", a, r)
    l_used = [0 if l_max is None else l_max]
    f = _kappa_logdet(query, l_max, logdet_tol, l_used, tol)
    value, err = _imaginary_axis_energy(f, query.gap, tol)
    err += f.truncation_error
    method = "exact" if l_max is None else ("s-wave" if l_max == 0 else f"truncated({l_max})")
    return _scalar_result(value, err, a, query.gap, method, l_used[0])


def scalar_energy_sphere_plate(
    a: float, gap: float, tol: float = 1e-7, logdet_tol: float = 1e-10, l_max: int | None = None
) -> EnergyResult:
    """Dirichlet sphere in front of a Dirichlet plane at surface gap L.

    Realized by the image sphere at center distance 2(L+a) in the odd
    sector.  Use ``to_units('fig2')`` for the -pi^3 a/(1440 L^2) normalization.
    """
    if not gap > 0:
        raise ValueError("gap must be positive")
    query = GeometryQuery("sphere-plate", a, a + gap)
    l_used = [0 if l_max is None else l_max]
    f = _kappa_logdet(query, l_max, logdet_tol, l_used, tol)
    value, err = _imaginary_axis_energy(f, gap, tol)
    err += f.truncation_error
    method = "exact" if l_max is None else ("s-wave" if l_max == 0 else f"truncated({l_max})")
    return _scalar_result(value, err, a, gap, method, l_used[0])


def pfa_sphere_plate(a: float, gap: float, basis: str = "plate-based") -> EnergyResult:
    """Proximity-force estimate from e(d) = -pi^2 / (1440 d^3) (hbar c units).

    plate-based: integrate over the plate disk below the sphere, local gap
    to the facing hemisphere, h(rho) = L + a - sqrt(a^2 - rho^2).
    sphere-based: integrate over the facing hemisphere's surface, local gap
    measured vertically, h(theta) = L + a(1 - cos theta).
    Both reduce to -pi^3 a / (1440 L^2) as L/a -> 0.
    """
    if not gap > 0:
        raise ValueError("gap must be positive")
    L = gap
    s = L + a
    if basis == "plate-based":
        # 2 pi int_0^a rho drho / h^3 = 2 pi int_L^{L+a} (L + a - h) / h^3 dh
        integral = s * (1.0 / (2 * L * L) - 1.0 / (2 * s * s)) - (1.0 / L - 1.0 / s)
    elif basis == "sphere-based":
        # 2 pi a^2 int_0^1 dc / (L + a - a c)^3 = 2 pi a int_L^{L+a} dh / h^3
        integral = a * (1.0 / (2 * L * L) - 1.0 / (2 * s * s))
    else:
        raise ValueError(f"unknown PFA basis {basis!r}")
    value = -(math.pi**2 / 1440.0) * 2.0 * math.pi * integral
    return EnergyResult(value * a, "hbar_c_over_a", f"pfa-{basis}", context={"a": a, "L": gap})


def pfa_two_spheres_leading(a: float, r: float) -> EnergyResult:
    """Leading two-sphere proximity comparator -pi^3 a^2 / (1440 r L^2).

    Equals (pi^4/90) times the single-repeat semiclassical energy, and the
    standard two-sphere PFA -pi^3 a / (2880 L^2) as L/a -> 0.
    """
    gap = r - 2.0 * a
    if not gap > 0:
        raise ValueError("need r > 2a")
    value = -math.pi**3 * a * a / (1440.0 * r * gap * gap)
    return EnergyResult(value * a, "hbar_c_over_a", "pfa-leading", context={"a": a, "L": gap})


def _semiclassical_repeat_table(a, gap, kind, repeats):
    lam = two_bounce_stability(a, gap, kind)
    if repeats is None:
        # all repeats: stop once Lambda^w makes the remaining tail negligible
        w_max = 200000
    else:
        w_max = repeats
    ws = np.arange(1, w_max + 1, dtype=float)
    log_lam = math.log(lam)
    x = ws * log_lam
    # Lambda^w + Lambda^-w - 2 = 4 sinh^2(w ln Lambda / 2)
    with np.errstate(over="ignore"):
        den = 4.0 * np.sinh(0.5 * x) ** 2
        amp = 1.0 / (math.pi * ws * den)
    return ws, amp


def scalar_semiclassical_two_bounce(
    a: float,
    gap: float,
    kind: str = "sphere-plate",
    repeats: int | None = None,
    tol: float = 1e-9,
) -> EnergyResult:
    """Gutzwiller two-bounce energy summed over orbit repeats (None = all).

    Each repeat w with count amplitude A_w contributes -pi A_w exp(-2 w L kappa)
    to ln det on the imaginary axis; that continuation is integrated
    numerically.  Per repeat it is E_w = -hbar c / (4 pi w^2 L (Lambda^w +
    Lambda^-w - 2)).
    """
    if not gap > 0:
        raise ValueError("gap must be positive")
    ws, amp = _semiclassical_repeat_table(a, gap, kind, repeats)
    keep = amp > 0
    ws, amp = ws[keep], amp[keep]
    # the slowly decaying repeats are summed analytically beyond w_split
    w_split = min(len(ws), 64)
    head_w, head_a = ws[:w_split], amp[:w_split]

    def logdet(kappa):
        return float(-math.pi * np.sum(head_a * np.exp(-2.0 * head_w * gap * kappa)))

    value, err = _imaginary_axis_energy(logdet, gap, tol)
    tail = -float(np.sum(amp[w_split:] / (4.0 * ws[w_split:] * gap))) if len(ws) > w_split else 0.0
    label = "all" if repeats is None else str(repeats)
    return EnergyResult(
        (value + tail) * a,
        "hbar_c_over_a",
        f"semiclassical({label})",
        error=err * a,
        context={"a": a, "L": gap},
    )
