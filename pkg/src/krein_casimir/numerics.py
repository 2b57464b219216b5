"""Log-determinants, phase tracking along wavenumber scans, adaptive quadrature."""
from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor

__all__ = [
    "SingularMatrixError",
    "RefinementBudgetExceeded",
    "ToleranceNotMet",
    "LogDet",
    "SpectralScan",
    "QuadResult",
    "logdet_complex",
    "unwrap_scan",
    "integrate_adaptive",
    "wrap_phase",
]

TWO_PI = 2.0 * math.pi


class SingularMatrixError(ArithmeticError):
    """A pivot of the LU factorization vanished to working precision."""


class RefinementBudgetExceeded(RuntimeError):
    def __init__(self, message, partial: "SpectralScan"):
        super().__init__(message)
        self.partial = partial


class ToleranceNotMet(RuntimeError):
    def __init__(self, message, value: float, error: float):
        super().__init__(message)
        self.value = value
        self.error = error


def wrap_phase(phi: float) -> float:
    """Map an angle into (-pi, pi]."""
    w = math.remainder(phi, TWO_PI)
    if w == -math.pi:
        w = math.pi
    return w


@dataclass(frozen=True)
class LogDet:
    real_part: float
    imag_part: float
    pivot_growth: float = 1.0

    @property
    def value(self) -> complex:
        return complex(self.real_part, self.imag_part)


def logdet_complex(matrix) -> LogDet:
    """ln det of a square matrix via LU with partial pivoting.

    The log-modulus is accumulated pivot by pivot, so huge or tiny
    determinants never overflow.  The phase is returned on the principal
    branch.  ``pivot_growth`` is max|U| / max|A|.
    """
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"square matrix required, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return LogDet(0.0, 0.0)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrixError
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(a, check_finite=False)
    diag = np.diagonal(lu)
    mags = np.abs(diag)
    scale = float(np.max(np.abs(a)))
    if np.any(mags <= n * np.finfo(float).eps * scale) or np.any(mags == 0.0):
        raise SingularMatrixError(
            f"pivot {float(mags.min()):.3e} below working precision (scale {scale:.3e})"
        )
    swaps = int(np.count_nonzero(piv != np.arange(n)))
    real = float(np.sum(np.log(mags)))
    if np.iscomplexobj(diag):
        phase = float(np.sum(np.angle(diag)))
    else:
        phase = math.pi * int(np.count_nonzero(diag < 0))
    phase += math.pi * swaps
    growth = float(np.max(np.abs(np.triu(lu)))) / scale if scale > 0 else 1.0
    return LogDet(real, wrap_phase(phase), growth)


@dataclass
class SpectralScan:
    """Samples (k, LogDet) with a continuous phase anchored at the low-k end."""

    samples: list
    resolved: bool = True
    insertions: int = 0

    @property
    def ks(self) -> np.ndarray:
        return np.array([k for k, _ in self.samples])

    @property
    def phases(self) -> np.ndarray:
        return np.array([ld.imag_part for _, ld in self.samples])

    def branch(self, k: float, principal_phase: float) -> float:
        """Continue a principal phase measured at ``k`` onto the scan's branch.

        The branch is chosen closest to the linear interpolation of the
        unwrapped scan; valid while the scan itself is resolved.
        """
        ks = self.ks
        ph = self.phases
        target = float(np.interp(k, ks, ph))
        return principal_phase + TWO_PI * round((target - principal_phase) / TWO_PI)


def _unwrap_sequence(samples: Sequence) -> list:
    out = []
    prev = None
    for k, ld in samples:
        phi = ld.imag_part
        if prev is not None:
            phi = prev + wrap_phase(phi - prev)
        out.append((k, replace(ld, imag_part=phi)))
        prev = phi
    return out


def unwrap_scan(
    raw: Iterable,
    refine: Callable[[float], LogDet] | None = None,
    max_step: float = math.pi / 2,
    max_insertions: int = 200,
) -> SpectralScan:
    """Make the phase of a k-ordered scan continuous.

    An interval is bisected (through ``refine``) while its principal-branch
    jump reaches ``max_step``, or while the jump disagrees by ``max_step``
    with the slope of the interval to its left; the second test catches
    steps that alias to a small wrapped jump.  The first sample is taken as
    is: for the scans here it sits close to k = 0 where det M -> 1 and the
    phase is near zero.
    """
    samples = sorted(((float(k), ld) for k, ld in raw), key=lambda s: s[0])
    if not samples:
        return SpectralScan([], True, 0)
    insertions = 0
    resolved = True
    phases = [samples[0][1].imag_part]  # unwrapped, for samples[:len(phases)]
    i = 0
    while i < len(samples) - 1:
        (k0, l0), (k1, l1) = samples[i], samples[i + 1]
        step = wrap_phase(l1.imag_part - l0.imag_part)
        bad = abs(step) >= max_step
        if not bad and i > 0:
            slope = (phases[i] - phases[i - 1]) / (k0 - samples[i - 1][0])
            pred = slope * (k1 - k0)
            bad = abs(step - pred) >= max_step
        if not bad or refine is None:
            if bad:
                resolved = False
            phases.append(phases[i] + step)
            i += 1
            continue
        if insertions >= max_insertions:
            partial = SpectralScan(_unwrap_sequence(samples), False, insertions)
            raise RefinementBudgetExceeded(
                f"phase still jumps by {abs(step):.3f} near k={k0:.6g} after {insertions} insertions",
                partial,
            )
        km = 0.5 * (k0 + k1)
        samples.insert(i + 1, (km, refine(km)))
        insertions += 1
    out = [(k, replace(ld, imag_part=phi)) for (k, ld), phi in zip(samples, phases)]
    return SpectralScan(out, resolved, insertions)


# ---------------------------------------------------------------------------
# Gauss-Kronrod 7/15 adaptive quadrature
# ---------------------------------------------------------------------------

_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KW = np.concatenate([_WK[:-1], _WK[::-1]])
_GW = np.zeros(15)
_GW[1:7:2] = _WG[:3]
_GW[7] = _WG[3]
_GW[9:14:2] = _WG[2::-1]


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    evaluations: int
    intervals: int


def _gk15(f, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fx = np.array([f(c + h * x) for x in _NODES], dtype=float)
    k = h * float(np.dot(_KW, fx))
    g = h * float(np.dot(_GW, fx))
    return k, abs(k - g)


def integrate_adaptive(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    abs_floor: float = 1e-300,
    breakpoints: Sequence[float] = (),
    max_intervals: int = 4000,
) -> QuadResult:
    """Adaptive bisection with the nested Gauss-Kronrod 7/15 pair.

    Stops when the summed error estimate is below ``tol * |I| + abs_floor``.
    ``breakpoints`` seeds the initial partition (used to resolve oscillatory
    integrands before adaptation starts).  Raises :class:`ToleranceNotMet`
    carrying the best estimate if the interval budget runs out.
    """
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    pts = sorted({float(a), float(b), *(float(p) for p in breakpoints if a < p < b)})
    heap = []
    total = 0.0
    err = 0.0
    n_eval = 0
    for lo, hi in zip(pts[:-1], pts[1:]):
        v, e = _gk15(f, lo, hi)
        n_eval += 15
        heapq.heappush(heap, (-e, lo, hi, v))
        total += v
        err += e
    while err > tol * abs(total) + abs_floor:
        if len(heap) >= max_intervals:
            raise ToleranceNotMet(
                f"error {err:.3e} above target after {len(heap)} intervals", total, err
            )
        neg_e, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise ToleranceNotMet("interval collapsed below floating resolution", total, err)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        n_eval += 30
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        # re-sum to avoid drift from repeated subtraction
        total = math.fsum(item[3] for item in heap)
        err = math.fsum(-item[0] for item in heap)
    return QuadResult(total, err, n_eval, len(heap))


def sample_grid(lo: float, hi: float, period: float, per_period: int = 8, minimum: int = 2) -> np.ndarray:
    """Uniform grid on [lo, hi] with at least ``per_period`` points per period."""
    n = max(minimum, int(math.ceil((hi - lo) / period * per_period)) + 1)
    return np.linspace(lo, hi, n)
