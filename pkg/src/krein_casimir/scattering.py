"""Inverse multiple-scattering matrix M for Dirichlet spheres and its log-determinant.

Matrix entries (off-diagonal blocks j != j')::

    M^{jj'}_{lm,l'm'} = i^(2m+l'-l) sqrt(4pi(2l+1)(2l'+1)) (a_j/a_j')^2
        j_l(k a_j) / h_l'(k a_j')
        sum_{l'',m''} sqrt(2l''+1) i^l'' (l'' l' l; 0 0 0) (l'' l' l; m-m'' m'' -m)
        D^{l'}_{m',m''}(j,j') h_l''(k r_jj') Y_l''^{m-m''}(rhat^(j)_jj')

with M^{jj} = 1.  The l'' sum is cut exactly by the triangle rule.  Basis
ordering is scatterer-major, then l, then m ascending:
``index(j, l, m) = j (l_max+1)^2 + l^2 + l + m``.

Two assembly paths exist.  The general path handles arbitrary positions and
local frames.  The axial path applies when all centers lie on one z-parallel
line in the global frame; m is then conserved and det M factorizes over
m-blocks.  Both are pure functions of (configuration, k, l_max).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import specfun
from .geometry import Configuration, Truncation, suggest_l_max, two_spheres
from .numerics import LogDet, SpectralScan, logdet_complex, unwrap_scan, wrap_phase

__all__ = [
    "NoConvergence",
    "MMatrix",
    "IntegratedDos",
    "basis_labels",
    "assemble_m",
    "assemble_axial_blocks",
    "logdet_m",
    "logdet_sphere_plate",
    "converge_logdet",
    "logdet_m_converged",
    "integrated_dos_exact",
    "single_sphere_phase_shift",
    "nc_swave_two_spheres",
    "nc_semiclassical_two_spheres",
    "nc_semiclassical_sphere_plate",
    "nc_swave_n_spheres",
    "two_bounce_stability",
]

SQRT_4PI = math.sqrt(4.0 * math.pi)
MAX_DIMENSION = 20000


class NoConvergence(RuntimeError):
    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


# ---------------------------------------------------------------------------
# k-independent angular tensors (cached: pure functions of integers)
# ---------------------------------------------------------------------------


def _entry_angular(l, lp, lpp, m, mpp) -> float:
    """Real angular weight excluding the i-powers and Y."""
    t0 = specfun.wigner_3j(lpp, lp, l, 0, 0, 0)
    if t0 == 0.0:
        return 0.0
    t1 = specfun.wigner_3j(lpp, lp, l, m - mpp, mpp, -m)
    if t1 == 0.0:
        return 0.0
    return math.sqrt(4.0 * math.pi * (2 * l + 1) * (2 * lp + 1) * (2 * lpp + 1)) * t0 * t1


@lru_cache(maxsize=16)
def _general_tuples(l_max: int):
    """Nonzero terms of the l'' sum for every (l, m, l', m'') at truncation l_max.

    Returns integer index arrays and complex weights (including the i-powers).
    """
    rows, l_s, lp_s, mpp_col, lpp_s, ydm, weights = [], [], [], [], [], [], []
    for l in range(l_max + 1):
        for m in range(-l, l + 1):
            row = l * l + l + m
            for lp in range(l_max + 1):
                for mpp in range(-lp, lp + 1):
                    col = lp * lp + lp + mpp
                    for lpp in range(abs(l - lp), l + lp + 1, 2):
                        if abs(m - mpp) > lpp:
                            continue
                        w = _entry_angular(l, lp, lpp, m, mpp)
                        if w == 0.0:
                            continue
                        rows.append(row)
                        mpp_col.append(col)
                        l_s.append(l)
                        lp_s.append(lp)
                        lpp_s.append(lpp)
                        ydm.append(m - mpp)
                        weights.append(w * specfun.ipow(2 * m + lp - l + lpp))
    arr = lambda v, t=np.int64: np.asarray(v, dtype=t)  # noqa: E731
    out = (
        arr(rows),
        arr(mpp_col),
        arr(l_s),
        arr(lp_s),
        arr(lpp_s),
        arr(ydm),
        np.asarray(weights, dtype=complex),
    )
    for a in out:
        a.flags.writeable = False
    return out


@lru_cache(maxsize=8)
def _axial_legendre(l_max: int):
    # Gauss-Legendre rule exact for products of three Legendre functions of degree <= 2 l_max
    n = 3 * l_max + 4
    x, w = np.polynomial.legendre.leggauss(n)
    p = specfun._legendre_normalized(2 * l_max, x, np.sqrt(1.0 - x * x))
    return p, w


@lru_cache(maxsize=256)
def _axial_tensor(l_max: int, m: int, downward: bool):
    """G[l, l', l''] for the m-block along +z (or -z), l, l' >= |m| offset by |m|.

    With m'' = m the 3j pair reduces to a Gaunt integral,
    sqrt(4pi(2l+1)(2l'+1)(2l''+1)) (l'' l' l;000)(l'' l' l;0 m -m)
      = 4pi (-1)^m 2pi int_{-1}^{1} P_l''^0 P_l'^m P_l^m dx,
    evaluated by exact Gauss-Legendre quadrature (the 3j route is kept as
    the cross-check in the test suite).  Terms outside the triangle/parity
    rules are zeroed explicitly.
    """
    am = abs(m)
    n = l_max - am + 1
    p, w = _axial_legendre(l_max)
    pm = p[am : l_max + 1, am]  # P_l^{|m|}, l = |m|..l_max
    p0 = p[: 2 * l_max + 1, 0]
    gaunt = np.einsum("ax,bx,cx,x->abc", pm, pm, p0, w, optimize=True)
    # P_l^{-m} P_l'^{-m} = P_l^m P_l'^m for the products used here
    gaunt *= 8.0 * math.pi**2 * (-1.0 if am % 2 else 1.0)
    ls = np.arange(am, l_max + 1)
    lpp = np.arange(0, 2 * l_max + 1)
    L, LP, LPP = np.meshgrid(ls, ls, lpp, indexing="ij")
    allowed = (LPP >= np.abs(L - LP)) & (LPP <= L + LP) & ((L + LP + LPP) % 2 == 0)
    y = np.sqrt((2 * lpp + 1) / (4.0 * math.pi))
    if downward:
        y = y * np.where(lpp % 2 == 1, -1.0, 1.0)
    phase = np.array(specfun._I_POWERS, dtype=complex)[(2 * m + LP - L + LPP) % 4]
    g = np.where(allowed, gaunt * y[None, None, :] * phase, 0.0).astype(complex)
    g.flags.writeable = False
    return g


def _axial_tensor_3j(l_max: int, m: int, downward: bool) -> np.ndarray:
    """Reference construction of :func:`_axial_tensor` from exact 3j symbols."""
    am = abs(m)
    n = l_max - am + 1
    g = np.zeros((n, n, 2 * l_max + 1), dtype=complex)
    for l in range(am, l_max + 1):
        for lp in range(am, l_max + 1):
            for lpp in range(abs(l - lp), l + lp + 1, 2):
                w = _entry_angular(l, lp, lpp, m, m)
                if w == 0.0:
                    continue
                y = math.sqrt((2 * lpp + 1) / (4.0 * math.pi))
                if downward and lpp % 2:
                    y = -y
                g[l - am, lp - am, lpp] = w * y * specfun.ipow(2 * m + lp - l + lpp)
    return g


# ---------------------------------------------------------------------------
# radial factors
# ---------------------------------------------------------------------------


@lru_cache(maxsize=512)
def _ldf_table(n_max: int) -> np.ndarray:
    return np.array([specfun.log_double_factorial(n) for n in range(-1, n_max + 1)])


def _ldf(n):
    # n >= -1, vectorized via lookup
    n = np.asarray(n)
    return _ldf_table(int(n.max()) + 1)[n + 1]


def _k_phase_power(k: complex, p: np.ndarray) -> np.ndarray:
    if k.imag == 0.0:
        base = 1.0 if k.real > 0 else -1.0
        return np.where(p % 2 == 0, 1.0, base).astype(complex)
    if k.real == 0.0 and k.imag > 0:
        return np.array(specfun._I_POWERS, dtype=complex)[p % 4]
    return np.exp(1j * p * np.angle(k))


class _RadialCache:
    """Scaled Bessel tables for one k, reused across pairs."""

    def __init__(self, k: complex, l_max: int):
        self.k = k
        self.l_max = l_max
        self.logk = math.log(abs(k))
        self._jhat = {}
        self._hhat = {}

    def jhat(self, a):
        if a not in self._jhat:
            self._jhat[a] = specfun.scaled_bessel_j(self.l_max, self.k * a)
        return self._jhat[a]

    def hhat(self, x_len, order):
        key = (x_len, order)
        if key not in self._hhat:
            self._hhat[key] = specfun.scaled_hankel1(order, self.k * x_len)
        return self._hhat[key]

    def factor(self, aj, ajp, r, l, lp, lpp):
        """(a_j/a_j')^2 j_l(k a_j) h_l''(k r) / h_l'(k a_j') for index arrays."""
        jh = self.jhat(aj)[l]
        hh_r = self.hhat(r, 2 * self.l_max)[lpp]
        hh_a = self.hhat(ajp, self.l_max)[lp]
        p = l + lp - lpp
        logmag = (
            p * self.logk
            + l * math.log(aj)
            + (lp + 1) * math.log(ajp)
            - (lpp + 1) * math.log(r)
            + _ldf(2 * lpp - 1)
            - _ldf(2 * l + 1)
            - _ldf(2 * lp - 1)
            + 2.0 * (math.log(aj) - math.log(ajp))
        )
        return jh * hh_r / hh_a * _k_phase_power(self.k, p) * np.exp(logmag)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------


def basis_labels(n_scatterers: int, l_max: int) -> list[tuple[int, int, int]]:
    return [
        (j, l, m)
        for j in range(n_scatterers)
        for l in range(l_max + 1)
        for m in range(-l, l + 1)
    ]


@dataclass
class MMatrix:
    config: Configuration
    k: complex
    truncation: Truncation
    matrix: np.ndarray = field(repr=False)
    symmetry: str = "full"

    @property
    def basis(self):
        return basis_labels(self.config.n, self.truncation.l_max)

    def to_json(self) -> str:
        """Debug dump: dimensions, basis ordering, row-major (re, im) pairs."""
        mat = self.matrix
        return json.dumps(
            {
                "dimension": list(mat.shape),
                "k": [self.k.real, self.k.imag],
                "l_max": self.truncation.l_max,
                "basis_ordering": "scatterer-major, l-major, m ascending",
                "basis": [list(b) for b in self.basis],
                "symmetry": self.symmetry,
                "entries": [[float(z.real), float(z.imag)] for z in mat.ravel()],
            }
        )


def _pair_frame_matrix(pair, l_max: int) -> list[np.ndarray]:
    """Per-l' frame matrices for the column index m' (j' frame) from m'' (j frame).

    The i-power/Y convention of the entry formula is the complex conjugate
    of specfun's active-rotation convention, hence conj(D^{l'}(Q)).
    """
    return [specfun.wigner_rotation(lp, pair.euler).conj() for lp in range(l_max + 1)]


def _general_block(config, j, jp, cache: _RadialCache, l_max: int) -> np.ndarray:
    sj = config.scatterers[j]
    sjp = config.scatterers[jp]
    pair = config.pair(j, jp)
    rows, cols, l, lp, lpp, dm, w = _general_tuples(l_max)
    ytab = specfun.spherical_harmonics_all(2 * l_max, pair.direction)
    y = ytab[lpp, 2 * l_max + dm]
    rad = cache.factor(sj.radius, sjp.radius, pair.separation, l, lp, lpp)
    size = (l_max + 1) ** 2
    b = np.zeros((size, size), dtype=complex)
    np.add.at(b, (rows, cols), w * rad * y)
    identity_frame = np.allclose(pair.rotation, np.eye(3), atol=0.0, rtol=0.0)
    if identity_frame:
        return b
    # column (l', m') lives in the j' frame: entry = sum_m'' B[., l'm''] D^{l'}_{m'' m'}(Q)
    out = np.empty_like(b)
    dmats = _pair_frame_matrix(pair, l_max)
    for lq in range(l_max + 1):
        sl = slice(lq * lq, (lq + 1) ** 2)
        out[:, sl] = b[:, sl] @ dmats[lq]
    return out


def assemble_m(config: Configuration, k, truncation: Truncation | int, path: str = "general") -> MMatrix:
    """Assemble the full M matrix in the documented basis ordering.

    ``path='axial'`` builds the m-block-diagonal form and scatters it into
    the same basis; it requires ``config.is_axial``.
    """
    k = complex(k)
    if k == 0:
        raise ValueError("k = 0 is handled analytically (M = 1); pass k != 0")
    if isinstance(truncation, int):
        truncation = Truncation(truncation)
    l_max = truncation.l_max
    n = config.n
    size = (l_max + 1) ** 2
    dim = n * size
    if dim > MAX_DIMENSION:
        raise ValueError(f"matrix dimension {dim} exceeds guard {MAX_DIMENSION}")
    mat = np.eye(dim, dtype=complex)
    if n == 1:
        return MMatrix(config, k, truncation, mat, "full")
    if path == "axial":
        if not config.is_axial:
            raise ValueError("axial path requires centers on a z-parallel line and identity frames")
        for m, block in assemble_axial_blocks(config, k, l_max).items():
            ls = list(range(abs(m), l_max + 1))
            idx = [j * size + l * l + l + m for j in range(n) for l in ls]
            mat[np.ix_(idx, idx)] = block
        return MMatrix(config, k, truncation, mat, "axial-m-blocks")
    if path != "general":
        raise ValueError(f"unknown assembly path {path!r}")
    cache = _RadialCache(k, l_max)
    for j in range(n):
        for jp in range(n):
            if j == jp:
                continue
            mat[j * size : (j + 1) * size, jp * size : (jp + 1) * size] = _general_block(
                config, j, jp, cache, l_max
            )
    return MMatrix(config, k, truncation, mat, "full")


def _axial_pair_block(cache, aj, ajp, r, downward, l_max, m):
    g = _axial_tensor(l_max, m, downward)
    am = abs(m)
    n = l_max - am + 1
    l = np.arange(am, l_max + 1)[:, None, None]
    lp = np.arange(am, l_max + 1)[None, :, None]
    lpp = np.arange(0, 2 * l_max + 1)[None, None, :]
    mask = g != 0
    ll, lpl, lppl = np.broadcast_arrays(l, lp, lpp)
    out = np.zeros((n, n, 2 * l_max + 1), dtype=complex)
    out[mask] = g[mask] * cache.factor(aj, ajp, r, ll[mask], lpl[mask], lppl[mask])
    return out.sum(axis=2)


def assemble_axial_blocks(config: Configuration, k, l_max: int, ms=None) -> dict:
    """m-blocks of M for an axial configuration, basis (j, l >= |m|) per block."""
    k = complex(k)
    cache = _RadialCache(k, l_max)
    n = config.n
    zs = [s.center[2] for s in config.scatterers]
    ms = range(-l_max, l_max + 1) if ms is None else ms
    blocks = {}
    for m in ms:
        nb = l_max - abs(m) + 1
        blk = np.eye(n * nb, dtype=complex)
        for j in range(n):
            for jp in range(n):
                if j == jp:
                    continue
                sj, sjp = config.scatterers[j], config.scatterers[jp]
                r = abs(zs[jp] - zs[j])
                blk[j * nb : (j + 1) * nb, jp * nb : (jp + 1) * nb] = _axial_pair_block(
                    cache, sj.radius, sjp.radius, r, zs[jp] < zs[j], l_max, m
                )
        blocks[m] = blk
    return blocks


def _sum_logdets(parts) -> LogDet:
    re = math.fsum(p.real_part for p in parts)
    im = wrap_phase(math.fsum(p.imag_part for p in parts))
    growth = max((p.pivot_growth for p in parts), default=1.0)
    return LogDet(re, im, growth)


def _logdet_axial(config, k, l_max) -> LogDet:
    # M_{-m} is the transpose-like mirror of M_m (equal determinants); use m >= 0
    blocks = assemble_axial_blocks(config, k, l_max, ms=range(0, l_max + 1))
    parts = []
    for m, blk in blocks.items():
        ld = logdet_complex(blk)
        parts.append(ld)
        if m:
            parts.append(ld)
    return _sum_logdets(parts)


def logdet_m(config: Configuration, k, l_max: int, path: str = "auto") -> LogDet:
    """ln det M at fixed truncation; principal-branch phase."""
    k = complex(k)
    if config.n == 1:
        return LogDet(0.0, 0.0)
    if path == "auto":
        path = "axial" if config.is_axial else "general"
    if path == "axial":
        return _logdet_axial(config, k, l_max)
    return logdet_complex(assemble_m(config, k, Truncation(l_max), path="general").matrix)


def logdet_sphere_plate(a: float, d: float, k, l_max: int, parity: int = -1) -> LogDet:
    """ln det for a sphere of radius a whose center sits at distance d from a plane.

    Image construction: the mirror sphere at distance 2d carries the
    reflected multipoles with sign ``parity`` (-1 Dirichlet plane, +1
    Neumann).  Per m-block ``M = 1 + parity * M^{s,img} P`` with
    ``P = diag((-1)^(l+m))``.
    """
    k = complex(k)
    cache = _RadialCache(k, l_max)
    parts = []
    for m in range(0, l_max + 1):
        c = _axial_pair_block(cache, a, a, 2.0 * d, True, l_max, m)
        ls = np.arange(abs(m), l_max + 1)
        p = np.where((ls + m) % 2 == 0, 1.0, -1.0)
        blk = np.eye(len(ls), dtype=complex) + parity * c * p[None, :]
        ld = logdet_complex(blk)
        parts.append(ld)
        if m:
            parts.append(ld)
    return _sum_logdets(parts)


def converge_logdet(
    evaluate: Callable[[int], LogDet],
    l_start: int,
    tol: float,
    step: int = 2,
    l_cap: int = 60,
) -> tuple[LogDet, int]:
    """Raise l_max by ``step`` until ln det changes by less than ``tol``.

    Both the modulus and the (wrapped) phase must settle.  Raises
    :class:`NoConvergence` with the iterate trace when ``l_cap`` is passed.
    """
    l_max = max(0, l_start)
    prev = evaluate(l_max)
    trace = [(l_max, prev)]
    while True:
        if l_max + step > l_cap:
            raise NoConvergence(
                f"ln det not converged to {tol:g} by l_max={l_max} (cap {l_cap})", trace
            )
        l_max += step
        cur = evaluate(l_max)
        trace.append((l_max, cur))
        d_re = abs(cur.real_part - prev.real_part)
        d_im = abs(wrap_phase(cur.imag_part - prev.imag_part))
        if d_re < tol and d_im < tol:
            return cur, l_max
        prev = cur


def logdet_m_converged(
    config: Configuration, k, tol: float = 1e-8, l_start: int | None = None, l_cap: int = 60, step: int = 2
) -> tuple[LogDet, int]:
    """ln det M converged in the truncation order."""
    if config.n == 1:
        return LogDet(0.0, 0.0), 0
    if l_start is None:
        l_start = suggest_l_max(config, k).l_max
    return converge_logdet(lambda L: logdet_m(config, k, L), l_start, tol, step, l_cap)


# ---------------------------------------------------------------------------
# integrated density of states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntegratedDos:
    k: float
    n_c: float
    provenance: str  # exact | s-wave | semiclassical


def integrated_dos_exact(
    config: Configuration,
    ks,
    tol: float = 1e-8,
    nu_deg: int = 1,
    l_start: int | None = None,
    return_scan: bool = False,
):
    """n_c(k) = -(1/pi) Im ln det M(k) on a continuous branch anchored at k -> 0.

    ``ks`` must be increasing and positive; the scan is refined by midpoint
    insertion wherever the phase moves too fast to be tracked.
    """
    ks = np.asarray(ks, dtype=float)
    if np.any(ks <= 0) or np.any(np.diff(ks) <= 0):
        raise ValueError("ks must be positive and strictly increasing")

    def evaluate(k):
        return logdet_m_converged(config, k, tol, l_start=l_start)[0]

    # seed the branch near k = 0 from the analytic limit det M -> 1
    raw = [(0.0, LogDet(0.0, 0.0))] + [(float(k), evaluate(k)) for k in ks]
    scan = unwrap_scan(raw, refine=evaluate)
    picked = {k: ld for k, ld in scan.samples}
    out = [
        IntegratedDos(float(k), -nu_deg * picked[float(k)].imag_part / math.pi, "exact")
        for k in ks
    ]
    if return_scan:
        return out, scan
    return out


def single_sphere_phase_shift(a: float, k: float, l_max: int) -> float:
    """Total hard-sphere phase sum_l (2l+1) delta_l(ka), delta_l -> 0 as k -> 0.

    tan delta_l = j_l/y_l; delta_l = -arg h1_l(ka) - pi/2 continued from the
    threshold along a real-argument grid so each shift is on its physical
    branch (delta_0 = -ka exactly).
    """
    if not k > 0:
        raise ValueError("k must be positive")
    x_end = k * a
    n = max(8, int(math.ceil(x_end / 0.25)) + 1)
    xs = np.linspace(x_end / n, x_end, n)
    theta = None
    for x in xs:
        h = specfun.spherical_hankel1(l_max, x)
        cur = np.angle(h)
        if theta is None:
            # small-x limit: h1_l ~ -i (2l-1)!!/x^(l+1) -> arg = -pi/2
            theta = -math.pi / 2 + np.array([wrap_phase(c + math.pi / 2) for c in cur])
        else:
            theta = theta + np.array([wrap_phase(c - t) for c, t in zip(cur, theta)])
    ls = np.arange(l_max + 1)
    delta = -theta - math.pi / 2
    return float(np.sum((2 * ls + 1) * delta))


def nc_swave_two_spheres(a: float, r: float, k: float, nu_deg: int = 1) -> IntegratedDos:
    """Small-scatterer two-cavity count nu a^2/(pi r^2) sin[2(r-a)k]."""
    if not r > 2 * a:
        raise ValueError("need r > 2a")
    return IntegratedDos(k, nu_deg * a * a / (math.pi * r * r) * math.sin(2.0 * (r - a) * k), "s-wave")


def two_bounce_stability(a: float, gap: float, kind: str = "two-spheres") -> float:
    """Leading monodromy eigenvalue Lambda > 1 of the bouncing orbit, per period.

    One transverse plane of the period map is a product of free flights and
    curved-mirror reflections (focal power 2/a).  Two spheres:
    lambda + 1/lambda = 2 + 2L/a and Lambda = lambda^2; sphere-plate:
    Lambda + 1/Lambda = 2 + 4L/a.
    """
    if kind == "two-spheres":
        t = 1.0 + gap / a
        lam = t + math.sqrt(t * t - 1.0)
        return lam * lam
    if kind == "sphere-plate":
        t = 1.0 + 2.0 * gap / a
        return t + math.sqrt(t * t - 1.0)
    raise ValueError(f"unknown geometry kind {kind!r}")


def _repeat_weight(lam: float, w: int) -> float:
    # 1 / |det(M^w - 1)|^(1/2) for two identical transverse planes = 1/(Lambda^w + Lambda^-w - 2)
    lw = lam**w
    den = lw + 1.0 / lw - 2.0 if lw < 1e150 else lw
    return 1.0 / den


def _nc_semiclassical(a, gap, k, nu_deg, repeats, kind):
    lam = two_bounce_stability(a, gap, kind)
    total = 0.0
    for w in range(1, repeats + 1):
        total += _repeat_weight(lam, w) / w * math.sin(2.0 * w * gap * k)
    return nu_deg * total / math.pi


def nc_semiclassical_two_spheres(
    a: float, r: float, k: float, nu_deg: int = 1, repeats: int = 1
) -> IntegratedDos:
    """Gutzwiller two-bounce count with ``repeats`` repetitions of the orbit.

    N(k) = (nu/pi) sum_w sin(2 w (r-2a) k) / (w (Lambda^w + Lambda^-w - 2));
    w = 1 reduces exactly to nu a^2 / (4 pi r (r-2a)) sin[2(r-2a)k].
    Dirichlet reflections contribute a phase 2 pi per period, so no Maslov
    shift survives.
    """
    if not r > 2 * a:
        raise ValueError("need r > 2a")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    return IntegratedDos(k, _nc_semiclassical(a, r - 2 * a, k, nu_deg, repeats, "two-spheres"), "semiclassical")


def nc_semiclassical_sphere_plate(
    a: float, gap: float, k: float, nu_deg: int = 1, repeats: int = 1
) -> IntegratedDos:
    """Sphere-plate analogue; w = 1 gives nu a/(4 pi L) sin(2 L k)."""
    if not gap > 0:
        raise ValueError("need a positive gap")
    return IntegratedDos(k, _nc_semiclassical(a, gap, k, nu_deg, repeats, "sphere-plate"), "semiclassical")


def swave_amplitude(a: float, k: complex) -> complex:
    """Hard-sphere s-wave amplitude f = e^{i delta_0} sin(delta_0)/k = -sin(ka) e^{-ika}/k."""
    return -np.sin(k * a) * np.exp(-1j * k * a) / k


def nc_swave_n_spheres(config: Configuration, k: float, nu_deg: int = 1, return_logdet=False):
    """s-wave-only count from M^{jj'} = delta - (1-delta) f_j e^{ikr}/r."""
    n = config.n
    if n == 1:
        res = IntegratedDos(k, 0.0, "s-wave")
        return (res, LogDet(0.0, 0.0)) if return_logdet else res
    mat = np.eye(n, dtype=complex)
    for (j, jp), pair in config.pair_data.items():
        f = swave_amplitude(config.scatterers[j].radius, k)
        mat[j, jp] = -f * np.exp(1j * k * pair.separation) / pair.separation
    ld = logdet_complex(mat)
    res = IntegratedDos(float(np.real(k)), -nu_deg * ld.imag_part / math.pi, "s-wave")
    return (res, ld) if return_logdet else res
