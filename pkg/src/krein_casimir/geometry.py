"""Sphere configurations, pair frames and truncation choice.

Lengths are dimensionless throughout (in units of a reference length chosen
at the CLI boundary, normally the common sphere radius).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .specfun import rotation_matrix_zyz

__all__ = [
    "OverlapError",
    "DuplicateCenterError",
    "Scatterer",
    "PairData",
    "Configuration",
    "Truncation",
    "FermiGas",
    "build_configuration",
    "two_spheres",
    "suggest_l_max",
    "euler_from_matrix",
    "L_MARGIN",
]

L_MARGIN = 8


class OverlapError(ValueError):
    def __init__(self, pair, separation, contact):
        self.pair = pair
        super().__init__(
            f"spheres {pair[0]} and {pair[1]} overlap or touch: "
            f"separation {separation:.17g} <= sum of radii {contact:.17g}"
        )


class DuplicateCenterError(ValueError):
    pass


@dataclass(frozen=True)
class Scatterer:
    """Dirichlet sphere.  ``orientation`` holds the z-y-z Euler angles of its
    local frame relative to the global one (identity by default)."""

    id: int
    radius: float
    center: tuple[float, float, float]
    orientation: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"sphere {self.id}: radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "orientation", tuple(float(t) for t in self.orientation))

    @property
    def frame(self) -> np.ndarray:
        return rotation_matrix_zyz(*self.orientation)


@dataclass(frozen=True)
class PairData:
    """Geometry of the ordered pair (j, j').

    ``direction`` is the unit vector from center j to center j' expressed in
    the local frame of j; ``rotation`` maps frame j' to frame j
    (Q = R_j^T R_j'), ``euler`` its z-y-z angles.
    """

    separation: float
    direction: tuple[float, float, float]
    rotation: np.ndarray = field(repr=False, compare=False)
    euler: tuple[float, float, float] = (0.0, 0.0, 0.0)


def euler_from_matrix(q: np.ndarray) -> tuple[float, float, float]:
    """z-y-z Euler angles (alpha, beta, gamma) with Rz(a) Ry(b) Rz(g) = q."""
    q = np.asarray(q, dtype=float)
    cb = max(-1.0, min(1.0, q[2, 2]))
    # atan2 keeps full precision near beta = 0 and pi, unlike acos
    beta = math.atan2(math.hypot(q[0, 2], q[1, 2]), q[2, 2])
    sb = math.sin(beta)
    if sb > 1e-12:
        alpha = math.atan2(q[1, 2], q[0, 2])
        gamma = math.atan2(q[2, 1], -q[2, 0])
    else:
        # gimbal lock: only alpha +/- gamma is defined
        gamma = 0.0
        if cb > 0:
            alpha = math.atan2(q[1, 0], q[0, 0])
        else:
            alpha = math.atan2(-q[1, 0], -q[0, 0])
    return alpha, beta, gamma


@dataclass(frozen=True)
class Configuration:
    scatterers: tuple[Scatterer, ...]
    pair_data: dict = field(repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.scatterers)

    @property
    def radii(self) -> np.ndarray:
        return np.array([s.radius for s in self.scatterers])

    @property
    def a_max(self) -> float:
        return float(self.radii.max())

    def pair(self, j: int, jp: int) -> PairData:
        return self.pair_data[(j, jp)]

    def min_gap(self) -> float:
        """Smallest surface-to-surface distance (inf for one sphere)."""
        gaps = [
            self.pair_data[(j, jp)].separation
            - self.scatterers[j].radius
            - self.scatterers[jp].radius
            for j in range(self.n)
            for jp in range(j + 1, self.n)
        ]
        return min(gaps) if gaps else math.inf

    def min_separation(self) -> float:
        seps = [p.separation for p in self.pair_data.values()]
        return min(seps) if seps else math.inf

    @property
    def is_axial(self) -> bool:
        """Centers on one line parallel to z and all frames identical to the global frame."""
        if any(s.orientation != (0.0, 0.0, 0.0) for s in self.scatterers):
            return False
        c0 = self.scatterers[0].center
        return all(
            abs(s.center[0] - c0[0]) < 1e-14 and abs(s.center[1] - c0[1]) < 1e-14
            for s in self.scatterers
        )

    def to_dict(self) -> dict:
        return {
            "scatterers": [
                {
                    "id": s.id,
                    "radius": s.radius,
                    "center": list(s.center),
                    "orientation": list(s.orientation),
                }
                for s in self.scatterers
            ]
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Configuration":
        return build_configuration(
            [
                Scatterer(
                    id=int(s.get("id", i)),
                    radius=float(s["radius"]),
                    center=tuple(s["center"]),
                    orientation=tuple(s.get("orientation", (0.0, 0.0, 0.0))),
                )
                for i, s in enumerate(doc["scatterers"])
            ]
        )


def build_configuration(scatterers: Sequence[Scatterer]) -> Configuration:
    """Validate the spheres and precompute all ordered-pair data.

    Raises :class:`OverlapError` for touching or overlapping spheres and
    :class:`DuplicateCenterError` for coincident centers.
    """
    scatterers = tuple(scatterers)
    if not scatterers:
        raise ValueError("a configuration needs at least one scatterer")
    frames = [s.frame for s in scatterers]
    centers = [np.array(s.center) for s in scatterers]
    pairs = {}
    for j, sj in enumerate(scatterers):
        for jp, sjp in enumerate(scatterers):
            if j == jp:
                continue
            d = centers[jp] - centers[j]
            r = float(np.linalg.norm(d))
            if r == 0.0:
                raise DuplicateCenterError(f"spheres {sj.id} and {sjp.id} share a center")
            contact = sj.radius + sjp.radius
            if r <= contact:
                raise OverlapError((sj.id, sjp.id), r, contact)
            local = frames[j].T @ (d / r)
            local /= np.linalg.norm(local)
            q = frames[j].T @ frames[jp]
            pairs[(j, jp)] = PairData(
                separation=r,
                direction=tuple(float(v) for v in local),
                rotation=q,
                euler=euler_from_matrix(q),
            )
    return Configuration(scatterers=scatterers, pair_data=pairs)


def two_spheres(a: float, r: float, a2: float | None = None) -> Configuration:
    """Two spheres on the z axis, centers at 0 and r."""
    a2 = a if a2 is None else a2
    return build_configuration(
        [Scatterer(0, a, (0.0, 0.0, 0.0)), Scatterer(1, a2, (0.0, 0.0, r))]
    )


@dataclass(frozen=True)
class Truncation:
    l_max: int
    tolerance: float = 1e-8

    def __post_init__(self):
        if self.l_max < 0:
            raise ValueError("l_max must be >= 0")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    def dimension(self, n_scatterers: int) -> int:
        return n_scatterers * (self.l_max + 1) ** 2


def suggest_l_max(config: Configuration, k, tolerance: float = 1e-8) -> Truncation:
    """Heuristic start value l_max = ceil(|k| a_max) + 8.

    Partial waves beyond l ~ k a are evanescent at the sphere surface; the
    convergence loop in :mod:`scattering` refines upward from here.
    """
    return Truncation(int(math.ceil(abs(complex(k)) * config.a_max)) + L_MARGIN, tolerance)


@dataclass(frozen=True)
class FermiGas:
    """Fermi sea; energies are reported in units of mu = hbar^2 k_F^2 / 2m."""

    k_f: float
    nu_deg: int = 1
    units: str = "mu"

    def __post_init__(self):
        if not self.k_f > 0:
            raise ValueError(f"k_F must be positive, got {self.k_f}")
        if int(self.nu_deg) != self.nu_deg or self.nu_deg < 1:
            raise ValueError(f"nu_deg must be a positive integer, got {self.nu_deg}")
