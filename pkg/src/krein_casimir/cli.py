"""Command-line front end.

Every subcommand evaluates one quantity over a one-dimensional scan and
writes a CSV (``#`` comment header with the resolved run spec and units,
then a column row) plus a JSON sidecar with per-point convergence data.
Exit codes: 0 success, 2 validation error (nothing written), 3 numerical
non-convergence (partial output written with a ``converged`` column).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
import numpy as np

from . import casimir
from .geometry import Configuration, DuplicateCenterError, FermiGas, OverlapError
from .numerics import RefinementBudgetExceeded, ToleranceNotMet
from .scattering import (
    NoConvergence,
    integrated_dos_exact,
    nc_semiclassical_two_spheres,
    nc_swave_two_spheres,
)

WORKERS_ENV = "KREIN_CASIMIR_WORKERS"

SUBCOMMANDS = {
    "fermi-two-spheres": ("r", "kf"),
    "fermi-sphere-plate": ("r", "kf"),
    "fermi-n-spheres": ("kf",),
    "scalar-two-spheres": ("r", "L"),
    "scalar-sphere-plate": ("L",),
    "dos-scan": ("k",),
    "fig2": ("L",),
}

DEFAULT_SCANS = {
    "fermi-two-spheres": {"variable": "r", "min": 2.75, "max": 3.5, "points": 16, "spacing": "linear"},
    "fermi-sphere-plate": {"variable": "r", "min": 1.5, "max": 3.0, "points": 16, "spacing": "linear"},
    "fermi-n-spheres": {"variable": "kf", "min": 0.5, "max": 3.0, "points": 6, "spacing": "linear"},
    "scalar-two-spheres": {"variable": "L", "min": 1.0, "max": 32.0, "points": 6, "spacing": "log"},
    "scalar-sphere-plate": {"variable": "L", "min": 0.25, "max": 32.0, "points": 8, "spacing": "log"},
    "dos-scan": {"variable": "k", "min": 0.1, "max": 5.0, "points": 50, "spacing": "linear"},
    "fig2": {"variable": "L", "min": 0.25, "max": 32.0, "points": 29, "spacing": "log"},
}

NON_CONVERGENCE = (NoConvergence, ToleranceNotMet, RefinementBudgetExceeded)


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    code: str
    parameter: str
    message: str


@dataclass
class ScanSpec:
    variable: str
    min: float
    max: float
    points: int
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.points)
        return np.linspace(self.min, self.max, self.points)

    @classmethod
    def parse(cls, text: str) -> "ScanSpec":
        """``var:min:max:points[:linear|log]``"""
        parts = text.split(":")
        if len(parts) not in (4, 5):
            raise ValidationError(f"--scan expects var:min:max:points[:spacing], got {text!r}")
        spacing = parts[4] if len(parts) == 5 else "linear"
        try:
            return cls(parts[0], float(parts[1]), float(parts[2]), int(parts[3]), spacing)
        except ValueError as exc:
            raise ValidationError(f"--scan: {exc}") from None


@dataclass
class RunSpec:
    subcommand: str
    geometry: dict = field(default_factory=dict)
    kf: float = 2.0
    nu_deg: int = 1
    scan: ScanSpec | None = None
    tol: float = 1e-6
    lmax_override: int | None = None
    out: str = "out.csv"
    format: str = "csv"

    def __post_init__(self):
        if self.scan is None and self.subcommand in DEFAULT_SCANS:
            self.scan = ScanSpec(**DEFAULT_SCANS[self.subcommand])
        elif isinstance(self.scan, dict):
            self.scan = ScanSpec(**self.scan)
        self.geometry = {"a": 1.0, **self.geometry}

    def to_dict(self) -> dict:
        return asdict(self)


def _parse_geometry(text: str) -> dict:
    """``a=1,r=10`` or a path to a JSON configuration (``config=path`` also works)."""
    if not text:
        return {}
    if "=" not in text:
        return {"config": text}
    out = {}
    for item in text.split(","):
        key, _, val = item.partition("=")
        key = key.strip()
        if key == "config":
            out[key] = val.strip()
        else:
            try:
                out[key] = float(val)
            except ValueError:
                raise ValidationError(f"--geometry: {key} must be a number, got {val!r}") from None
    return out


def _load_configuration(geometry: dict) -> Configuration:
    src = geometry["config"]
    doc = src if isinstance(src, dict) else json.loads(open(src).read())
    return Configuration.from_dict(doc)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def _geometry_bounds(spec: RunSpec) -> tuple[float, float]:
    """Smallest and largest r (or L) the run touches.

    A value fixed in the geometry is checked even when a scan over the same
    variable overrides it, so an invalid geometry never passes silently.
    """
    g = spec.geometry
    key = "L" if spec.subcommand in ("scalar-sphere-plate", "fig2") else "r"
    vals = [g[key]] if key in g else []
    if spec.scan is not None and spec.scan.variable == key:
        vals += [spec.scan.min, spec.scan.max]
    elif spec.scan is not None and spec.subcommand == "scalar-two-spheres" and spec.scan.variable == "L":
        a = g.get("a", 1.0)
        vals += [2 * a + spec.scan.min * a, 2 * a + spec.scan.max * a]
    if not vals:
        return math.nan, math.nan
    return min(vals), max(vals)


def validate(spec: RunSpec) -> list[Diagnostic]:
    """All precondition failures of ``spec``; empty iff :func:`run` may proceed."""
    diags = []
    add = lambda code, param, msg: diags.append(Diagnostic(code, param, msg))
    if spec.subcommand not in SUBCOMMANDS:
        add("CMD_UNKNOWN", "subcommand", f"unknown subcommand {spec.subcommand!r}")
        return diags
    if not spec.kf > 0:
        add("PHYS_KF_NONPOSITIVE", "kf", f"k_F must be positive, got {spec.kf}")
    if int(spec.nu_deg) != spec.nu_deg or spec.nu_deg < 1:
        add("PHYS_NU_INVALID", "nu_deg", f"nu_deg must be a positive integer, got {spec.nu_deg}")
    if not spec.tol > 0:
        add("TOL_NONPOSITIVE", "tol", f"tolerance must be positive, got {spec.tol}")
    if spec.lmax_override is not None and spec.lmax_override < 0:
        add("LMAX_NEGATIVE", "lmax_override", f"l_max must be >= 0, got {spec.lmax_override}")
    if spec.format not in ("csv", "json"):
        add("FORMAT_UNKNOWN", "format", f"format must be csv or json, got {spec.format!r}")
    a = spec.geometry.get("a", 1.0)
    if not a > 0:
        add("GEOM_RADIUS_NONPOSITIVE", "geometry.a", f"radius must be positive, got {a}")

    scan = spec.scan
    if scan is not None:
        if scan.variable not in SUBCOMMANDS[spec.subcommand]:
            add(
                "SCAN_VARIABLE_UNKNOWN",
                "scan.variable",
                f"{spec.subcommand} scans {'/'.join(SUBCOMMANDS[spec.subcommand])}, got {scan.variable!r}",
            )
        if scan.points < 2:
            add("SCAN_TOO_FEW_POINTS", "scan.points", f"need at least 2 points, got {scan.points}")
        if not scan.min < scan.max:
            add("SCAN_BOUNDS_UNORDERED", "scan", f"need min < max, got {scan.min} >= {scan.max}")
        if scan.spacing not in ("linear", "log"):
            add("SCAN_SPACING_UNKNOWN", "scan.spacing", f"spacing must be linear or log, got {scan.spacing!r}")
        elif scan.spacing == "log" and not scan.min > 0:
            add("SCAN_LOG_NONPOSITIVE", "scan.min", "log spacing needs a positive lower bound")
        if scan.variable in ("kf", "k") and not scan.min > 0:
            add("PHYS_KF_NONPOSITIVE", "scan.min", f"wavenumbers must be positive, got {scan.min}")

    sub = spec.subcommand
    if sub in ("fermi-n-spheres",) or (sub == "dos-scan" and "config" in spec.geometry):
        if "config" not in spec.geometry:
            add("GEOM_MISSING", "geometry.config", "n-sphere runs need a configuration file")
        else:
            try:
                cfg = _load_configuration(spec.geometry)
                if cfg.n < 2:
                    add("GEOM_TOO_FEW_SPHERES", "geometry.config", "need at least two spheres")
            except (OverlapError, DuplicateCenterError) as exc:
                add("GEOM_OVERLAP", "geometry.config", str(exc))
            except (OSError, ValueError, KeyError) as exc:
                add("GEOM_CONFIG_INVALID", "geometry.config", f"cannot read configuration: {exc}")
        return diags

    lo, _ = _geometry_bounds(spec)
    if math.isnan(lo):
        add("GEOM_MISSING", "geometry", f"{sub} needs r (or a scan over it)")
    elif sub in ("fermi-two-spheres", "dos-scan", "scalar-two-spheres"):
        if not lo > 2 * a:
            add("GEOM_OVERLAP", "geometry.r", f"two spheres need r > 2a = {2 * a}, got {lo}")
    elif sub == "fermi-sphere-plate":
        if not lo > a:
            add("GEOM_OVERLAP", "geometry.r", f"sphere-plate needs r > a = {a}, got {lo}")
    elif not lo > 0:
        add("GEOM_OVERLAP", "geometry.L", f"gap must be positive, got {lo}")
    return diags


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


@dataclass
class Row:
    values: dict
    meta: dict
    converged: bool = True


def _energy_meta(res: casimir.EnergyResult) -> dict:
    return {"method": res.method, "l_max": res.l_max, "quad_error": res.error}


def _point(spec: RunSpec, x: float) -> Row:
    """Evaluate one scan point; non-convergence is recorded, not raised."""
    g = dict(spec.geometry)
    a = g["a"]
    var = spec.scan.variable
    kf = spec.kf
    if var == "kf":
        kf = x
    elif var == "L" and spec.subcommand == "scalar-two-spheres":
        g["r"] = 2 * a + x * a
    elif var in ("r", "L"):
        g[var] = x
    sub = spec.subcommand
    lmax = spec.lmax_override
    try:
        if sub in ("fermi-two-spheres", "fermi-sphere-plate"):
            kind = "two-spheres" if sub == "fermi-two-spheres" else "sphere-plate"
            q = casimir.GeometryQuery(kind, a, g["r"], l_max=lmax)
            ex = casimir.fermionic_energy_exact(q, FermiGas(kf, spec.nu_deg), tol=spec.tol)
            approx_fn = (
                casimir.fermionic_energy_two_sphere_approx
                if kind == "two-spheres"
                else casimir.fermionic_energy_sphere_plate_approx
            )
            ap = approx_fn(a, g["r"], kf, spec.nu_deg)
            return Row({"r": g["r"], "kf": kf, "exact": ex.value, "semiclassical": ap.value}, _energy_meta(ex))
        if sub == "fermi-n-spheres":
            q = casimir.GeometryQuery("n-spheres", config=_load_configuration(g), l_max=lmax)
            ex = casimir.fermionic_energy_exact(q, FermiGas(kf, spec.nu_deg), tol=spec.tol)
            return Row({"kf": kf, "exact": ex.value}, _energy_meta(ex))
        if sub == "scalar-two-spheres":
            r = g["r"]
            ex = casimir.scalar_energy_two_spheres(a, r, tol=spec.tol, l_max=lmax)
            pfa = casimir.pfa_two_spheres_leading(a, r)
            return Row(
                {
                    "r": r,
                    "L_over_a": (r - 2 * a) / a,
                    "exact": ex.value,
                    "ratio_to_leading_pfa": ex.value / pfa.value,
                },
                _energy_meta(ex),
            )
        if sub in ("scalar-sphere-plate", "fig2"):
            gap = g["L"] * a
            ex = casimir.scalar_energy_sphere_plate(a, gap, tol=spec.tol, l_max=lmax)
            norm = lambda res: res.to_units("fig2").value
            if sub == "scalar-sphere-plate":
                return Row(
                    {"L_over_a": gap / a, "exact": ex.value, "exact_fig2": norm(ex)}, _energy_meta(ex)
                )
            sw = casimir.scalar_energy_sphere_plate(a, gap, tol=spec.tol, l_max=0)
            row = {
                "log2_L_over_a": math.log2(gap / a),
                "exact": norm(ex),
                "swave": norm(sw),
                "asymptote_2x90_pi4": casimir.ASYMPTOTE_SPHERE_PLATE,
                "gutzwiller_all_repeats": norm(casimir.scalar_semiclassical_two_bounce(a, gap, "sphere-plate")),
                "pfa_plate": norm(casimir.pfa_sphere_plate(a, gap, "plate-based")),
                "pfa_sphere": norm(casimir.pfa_sphere_plate(a, gap, "sphere-based")),
            }
            return Row(row, _energy_meta(ex))
        if sub == "dos-scan":
            raise AssertionError("dos-scan is evaluated as a whole scan")
    except NON_CONVERGENCE as exc:
        return Row({var: x}, {"error": str(exc)}, converged=False)
    raise AssertionError(sub)


def _dos_rows(spec: RunSpec) -> list[Row]:
    from .geometry import two_spheres

    g = spec.geometry
    ks = spec.scan.values()
    if "config" in g:
        cfg = _load_configuration(g)
        a = r = None
    else:
        a, r = g["a"], g["r"]
        cfg = two_spheres(a, r)
    try:
        dos = integrated_dos_exact(cfg, ks, tol=min(spec.tol, 1e-8), nu_deg=spec.nu_deg, l_start=spec.lmax_override)
    except NON_CONVERGENCE as exc:
        return [Row({"k": float(k)}, {"error": str(exc)}, converged=False) for k in ks]
    rows = []
    for d in dos:
        vals = {"k": d.k, "nc_exact": d.n_c}
        if a is not None:
            vals["nc_swave"] = nc_swave_two_spheres(a, r, d.k, spec.nu_deg).n_c
            vals["nc_semiclassical"] = nc_semiclassical_two_spheres(a, r, d.k, spec.nu_deg).n_c
        rows.append(Row(vals, {}))
    return rows


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def evaluate(spec: RunSpec) -> list[Row]:
    if spec.subcommand == "dos-scan":
        return _dos_rows(spec)
    xs = [float(x) for x in spec.scan.values()]
    n = _workers()
    if n == 1:
        return [_point(spec, x) for x in xs]
    with ProcessPoolExecutor(max_workers=n) as pool:
        # map keeps input order, so output is independent of scheduling
        return list(pool.map(_point, [spec] * len(xs), xs))


UNITS = {
    "fermi-two-spheres": "lengths in a; energies in mu*nu_deg",
    "fermi-sphere-plate": "lengths in a; energies in mu*nu_deg",
    "fermi-n-spheres": "lengths in config units; energies in mu*nu_deg",
    "scalar-two-spheres": "lengths in a; exact in hbar*c/a",
    "scalar-sphere-plate": "lengths in a; exact in hbar*c/a; exact_fig2 in -hbar*c*pi^3*a/(1440*L^2)",
    "dos-scan": "k in 1/a; n_c per nu_deg channel times nu_deg",
    "fig2": "all energies in -hbar*c*pi^3*a/(1440*L^2)",
}


def _render_csv(spec: RunSpec, columns: list, rows: list[Row], flag: bool) -> str:
    buf = io.StringIO()
    buf.write(f"# runspec: {json.dumps(spec.to_dict(), sort_keys=True)}\n")
    buf.write(f"# units: {UNITS[spec.subcommand]}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns + (["converged"] if flag else []))
    for row in rows:
        cells = [_fmt(row.values.get(c, math.nan)) for c in columns]
        if flag:
            cells.append(int(row.converged))
        w.writerow(cells)
    return buf.getvalue()


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def run(spec: RunSpec) -> int:
    diags = validate(spec)
    if diags:
        for d in diags:
            print(f"error [{d.code}] {d.parameter}: {d.message}", file=sys.stderr)
        return 2
    rows = evaluate(spec)
    columns = []
    for row in rows:
        if row.converged:
            columns = list(row.values)
            break
    if not columns:
        columns = [spec.scan.variable]
    flag = not all(r.converged for r in rows)
    sidecar = {
        "runspec": spec.to_dict(),
        "columns": columns,
        "units": UNITS[spec.subcommand],
        "rows": len(rows),
        "points": [{**row.meta, "converged": row.converged} for row in rows],
    }
    if spec.format == "csv":
        with open(spec.out, "w") as fh:
            fh.write(_render_csv(spec, columns, rows, flag))
        with open(spec.out + ".json", "w") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
    else:
        sidecar["data"] = [{c: row.values.get(c, math.nan) for c in columns} for row in rows]
        with open(spec.out, "w") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
    return 3 if flag else 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="krein-casimir", description=__doc__.splitlines()[0])
    p.add_argument("subcommand", choices=sorted(SUBCOMMANDS))
    p.add_argument("--config", help="JSON file mirroring the flags (flags take precedence)")
    p.add_argument("--geometry", help="a=1,r=10 | a=1,L=0.5 | path to a JSON sphere configuration")
    p.add_argument("--scan", help="var:min:max:points[:linear|log]")
    p.add_argument("--kf", type=float)
    p.add_argument("--nu-deg", type=int, dest="nu_deg")
    p.add_argument("--tol", type=float)
    p.add_argument("--lmax-override", type=int, dest="lmax_override")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))
    return p


def spec_from_args(argv: list[str] | None = None) -> RunSpec:
    args = build_parser().parse_args(argv)
    doc = {}
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
    if isinstance(doc.get("scan"), str):
        doc["scan"] = ScanSpec.parse(doc["scan"])
    if isinstance(doc.get("geometry"), str):
        doc["geometry"] = _parse_geometry(doc["geometry"])
    for key in ("kf", "nu_deg", "tol", "lmax_override", "out", "format"):
        val = getattr(args, key)
        if val is not None:
            doc[key] = val
    if args.geometry is not None:
        doc["geometry"] = {**doc.get("geometry", {}), **_parse_geometry(args.geometry)}
    if args.scan is not None:
        doc["scan"] = ScanSpec.parse(args.scan)
    doc.pop("subcommand", None)
    return RunSpec(subcommand=args.subcommand, **doc)


def main(argv: list[str] | None = None) -> int:
    try:
        spec = spec_from_args(argv)
    except (ValidationError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
