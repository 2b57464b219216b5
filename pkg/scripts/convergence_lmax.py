"""Truncation convergence of ln det M(i kappa) for the sphere-plate image system.

Prints |ln det(l) - ln det(l_ref)| against l_max for a few gaps at kappa = 0
and kappa = 1/L; the reference uses l_ref = l_max + 20.

    python3 scripts/convergence_lmax.py [--gaps 0.25 1 4]
"""
import argparse

from krein_casimir.scattering import logdet_sphere_plate


def parse_args():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--gaps", type=float, nargs="+", default=[0.25, 1.0, 4.0])
    p.add_argument("--l-max", type=int, default=40, dest="l_max")
    return p.parse_args()


if __name__ == "__main__":
    args = parse_args()
    a = 1.0
    for gap in args.gaps:
        for kappa in (1e-12, 1.0 / gap):
            ref = logdet_sphere_plate(a, a + gap, 1j * kappa, args.l_max + 20).real_part
            print(f"L/a = {gap:g}, kappa L = {kappa * gap:.3g}, ln det = {ref:.12e}")
            for l in range(0, args.l_max + 1, 4):
                cur = logdet_sphere_plate(a, a + gap, 1j * kappa, l).real_part
                print(f"  l_max {l:3d}  error {abs(cur - ref):.3e}")
