"""Compare the spectral edge cloud with the geometric Voronoi pullback.

For each scenario and grid size, prints the Hausdorff distance in grid cells, and for the
cone scenario the one-sided distance restricted to |z| > r, which isolates the bias near
the cone apex where the competing singularities are nearly equidistant.

    python scripts/edge_detection_comparison.py --grids 128 256 512 --N 256
"""
import argparse
import time

import numpy as np
from scipy.spatial import cKDTree

from shires.flatgeo import chart_for, developed_voronoi
from shires.ppl import principal_polar_locus
from shires.scenarios import preset
from shires.spectral import detect_edges, hausdorff


def one_sided(a, b):
    if len(a) == 0 or len(b) == 0:
        return float("inf")
    d, _ = cKDTree(np.column_stack([b.real, b.imag])).query(np.column_stack([a.real, a.imag]))
    return float(d.max())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenarios", nargs="*", default=["first-example", "torus-dz", "monomial"])
    ap.add_argument("--grids", nargs="*", type=int, default=[128, 256, 512])
    ap.add_argument("--N", type=int, default=256, help="Taylor coefficients per basepoint")
    ap.add_argument("--radii", nargs="*", type=float, default=[0.2, 0.3, 0.4])
    args = ap.parse_args()
    print("scenario        grid    N   points  hausdorff_cells  seconds")
    for name in args.scenarios:
        s = preset(name)
        for g in args.grids:
            D = developed_voronoi(chart_for(s), principal_polar_locus(s), s, grid=g)
            region = D.chart.default_region(list(D.sites))
            t0 = time.time()
            ec = detect_edges(s, region, N=args.N, grid=g, coarse=min(64, g // 2))
            curve = D.curve_points()
            H = hausdorff(ec.points, curve) / ec.cell
            print(f"{name:14s} {g:5d} {args.N:4d} {len(ec.points):7d} {H:16.2f} {time.time() - t0:8.0f}")
            if D.chart.family == "MonomialCone":
                for r in args.radii:
                    a = ec.points[np.abs(ec.points) > r]
                    b = curve[np.abs(curve) > r]
                    h = max(one_sided(a, curve), one_sided(b, ec.points)) / ec.cell
                    print(f"{'':14s}   restricted to |z| > {r:.1f}: {h:.2f} cells")


if __name__ == "__main__":
    main()
