"""Independent check of the zero distribution for T f = z^4 f' with f = -1/(z+1).

The iterates are P_n / (z+1)^(n+1) with P_0 = -1 and
P_{n+1} = z^4 (P_n' (z+1) - (n+1) P_n). The recurrence is run in exact integers, the
factor z^(3n+1) is divided out, and the remaining roots are found with mpmath.polyroots.
Distances are measured to the branch of Re(z^-3) = -1/2 through -1.

    python scripts/monomial_oracle.py --n 90 --eps 0.05
"""
import argparse
import time

import mpmath
import numpy as np
from scipy.spatial import cKDTree


def numerator(n):
    p = [-1]  # ascending coefficients
    for k in range(n):
        dp = [i * c for i, c in enumerate(p)][1:] or [0]
        a = [0] * (len(dp) + 1)
        for i, c in enumerate(dp):
            a[i] += c
            a[i + 1] += c
        for i, c in enumerate(p):
            a[i] -= (k + 1) * c
        p = [0, 0, 0, 0] + a
        while p and p[-1] == 0:
            p.pop()
    return p


def branch_curve(samples=400001):
    th = np.pi + np.linspace(-np.pi / 6, np.pi / 6, samples)[1:-1]
    r = (-2 * np.cos(3 * th)) ** (1 / 3)
    keep = r < 50
    return r[keep] * np.exp(1j * th[keep])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=90)
    ap.add_argument("--eps", type=float, default=0.05)
    ap.add_argument("--dps", type=int, default=120)
    args = ap.parse_args()
    t0 = time.time()
    p = numerator(args.n)
    low = next(i for i, c in enumerate(p) if c)
    core = p[low:]
    with mpmath.workdps(args.dps):
        roots = mpmath.polyroots(core[::-1], maxsteps=400, extraprec=4 * args.dps * 3)
    z = np.array([complex(r) for r in roots])
    curve = branch_curve()
    d, _ = cKDTree(np.column_stack([curve.real, curve.imag])).query(np.column_stack([z.real, z.imag]))
    print(f"n={args.n}: zero of order {low} at 0, {len(z)} finite nonzero roots ({time.time() - t0:.0f}s)")
    print(f"within {args.eps}: {np.mean(d <= args.eps):.2%}")
    for lo, hi in ((0, 0.3), (0.3, 0.6), (0.6, 1.0), (1.0, np.inf)):
        sel = (np.abs(z) >= lo) & (np.abs(z) < hi)
        if sel.any():
            print(f"  {lo:.1f} <= |z| < {hi:.1f}: {sel.sum():4d} roots, max distance {d[sel].max():.3f}, "
                  f"within eps {np.mean(d[sel] <= args.eps):.2%}")


if __name__ == "__main__":
    main()
