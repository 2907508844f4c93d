"""Regenerate every named figure and print its checks.

    python scripts/run_figures.py --out figures [--fast]
"""
import argparse
import time

from shires.cli import FIGURES, figure


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures")
    ap.add_argument("--fast", action="store_true", help="desk-scale iteration counts and a 128 grid")
    ap.add_argument("--only", nargs="*", choices=FIGURES, default=list(FIGURES))
    args = ap.parse_args()
    for name in args.only:
        t0 = time.time()
        m = figure(name, args.out, fast=args.fast, grid=128 if args.fast else 512)
        print(f"{name}: status={m['status']} ({time.time() - t0:.0f}s)")
        for check, ok in m.get("checks", {}).items():
            print(f"    {'ok  ' if ok else 'FAIL'} {check}")
        for key in ("within_eps", "faces", "A", "Z"):
            if key in m.get("summary", {}):
                print(f"    {key} = {m['summary'][key]}")


if __name__ == "__main__":
    main()
