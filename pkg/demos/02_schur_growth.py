"""Schur growth exponents for several phases, compared with the predicted ceilings."""

import argparse
from pathlib import Path

from hoelderfio import fio
from hoelderfio.growth import fit_growth_exponent
from hoelderfio.phases import PhaseSpec
from hoelderfio.symbols import SymbolSpec

YS = [4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="demo_out/schur")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    cases = [("constant", PhaseSpec.constant(1.0), SymbolSpec.gaussian(1.0), 0.0)]
    for g in (0.25, 0.5, 1.0):
        cases.append((f"hoelder_{g}", PhaseSpec.hoelder_power(1.0, 1.0, g), SymbolSpec.phiex(2.0), 1 / (1 + g)))
    cases.append(("smooth_diffeo", PhaseSpec.smooth_diffeo(), SymbolSpec.bump(1.0), 0.5))

    for name, phase, sym, ceiling in cases:
        pts = fio.schur_curve(phase, sym, YS, threads=args.threads)
        fio.write_schur_csv(pts, out / f"{name}.csv")
        fit = fit_growth_exponent(pts)
        print(f"{name:15s} slope {fit.slope:+.4f} +- {fit.stderr_slope:.4f}   ceiling {ceiling:.4f}")


if __name__ == "__main__":
    main()
