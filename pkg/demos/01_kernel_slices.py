"""Kernel slices K(., y) for a Hoelder phase, written as CSV, with a direct-quadrature spot check."""

import argparse
from pathlib import Path

import numpy as np

from hoelderfio import fio
from hoelderfio.grid import save_csv
from hoelderfio.phases import PhaseSpec
from hoelderfio.symbols import SymbolSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", type=float, default=0.5)
    ap.add_argument("--out", default="demo_out/kernels")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    phase, sym = PhaseSpec.hoelder_power(1.0, 1.0, args.gamma), SymbolSpec.phiex(2.0)
    for y in (4.0, 16.0, 64.0):
        sl = fio.synthesize_kernel_slice(phase, sym, y)
        save_csv(sl.kernel, out / f"kernel_y{int(y)}.csv")
        x = sl.kernel.grid.axis()
        i = int(np.argmax(np.abs(sl.kernel.values)))
        direct = fio.direct_quadrature_kernel(phase, sym, x[i], y)
        print(f"y={y:5.0f}  N={sl.grid_policy_used.points_per_axis:6d}  Schur={sl.schur_value:8.4f}  "
              f"peak at x={x[i]:+.3f}  |fft - direct|={abs(direct - sl.kernel.values[i]):.1e}")


if __name__ == "__main__":
    main()
