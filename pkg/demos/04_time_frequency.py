"""Mixed time-frequency norms of a Gaussian and of chirps, plus the dilation behaviour of a chirp."""

import argparse
import math
from pathlib import Path

import numpy as np

from hoelderfio import tf
from hoelderfio.cutoffs import plateau
from hoelderfio.grid import SampledFunction, make_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="demo_out/tf")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    g = make_grid(1, 4096, 32.0)
    x = g.axis()
    signals = {
        "gaussian": 2**0.25 * np.exp(-math.pi * x * x),
        "chirp": np.exp(1j * math.pi * x * x) * plateau(x, 8.0),
        "fast_chirp": np.exp(4j * math.pi * x * x) * plateau(x, 8.0),
    }
    for name, v in signals.items():
        S = tf.stft(SampledFunction(g, v))
        tf.write_stft_csv(S, out / f"stft_{name}.csv")
        row = "  ".join(f"M{p}{q}={tf.modulation_norm(S, p, q):8.4f} W{p}{q}={tf.amalgam_norm(S, p, q):8.4f}"
                        for p, q in ((1, 1), (2, 2)))
        print(f"{name:11s} {row}")

    wide = make_grid(1, 2**17, 64.0)
    ratios = tf.check_dilation(lambda t: np.exp(1j * math.pi * t * t) * plateau(t, 16.0),
                               [2, 4, 8], 1, math.inf, grid=wide)
    for lam, r in ratios:
        print(f"dilation lambda={lam}: (1,inf) norm ratio / lambda = {r:.4f}")


if __name__ == "__main__":
    main()
