"""L^2 behaviour: a bounded case (power iteration) and a blow-up along concentrating data."""

import argparse
from pathlib import Path

from hoelderfio import fio
from hoelderfio.experiments import emit_report, run_experiment
from hoelderfio.grid import make_grid
from hoelderfio.phases import PhaseSpec
from hoelderfio.symbols import SymbolSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="demo_out/l2")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    bounded = PhaseSpec.hoelder_power(1.0, 1.0, 0.5)
    for n in (2**12, 2**13):
        plan = fio.ProbePlan(make_grid(1, n, 32.0), seed=args.seed)
        probe = fio.l2_probe(bounded, SymbolSpec.gaussian(1.0), plan)
        print(f"bounded case, N={n}: ||A|| ~ {probe.power_iteration_estimate:.4f} "
              f"after {len(probe.power_history)} iterations")

    # a = 0: pure power phase, unbounded on L^2; compare the operator with the Plancherel oracle
    res = run_experiment({}, "l2_unbounded")
    emit_report([res], out, "demo")
    for eps, ratio, oracle, _ in res.table_rows:
        print(f"  eps={eps:.5f}  ||A f|| / ||f|| = {ratio:.4f}   oracle {oracle:.4f}")
    print(f"concentration slope {res.measured['slope']:+.4f} (predicted {res.predicted['slope']:+.4f})")

if __name__ == "__main__":
    main()
