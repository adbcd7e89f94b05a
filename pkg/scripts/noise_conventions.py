"""How the gyro noise convention and the step size change the error level.

With ``per-step`` noise every sample has STD 0.5 whatever dt is, so the
effective white-noise intensity grows as dt shrinks. With ``white`` noise
the integrated noise has variance q^2 dt per step and the results should
settle as dt is refined.

    python3 scripts/noise_conventions.py --seeds 5
"""

import argparse
from dataclasses import replace

import numpy as np

from stochso3.harness import run_monte_carlo
from stochso3.scenario import preset


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--dts", default="0.002,0.001,0.0005")
    args = p.parse_args()

    base = replace(preset("paper-sV"), seeds=tuple(range(args.seeds)))
    print(f"{'convention':>10} {'dt':>8} {'ito mean':>10} {'strat mean':>11}")
    for conv in ("per-step", "white"):
        for dt in (float(x) for x in args.dts.split(",")):
            sc = replace(base, noise_convention=conv, grid=replace(base.grid, dt=dt))
            rep = run_monte_carlo(sc)
            med = {f: np.median([m.mean_err_dist for m in ms]) for f, ms in rep["metrics"].items()}
            print(f"{conv:>10} {dt:8.4f} {med['ito']:10.3e} {med['strat']:11.3e}")


if __name__ == "__main__":
    main()
