"""Energy bookkeeping for the passive (deterministic) filter.

Runs the bias-only scenario with exact attitude measurements and reports,
for several initial errors, the largest per-step increase of

* ``V1 = ||R~||_I + |b~|^2 / (2 gamma1)``
* ``V2 = 2 ||R~||_I + |b~|^2 / (2 gamma1)``

Along the continuous flow d||R~||_I/dt = Upsilon^T (b~ - W) / 2, so V2 has
derivative -k1 |Upsilon|^2 while V1 does not have a sign.

    python3 scripts/passive_potential.py
"""

from dataclasses import replace

import numpy as np

from stochso3.harness import generate_measurements, run_filter
from stochso3.scenario import preset


def main():
    print(f"{'initial deg':>11} {'max dV1':>10} {'max dV2':>10} {'final ||R~||_I':>15}")
    for angle in (1.0, 30.0, 90.0, 150.0, 179.9):
        sc = replace(preset("bias-only"), initial_angle_deg=angle)
        s = run_filter(sc, "det", generate_measurements(sc, 0))
        b_err = sc.noise.gyro_bias - s.b_hat
        bias_term = np.einsum("ij,ij->i", b_err, b_err) / (2 * sc.gains.gamma1)
        v1 = s.err_dist + bias_term
        v2 = 2 * s.err_dist + bias_term
        print(f"{angle:11.1f} {np.diff(v1).max():10.2e} {np.diff(v2).max():10.2e} {s.err_dist[-1]:15.3e}")


if __name__ == "__main__":
    main()
