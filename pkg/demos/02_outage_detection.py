"""Outage probability: heterodyne against IM/DD detection."""

import math

from scipy import optimize

from malagafso import PointingError, build_unified, gamma_gamma_limit, outage_probability, preset

# P1 with xi = 1 at 15 dB normalized electrical SNR, threshold 1
vals = {r: outage_probability(build_unified(preset("p1"), PointingError(1.0), r).with_snr_db(15), 1.0)
        for r in (1, 2)}
print(f"P1, xi=1, 15 dB: OP(het)={vals[1]:.5f}  OP(IM/DD)={vals[2]:.5f}  gap={vals[2] - vals[1]:.5f}")

print("\nOP curves for P1 (xi=1 and xi=6.7)")
print("  dB   het xi=1   imdd xi=1  het xi=6.7  imdd xi=6.7")
for db in range(0, 51, 10):
    row = [outage_probability(build_unified(preset("p1"), PointingError(xi), r).with_snr_db(db), 1.0)
           for xi in (1.0, 6.7) for r in (1, 2)]
    print(f"  {db:2d}  " + "  ".join(f"{v:.3e}" for v in (row[0], row[1], row[2], row[3])))

# Horizontal gap for the Gamma-Gamma (alpha=8, beta=4) case
target = 7.6e-3


def snr_for(r):
    ch = gamma_gamma_limit(8.0, 4, PointingError(1.0), r)
    f = lambda db: math.log(outage_probability(ch.with_snr_db(db), 1.0)) - math.log(target)
    return optimize.brentq(f, -20, 120)


print(f"\nGamma-Gamma (8, 4), xi=1: SNR needed for OP={target}:"
      f" het {snr_for(1):.2f} dB, IM/DD {snr_for(2):.2f} dB")
