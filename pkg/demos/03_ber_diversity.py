"""Binary BER, its high-SNR asymptote, diversity order and coding gain."""

import math

from malagafso import (MalagaParams, PointingError, build_unified, gamma_gamma_limit, preset,
                       ber_binary, diversity_coding_gain)
from malagafso.metrics import MODULATIONS

ch = build_unified(preset("p2"), PointingError(6.7), 1)
print("P2, xi=6.7, heterodyne, 20 dB")
for name, mod in MODULATIONS.items():
    print(f"  {mod.name:6s} (p={mod.p}, q={mod.q}): {ber_binary(ch.with_snr_db(20), mod):.4e}")

dbpsk = MODULATIONS["dbpsk"]
gg = gamma_gamma_limit(8.0, 4, PointingError(6.7), 1)
d = diversity_coding_gain(gg, dbpsk)
print(f"\nGamma-Gamma (8, 4), xi=6.7: diversity order {d.order}, coding gain {d.coding_gain:.4f}"
      f" (set by {', '.join(d.terms)})")
for db in (20, 30, 40, 50):
    c = gg.with_snr_db(db)
    print(f"  {db} dB exact={ber_binary(c, dbpsk):.4e}  (Gc mu)^-Gd={(d.coding_gain * c.mu) ** -d.order:.4e}"
          f"  leading terms={ber_binary(c, dbpsk, 'asym'):.4e}")

# Malaga with rho < 1: the m = 1 summand has weight, so the order drops to 1/r
for rho in (0.596, 0.99, 1.0):
    c = build_unified(MalagaParams(8.0, 4, rho=rho, omega=1.0, b0=0.1079), PointingError(6.7), 1)
    d = diversity_coding_gain(c, dbpsk)
    lo, hi = (ber_binary(c.with_snr_db(db), dbpsk) for db in (80, 90))
    print(f"\nrho={rho}: order {d.order} ({', '.join(d.terms)}), slope 80-90 dB {math.log10(hi / lo):.3f}")

tie = diversity_coding_gain(build_unified(preset("p1"), PointingError(1.0), 2), dbpsk)
print(f"\nP1, xi=1, IM/DD: order {tie.order}, degenerate={tie.degenerate} (poles {', '.join(tie.terms)} coincide)")
