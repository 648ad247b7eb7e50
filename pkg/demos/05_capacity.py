"""Ergodic capacity: exact form and its high- and low-SNR approximations.

For IM/DD the closed form is a lower bound, not the capacity itself.
"""

from malagafso import PointingError, build_unified, ergodic_capacity, preset
from malagafso.metrics import capacity_is_lower_bound

methods = ("exact", "asym", "asym-dom", "asym-moments", "low-snr")
for r in (1, 2):
    ch = build_unified(preset("p3"), PointingError(6.7), r)
    label = "lower bound" if capacity_is_lower_bound(ch) else "exact"
    print(f"P3, xi=6.7, r={r} ({label}), bits per channel use")
    print("   dB " + "".join(f"{m:>14s}" for m in methods))
    for db in (-30, -20, -10, 0, 10, 20, 30, 40, 50):
        c = ch.with_snr_db(db)
        cells = []
        for m in methods:
            # the residue expansions are high-SNR forms; below 10 dB they diverge
            if m in ("asym", "asym-dom") and db < 10:
                cells.append(f"{'-':>14s}")
            else:
                cells.append(f"{ergodic_capacity(c, m):14.5f}")
        print(f"  {db:3d} " + "".join(cells))
    print()

# at low SNR a harsher pointing error gives the larger first-order capacity
for xi in (1.0, 6.7):
    c = build_unified(preset("p1"), PointingError(xi), 2).with_snr_db(-30)
    print(f"P1, r=2, -30 dB, xi={xi}: low-SNR capacity {ergodic_capacity(c, 'low-snr'):.4e}")
