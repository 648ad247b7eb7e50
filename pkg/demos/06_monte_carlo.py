"""Monte-Carlo check of the closed forms, and sample export."""

import os
import tempfile

from malagafso import PointingError, build_unified, preset
from malagafso import metrics, montecarlo
from malagafso.montecarlo import RngStream

n = 1_000_000
dbpsk = metrics.BinaryModulation.get("dbpsk")
for r in (1, 2):
    ch = build_unified(preset("p2"), PointingError(1.0), r).with_snr_db(10)
    exact = {
        "op": metrics.outage_probability(ch, 1.0),
        "ber": metrics.ber_binary(ch, dbpsk),
        "capacity": metrics.ergodic_capacity(ch),
        "si": metrics.scintillation_index(ch),
    }
    print(f"P2, xi=1, r={r}, 10 dB, n={n}")
    for i, (kind, ref) in enumerate(exact.items()):
        est, se = montecarlo.empirical_metric(kind, ch, RngStream(2024, (r, i)), n, gamma_th=1.0, mod=dbpsk)
        print(f"  {kind:8s} exact={ref:.6f}  mc={est:.6f} +- {se:.1e}  z={(est - ref) / se:+.2f}")

rng = RngStream(7)
p = preset("p1")
batches = {
    "I_a": montecarlo.sample_malaga(p, rng.child(0), 1000),
    "I_p": montecarlo.sample_pointing(PointingError(1.0), rng.child(1), 1000),
}
path = os.path.join(tempfile.gettempdir(), "malaga_samples.csv")
montecarlo.export_csv(path, batches)
with open(path) as fh:
    head = [next(fh).rstrip() for _ in range(4)]
print(f"\nwrote {path}:")
print("\n".join("  " + h for h in head))
