"""Moment-matched lognormal model, Rytov variance, and CSV sweeps.

The sweep part calls the same entry point as the ``malagafso`` command.
"""

from malagafso import PointingError, gamma_gamma_limit, lognormal_sigma_map
from malagafso.channel import LinkGeometry, rytov_variance
from malagafso.cli import main

for r in (1, 2):
    s = lognormal_sigma_map(gamma_gamma_limit(8.0, 4, PointingError(1.0), r))
    print(f"Gamma-Gamma (8, 4), xi=1, r={r}: sigma_I^2 = {s * s:.4f}")

for cn2 in (5e-14, 1.2e-13, 1.7e-13):
    print(f"L=1 km, 785 nm, Cn2={cn2:.1e}: Rytov variance {rytov_variance(LinkGeometry(1000, 785e-9, cn2)):.3f}")

print("\n$ malagafso op --preset p1 --xi 1 --snr 0:20:10 --method exact,mc --samples 100000")
main(["op", "--preset", "p1", "--xi", "1", "--snr", "0:20:10", "--method", "exact,mc",
      "--samples", "100000"])

print("\n$ malagafso capacity --preset p3 --mode het --snr -30:0:10 --method low-snr,exact")
main(["capacity", "--preset", "p3", "--mode", "het", "--snr", "-30:0:10",
      "--method", "low-snr,exact"])
