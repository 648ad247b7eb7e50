"""Build a channel and look at its SNR statistics.

The P1 turbulence pair (alpha=2.296, beta=2) with strong pointing error
(xi=1), seen through IM/DD and heterodyne receivers.
"""

from malagafso import PointingError, build_unified, preset, stats
from malagafso.channel import derive

p = preset("p1")
d = derive(p)
print(f"g = {d.g:.7f}  Omega' = {d.omega_p:.7f}  E[I_a] = {p.mean_irradiance:.4f}")
print(f"A = {d.A:.6f}  b_m = {', '.join(f'{b:.6f}' for b in d.b)}")

for r in (1, 2):
    ch = build_unified(p, PointingError(1.0), r).with_snr_db(10)
    print(f"\nr={r} ({ch.mode.name.lower()}), mu = 10 dB")
    print(f"  B={ch.B:.6f} D={ch.D:.6f} E={ch.E:.6f}")
    print(f"  kappa1={ch.kappa1}  kappa2(beta)={tuple(round(k, 4) for k in ch.kappa3)}")
    for g in (1.0, 10.0, 100.0):
        print(f"  gamma={g:6.1f}: pdf={stats.pdf_snr(ch, g):.4e}  cdf={stats.cdf_snr(ch, g):.6f}")
    print(f"  E[gamma]={stats.moment(ch, 1):.4f}  E[gamma^2]={stats.moment(ch, 2):.4f}"
          f"  E[ln gamma]={stats.moment_derivative_at(ch, 0):.4f}")
    print(f"  MGF(1)={stats.mgf(ch, 1.0):.6f}")
    print(f"  terms dominating the high-SNR CDF: {sorted(stats.dominant_terms(ch))}")

# The leading-term expansion only becomes useful once mu is large.
ch = build_unified(p, PointingError(1.0), 2)
print("\nasymptotic / exact CDF at gamma_th = 1")
for db in (10, 20, 30, 40, 50):
    c = ch.with_snr_db(db)
    exact = stats.cdf_snr(c, 1.0)
    print(f"  {db:2d} dB  exact={exact:.4e}  all-terms ratio={stats.cdf_snr_raw(c, 1.0, 'asym') / exact:.4f}"
          f"  dominant ratio={stats.cdf_snr_raw(c, 1.0, 'asym-dom') / exact:.4f}")
