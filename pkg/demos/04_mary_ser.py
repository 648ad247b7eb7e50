"""Average SER of M-ary schemes from the MGF."""

from malagafso import MAryScheme, PointingError, build_unified, preset, ser_mary

schemes = [MAryScheme.parse(s) for s in ("2psk", "4psk", "8psk", "4am", "8am", "4qam", "16qam")]
ch = build_unified(preset("p3"), PointingError(6.7), 1)

print("P3, xi=6.7, heterodyne")
print("  dB  " + "".join(f"{str(s):>11s}" for s in schemes))
for db in range(0, 41, 10):
    c = ch.with_snr_db(db)
    print(f"  {db:2d}  " + "".join(f"{ser_mary(c, s):11.3e}" for s in schemes))
