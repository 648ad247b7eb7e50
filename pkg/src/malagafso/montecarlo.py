"""Monte-Carlo sampling of the channel and empirical metric estimators.

Samples are drawn in fixed-size chunks, each from its own Philox substream
keyed by ``(seed, stream_id, chunk)``, so a batch is bit-identical however
many workers produce it.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np
from scipy import special

from .channel import MalagaParams, PointingError, UnifiedChannel
from .metrics import BinaryModulation, MAryScheme

__all__ = [
    "RngStream",
    "SampleBatch",
    "sample_malaga",
    "sample_pointing",
    "sample_snr",
    "empirical_metric",
    "conditional_ber",
    "conditional_ser",
    "export_csv",
]

CHUNK = 1 << 16
MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class RngStream:
    """Splittable random stream: ``(seed, stream_id)`` fixes every draw."""

    seed: int
    stream_id: tuple = (0,)

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")
        sid = self.stream_id if isinstance(self.stream_id, tuple) else (int(self.stream_id),)
        object.__setattr__(self, "stream_id", sid)

    def child(self, k: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id + (int(k),))

    def generator(self, chunk: int) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=self.stream_id + (int(chunk),))
        return np.random.Generator(np.random.Philox(ss))


@dataclass
class SampleBatch:
    values: np.ndarray
    tags: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    @property
    def n(self) -> int:
        return len(self.values)


def _chunked(rng: RngStream, n: int, draw: Callable[[np.random.Generator, int], np.ndarray],
             workers: int = 1) -> np.ndarray:
    if n < 1:
        raise ValueError(f"need at least one sample, got {n}")
    sizes = [CHUNK] * (n // CHUNK) + ([n % CHUNK] if n % CHUNK else [])

    def one(i):
        return draw(rng.generator(i), sizes[i])

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(one, range(len(sizes))))
    else:
        parts = [one(i) for i in range(len(sizes))]
    return np.concatenate(parts)


def sample_malaga(params: MalagaParams, rng: RngStream, n: int, workers: int = 1) -> SampleBatch:
    """Malaga irradiance ``I_a = X * |sqrt(zeta Omega') e^{j phi} + w|^2``.

    ``X`` and ``zeta`` are unit-mean Gamma variables with shapes ``alpha``
    and ``beta``; ``w`` is circular complex Gaussian with power ``g``.
    """
    al, be, g, op = params.alpha, params.beta, params.g, params.omega_p

    def draw(gen, k):
        x = gen.gamma(al, 1 / al, k)
        zeta = gen.gamma(be, 1 / be, k)
        w = (gen.standard_normal(k) + 1j * gen.standard_normal(k)) * math.sqrt(g / 2)
        # w is circular, so the LOS phase can be fixed at zero
        return x * np.abs(np.sqrt(zeta * op) + w) ** 2

    vals = _chunked(rng, n, draw, workers)
    return SampleBatch(vals, {"generator": "malaga", "alpha": al, "beta": be,
                              "rho": params.rho, "omega": params.omega, "b0": params.b0,
                              "phase": params.phase, "seed": rng.seed,
                              "stream": ".".join(map(str, rng.stream_id))})


def sample_pointing(pe: PointingError, rng: RngStream, n: int, workers: int = 1) -> SampleBatch:
    """Pointing loss by inversion: ``I_p = A0 U^{1/xi^2}``."""
    if pe.finite:
        inv = 1 / pe.xi2

        def draw(gen, k):
            # 1 - U keeps the support at (0, A0]
            return pe.A0 * (1 - gen.random(k)) ** inv

        vals = _chunked(rng, n, draw, workers)
    else:
        vals = np.full(n, pe.A0)
    return SampleBatch(vals, {"generator": "pointing", "xi": pe.xi, "A0": pe.A0,
                              "seed": rng.seed, "stream": ".".join(map(str, rng.stream_id))})


def sample_snr(ch: UnifiedChannel, rng: RngStream, n: int, workers: int = 1) -> SampleBatch:
    """Instantaneous SNR: ``gamma = mu [I / E_ref]^r`` with ``I = I_l I_a I_p``.

    ``E_ref = xi^2 (g + Omega') I_l A0 / (xi^2 + 1)`` is the mean irradiance
    (the pointing factor is dropped when ``xi`` is infinite).
    """
    return _snr_and_irradiance(ch, rng, n, workers)[0]


def _snr_and_irradiance(ch, rng, n, workers=1):
    p = ch.params
    ia = sample_malaga(p, rng.child(0), n, workers).values
    ip = sample_pointing(ch.pe, rng.child(1), n, workers).values
    irr = ch.I_l * ia * ip
    ref = (p.g + p.omega_p) * ch.I_l * ch.pe.A0
    if ch.pointing:
        ref *= ch.xi2 / (ch.xi2 + 1)
    gam = ch.mu * (irr / ref) ** ch.r
    return SampleBatch(gam, {"generator": "snr", "kind": ch.kind, "r": ch.r, "mu": ch.mu,
                             "alpha": ch.alpha, "beta": ch.beta, "rho": p.rho,
                             "omega": p.omega, "b0": p.b0, "phase": p.phase,
                             "xi": ch.pe.xi, "A0": ch.pe.A0, "I_l": ch.I_l, "seed": rng.seed,
                             "stream": ".".join(map(str, rng.stream_id))}), irr


def conditional_ber(gamma: np.ndarray, mod: BinaryModulation) -> np.ndarray:
    """``Gamma(p, q gamma) / (2 Gamma(p))``."""
    return 0.5 * special.gammaincc(mod.p, mod.q * np.asarray(gamma))


_GL_X, _GL_W = np.polynomial.legendre.leggauss(96)


def _craig(gamma: np.ndarray, g: float, upper: float) -> np.ndarray:
    """``(1/pi) int_0^upper exp(-g gamma / sin^2 th) dth`` for each gamma."""
    th = 0.5 * upper * (_GL_X + 1)
    w = 0.5 * upper * _GL_W / np.pi
    inv = 1 / np.sin(th) ** 2
    out = np.empty(len(gamma))
    for s in range(0, len(gamma), 8192):
        blk = gamma[s:s + 8192, None]
        out[s:s + 8192] = np.exp(-g * blk * inv) @ w
    return out


def conditional_ser(gamma: np.ndarray, scheme: MAryScheme) -> np.ndarray:
    """Exact SER at fixed SNR for M-PSK, M-AM and square M-QAM."""
    gamma = np.asarray(gamma, dtype=float)
    M = scheme.M
    if scheme.kind == "MAM":
        return (M - 1) / M * special.erfc(np.sqrt(3 * gamma / (M * M - 1)))
    if scheme.kind == "MQAM":
        qx = 0.5 * special.erfc(np.sqrt(3 * gamma / (2 * (M - 1))))
        f = 1 - 1 / math.isqrt(M)
        return 4 * f * qx - 4 * f * f * qx * qx
    if M == 2:
        return 0.5 * special.erfc(np.sqrt(gamma))
    return _craig(gamma, math.sin(math.pi / M) ** 2, math.pi * (M - 1) / M)


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    return float(np.mean(x)), float(np.std(x, ddof=1) / math.sqrt(len(x)))


def empirical_metric(kind: str, ch: UnifiedChannel, rng: RngStream, n: int = 1_000_000, *,
                     gamma_th: float = 1.0, mod: Optional[BinaryModulation] = None,
                     scheme: Optional[MAryScheme] = None, workers: int = 1) -> tuple[float, float]:
    """Monte-Carlo estimate and standard error of a metric.

    ``kind`` is one of ``op`` (needs ``gamma_th``), ``ber`` (needs ``mod``),
    ``ser`` (needs ``scheme``), ``capacity`` (bits) or ``si``.
    """
    kind = kind.lower()
    if n < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {n}")
    batch, irr = _snr_and_irradiance(ch, rng, n, workers)
    gam = batch.values
    if kind == "op":
        p = float(np.mean(gam < gamma_th))
        return p, math.sqrt(max(p * (1 - p), 0.0) / n)
    if kind == "ber":
        if mod is None:
            raise ValueError("ber needs a modulation")
        return _mean_se(conditional_ber(gam, mod))
    if kind == "ser":
        if scheme is None:
            raise ValueError("ser needs a scheme")
        return _mean_se(conditional_ser(gam, scheme))
    if kind == "capacity":
        return _mean_se(np.log2(1 + ch.mode.c * gam))
    if kind == "si":
        x = irr / np.mean(irr)
        m1, m2 = np.mean(x), np.mean(x * x)
        si = m2 / m1 ** 2 - 1
        # delta method on (m1, m2)
        cov = np.cov(np.vstack([x, x * x]))
        grad = np.array([-2 * m2 / m1 ** 3, 1 / m1 ** 2])
        return float(si), float(math.sqrt(grad @ cov @ grad / n))
    raise ValueError(f"unknown metric kind {kind!r}")


def export_csv(path, columns: Mapping[str, SampleBatch]) -> None:
    """Write batches side by side, one column each, after ``#`` provenance lines."""
    names = list(columns)
    lengths = {columns[k].n for k in names}
    if len(lengths) != 1:
        raise ValueError("all batches must have the same length")
    with open(path, "w", newline="") as fh:
        for k in names:
            tags = ";".join(f"{t}={v}" for t, v in sorted(columns[k].tags.items()))
            fh.write(f"# {k}: {tags}\n")
        w = csv.writer(fh)
        w.writerow(names)
        for row in zip(*(columns[k].values for k in names)):
            w.writerow([repr(float(v)) for v in row])
