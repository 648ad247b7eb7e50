"""Link performance metrics built on the SNR statistics.

Outage probability, scintillation index, binary-modulation BER with its
high-SNR diversity order and coding gain, M-ary SER through the MGF, and
ergodic capacity (exact and three approximations).  Capacities are in bits
per channel use.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from . import specfun
from .channel import UnifiedChannel, irradiance_moment
from .specfun import SeriesControl, DEFAULT_CONTROL
from .stats import EvalMethod, cdf_snr, g_sum, kernel, mgf, moment, moment_derivative_at

__all__ = [
    "BinaryModulation",
    "MODULATIONS",
    "MAryScheme",
    "CapacityMethod",
    "DiversityGain",
    "outage_probability",
    "threshold_from_rate",
    "scintillation_index",
    "ber_binary",
    "diversity_coding_gain",
    "ser_mary",
    "ergodic_capacity",
    "capacity_is_lower_bound",
]

LN2 = math.log(2)


@dataclass(frozen=True)
class BinaryModulation:
    """Binary scheme with conditional BER ``Gamma(p, q gamma) / (2 Gamma(p))``."""

    name: str
    p: float
    q: float

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise ValueError("p and q must be positive")

    @classmethod
    def get(cls, name: str) -> "BinaryModulation":
        try:
            return MODULATIONS[name.lower()]
        except KeyError:
            raise ValueError(f"unknown modulation {name!r}; choose from {sorted(MODULATIONS)}") from None


MODULATIONS = {
    "cbfsk": BinaryModulation("CBFSK", 0.5, 0.5),
    "cbpsk": BinaryModulation("CBPSK", 0.5, 1.0),
    "nbfsk": BinaryModulation("NBFSK", 1.0, 0.5),
    "dbpsk": BinaryModulation("DBPSK", 1.0, 1.0),
}


@dataclass(frozen=True)
class MAryScheme:
    """M-ary scheme: ``kind`` in {"MPSK", "MAM", "MQAM"}."""

    kind: str
    M: int

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        if kind not in ("MPSK", "MAM", "MQAM"):
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if int(self.M) != self.M or self.M < 2:
            raise ValueError(f"M must be an integer >= 2, got {self.M}")
        if kind == "MQAM" and math.isqrt(self.M) ** 2 != self.M:
            raise ValueError(f"MQAM needs a square M, got {self.M}")

    @classmethod
    def parse(cls, text: str) -> "MAryScheme":
        """Parse names like ``"8psk"``, ``"4am"``, ``"16qam"``."""
        t = text.strip().lower()
        for suffix, kind in (("qam", "MQAM"), ("psk", "MPSK"), ("am", "MAM")):
            if t.endswith(suffix):
                digits = t[: -len(suffix)].lstrip("m")
                if digits.isdigit():
                    return cls(kind, int(digits))
        raise ValueError(f"cannot parse scheme {text!r} (expected e.g. 8psk, 4am, 16qam)")

    def __str__(self):
        return f"{self.M}-{self.kind[1:]}"


# -- outage and scintillation ------------------------------------------------

def threshold_from_rate(rate: float) -> float:
    """SNR threshold ``e^{2R} - 1`` for an operating rate ``R``."""
    return math.expm1(2 * rate)


def outage_probability(ch: UnifiedChannel, gamma_th: float, method=EvalMethod.EXACT,
                       ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Probability that the SNR falls below ``gamma_th`` (the CDF at the threshold)."""
    return cdf_snr(ch, gamma_th, method, ctl)


def scintillation_index(ch: UnifiedChannel) -> float:
    """Normalized irradiance variance ``E[I^2]/E[I]^2 - 1``.

    Independent of the detection mode and of ``mu``.
    """
    return irradiance_moment(ch, 2) / irradiance_moment(ch, 1) ** 2 - 1


# -- binary BER ----------------------------------------------------------------

def ber_binary(ch: UnifiedChannel, mod: BinaryModulation, method=EvalMethod.EXACT,
               ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Average BER of a binary modulation.

    Exact values outside ``[0, 0.5]`` indicate a numerical problem and are
    returned unchanged with a warning.
    """
    z = ch.E / (ch.mu * mod.q)
    val = ch.D / (2 * math.gamma(mod.p)) * g_sum(ch, (1 - mod.p, 1.0), 2, z, method, ctl=ctl)
    if EvalMethod.parse(method) is EvalMethod.EXACT and not (-1e-12 <= val <= 0.5 + 1e-12):
        warnings.warn(f"BER {val:.6g} lies outside [0, 0.5]", RuntimeWarning, stacklevel=2)
    return val


@dataclass(frozen=True)
class DiversityGain:
    """High-SNR BER behaviour ``P_b ~ (G_c mu)^{-G_d}``.

    ``coding_gain`` is ``None`` when the leading exponent is shared by
    coincident poles: the asymptote then carries a ``log(mu)`` factor and
    is not a pure power law.  ``terms`` names the parameters attaining the
    leading exponent.
    """

    order: float
    coding_gain: Optional[float]
    terms: tuple
    degenerate: bool = False


def diversity_coding_gain(ch: UnifiedChannel, mod: BinaryModulation,
                          ctl: SeriesControl = DEFAULT_CONTROL) -> DiversityGain:
    """Diversity order and coding gain of the binary BER.

    The order is the smallest pole over all summands with a nonzero
    weight, ``min(xi^2, alpha, m)/r``.  For the Malaga channel with
    ``rho < 1`` every ``m = 1..beta`` is present, so ``m = 1`` competes; for
    the Gamma-Gamma channel the only shape is ``beta``.
    """
    r = ch.r
    cand = []
    for c, m in zip(ch.c, ch.shapes):
        if c <= 0:
            continue
        k2 = ch.kappa2(m)
        low = min(k2)
        cand.append((low, c, m, k2))
    order = min(x[0] for x in cand)
    tol = 1e-9
    names = set()
    coef = 0.0
    degenerate = False
    head = (1 - mod.p, 1.0)
    for low, c, m, k2 in cand:
        if abs(low - order) > tol:
            continue
        idx = [i for i, v in enumerate(k2) if abs(v - order) <= tol]
        for i in idx:
            block = i // r
            names.add(("xi", "alpha", "shape")[block if ch.pointing else block + 1])
        if len(idx) > 1:
            degenerate = True
            continue
        spec = kernel(ch, m, head, 2)
        # coefficient of z^order in the residue expansion (z = 1)
        coef += c * specfun.slater_leading_terms(spec, 1.0, idx, ctl)
    labels = tuple(sorted("beta" if (n == "shape" and ch.kind == "gamma-gamma") else n
                          for n in names))
    if degenerate:
        return DiversityGain(order, None, labels, True)
    # P_b ~ D/(2 Gamma(p)) * coef * (E / (mu q))^order
    amp = ch.D / (2 * math.gamma(mod.p)) * coef
    gc = (mod.q / ch.E) * amp ** (-1.0 / order)
    return DiversityGain(order, gc, labels, False)


# -- M-ary SER -----------------------------------------------------------------

def _mgf_at(ch, s, ctl):
    if not math.isfinite(s) or s > 1e300:
        return 0.0
    return mgf(ch, s, EvalMethod.EXACT, ctl)


def ser_mary(ch: UnifiedChannel, scheme: MAryScheme, ctl: SeriesControl = DEFAULT_CONTROL,
             rtol: float = 1e-10) -> float:
    """Average SER from the MGF, integrated with :func:`specfun.gcq_integrate`."""
    M = scheme.M

    def craig(g, upper):
        return specfun.gcq_integrate(lambda th: _mgf_at(ch, g / math.sin(th) ** 2, ctl),
                                     0.0, upper, rtol=rtol)

    if scheme.kind == "MPSK":
        return craig(math.sin(math.pi / M) ** 2, math.pi * (M - 1) / M) / math.pi
    if scheme.kind == "MAM":
        return 2 * (M - 1) / (M * math.pi) * craig(3 / (M * M - 1), math.pi / 2)
    g = 3 / (2 * (M - 1))
    f = 1 - 1 / math.isqrt(M)
    return 4 / math.pi * f * craig(g, math.pi / 2) - 4 / math.pi * f * f * craig(g, math.pi / 4)


# -- ergodic capacity ------------------------------------------------------------

class CapacityMethod(Enum):
    EXACT = "exact"
    ASYMP_EXPANSION = "asym"
    ASYMP_EXPANSION_DOMINANT = "asym-dom"
    ASYMP_MOMENTS = "asym-moments"
    LOW_SNR = "low-snr"

    @classmethod
    def parse(cls, value) -> "CapacityMethod":
        if isinstance(value, cls):
            return value
        for m in cls:
            if value in (m.value, m.name, m.name.lower()):
                return m
        raise ValueError(f"unknown capacity method {value!r}")


def capacity_is_lower_bound(ch: UnifiedChannel) -> bool:
    """The capacity formula is exact for heterodyne and a lower bound for IM/DD."""
    return ch.r == 2


def ergodic_capacity(ch: UnifiedChannel, method=CapacityMethod.EXACT,
                     ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """``E[log2(1 + c gamma)]`` in bits per channel use.

    ``EXACT`` evaluates the Meijer G closed form; ``ASYMP_EXPANSION`` keeps
    the leading residue terms (all, or the dominant ones);
    ``ASYMP_MOMENTS`` is ``(E[ln gamma] + ln c)/ln 2``; ``LOW_SNR`` is the
    first-order term ``c E[gamma]/ln 2``.  See
    :func:`capacity_is_lower_bound` for the IM/DD caveat.
    """
    method = CapacityMethod.parse(method)
    c = ch.mode.c
    if method is CapacityMethod.ASYMP_MOMENTS:
        return (moment_derivative_at(ch, 0.0) + math.log(c)) / LN2
    if method is CapacityMethod.LOW_SNR:
        return c * moment(ch, 1.0) / LN2
    em = {
        CapacityMethod.EXACT: EvalMethod.EXACT,
        CapacityMethod.ASYMP_EXPANSION: EvalMethod.ASYMPTOTIC_ALL,
        CapacityMethod.ASYMP_EXPANSION_DOMINANT: EvalMethod.ASYMPTOTIC_DOMINANT,
    }[method]
    z = ch.E / (c * ch.mu)
    return ch.D / LN2 * g_sum(ch, (0.0, 1.0), 1, z, em, zeros=2, ctl=ctl)
