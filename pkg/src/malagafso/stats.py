"""First-order statistics of the end-to-end SNR.

Every statistic is a weighted sum over the channel summands of one Meijer G
kernel.  The exact forms evaluate the kernel; the asymptotic forms keep only
the first term of each residue series (``specfun.slater_leading_terms``),
which is the high-SNR expansion in elementary functions.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Sequence

from . import specfun
from .channel import UnifiedChannel, normalized_log_moment
from .specfun import MeijerGSpec, SeriesControl, DEFAULT_CONTROL

__all__ = [
    "EvalMethod",
    "pdf_snr",
    "cdf_snr",
    "cdf_snr_raw",
    "dominant_terms",
    "mgf",
    "moment",
    "moment_derivative_at",
    "log_moment",
]


class EvalMethod(Enum):
    EXACT = "exact"
    ASYMPTOTIC_ALL = "asym"
    ASYMPTOTIC_DOMINANT = "asym-dom"

    @classmethod
    def parse(cls, value) -> "EvalMethod":
        if isinstance(value, cls):
            return value
        for m in cls:
            if value in (m.value, m.name, m.name.lower()):
                return m
        raise ValueError(f"unknown evaluation method {value!r}")


# -- kernel construction -----------------------------------------------------

def _top(ch: UnifiedChannel, head: Sequence[float]) -> tuple:
    return tuple(head) + ch.kappa1


def kernel(ch: UnifiedChannel, m, head: Sequence[float], n: int,
           extra_zeros: int = 1) -> MeijerGSpec:
    """``G^{len(k2), n}`` with top ``(head, kappa1)`` and bottom ``(kappa2(m), 0...)``.

    ``head`` is ``(1,)`` for the CDF, ``(0, 1)`` for the MGF and the
    capacity and ``(1-p, 1)`` for the BER.  The capacity kernel has two
    trailing zeros in the bottom row and both join the pole group.
    """
    k2 = ch.kappa2(m)
    a = _top(ch, head)
    if extra_zeros == 2:
        return MeijerGSpec(len(k2) + 2, n, a, k2 + (0.0, 0.0))
    return MeijerGSpec(len(k2), n, a, k2 + (0.0,))


def _dominant_positions(ch: UnifiedChannel, m, zeros: int = 0) -> list[int]:
    """Pole indices of the summand-``m`` kernel kept by the dominant-term rule.

    Candidates are the first entry of the pointing, ``alpha`` and ``m``
    blocks of ``kappa2`` (plus ``zeros`` trailing zero poles, which always
    dominate).  A candidate is kept when it is less than 1 above the
    smallest candidate.
    """
    r = ch.r
    k2 = ch.kappa2(m)
    starts = list(range(0, len(k2), r))
    cands = {i: k2[i] for i in starts}
    for z in range(zeros):
        cands[len(k2) + z] = 0.0
    low = min(cands.values())
    return sorted(i for i, v in cands.items() if v - low < 1.0)


def dominant_terms(ch: UnifiedChannel) -> frozenset:
    """Which of ``xi^2/r``, ``alpha/r`` and ``beta/r`` dominate the high-SNR expansion.

    Returns the labels (``"xi"``, ``"alpha"``, ``"beta"``) whose scaled value
    is less than 1 above the minimum of the three.
    """
    r = ch.r
    vals = {"alpha": ch.alpha / r, "beta": ch.beta / r}
    if ch.pointing:
        vals["xi"] = ch.xi2 / r
    low = min(vals.values())
    return frozenset(k for k, v in vals.items() if v - low < 1.0)


def _summands(ch: UnifiedChannel):
    return [(c, m) for c, m in zip(ch.c, ch.shapes) if c > 0]


def g_sum(ch: UnifiedChannel, head, n: int, z: float, method, zeros: int = 1,
          ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """``sum_m c_m G[kernel_m](z)`` by the requested evaluation method."""
    method = EvalMethod.parse(method)
    total = 0.0
    for c, m in _summands(ch):
        spec = kernel(ch, m, head, n, zeros)
        if method is EvalMethod.EXACT:
            v = specfun.meijer_g(spec, z, ctl)
        elif method is EvalMethod.ASYMPTOTIC_ALL:
            v = specfun.slater_leading_terms(spec, z, None, ctl)
        else:
            poles = _dominant_positions(ch, m, zeros if zeros == 2 else 0)
            v = specfun.slater_leading_terms(spec, z, poles, ctl)
        total += c * v
    return total


# -- PDF ---------------------------------------------------------------------

PDF_SERIES_LIMIT = 10.0

def pdf_snr(ch: UnifiedChannel, gamma: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Density of the instantaneous SNR at ``gamma > 0``.

    Each summand is a ``G^{3,0}_{1,3}`` kernel (``G^{2,0}_{0,2}`` without
    pointing error).  The pointing kernel uses the residue sums up to
    ``PDF_SERIES_LIMIT`` and its Bessel-integral form beyond, where the
    sums cancel heavily; the no-pointing kernel is a Bessel K throughout.
    """
    gamma = float(gamma)
    if not gamma > 0:
        raise ValueError(f"pdf_snr requires gamma > 0, got {gamma}")
    r = ch.r
    z = ch.B * (gamma / ch.mu) ** (1.0 / r)
    total = 0.0
    for lw, m in zip(ch._moment_weights, ch.shapes):
        if lw == -math.inf:
            continue
        # moment weights carry r/2^r; the density needs xi^2/2^r (or 1/2^r)
        lw -= math.log(r)
        if not ch.pointing:
            total += math.exp(lw + specfun.log_g_bessel_pair(ch.alpha, m, z))
            continue
        x2 = ch.xi2
        lw += math.log(x2)
        if z > PDF_SERIES_LIMIT:
            total += math.exp(lw + specfun.log_g_pointing_kernel(x2, ch.alpha, m, z))
        else:
            spec = MeijerGSpec(3, 0, (x2 + 1,), (x2, ch.alpha, float(m)))
            total += math.exp(lw) * specfun.meijer_g(spec, z, ctl)
    return total / gamma


# -- CDF ---------------------------------------------------------------------

def cdf_snr_raw(ch: UnifiedChannel, gamma: float, method=EvalMethod.EXACT,
                ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Unclamped CDF value (asymptotic forms may leave [0, 1])."""
    gamma = float(gamma)
    if gamma < 0 or math.isnan(gamma):
        raise ValueError(f"cdf_snr requires gamma >= 0, got {gamma}")
    if gamma == 0:
        return 0.0
    if math.isinf(gamma):
        return 1.0
    return ch.D * g_sum(ch, (1.0,), 1, ch.E * gamma / ch.mu, method, ctl=ctl)


def cdf_snr(ch: UnifiedChannel, gamma: float, method=EvalMethod.EXACT,
            ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """CDF of the SNR, clamped to [0, 1] (see :func:`cdf_snr_raw`)."""
    return min(1.0, max(0.0, cdf_snr_raw(ch, gamma, method, ctl)))


# -- MGF ---------------------------------------------------------------------

def mgf(ch: UnifiedChannel, s: float, method=EvalMethod.EXACT,
        ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """``E[exp(-s gamma)]`` for ``s > 0``."""
    s = float(s)
    if not s > 0:
        raise ValueError(f"mgf requires s > 0, got {s}")
    return ch.D * g_sum(ch, (0.0, 1.0), 2, ch.E / (ch.mu * s), method, ctl=ctl)


# -- moments -----------------------------------------------------------------

def log_moment(ch: UnifiedChannel, n: float) -> float:
    """``log E[gamma^n]``."""
    if n < 0:
        raise ValueError(f"moment order must be non-negative, got {n}")
    return normalized_log_moment(ch, ch.r * n) + n * math.log(ch.mu)


def moment(ch: UnifiedChannel, n: float) -> float:
    """``E[gamma^n]`` for real ``n >= 0``."""
    return math.exp(log_moment(ch, n))


def moment_derivative_at(ch: UnifiedChannel, n: float) -> float:
    """``d/dn E[gamma^n]``; at ``n = 0`` this is ``E[ln gamma]``."""
    if n < 0:
        raise ValueError(f"moment order must be non-negative, got {n}")
    r = ch.r
    k = r * n
    logB = math.log(ch.B)
    terms = []
    for lw, m in zip(ch._moment_weights, ch.shapes):
        if lw == -math.inf:
            continue
        lt = (lw + specfun.gamma_ln(k + ch.alpha) + specfun.gamma_ln(k + m) - k * logB)
        brace = math.log(ch.mu) + r * (specfun.digamma(k + ch.alpha) + specfun.digamma(k + m) - logB)
        if ch.pointing:
            lt += math.log(ch.xi2) - math.log(k + ch.xi2)
            brace -= r / (k + ch.xi2)
        terms.append((lt, brace))
    top = max(t for t, _ in terms)
    return sum(math.exp(t - top) * b for t, b in terms) * math.exp(top + n * math.log(ch.mu))
