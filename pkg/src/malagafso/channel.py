"""Turbulence and pointing-error parameterization.

``MalagaParams`` holds the physical Malaga turbulence parameters and
``derive`` turns them into the coefficients of the irradiance density.
``build_unified`` bundles everything needed by the SNR statistics for one
detection mode into a ``UnifiedChannel``; ``gamma_gamma_limit`` builds the
same bundle for the Gamma-Gamma special case.

Both channel kinds are stored in one normalized form::

    F(x) = D * sum_m c_m * G[kernel_m](E * x / mu)

with ``shapes`` holding the third parameter group of each summand (``m``
for Malaga, ``beta`` alone for Gamma-Gamma).  The Gamma-Gamma constants
``J`` and ``K`` are stored as ``D`` and ``E`` with a single ``c = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .specfun import gamma_ln

__all__ = [
    "MalagaParams",
    "MalagaDerived",
    "PointingError",
    "DetectionMode",
    "UnifiedChannel",
    "LinkGeometry",
    "PRESETS",
    "preset",
    "derive",
    "build_unified",
    "gamma_gamma_limit",
    "lognormal_sigma_map",
    "lognormal_moment",
    "rytov_variance",
]

# g below this is treated as rho = 1 and routed to the Gamma-Gamma form
GG_THRESHOLD = 1e-12


@dataclass(frozen=True)
class MalagaParams:
    """Malaga turbulence parameters.

    Attributes
    ----------
    alpha : float
        Effective number of large-scale scattering cells, > 0.
    beta : int
        Amount of fading, a natural number.
    rho : float
        Fraction of scattering power coupled to the LOS component, in [0, 1].
    omega : float
        Average power of the LOS component.
    b0 : float
        Half the average power of the total scatter component.
    phase : float
        Phase difference between the LOS and coupled scatter terms (rad).
    """

    alpha: float
    beta: int
    rho: float = 0.596
    omega: float = 1.3265
    b0: float = 0.1079
    phase: float = math.pi / 2

    def __post_init__(self):
        for name in ("alpha", "rho", "omega", "b0", "phase"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        b = self.beta
        if isinstance(b, float) and b.is_integer():
            object.__setattr__(self, "beta", int(b))
        elif not isinstance(b, (int, np.integer)) or isinstance(b, bool):
            raise ValueError(f"beta must be a natural number, got {b!r}")
        if self.beta < 1:
            raise ValueError(f"beta must be a natural number, got {self.beta}")
        if not 0 <= self.rho <= 1:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if self.omega < 0 or self.b0 < 0:
            raise ValueError("omega and b0 must be non-negative")

    @property
    def g(self) -> float:
        return 2 * self.b0 * (1 - self.rho)

    @property
    def omega_p(self) -> float:
        """Average power of the LOS plus coupled-scatter component."""
        val = (self.omega + 2 * self.b0 * self.rho
               + 2 * math.sqrt(2 * self.b0 * self.rho * self.omega) * math.cos(self.phase))
        return max(val, 0.0)

    @property
    def mean_irradiance(self) -> float:
        return self.omega + 2 * self.b0


@dataclass(frozen=True)
class MalagaDerived:
    """Coefficients of the irradiance density (see :func:`derive`)."""

    g: float
    omega_p: float
    A: float
    a: tuple
    b: tuple
    # logs of A and b_m (-inf for a vanishing b_m); A or b_m alone may under/overflow
    log_A: float = 0.0
    log_b: tuple = ()


def derive(params: MalagaParams) -> MalagaDerived:
    """Compute ``g``, ``Omega'``, ``A``, ``a_m`` and ``b_m``.

    The irradiance density is
    ``f(I) = A * sum_m a_m * I^((alpha+m)/2 - 1) * K_{alpha-m}(2 sqrt(alpha beta I / (g beta + Omega')))``
    and ``b_m = a_m * (alpha beta / (g beta + Omega'))^(-(alpha+m)/2)``.
    Everything is assembled in log space so large ``alpha`` or ``beta`` do
    not overflow.
    """
    al, be = params.alpha, params.beta
    g, op = params.g, params.omega_p
    if g < GG_THRESHOLD:
        raise ValueError("g = 2 b0 (1 - rho) vanishes; use gamma_gamma_limit for rho = 1")
    gbo = g * be + op
    logA = (math.log(2) + al / 2 * math.log(al) - (1 + al / 2) * math.log(g) - gamma_ln(al)
            + (be + al / 2) * (math.log(g * be) - math.log(gbo)))
    a, b, log_b = [], [], []
    for m in range(1, be + 1):
        if op == 0 and m > 1:
            a.append(0.0)
            b.append(0.0)
            log_b.append(-math.inf)
            continue
        la = (math.log(math.comb(be - 1, m - 1)) + (1 - m / 2) * math.log(gbo)
              - gamma_ln(m) + (m / 2) * math.log(al / be))
        if m > 1:
            la += (m - 1) * math.log(op / g)
        lb = la - (al + m) / 2 * math.log(al * be / gbo)
        a.append(_exp(la))
        b.append(_exp(lb))
        log_b.append(lb)
    return MalagaDerived(g=g, omega_p=op, A=_exp(logA), a=tuple(a), b=tuple(b),
                         log_A=logA, log_b=tuple(log_b))


def _exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


@dataclass(frozen=True)
class PointingError:
    """Pointing-error (misalignment) model.

    ``xi`` is the ratio of the equivalent beam radius to the jitter standard
    deviation at the receiver; ``xi = inf`` means negligible pointing error.
    ``A0`` is the fraction of power collected at zero displacement.
    """

    xi: float
    A0: float = 1.0
    aperture_radius: Optional[float] = None
    beam_waist: Optional[float] = None

    def __post_init__(self):
        if not (self.xi > 0) or math.isnan(self.xi):
            raise ValueError(f"xi must be positive, got {self.xi}")
        if not (0 < self.A0 <= 1):
            raise ValueError(f"A0 must lie in (0, 1], got {self.A0}")

    @classmethod
    def from_geometry(cls, xi: float, aperture_radius: float, beam_waist: float) -> "PointingError":
        """``A0 = erf(v)^2`` with ``v = sqrt(pi) a / (sqrt(2) w_z)``."""
        if aperture_radius <= 0 or beam_waist <= 0:
            raise ValueError("aperture radius and beam waist must be positive")
        v = math.sqrt(math.pi) * aperture_radius / (math.sqrt(2) * beam_waist)
        return cls(xi, math.erf(v) ** 2, aperture_radius, beam_waist)

    @classmethod
    def negligible(cls, A0: float = 1.0) -> "PointingError":
        return cls(math.inf, A0)

    @property
    def xi2(self) -> float:
        return self.xi ** 2

    @property
    def finite(self) -> bool:
        return math.isfinite(self.xi)

    def mean_loss(self) -> float:
        """First moment of the pointing loss."""
        if not self.finite:
            return self.A0
        return self.A0 * self.xi2 / (self.xi2 + 1)


class DetectionMode(Enum):
    HETERODYNE = 1
    IMDD = 2

    @property
    def r(self) -> int:
        return self.value

    @property
    def c(self) -> float:
        """Capacity constant: 1 for heterodyne, e/(2 pi) for IM/DD."""
        return 1.0 if self.value == 1 else math.e / (2 * math.pi)

    @classmethod
    def from_r(cls, r: int) -> "DetectionMode":
        if r not in (1, 2):
            raise ValueError(f"r must be 1 or 2, got {r}")
        return cls(r)


@dataclass(frozen=True)
class UnifiedChannel:
    """Constants of the unified SNR statistics for one detection mode.

    ``mu`` is the average SNR for heterodyne detection and the electrical
    SNR for IM/DD.  ``kind`` is ``"malaga"`` or ``"gamma-gamma"``.
    """

    kind: str
    mode: DetectionMode
    alpha: float
    beta: int
    pe: PointingError
    mu: float
    B: float
    D: float
    E: float
    c: tuple
    shapes: tuple
    params: Optional[MalagaParams] = None
    derived: Optional[MalagaDerived] = None
    I_l: float = 1.0
    # B^{-r n} independent part of the moments, per summand (see stats.moment)
    _moment_weights: tuple = field(default=(), repr=False)

    @property
    def r(self) -> int:
        return self.mode.r

    @property
    def xi2(self) -> float:
        return self.pe.xi2

    @property
    def pointing(self) -> bool:
        return self.pe.finite

    @property
    def kappa1(self) -> tuple:
        if not self.pointing:
            return ()
        r = self.r
        return tuple((self.xi2 + j) / r for j in range(1, r + 1))

    def kappa2(self, m) -> tuple:
        r = self.r
        xi = tuple((self.xi2 + j) / r for j in range(r)) if self.pointing else ()
        return (xi + tuple((self.alpha + j) / r for j in range(r))
                + tuple((m + j) / r for j in range(r)))

    @property
    def kappa3(self) -> tuple:
        return self.kappa2(self.beta)

    def with_mu(self, mu: float) -> "UnifiedChannel":
        if not (mu > 0 and math.isfinite(mu)):
            raise ValueError(f"mu must be positive and finite, got {mu}")
        return _replace(self, mu=float(mu))

    def with_snr_db(self, snr_db: float) -> "UnifiedChannel":
        return self.with_mu(10 ** (snr_db / 10))

    @property
    def snr_ratio(self) -> float:
        """``E[gamma] / mu``: 1 for heterodyne, ``E[I^2]/E[I]^2`` for IM/DD."""
        if self.r == 1:
            return 1.0
        return irradiance_moment(self, 2) / irradiance_moment(self, 1) ** 2

    @property
    def average_snr(self) -> float:
        return self.mu * self.snr_ratio

    def with_average_snr(self, avg: float) -> "UnifiedChannel":
        return self.with_mu(avg / self.snr_ratio)


def _replace(ch, **kw):
    from dataclasses import replace
    return replace(ch, **kw)


def _log_moment_terms(ch: UnifiedChannel, k: float) -> float:
    """``log sum_m w_m Gamma(k+alpha) Gamma(k+m)`` with ``B^{-k}`` folded in.

    ``k = r n`` is the power of the normalized irradiance.  The normalized
    irradiance ``(gamma/mu)^{1/r}`` has moments
    ``X * Gamma(k+alpha) sum_m w_m Gamma(k+m) / B^k`` where ``X`` is
    ``xi^2/(k+xi^2)`` with pointing errors and 1 without.
    """
    terms = [lw + gamma_ln(k + ch.alpha) + gamma_ln(k + m) - k * math.log(ch.B)
             for lw, m in zip(ch._moment_weights, ch.shapes) if lw > -math.inf]
    top = max(terms)
    return top + math.log(sum(math.exp(t - top) for t in terms))


def normalized_log_moment(ch: UnifiedChannel, k: float) -> float:
    """``log E[(gamma/mu)^{k/r}]``."""
    lm = _log_moment_terms(ch, k)
    if ch.pointing:
        lm += math.log(ch.xi2) - math.log(k + ch.xi2)
    return lm


def irradiance_moment(ch: UnifiedChannel, n: float) -> float:
    """``E[I^n] / (xi^2 (g+Omega') I_l A0 / (xi^2+1))^n``: the mode-free moment ratio."""
    return math.exp(normalized_log_moment(ch, n))


def _channel(kind, alpha, beta, pe, mode, mu, B, logw, shapes, params=None, derived=None, I_l=1.0):
    """Assemble D, c_m, E from the PDF weights ``exp(logw_m)``.

    The PDF weights are those of
    ``f(gamma) = X/(2^r gamma) sum_m w_m G(B (gamma/mu)^{1/r})`` with ``X``
    equal to ``xi^2`` (or ``r`` with no pointing error).
    """
    if not (mu > 0 and math.isfinite(mu)):
        raise ValueError(f"mu must be positive and finite, got {mu}")
    if I_l <= 0:
        raise ValueError(f"I_l must be positive, got {I_l}")
    r = mode.r
    X = pe.xi2 if pe.finite else r
    D = X / (2 ** r * (2 * math.pi) ** (r - 1))
    # moment weights: w_m * r / 2^r (pdf weights times the Mellin factor)
    mw = tuple(lw + math.log(r) - r * math.log(2) if lw > -math.inf else -math.inf for lw in logw)
    # c_m folds A into the summand so that D keeps the form xi^2/(2^r (2 pi)^{r-1})
    c = tuple(math.exp(lw + (alpha + m - 1) * math.log(r)) if lw > -math.inf else 0.0
              for lw, m in zip(logw, shapes))
    E = B ** r / r ** (2 * r)
    return UnifiedChannel(kind=kind, mode=mode, alpha=float(alpha), beta=int(beta), pe=pe,
                          mu=float(mu), B=B, D=D, E=E, c=c, shapes=tuple(shapes),
                          params=params, derived=derived, I_l=float(I_l), _moment_weights=mw)


def build_unified(params: MalagaParams, pe: PointingError, mode, mu: float = 1.0,
                  I_l: float = 1.0) -> UnifiedChannel:
    """Unified-expression constants for the Malaga channel.

    ``mode`` is a :class:`DetectionMode` or ``r`` in {1, 2}.  Parameters with
    ``g < GG_THRESHOLD`` (``rho = 1``) are routed to :func:`gamma_gamma_limit`.

    For Malaga ``D = xi^2/(2^r (2 pi)^{r-1})`` and ``c_m = A b_m r^{alpha+m-1}``,
    so ``D * c_m`` is the product of the two constants in their usual form.
    """
    mode = mode if isinstance(mode, DetectionMode) else DetectionMode.from_r(mode)
    if params.g < GG_THRESHOLD:
        return gamma_gamma_limit(params.alpha, params.beta, pe, mode, mu, I_l=I_l, params=params)
    d = derive(params)
    al, be = params.alpha, params.beta
    if pe.finite:
        B = pe.xi2 * al * be * (d.g + d.omega_p) / ((pe.xi2 + 1) * (d.g * be + d.omega_p))
    else:
        B = al * be * (d.g + d.omega_p) / (d.g * be + d.omega_p)
    logw = [d.log_A + lb for lb in d.log_b]
    return _channel("malaga", al, be, pe, mode, mu, B, logw, range(1, be + 1),
                    params=params, derived=d, I_l=I_l)


def gamma_gamma_limit(alpha: float, beta: int, pe: PointingError, mode, mu: float = 1.0,
                      I_l: float = 1.0, params: Optional[MalagaParams] = None) -> UnifiedChannel:
    """Gamma-Gamma channel (the ``rho = 1`` member of the Malaga family).

    Stored with ``D = J``, ``E = K`` and a single summand with ``c = 1``.
    """
    mode = mode if isinstance(mode, DetectionMode) else DetectionMode.from_r(mode)
    if params is None:
        params = MalagaParams(alpha, beta, rho=1.0, omega=1.0, b0=0.0)
    r = mode.r
    if pe.finite:
        B = pe.xi2 * alpha * beta / (pe.xi2 + 1)
    else:
        B = float(alpha * beta)
    # PDF weight 2^r / (r Gamma(alpha) Gamma(beta))
    logw = [r * math.log(2) - math.log(r) - gamma_ln(alpha) - gamma_ln(beta)]
    ch = _channel("gamma-gamma", alpha, beta, pe, mode, mu, B, logw, (beta,),
                  params=params, I_l=I_l)
    # J = D * c exactly; fold it into D and keep c = (1,)
    return _replace(ch, D=ch.D * ch.c[0], c=(1.0,))


def lognormal_moment(sigma2: float, xi2: float, r: int, n: float) -> float:
    """Normalized ``E[gamma^n]/mu^n`` of lognormal turbulence with pointing errors.

    ``xi2 = inf`` drops the pointing factor.
    """
    k = r * n
    val = math.exp(k * sigma2 * (k - 1) / 2)
    if math.isfinite(xi2):
        val *= xi2 ** (1 - k) * (xi2 + 1) ** k / (xi2 + k)
    return val


def lognormal_sigma_map(ch: UnifiedChannel) -> float:
    """Lognormal ``sigma_I`` whose second SNR moment matches the channel.

    ``sigma_I^2 = ln(E[gamma^2]/mu^2 * P) / (r (2r - 1))`` with
    ``P = (xi^2 + 2r) xi^{4r-2} / (xi^2 + 1)^{2r}`` (1 without pointing
    error).  Raises ``ValueError`` when the logarithm is negative.
    """
    r = ch.r
    lv = normalized_log_moment(ch, 2 * r)
    if ch.pointing:
        x = ch.xi2
        lv += math.log(x + 2 * r) + (2 * r - 1) * math.log(x) - 2 * r * math.log(x + 1)
    s2 = lv / (r * (2 * r - 1))
    if s2 < 0:
        raise ValueError(f"moment matching gives a negative lognormal variance ({s2:.3g})")
    return math.sqrt(s2)


@dataclass(frozen=True)
class LinkGeometry:
    """Link length ``L`` (m), wavelength (m) and C_n^2 (m^-2/3)."""

    L: float
    wavelength: float
    cn2: float

    def __post_init__(self):
        if self.L <= 0 or self.wavelength <= 0 or self.cn2 < 0:
            raise ValueError("L and wavelength must be positive and cn2 non-negative")


def rytov_variance(geom: LinkGeometry) -> float:
    """``1.23 C_n^2 k^{7/6} L^{11/6}`` with ``k = 2 pi / lambda``."""
    k = 2 * math.pi / geom.wavelength
    return 1.23 * geom.cn2 * k ** (7 / 6) * geom.L ** (11 / 6)


PRESETS = {
    "p1": (2.296, 2),
    "p2": (4.2, 3),
    "p3": (8.0, 4),
}


def preset(name: str, **kw) -> MalagaParams:
    """Named (alpha, beta) pair with the shared rho, Omega, b0 and phase."""
    try:
        al, be = PRESETS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return MalagaParams(al, be, **kw)
