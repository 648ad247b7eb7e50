import math

import pytest
from hypothesis import given, strategies as st

from malagafso import stats
from malagafso.channel import (GG_THRESHOLD, DetectionMode, LinkGeometry, MalagaParams,
                               PointingError, build_unified, derive, gamma_gamma_limit,
                               irradiance_moment, lognormal_moment, lognormal_sigma_map,
                               normalized_log_moment, preset, rytov_variance)

P1 = preset("p1")

# values from an mpmath script working directly from the density coefficients
P1_A = 0.74138665634998075
P1_B_COEF = (0.24801331918501573, 2.0697126703876360)
P1_CHANNEL = {
    # (xi, r): (B, E, D*c_1, D*c_2)
    (1.0, 1): (2.1731557588320027, 2.1731557588320027, 0.091936882720419671, 0.76722867815193963),
    (1.0, 2): (2.1731557588320027, 0.29516287200904359, 0.03592897107611821, 0.59966655754289458),
    (6.7, 1): (4.2516000006087863, 4.2516000006087863, 4.127046665319639, 34.44089536224057),
    (6.7, 2): (4.2516000006087863, 1.1297564103235395, 1.6128515116069465, 26.919031768100538),
}
GG84 = {
    # (xi, r): (J, K)
    (1.0, 1): (3.3068783068783069e-5, 16.0),
    (1.0, 2): (0.0053893737343287309, 16.0),
    (6.7, 1): (0.001484457671957672, 31.302680322510351),
    (6.7, 2): (0.24192898693401673, 61.241112210829795),
}


def test_derive_p1():
    d = derive(P1)
    assert d.g == pytest.approx(0.0871832, rel=1e-12)
    assert d.omega_p == pytest.approx(1.4551168, rel=1e-12)
    assert d.A == pytest.approx(P1_A, rel=1e-12)
    assert d.b == pytest.approx(P1_B_COEF, rel=1e-12)
    assert P1.mean_irradiance == pytest.approx(1.5423, rel=1e-15)


def test_derive_without_coupling():
    p = MalagaParams(2.296, 2, rho=0.0)
    d = derive(p)
    assert d.g == pytest.approx(0.2158, rel=1e-15)
    assert d.omega_p == pytest.approx(p.omega, rel=1e-15)


def test_derive_rejects_gamma_gamma_point():
    with pytest.raises(ValueError):
        derive(MalagaParams(2.296, 2, rho=1.0))


@pytest.mark.parametrize("beta", [1.5, 0, -2, True, "2"])
def test_invalid_beta(beta):
    with pytest.raises(ValueError):
        MalagaParams(2.296, beta)


def test_float_integer_beta_accepted():
    assert MalagaParams(2.296, 2.0).beta == 2


@pytest.mark.parametrize("kw", [{"alpha": 0.0}, {"rho": 1.2}, {"omega": -1.0},
                                {"b0": math.nan}, {"alpha": math.inf}])
def test_invalid_params(kw):
    args = {"alpha": 2.296, "beta": 2, **kw}
    with pytest.raises(ValueError):
        MalagaParams(**args)


def test_irradiance_density_mean():
    # the first moment of the unnormalized density is Omega + 2 b0
    from scipy import integrate
    from oracles import malaga_irradiance_pdf

    def f(x):
        return float(malaga_irradiance_pdf(2.296, 2, 0.596, 1.3265, 0.1079, math.pi / 2, x))

    total = integrate.quad(f, 0, math.inf, epsabs=0, epsrel=1e-11, limit=200)[0]
    mean = integrate.quad(lambda x: x * f(x), 0, math.inf, epsabs=0, epsrel=1e-11, limit=200)[0]
    assert total == pytest.approx(1.0, rel=1e-9)
    assert mean == pytest.approx(1.5423, rel=1e-9)


# -- unified constants ----------------------------------------------------------

@pytest.mark.parametrize("key", sorted(P1_CHANNEL))
def test_unified_constants_p1(key):
    xi, r = key
    B, E, dc1, dc2 = P1_CHANNEL[key]
    ch = build_unified(P1, PointingError(xi), r)
    assert ch.kind == "malaga"
    assert ch.B == pytest.approx(B, rel=1e-12)
    assert ch.E == pytest.approx(E, rel=1e-12)
    assert ch.D * ch.c[0] == pytest.approx(dc1, rel=1e-11)
    assert ch.D * ch.c[1] == pytest.approx(dc2, rel=1e-11)
    assert ch.shapes == (1, 2)


@pytest.mark.parametrize("key", sorted(GG84))
def test_gamma_gamma_constants(key):
    xi, r = key
    J, K = GG84[key]
    ch = gamma_gamma_limit(8.0, 4, PointingError(xi), r)
    assert ch.kind == "gamma-gamma"
    assert ch.c == (1.0,) and ch.shapes == (4,)
    assert ch.D == pytest.approx(J, rel=1e-12)
    assert ch.E == pytest.approx(K, rel=1e-12)


def test_kappa_structure():
    het = build_unified(P1, PointingError(1.0), 1)
    assert het.kappa1 == (2.0,)
    assert het.kappa2(1) == (1.0, 2.296, 1.0)
    imdd = build_unified(P1, PointingError(1.0), 2)
    assert imdd.kappa1 == (1.0, 1.5)
    assert imdd.kappa2(2) == pytest.approx((0.5, 1.0, 1.148, 1.648, 1.0, 1.5))
    assert imdd.kappa3 == imdd.kappa2(2)
    none = build_unified(P1, PointingError.negligible(), 2)
    assert none.kappa1 == ()
    assert len(none.kappa2(1)) == 4


@given(alpha=st.floats(0.2, 20), beta=st.integers(1, 6), rho=st.floats(0, 0.99),
       xi=st.floats(0.2, 20), r=st.sampled_from([1, 2]))
def test_kappa_positive(alpha, beta, rho, xi, r):
    ch = build_unified(MalagaParams(alpha, beta, rho=rho), PointingError(xi), r)
    entries = ch.kappa1 + tuple(v for m in ch.shapes for v in ch.kappa2(m))
    assert all(v > 0 for v in entries)
    assert ch.B > 0 and ch.D > 0 and ch.E > 0


def test_rho_one_routes_to_gamma_gamma():
    p = MalagaParams(8.0, 4, rho=1.0)
    assert p.g < GG_THRESHOLD
    ch = build_unified(p, PointingError(1.0), 1)
    assert ch.kind == "gamma-gamma"
    assert ch.params is p


def test_mu_validation():
    ch = build_unified(P1, PointingError(1.0), 1)
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ValueError):
            ch.with_mu(bad)
    assert ch.with_snr_db(20).mu == pytest.approx(100.0)


def test_pointing_error_checks():
    with pytest.raises(ValueError):
        PointingError(0.0)
    with pytest.raises(ValueError):
        PointingError(1.0, A0=1.5)
    pe = PointingError.from_geometry(1.0, 0.1, 2.5)
    v = math.sqrt(math.pi) * 0.1 / (math.sqrt(2) * 2.5)
    assert pe.A0 == pytest.approx(math.erf(v) ** 2)
    assert PointingError(2.0, 0.5).mean_loss() == pytest.approx(0.4)
    assert PointingError.negligible().mean_loss() == 1.0


def test_detection_mode():
    assert DetectionMode.from_r(1).c == 1.0
    assert DetectionMode.from_r(2).c == pytest.approx(math.e / (2 * math.pi))
    with pytest.raises(ValueError):
        DetectionMode.from_r(3)


# -- moment bookkeeping -------------------------------------------------------------

@pytest.mark.parametrize("name", ["p1", "p2", "p3"])
@pytest.mark.parametrize("xi", [1.0, 6.7, math.inf])
def test_electrical_snr_bookkeeping(name, xi):
    ch = build_unified(preset(name), PointingError(xi), 2, mu=3.7)
    m1, m2 = irradiance_moment(ch, 1), irradiance_moment(ch, 2)
    assert stats.moment(ch, 1) * m1 ** 2 / m2 == pytest.approx(ch.mu, rel=1e-13)
    assert ch.average_snr == pytest.approx(stats.moment(ch, 1), rel=1e-13)
    assert ch.with_average_snr(ch.average_snr).mu == pytest.approx(ch.mu, rel=1e-13)


def test_heterodyne_snr_ratio():
    ch = build_unified(P1, PointingError(1.0), 1, mu=5.0)
    assert ch.snr_ratio == 1.0
    assert irradiance_moment(ch, 1) == pytest.approx(1.0, rel=1e-13)


# -- lognormal mapping ---------------------------------------------------------------

@pytest.mark.parametrize("name", ["p1", "p2", "p3"])
@pytest.mark.parametrize("xi", [1.0, 6.7, math.inf])
@pytest.mark.parametrize("r", [1, 2])
def test_lognormal_round_trip(name, xi, r):
    ch = build_unified(preset(name), PointingError(xi), r)
    s2 = lognormal_sigma_map(ch) ** 2
    target = math.exp(normalized_log_moment(ch, 2 * r))
    assert lognormal_moment(s2, ch.xi2, r, 2) == pytest.approx(target, rel=1e-10)


def test_lognormal_map_gamma_gamma_values():
    out = [lognormal_sigma_map(gamma_gamma_limit(8.0, 4, PointingError(1.0), r)) ** 2
           for r in (1, 2)]
    assert out == pytest.approx([0.3409, 0.3079], abs=1e-3)


def test_lognormal_moment_without_pointing():
    assert lognormal_moment(0.2, math.inf, 1, 2) == pytest.approx(math.exp(0.2))


# -- Rytov variance -------------------------------------------------------------------

def test_rytov_variance():
    geom = LinkGeometry(1000.0, 785e-9, 1.2e-13)
    assert rytov_variance(geom) == pytest.approx(5.28382312228514, rel=1e-12)
    assert rytov_variance(LinkGeometry(1000.0, 785e-9, 0.0)) == 0.0
    double = rytov_variance(LinkGeometry(1000.0, 785e-9, 2.4e-13))
    assert double == pytest.approx(2 * rytov_variance(geom), rel=1e-14)
    with pytest.raises(ValueError):
        LinkGeometry(-1.0, 785e-9, 1e-13)


def test_presets():
    assert (preset("P2").alpha, preset("P2").beta) == (4.2, 3)
    assert preset("p3", rho=0.2).rho == 0.2
    with pytest.raises(ValueError):
        preset("p9")
