import math

import pytest

from oracles import log_quad

from malagafso import metrics, montecarlo, stats
from malagafso.channel import MalagaParams, PointingError, build_unified, gamma_gamma_limit, preset
from malagafso.metrics import BinaryModulation, CapacityMethod, MAryScheme

DBPSK = BinaryModulation.get("dbpsk")
CBPSK = BinaryModulation.get("cbpsk")


def malaga(name="p1", xi=1.0, r=2, mu=1.0):
    return build_unified(preset(name), PointingError(xi), r, mu)


def test_modulation_presets():
    got = {k: (m.p, m.q) for k, m in metrics.MODULATIONS.items()}
    assert got == {"cbfsk": (0.5, 0.5), "cbpsk": (0.5, 1.0), "nbfsk": (1.0, 0.5),
                   "dbpsk": (1.0, 1.0)}
    assert BinaryModulation.get("DBPSK") is DBPSK
    with pytest.raises(ValueError):
        BinaryModulation.get("ook")
    with pytest.raises(ValueError):
        BinaryModulation("x", 0.0, 1.0)


@pytest.mark.parametrize("text,kind,M", [("8psk", "MPSK", 8), ("4AM", "MAM", 4),
                                         ("16qam", "MQAM", 16), ("m64qam", "MQAM", 64)])
def test_scheme_parse(text, kind, M):
    s = MAryScheme.parse(text)
    assert (s.kind, s.M) == (kind, M)


@pytest.mark.parametrize("bad", ["8qam", "1psk", "psk", "16fsk"])
def test_scheme_parse_rejects(bad):
    with pytest.raises(ValueError):
        MAryScheme.parse(bad)


def test_scheme_str():
    assert str(MAryScheme("mqam", 16)) == "16-QAM"


# -- outage and SI ---------------------------------------------------------------

def test_outage_is_cdf():
    ch = malaga(mu=10.0)
    assert metrics.outage_probability(ch, 0.0) == 0.0
    for g in (0.1, 1.0, 30.0):
        assert metrics.outage_probability(ch, g) == stats.cdf_snr(ch, g)


def test_threshold_from_rate():
    assert metrics.threshold_from_rate(0.5) == pytest.approx(math.e - 1)
    assert metrics.threshold_from_rate(0.0) == 0.0


def test_scintillation_gamma_gamma():
    ch = gamma_gamma_limit(8.0, 4, PointingError.negligible(), 2)
    assert metrics.scintillation_index(ch) == pytest.approx(0.40625, rel=1e-13)


def test_scintillation_includes_pointing():
    # E[I_p^2]/E[I_p]^2 = (xi^2+1)^2 / (xi^2 (xi^2+2))
    ch = gamma_gamma_limit(8.0, 4, PointingError(1.0), 1)
    assert metrics.scintillation_index(ch) == pytest.approx(1.40625 * 4 / 3 - 1, rel=1e-13)


def test_scintillation_mode_and_mu_free():
    base = metrics.scintillation_index(malaga("p2", 6.7, 1))
    assert metrics.scintillation_index(malaga("p2", 6.7, 2, mu=50.0)) == pytest.approx(base,
                                                                                      rel=1e-13)


def test_scintillation_decreases_toward_deterministic_channel():
    path = [metrics.scintillation_index(
        build_unified(MalagaParams(al, 1, rho=1 - 1e-3), PointingError.negligible(), 1))
        for al in (2.0, 5.0, 20.0, 100.0, 1000.0)]
    assert all(b < a for a, b in zip(path, path[1:]))
    weaker = [metrics.scintillation_index(gamma_gamma_limit(k, k, PointingError.negligible(), 1))
              for k in (2, 8, 40, 200)]
    assert all(b < a for a, b in zip(weaker, weaker[1:]))
    assert weaker[-1] < 0.011


# -- BER -----------------------------------------------------------------------------

def test_dbpsk_is_half_mgf():
    ch = malaga("p2", 6.7, 1, mu=20.0)
    assert metrics.ber_binary(ch, DBPSK) == pytest.approx(stats.mgf(ch, 1.0) / 2, rel=1e-9)


def test_ber_no_information_limit():
    ch = malaga()
    vals = [metrics.ber_binary(ch.with_snr_db(db), CBPSK) for db in (0, -10, -20, -30, -40)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(0.5, abs=1e-2)
    assert all(v < 0.5 for v in vals)


@pytest.mark.parametrize("mod", ["dbpsk", "cbfsk"])
def test_ber_matches_cdf_quadrature(mod):
    mod = BinaryModulation.get(mod)
    ch = malaga().with_snr_db(20)
    p, q = mod.p, mod.q

    def integrand(g):
        w = math.exp(p * math.log(q) + (p - 1) * math.log(g) - q * g - math.lgamma(p))
        return 0.5 * w * stats.cdf_snr(ch, g)

    ref = log_quad(integrand, center=1.0 / q, epsrel=1e-11)
    assert metrics.ber_binary(ch, mod) == pytest.approx(ref, rel=1e-8)


def test_diversity_degenerate_tie():
    # xi^2/2 and the m = 1 shape pole coincide at 0.5
    d = metrics.diversity_coding_gain(malaga("p1", 1.0, 2), DBPSK)
    assert d.order == pytest.approx(0.5)
    assert d.degenerate and d.coding_gain is None
    assert d.terms == ("shape", "xi")


def test_diversity_gamma_gamma():
    ch = gamma_gamma_limit(8.0, 4, PointingError(6.7), 1)
    d = metrics.diversity_coding_gain(ch, DBPSK)
    assert d.order == 4.0 and d.terms == ("beta",) and not d.degenerate
    hi = ch.with_snr_db(60)
    asym = (d.coding_gain * hi.mu) ** (-d.order)
    assert asym == pytest.approx(metrics.ber_binary(hi, DBPSK), rel=1e-3)


def test_diversity_malaga_is_set_by_unit_shape():
    # the m = 1 summand carries weight for every rho < 1
    ch = malaga("p3", 6.7, 1)
    d = metrics.diversity_coding_gain(ch, CBPSK)
    assert d.order == 1.0 and d.terms == ("shape",)
    lo, hi = (metrics.ber_binary(ch.with_snr_db(db), CBPSK) for db in (70, 80))
    assert math.log10(hi / lo) == pytest.approx(-1.0, abs=0.02)


# -- SER -------------------------------------------------------------------------------

def test_two_psk_equals_cbpsk():
    ch = malaga("p1", 1.0, 1, mu=10.0)
    assert metrics.ser_mary(ch, MAryScheme("MPSK", 2)) == pytest.approx(
        metrics.ber_binary(ch, CBPSK), rel=1e-6)


@pytest.mark.parametrize("scheme", ["8psk", "4am", "16qam"])
def test_ser_decreases_with_snr(scheme):
    scheme = MAryScheme.parse(scheme)
    ch = malaga("p2", 6.7, 1)
    vals = [metrics.ser_mary(ch.with_snr_db(db), scheme) for db in range(0, 41, 10)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_four_qam_against_simulation():
    ch = malaga("p1", 1.0, 1).with_snr_db(25)
    scheme = MAryScheme.parse("4qam")
    est, se = montecarlo.empirical_metric("ser", ch, montecarlo.RngStream(2024, (7, 1)), 1_000_000,
                                          scheme=scheme)
    assert abs(est - metrics.ser_mary(ch, scheme)) <= 3 * se


# -- capacity ---------------------------------------------------------------------------

def test_capacity_method_parse():
    assert CapacityMethod.parse("low-snr") is CapacityMethod.LOW_SNR
    assert CapacityMethod.parse("ASYMP_MOMENTS") is CapacityMethod.ASYMP_MOMENTS
    with pytest.raises(ValueError):
        CapacityMethod.parse("mc")


@pytest.mark.parametrize("r", [1, 2])
def test_capacity_monotone_in_snr(r):
    ch = malaga("p2", 1.0, r)
    vals = [metrics.ergodic_capacity(ch.with_snr_db(db)) for db in range(-20, 61, 10)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_capacity_grows_with_xi_at_high_snr():
    vals = [metrics.ergodic_capacity(malaga("p3", xi, 1).with_snr_db(40)) for xi in (1.0, 2.0, 6.7)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("name", ["p1", "p3"])
@pytest.mark.parametrize("r", [1, 2])
def test_capacity_below_low_snr_form(name, r):
    ch = malaga(name, 1.0, r)
    for db in range(-30, 41, 10):
        c = ch.with_snr_db(db)
        assert metrics.ergodic_capacity(c) <= metrics.ergodic_capacity(c, "low-snr")


def test_low_snr_capacity_ordering_in_xi():
    severe, mild = (metrics.ergodic_capacity(malaga("p1", xi, 2).with_snr_db(-30), "low-snr")
                    for xi in (1.0, 6.7))
    assert severe > mild


def test_capacity_heterodyne_matches_simulation():
    ch = malaga("p2", 6.7, 1).with_snr_db(10)
    est, se = montecarlo.empirical_metric("capacity", ch, montecarlo.RngStream(2024, (7, 2)),
                                          1_000_000)
    assert abs(est - metrics.ergodic_capacity(ch)) <= 3 * se


def test_capacity_moment_form_at_high_snr():
    ch = malaga("p3", 6.7, 1).with_snr_db(50)
    assert metrics.ergodic_capacity(ch, "asym-moments") == pytest.approx(
        metrics.ergodic_capacity(ch), abs=0.01)


def test_capacity_lower_bound_flag():
    assert not metrics.capacity_is_lower_bound(malaga(r=1))
    assert metrics.capacity_is_lower_bound(malaga(r=2))
