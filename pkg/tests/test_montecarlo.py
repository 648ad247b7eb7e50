import csv
import math

import numpy as np
import pytest
from scipy import stats as sstats

from oracles import gamma_gamma_pdf, tabulated_cdf

from malagafso import metrics, montecarlo, stats
from malagafso.channel import MalagaParams, PointingError, build_unified, preset
from malagafso.metrics import BinaryModulation, MAryScheme
from malagafso.montecarlo import RngStream, SampleBatch

P1 = preset("p1")
N = 1_000_000


def malaga(name="p1", xi=1.0, r=2, db=0.0):
    return build_unified(preset(name), PointingError(xi), r).with_snr_db(db)


def within(est, se, exact, k=3.0):
    return abs(est - exact) <= k * se


# -- streams ----------------------------------------------------------------------

def test_stream_determinism_across_workers():
    n = 3 * montecarlo.CHUNK + 123
    one = montecarlo.sample_malaga(P1, RngStream(5, (1, 2)), n, workers=1).values
    four = montecarlo.sample_malaga(P1, RngStream(5, (1, 2)), n, workers=4).values
    again = montecarlo.sample_malaga(P1, RngStream(5, (1, 2)), n).values
    assert np.array_equal(one, four) and np.array_equal(one, again)


def test_streams_are_distinct():
    a = montecarlo.sample_malaga(P1, RngStream(5, (1,)), 1000).values
    b = montecarlo.sample_malaga(P1, RngStream(5, (2,)), 1000).values
    c = montecarlo.sample_malaga(P1, RngStream(6, (1,)), 1000).values
    assert not np.array_equal(a, b) and not np.array_equal(a, c)


def test_stream_validation():
    with pytest.raises(ValueError):
        RngStream(-1)
    assert RngStream(3, 4).stream_id == (4,)
    assert RngStream(3, (4,)).child(0).stream_id == (4, 0)
    with pytest.raises(ValueError):
        montecarlo.sample_malaga(P1, RngStream(1), 0)


def test_sample_batch():
    b = SampleBatch([1, 2, 3], {"generator": "x"})
    assert b.n == 3 and b.values.dtype == float


# -- irradiance and pointing -------------------------------------------------------

def test_malaga_sample_mean():
    x = montecarlo.sample_malaga(P1, RngStream(2024, (20,)), N).values
    se = x.std(ddof=1) / math.sqrt(N)
    assert within(x.mean(), se, 1.5423)
    assert (x >= 0).all()


def test_gamma_gamma_branch_distribution():
    # rho = 1: the scatter term vanishes and the product of two Gammas remains
    p = MalagaParams(4.2, 3, rho=1.0, omega=1.0, b0=0.0)
    x = montecarlo.sample_malaga(p, RngStream(2024, (21,)), 200_000).values
    cdf, total = tabulated_cdf(lambda v: gamma_gamma_pdf(4.2, 3, 1.0, v), 1e-8, 50.0)
    assert total == pytest.approx(1.0, abs=1e-7)
    assert sstats.kstest(x, cdf).pvalue > 0.01


def test_pointing_support_and_mean():
    pe = PointingError(1.7, A0=0.8)
    x = montecarlo.sample_pointing(pe, RngStream(2024, (22,)), N).values
    assert x.min() > 0 and x.max() <= 0.8
    se = x.std(ddof=1) / math.sqrt(N)
    assert within(x.mean(), se, pe.mean_loss())


def test_pointing_uniform_at_unit_xi():
    x = montecarlo.sample_pointing(PointingError(1.0, A0=0.5), RngStream(2024, (23,)), 200_000).values
    assert sstats.kstest(x / 0.5, "uniform").pvalue > 0.01


def test_pointing_negligible_is_constant():
    x = montecarlo.sample_pointing(PointingError.negligible(0.9), RngStream(1), 100).values
    assert (x == 0.9).all()


# -- SNR ------------------------------------------------------------------------------

def test_heterodyne_snr_mean():
    ch = malaga("p2", 6.7, 1, db=10.0)
    g = montecarlo.sample_snr(ch, RngStream(2024, (24,)), N).values
    assert within(g.mean(), g.std(ddof=1) / math.sqrt(N), ch.mu)


def test_imdd_snr_mean_and_moment_ratio():
    ch = malaga("p1", 1.0, 2, db=10.0)
    g = montecarlo.sample_snr(ch, RngStream(2024, (25,)), N).values
    assert within(g.mean(), g.std(ddof=1) / math.sqrt(N), stats.moment(ch, 1))
    # the irradiance moment ratio rebuilds E[gamma] from mu
    x = (g / ch.mu) ** 0.5
    assert ch.mu * np.mean(x * x) / np.mean(x) ** 2 == pytest.approx(stats.moment(ch, 1), rel=0.01)


@pytest.mark.parametrize("r", [1, 2])
def test_empirical_cdf_at_mu(r):
    ch = malaga("p3", 6.7, r, db=5.0)
    g = montecarlo.sample_snr(ch, RngStream(2024, (26, r)), N).values
    p = np.mean(g < ch.mu)
    assert within(p, math.sqrt(p * (1 - p) / N), stats.cdf_snr(ch, ch.mu))


def test_snr_tags():
    ch = malaga()
    tags = montecarlo.sample_snr(ch, RngStream(9, (1, 2)), 10).tags
    assert tags["stream"] == "1.2" and tags["r"] == 2 and tags["alpha"] == 2.296


# -- estimators --------------------------------------------------------------------------

def test_outage_estimate():
    ch = malaga("p1", 1.0, 2, db=15.0)
    est, se = montecarlo.empirical_metric("op", ch, RngStream(2024, (27,)), N, gamma_th=1.0)
    assert within(est, se, metrics.outage_probability(ch, 1.0))


def test_dbpsk_estimate():
    ch = malaga("p2", 1.0, 1, db=10.0)
    dbpsk = BinaryModulation.get("dbpsk")
    est, se = montecarlo.empirical_metric("ber", ch, RngStream(2024, (28,)), N, mod=dbpsk)
    assert within(est, se, metrics.ber_binary(ch, dbpsk))


def test_imdd_capacity_not_below_bound():
    ch = malaga("p1", 1.0, 2, db=10.0)
    est, se = montecarlo.empirical_metric("capacity", ch, RngStream(2024, (29,)), N)
    assert est >= metrics.ergodic_capacity(ch) - 3 * se


def test_scintillation_estimate():
    ch = malaga("p1", 1.0, 1)
    est, se = montecarlo.empirical_metric("si", ch, RngStream(2024, (30,)), N)
    assert within(est, se, metrics.scintillation_index(ch))


def test_estimator_errors():
    ch = malaga()
    with pytest.raises(ValueError):
        montecarlo.empirical_metric("op", ch, RngStream(1), 9_999)
    with pytest.raises(ValueError):
        montecarlo.empirical_metric("ber", ch, RngStream(1), 10_000)
    with pytest.raises(ValueError):
        montecarlo.empirical_metric("ser", ch, RngStream(1), 10_000)
    with pytest.raises(ValueError):
        montecarlo.empirical_metric("mgf", ch, RngStream(1), 10_000)


def test_conditional_error_forms():
    g = np.array([0.0, 0.3, 2.0, 9.0])
    ber = montecarlo.conditional_ber(g, BinaryModulation.get("cbpsk"))
    two_psk = montecarlo.conditional_ser(g, MAryScheme("MPSK", 2))
    assert ber == pytest.approx(two_psk, rel=1e-14)
    four_psk = montecarlo.conditional_ser(g, MAryScheme("MPSK", 4))
    four_qam = montecarlo.conditional_ser(g, MAryScheme("MQAM", 4))
    assert four_psk == pytest.approx(four_qam, rel=1e-12)
    assert montecarlo.conditional_ser(np.array([0.0]), MAryScheme("MAM", 4))[0] == 0.75


# -- export -------------------------------------------------------------------------------

def test_export_csv(tmp_path):
    rng = RngStream(2024, (31,))
    ia = montecarlo.sample_malaga(P1, rng.child(0), 50)
    ip = montecarlo.sample_pointing(PointingError(1.0), rng.child(1), 50)
    path = tmp_path / "samples.csv"
    montecarlo.export_csv(path, {"I_a": ia, "I_p": ip})
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# I_a: ") and "generator=malaga" in lines[0]
    assert "stream=31.0" in lines[0] and "xi=1.0" in lines[1]
    rows = list(csv.reader(lines[2:]))
    assert rows[0] == ["I_a", "I_p"] and len(rows) == 51
    assert np.array_equal(np.array([float(r[0]) for r in rows[1:]]), ia.values)
    with pytest.raises(ValueError):
        montecarlo.export_csv(path, {"a": ia, "b": SampleBatch(ip.values[:10])})
