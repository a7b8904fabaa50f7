import math

import numpy as np
import pytest
from scipy import stats

from igs_underlay.core import (ChannelMeans, EeConfig, PuConfig, SignalParams, SuConfig, paper_defaults,
                               su_rate)
from igs_underlay.design_acsi import algorithm_II
from igs_underlay.design_idlcsi import (avg_ee_acsi, avg_ee_dl, idl_decision_function,
                                        idl_signal_params, power_saving_probability, pu_outage_dl)
from igs_underlay.montecarlo import (CHUNK, McEstimate, SeedSpec, empirical_dl_metrics,
                                     empirical_ee_acsi, empirical_pu_outage, empirical_su_outage,
                                     sample_block, sample_channel_draw, uniform_block)
from igs_underlay.outage import pu_outage_proper_exact, su_outage_acsi

MEANS, PU, SU = paper_defaults()
EE = EeConfig(kappa_pa=5.0, p_c=1.0)


def test_seed_spec_validation():
    with pytest.raises(ValueError):
        SeedSpec(-1, 0)
    with pytest.raises(ValueError):
        SeedSpec(2**64, 0)
    with pytest.raises(ValueError):
        SeedSpec(0, -2)
    SeedSpec(2**64 - 1, 3)


def test_estimate_standard_error():
    e = McEstimate.from_count(250, 1000)
    assert e.estimate == 0.25 and e.std_err == pytest.approx(math.sqrt(0.25 * 0.75 / 1000))
    assert McEstimate.from_count(0, 10).agrees(0.0)
    assert not McEstimate.from_count(0, 10).agrees(1e-9)


def test_uniforms_in_open_interval():
    u = uniform_block(SeedSpec(3, 1), 0, 10**5)
    assert u.shape == (10**5, 9)
    assert u.min() > 0 and u.max() < 1


def test_draw_is_deterministic_and_indexable():
    s = SeedSpec(42, 5)
    a = sample_channel_draw(MEANS, s, 123456)
    assert a == sample_channel_draw(MEANS, s, 123456)
    block = sample_block(MEANS, s, 123450, 10)
    assert block.gamma_s[6] == a.gamma_s
    assert block.upsilon_p[1][6] == a.upsilon_p[1]
    assert sample_channel_draw(MEANS, SeedSpec(42, 6), 123456) != a


def test_block_independent_of_split():
    s = SeedSpec(9, 2)
    whole = uniform_block(s, 0, 1000)
    parts = np.vstack([uniform_block(s, 0, 333), uniform_block(s, 333, 667)])
    assert np.array_equal(whole, parts)


def test_sample_mean_of_gamma_s():
    d = sample_block(MEANS, SeedSpec(1, 0), 0, 10**6)
    assert abs(d.gamma_s.mean() - 100.0) <= 0.3


def test_gamma_p_distribution():
    d = sample_block(MEANS, SeedSpec(2, 0), 0, 10**6)
    res = stats.kstest(d.gamma_p[0], "expon", args=(0, MEANS.gamma_p_bar[0]))
    assert res.statistic < 0.002


def test_columns_are_uncorrelated():
    u = uniform_block(SeedSpec(4, 0), 0, 10**5)
    corr = np.corrcoef(u.T)
    assert np.max(np.abs(corr - np.eye(9))) < 0.02


def test_trivial_outage_estimates():
    s = SeedSpec(0, 0)
    assert empirical_su_outage(SignalParams(0.0, 0.0), MEANS, PU, SU, 10**4, s).estimate == 1.0
    assert empirical_su_outage(SignalParams(1.0, 0.5), MEANS, PU, SuConfig(r0_s=0.0), 10**4, s).estimate == 0.0


def test_su_outage_monte_carlo_at_reference():
    sig = SignalParams(1.0, 0.5)
    est = empirical_su_outage(sig, MEANS, PU, SU, 10**6, SeedSpec(20, 0))
    assert est.agrees(su_outage_acsi(sig, MEANS, PU, SU))


def test_pu_outage_textbook_case():
    means = ChannelMeans(MEANS.gamma_p_bar, MEANS.gamma_s_bar, MEANS.i_p_bar, MEANS.i_s_bar, 0.0)
    pu = PuConfig(r0_p=2.0)
    est = empirical_pu_outage(SignalParams(0.0, 0.0), means, pu, 1, 10**6, SeedSpec(21, 0))
    assert est.agrees(-math.expm1(-3.0 / means.gamma_p_bar[0]))


def test_pu_outage_proper_monte_carlo():
    sig = SignalParams(0.8, 0.0)
    est = empirical_pu_outage(sig, MEANS, PU, 2, 10**6, SeedSpec(22, 0))
    assert est.agrees(pu_outage_proper_exact(0.8, MEANS, PU, 2))


def test_ee_acsi_monte_carlo():
    sig = algorithm_II(PU, SU, MEANS).params
    est = empirical_ee_acsi(sig, MEANS, PU, SU, EE, 10**6, SeedSpec(23, 0))
    assert est.agrees(avg_ee_acsi(sig, MEANS, PU, SU, EE))


def test_reproducible_and_stream_dependent():
    sig = SignalParams(1.0, 0.5)
    a = empirical_su_outage(sig, MEANS, PU, SU, 10**5, SeedSpec(5, 0))
    assert a == empirical_su_outage(sig, MEANS, PU, SU, 10**5, SeedSpec(5, 0))
    b = empirical_su_outage(sig, MEANS, PU, SU, 10**5, SeedSpec(5, 1))
    assert a.estimate != b.estimate


@pytest.mark.slow
def test_variance_scales_inversely_with_n():
    sig = SignalParams(1.0, 0.5)
    p = su_outage_acsi(sig, MEANS, PU, SU)
    k = 20
    lo, hi = stats.chi2.ppf([5e-4, 1 - 5e-4], k - 1) / (k - 1)
    for n in (10**4, 10**5, 10**6):
        ests = [empirical_su_outage(sig, MEANS, PU, SU, n, SeedSpec(6, s)).estimate for s in range(k)]
        ratio = np.var(ests, ddof=1) / (p * (1 - p) / n)
        assert lo <= ratio <= hi


def test_count_independent_of_chunking():
    sig = SignalParams(1.0, 0.5)
    n = CHUNK + 12345
    est = empirical_su_outage(sig, MEANS, PU, SU, n, SeedSpec(8, 0))
    d = sample_block(MEANS, SeedSpec(8, 0), 0, n)
    assert est.estimate == np.count_nonzero(su_rate(d, PU, sig) < SU.r0_s) / n


def test_sample_count_validated():
    with pytest.raises(ValueError):
        empirical_su_outage(SignalParams(1.0, 0.0), MEANS, PU, SU, 0, SeedSpec())


# -- direct-link-aware SU ----------------------------------------------------------------

@pytest.fixture(scope="module")
def dl_reference():
    decide = idl_decision_function(PU, SU, MEANS)
    sig, _ = idl_signal_params(PU, SU, MEANS)
    m = empirical_dl_metrics(decide, MEANS, PU, SU, EE, 10**6, SeedSpec(30, 0))
    return sig, m


def test_dl_metrics_match_analytics(dl_reference):
    sig, m = dl_reference
    assert m.su_outage.agrees(su_outage_acsi(sig, MEANS, PU, SU))
    assert m.p_saving.agrees(power_saving_probability(sig, MEANS, SU))
    assert m.avg_ee.agrees(avg_ee_dl(sig, MEANS, PU, SU, EE))
    for i in (1, 2):
        assert m.pu_outage[i - 1].agrees(pu_outage_dl(sig, MEANS, PU, SU, i))


def test_dl_ee_gain_matches_saving(dl_reference):
    sig, m = dl_reference
    acsi = empirical_ee_acsi(sig, MEANS, PU, SU, EE, 10**6, SeedSpec(30, 0))
    gain = m.avg_ee.estimate / acsi.estimate
    target = 1.0 / (1.0 - m.p_saving.estimate)
    sigma = gain * math.sqrt((m.avg_ee.std_err / m.avg_ee.estimate) ** 2
                             + (acsi.std_err / acsi.estimate) ** 2
                             + (m.p_saving.std_err / (1 - m.p_saving.estimate)) ** 2)
    assert abs(gain - target) <= 3 * sigma


def test_dl_metrics_no_saving_when_rate_zero():
    su = SuConfig(r0_s=0.0)
    decide = idl_decision_function(PU, su, MEANS)
    m = empirical_dl_metrics(decide, MEANS, PU, su, EE, 10**5, SeedSpec(31, 0))
    assert m.p_saving.estimate == 0.0 and m.su_outage.estimate == 0.0


def test_dl_metrics_with_inner_draws():
    decide = idl_decision_function(PU, SU, MEANS)
    sig, _ = idl_signal_params(PU, SU, MEANS)
    m = empirical_dl_metrics(decide, MEANS, PU, SU, EE, 2 * 10**5, SeedSpec(32, 0), inner=4)
    assert m.su_outage.agrees(su_outage_acsi(sig, MEANS, PU, SU))
    assert m.avg_ee.agrees(avg_ee_dl(sig, MEANS, PU, SU, EE))
    again = empirical_dl_metrics(decide, MEANS, PU, SU, EE, 2 * 10**5, SeedSpec(32, 0), inner=4)
    assert again == m
    with pytest.raises(ValueError):
        empirical_dl_metrics(decide, MEANS, PU, SU, EE, 10, SeedSpec(), inner=0)
