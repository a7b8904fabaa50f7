import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from igs_underlay.core import (ChannelDraw, ChannelMeans, EeConfig, PuConfig, RateThresholds,
                               SignalParams, SuConfig, circularity_coefficients, db_to_linear,
                               linear_to_db, other, paper_defaults, pu_rate, rate_threshold,
                               su_rate)

from oracles import pu_rate_unsimplified, su_rate_direct

PU = PuConfig()


def draw(gp=(1.0, 1.0), gs=1.0, ip=(0.0, 0.0), is_=(0.0, 0.0), ups=(0.0, 0.0)):
    return ChannelDraw(gamma_p=gp, gamma_s=gs, i_p=ip, i_s=is_, upsilon_p=ups)


def random_draw(rng):
    return draw(tuple(rng.exponential(300, 2)), rng.exponential(100), tuple(rng.exponential(2, 2)),
                tuple(rng.exponential(20, 2)), tuple(rng.exponential(3, 2)))


@pytest.mark.parametrize("x_db, expected", [(0.0, 1.0), (3.0, 10**0.3), (25.0, 10**2.5)])
def test_db_to_linear(x_db, expected):
    assert db_to_linear(x_db) == pytest.approx(expected, rel=1e-15)
    assert linear_to_db(db_to_linear(x_db)) == pytest.approx(x_db, abs=1e-12)


def test_db_to_linear_rounded_values():
    assert db_to_linear(3.0) == pytest.approx(1.9953, abs=5e-5)
    assert db_to_linear(25.0) == pytest.approx(316.228, abs=5e-4)


def test_partner_index():
    assert other(1) == 2 and other(2) == 1
    with pytest.raises(ValueError):
        other(3)


def test_paper_defaults_units():
    means, pu, su = paper_defaults()
    assert means.gamma_p_bar == pytest.approx((10**2.5, 10**2.5))
    assert means.gamma_s_bar == pytest.approx(100.0)
    assert means.i_s_bar[0] == pytest.approx(10**1.3)
    assert pu.o_p == (0.01, 0.01) and su.p_s_max == 1.0 and su.r0_s == 0.5


@pytest.mark.parametrize("kwargs", [
    dict(gamma_p_bar=-1.0), dict(gamma_s_bar=0.0), dict(i_p_bar=(1.0, math.inf)),
    dict(i_s_bar=(0.0, 1.0)), dict(upsilon_p_bar=-0.1),
])
def test_channel_means_rejects_bad_values(kwargs):
    base = dict(gamma_p_bar=1.0, gamma_s_bar=1.0, i_p_bar=1.0, i_s_bar=1.0, upsilon_p_bar=1.0)
    base.update(kwargs)
    with pytest.raises(ValueError):
        ChannelMeans(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        PuConfig(o_p=1.5)
    with pytest.raises(ValueError):
        PuConfig(p=0.0)
    with pytest.raises(ValueError):
        SuConfig(r0_s=-0.1)
    with pytest.raises(ValueError):
        SignalParams(1.0, 1.2)
    with pytest.raises(ValueError):
        SignalParams(-1.0, 0.0)
    with pytest.raises(ValueError):
        EeConfig(kappa_pa=0.0)


def test_rate_thresholds():
    rt = RateThresholds.from_configs(PuConfig(r0_p=(0.5, 1.0)), SuConfig(r0_s=1.5))
    assert rt.gamma_s_thr == pytest.approx(7.0)
    assert rt.gamma_p_thr == pytest.approx((1.0, 3.0))


@pytest.mark.parametrize("r", np.round(np.arange(0.1, 4.0001, 0.1), 10))
def test_threshold_identity(r):
    assert abs((math.sqrt(1 + rate_threshold(r)) - 1) - (2**r - 1)) <= 1e-12


def test_pu_rate_trivial():
    d = draw(gp=(1.0, 1.0))
    assert pu_rate(d, PU, SignalParams(0.0, 0.0), 1) == pytest.approx(1.0, abs=1e-15)


def test_pu_rate_proper_matches_log_sinr():
    rng = np.random.default_rng(1)
    for _ in range(50):
        d = random_draw(rng)
        sig = SignalParams(rng.uniform(0, 3), 0.0)
        for i in (1, 2):
            j = 3 - i
            ref = math.log2(1 + PU.p[i - 1] * d.gamma_p[i - 1]
                            / (PU.p[j - 1] * d.upsilon_p[j - 1] + sig.p_s * d.i_s[j - 1] + 1))
            assert pu_rate(d, PU, sig, i) == pytest.approx(ref, abs=1e-12)
            ref3 = pu_rate_unsimplified(d.gamma_p[i - 1], d.upsilon_p[j - 1], d.i_s[j - 1],
                                        PU.p[i - 1], PU.p[j - 1], sig.p_s, 0.0)
            assert abs(pu_rate(d, PU, sig, i) - ref3) <= 1e-12


def test_pu_rate_improper_matches_unsimplified_form():
    rng = np.random.default_rng(2)
    for _ in range(100):
        d = random_draw(rng)
        sig = SignalParams(rng.uniform(0, 3), 0.5)
        for i in (1, 2):
            j = 3 - i
            ref = pu_rate_unsimplified(d.gamma_p[i - 1], d.upsilon_p[j - 1], d.i_s[j - 1],
                                       PU.p[i - 1], PU.p[j - 1], sig.p_s, sig.c_x)
            assert pu_rate(d, PU, sig, i) == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_su_rate_trivial_cases():
    assert su_rate(draw(gs=5.0), PU, SignalParams(0.0, 0.3)) == 0.0
    assert su_rate(draw(gs=3.0), PU, SignalParams(1.0, 0.0)) == pytest.approx(2.0, abs=1e-15)


def test_su_rate_matches_direct_formula():
    means, pu, _ = paper_defaults()
    rng = np.random.default_rng(3)
    for _ in range(50):
        d = random_draw(rng)
        sig = SignalParams(rng.uniform(0, 2), 0.5)
        ref = su_rate_direct(d.gamma_s, d.i_p[0], d.i_p[1], pu.p[0], pu.p[1], sig.p_s, sig.c_x)
        assert su_rate(d, pu, sig) == pytest.approx(ref, rel=1e-13)


def test_su_rate_proper_is_log_sinr():
    d = draw(gs=40.0, ip=(2.0, 3.0))
    sinr = 1.5 * 40.0 / (1 + 2.0 + 3.0)
    assert su_rate(d, PU, SignalParams(1.5, 0.0)) == pytest.approx(math.log2(1 + sinr), abs=1e-12)


def test_rate_monotonicity_in_circularity():
    rng = np.random.default_rng(4)
    grid = np.linspace(0, 1, 101)
    for _ in range(30):
        d = random_draw(rng)
        p_s = rng.uniform(0.1, 3)
        su_r = [su_rate(d, PU, SignalParams(p_s, c)) for c in grid]
        assert np.all(np.diff(su_r) <= 1e-12)
        for i in (1, 2):
            pu_r = [pu_rate(d, PU, SignalParams(p_s, c), i) for c in grid]
            assert np.all(np.diff(pu_r) >= -1e-12)


def test_circularity_coefficients_trivial():
    rng = np.random.default_rng(5)
    d = random_draw(rng)
    assert circularity_coefficients(d, PU, SignalParams(1.0, 0.0), 1) == (0.0, 0.0)
    assert circularity_coefficients(d, PU, SignalParams(0.0, 0.7), 2) == (0.0, 0.0)


def test_circularity_coefficients_limit():
    d = draw(gp=(1e-12, 1e-12), is_=(1e6, 1e6), ups=(0.0, 0.0))
    c_y, c_i = circularity_coefficients(d, PU, SignalParams(1.0, 1.0), 1)
    assert c_y == pytest.approx(1.0, abs=2e-6)
    assert c_i == pytest.approx(1.0, abs=2e-6)


def test_rates_broadcast_over_arrays():
    rng = np.random.default_rng(6)
    ds = [random_draw(rng) for _ in range(5)]
    batch = ChannelDraw(
        gamma_p=tuple(np.array([d.gamma_p[k] for d in ds]) for k in (0, 1)),
        gamma_s=np.array([d.gamma_s for d in ds]),
        i_p=tuple(np.array([d.i_p[k] for d in ds]) for k in (0, 1)),
        i_s=tuple(np.array([d.i_s[k] for d in ds]) for k in (0, 1)),
        upsilon_p=tuple(np.array([d.upsilon_p[k] for d in ds]) for k in (0, 1)),
    )
    sig = SignalParams(0.7, 0.4)
    assert np.allclose(su_rate(batch, PU, sig), [su_rate(d, PU, sig) for d in ds], rtol=1e-15)
    assert np.allclose(pu_rate(batch, PU, sig, 2), [pu_rate(d, PU, sig, 2) for d in ds], rtol=1e-15)


pos = st.floats(0.0, 1e4, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(gp=pos, ups=pos, is_=pos, p_s=st.floats(0, 10), c_x=st.floats(0, 1))
def test_circularity_ordering(gp, ups, is_, p_s, c_x):
    d = draw(gp=(gp, gp), is_=(is_, is_), ups=(ups, ups))
    c_y, c_i = circularity_coefficients(d, PU, SignalParams(p_s, c_x), 1)
    assert 0.0 <= c_y <= c_i <= c_x + 1e-15


@settings(max_examples=300, deadline=None)
@given(gs=pos, ip=pos, p_s=st.floats(0, 10), c_x=st.floats(0, 1))
def test_su_rate_non_negative(gs, ip, p_s, c_x):
    assert su_rate(draw(gs=gs, ip=(ip, ip)), PU, SignalParams(p_s, c_x)) >= 0.0
