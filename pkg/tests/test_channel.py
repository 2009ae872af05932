import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from plcrelay.channel import (
    ZETA,
    AttenuationParams,
    FadingParams,
    LinkSpec,
    NoiseParams,
    attenuation,
    db_to_linear,
    erf,
    erfinv,
    linear_to_db,
    lognormal_sq_cdf,
    noise_threshold,
    q_function,
    sample_channel_gain_sq,
)

# mpmath, 40 digits: exp(-100 (9.4e-3 + 4.2e-7 * 30**0.7))
ATT_100M = 0.3904504577749752079430341270029581482323
# mpmath quadrature of the log-normal density of h^2 (mu=3, sigma=sqrt 2) over (0, 1]
CDF_AT_ONE = 0.01694742676234463646651186917702607065929
# mpmath: 2 * (1 + 10**1.5 / 10**-2.5) ** 0.01
THRESHOLD_DEFAULTS = 2.192958585134218171273392423429347761797


class TestAttenuation:
    def test_zero_distance(self, att):
        assert attenuation(att, 0.0) == 1.0

    def test_published_constants(self, att):
        assert attenuation(att, 100.0) == pytest.approx(ATT_100M, rel=1e-14)
        assert att.alpha == pytest.approx(9.4e-3 + 4.5e-6, rel=1e-4)

    @pytest.mark.parametrize("x", [1, 2, 5])
    def test_matches_extended_precision_exp(self, x):
        params = AttenuationParams(a0=0.01, a1=0.0)
        expected = float(mpmath.exp(-mpmath.mpf(x)))
        assert attenuation(params, x / 0.01) == pytest.approx(expected, rel=1e-14)

    def test_rejects_negative_distance(self, att):
        with pytest.raises(ValueError):
            attenuation(att, -1.0)

    def test_hz_unit_attenuates_much_more(self):
        hz = AttenuationParams(f_unit="Hz")
        assert hz.alpha > 1e-2
        assert linear_to_db(attenuation(hz, 400.0)) < -100

    @pytest.mark.parametrize("kwargs", [dict(a0=-1), dict(a1=-1), dict(f=0), dict(k=0),
                                        dict(f_unit="GHz"), dict(a0=0, a1=0)])
    def test_invalid_params(self, kwargs):
        with pytest.raises(ValueError):
            AttenuationParams(**kwargs)

    @given(d1=st.floats(0, 2000), d2=st.floats(0, 2000))
    def test_multiplicative_over_distance(self, d1, d2):
        a = AttenuationParams()
        assert attenuation(a, d1 + d2) == pytest.approx(
            attenuation(a, d1) * attenuation(a, d2), rel=1e-12)


class TestNoise:
    def test_derived_variances(self, noise):
        assert noise.background_variance == pytest.approx(10 ** -2.5)
        assert noise.impulsive_variance == pytest.approx(10 ** 1.5)
        assert noise.beta == pytest.approx(1 + 1e4)

    def test_no_impulses_gives_beta_one(self):
        assert NoiseParams(sinr_db=math.inf).beta == 1.0

    def test_invalid(self):
        with pytest.raises(ValueError):
            NoiseParams(p=1.5)
        with pytest.raises(ValueError):
            NoiseParams(sbnr_db=math.nan)

    def test_threshold_trivial_cases(self):
        assert noise_threshold(NoiseParams(p=0.0), 1.0) == 2.0
        assert noise_threshold(NoiseParams(p=0.5, sinr_db=math.inf), 2.0) == 4.0

    def test_threshold_defaults(self, noise):
        assert noise_threshold(noise, 1.0) == pytest.approx(THRESHOLD_DEFAULTS, rel=1e-14)

    def test_threshold_rejects_nonpositive_xi(self, noise):
        with pytest.raises(ValueError):
            noise_threshold(noise, 0.0)

    @given(p1=st.floats(0, 1), p2=st.floats(0, 1), s1=st.floats(-30, 30), s2=st.floats(-30, 30),
           x1=st.floats(0.1, 8), x2=st.floats(0.1, 8))
    def test_threshold_monotone(self, p1, p2, s1, s2, x1, x2):
        # larger p, larger impulsive variance (smaller SINR) or larger xi never lowers it
        lo = NoiseParams(p=min(p1, p2), sinr_db=max(s1, s2))
        hi = NoiseParams(p=max(p1, p2), sinr_db=min(s1, s2))
        assert noise_threshold(lo, min(x1, x2)) <= noise_threshold(hi, max(x1, x2))


def test_db_roundtrip():
    for v in (1e-6, 0.5, 1.0, 123.0):
        assert db_to_linear(linear_to_db(v)) == pytest.approx(v, rel=1e-15)
    with pytest.raises(ValueError):
        linear_to_db(0.0)


class TestLognormalCdf:
    def test_median(self, fading):
        x = 10 ** (2 * fading.mu / 10)
        assert lognormal_sq_cdf(x, fading) == pytest.approx(0.5, abs=1e-15)

    def test_quadrature_oracle(self, fading):
        assert lognormal_sq_cdf(1.0, fading) == pytest.approx(CDF_AT_ONE, rel=1e-12)

    def test_erf_and_q_forms_agree(self):
        xs = np.geomspace(1e-6, 1e6, 2001)
        for fad in (FadingParams(3, math.sqrt(2)), FadingParams(0, 1), FadingParams(6, 4)):
            arg = ZETA * np.log(xs) - 2 * fad.mu
            erf_form = 0.5 + 0.5 * erf(arg / (math.sqrt(8) * fad.sigma))
            q_form = 1.0 - q_function(arg / (2 * fad.sigma))
            assert np.max(np.abs(erf_form - lognormal_sq_cdf(xs, fad))) <= 1e-14
            assert np.max(np.abs(q_form - lognormal_sq_cdf(xs, fad))) <= 1e-14

    def test_strictly_increasing_with_limits(self, fading):
        xs = np.geomspace(1e-3, 1e2, 500)
        assert np.all(np.diff(lognormal_sq_cdf(xs, fading)) > 0)
        assert lognormal_sq_cdf(1e-300, fading) < 1e-100
        assert lognormal_sq_cdf(1e300, fading) == 1.0

    def test_rejects_nonpositive(self, fading):
        with pytest.raises(ValueError):
            lognormal_sq_cdf(0.0, fading)
        with pytest.raises(ValueError):
            lognormal_sq_cdf(np.array([1.0, -1.0]), fading)

    def test_empirical_quantiles(self, fading):
        n = 10 ** 6
        samples = sample_channel_gain_sq(fading, np.random.default_rng(11), n)
        for q in (0.05, 0.25, 0.5, 0.75, 0.95):
            x = float(np.quantile(samples, q))
            empirical = np.mean(samples <= x)
            model = lognormal_sq_cdf(x, fading)
            assert abs(empirical - model) <= 3 * math.sqrt(model * (1 - model) / n)


class TestSampler:
    def test_degenerate_sigma(self):
        fad = FadingParams(3.0, 1e-300)
        s = sample_channel_gain_sq(fad, np.random.default_rng(0), 1000)
        assert np.allclose(s, 10 ** (3.0 / 5), rtol=1e-15)

    def test_moments_of_db_value(self, fading):
        n = 10 ** 6
        s = sample_channel_gain_sq(fading, np.random.default_rng(5), n)
        db = 10 * np.log10(np.sqrt(s))
        assert np.all(s > 0)
        assert abs(db.mean() - fading.mu) <= 3 * fading.sigma / math.sqrt(n)
        assert db.var() == pytest.approx(fading.sigma ** 2, rel=0.05)

    def test_replay(self, fading):
        a = sample_channel_gain_sq(fading, np.random.default_rng(9), 10)
        b = sample_channel_gain_sq(fading, np.random.default_rng(9), 10)
        assert np.array_equal(a, b)

    def test_ks_against_cdf(self, fading):
        s = sample_channel_gain_sq(fading, np.random.default_rng(2024), 10 ** 5)
        res = stats.kstest(s, lambda x: lognormal_sq_cdf(x, fading))
        assert res.pvalue > 0.01


class TestErf:
    def test_erf_against_mpmath(self):
        for x in np.linspace(-6, 6, 121):
            assert abs(float(erf(x)) - float(mpmath.erf(x))) <= 1e-12

    @settings(max_examples=300)
    @given(y=st.floats(-1 + 1e-9, 1 - 1e-9))
    def test_erfinv_roundtrip(self, y):
        assert abs(float(erf(erfinv(y))) - y) <= 1e-10


def test_link_spec_validation(fading):
    with pytest.raises(ValueError):
        LinkSpec(0.0, fading)
    with pytest.raises(ValueError):
        FadingParams(3.0, 0.0)
