"""Tests for seeded streams and the truncated competence distributions.

Distribution correctness is checked against independent oracles:
Kolmogorov-Smirnov tests against the analytic CDFs and a quadrature
oracle for the truncated-exponential mean.
"""

import hashlib

import numpy as np
import pytest
import scipy.integrate
import scipy.stats

from jurysim import (
    DomainError,
    SeedSpec,
    TruncExp,
    TruncNormal,
    Uniform,
    parse_distribution,
    sample,
)

N_BIG = 100_000
KS_ALPHA = 1e-3


class TestSeedSpec:
    def test_identical_streams_replay(self):
        a = sample(Uniform(0.001, 0.999), SeedSpec(42, 3), 1000)
        b = sample(Uniform(0.001, 0.999), SeedSpec(42, 3), 1000)
        np.testing.assert_array_equal(a, b)

    def test_distinct_streams_share_no_prefix(self):
        digests = set()
        for stream in range(64):
            draw = sample(Uniform(0.001, 0.999), SeedSpec(7, stream), 100)
            digests.add(hashlib.sha256(draw.tobytes()).hexdigest())
        assert len(digests) == 64

    def test_distinct_master_seeds_differ(self):
        a = sample(Uniform(0.001, 0.999), SeedSpec(1), 100)
        b = sample(Uniform(0.001, 0.999), SeedSpec(2), 100)
        assert not np.array_equal(a, b)

    def test_negative_stream_rejected(self):
        with pytest.raises(DomainError):
            SeedSpec(1, -1)


class TestSpecValidation:
    def test_bounds_must_order(self):
        with pytest.raises(DomainError):
            Uniform(0.9, 0.1)
        with pytest.raises(DomainError):
            Uniform(-0.1, 0.5)
        with pytest.raises(DomainError):
            Uniform(0.2, 1.1)

    def test_positive_shape_parameters(self):
        with pytest.raises(DomainError):
            TruncNormal(0.5, 0.0, 0.1, 0.9)
        with pytest.raises(DomainError):
            TruncExp(0.0, 0.1, 0.9)

    def test_count_nonnegative(self):
        with pytest.raises(DomainError):
            sample(Uniform(0.1, 0.9), SeedSpec(0), -1)
        assert sample(Uniform(0.1, 0.9), SeedSpec(0), 0).size == 0


class TestSupport:
    @pytest.mark.parametrize(
        "spec",
        [
            Uniform(0.001, 0.999),
            Uniform(0.5, 0.5 + 1e-6),
            TruncNormal(0.5, 0.3, 0.001, 0.999),
            TruncNormal(0.9, 0.05, 0.501, 0.999),
            TruncExp(1.0, 0.001, 0.999),
            TruncExp(4.0, 0.501, 0.999, mirror=True),
        ],
    )
    def test_samples_stay_inside(self, spec):
        draw = sample(spec, SeedSpec(11, 5), 20_000)
        assert np.all(draw >= spec.lo)
        assert np.all(draw <= spec.hi)
        assert np.all(draw > 0.0) and np.all(draw < 1.0)

    def test_full_unit_interval_is_clamped_open(self):
        draw = sample(Uniform(0.0, 1.0), SeedSpec(3), 50_000)
        assert np.all(draw > 0.0) and np.all(draw < 1.0)


class TestDistributionShapes:
    def test_truncnormal_symmetric_mean(self):
        draw = sample(TruncNormal(0.5, 0.1, 0.001, 0.999), SeedSpec(21), N_BIG)
        assert draw.mean() == pytest.approx(0.5, abs=0.002)

    def test_truncexp_mean_matches_quadrature(self):
        spec = TruncExp(1.0, 0.001, 0.999)
        norm = 1.0 - np.exp(-spec.b)
        mean_x, _ = scipy.integrate.quad(
            lambda x: x * np.exp(-x) / norm, 0.0, spec.b
        )
        expected = spec.lo + (mean_x / spec.b) * (spec.hi - spec.lo)
        draw = sample(spec, SeedSpec(22), N_BIG)
        se = draw.std(ddof=1) / np.sqrt(N_BIG)
        assert abs(draw.mean() - expected) <= 3 * se

    def test_truncexp_mass_sits_near_lo(self):
        draw = sample(TruncExp(3.0, 0.001, 0.999), SeedSpec(23), N_BIG)
        assert np.mean(draw < 0.5) > 0.6

    def test_mirrored_truncexp_mass_sits_near_hi(self):
        draw = sample(TruncExp(3.0, 0.001, 0.999, mirror=True), SeedSpec(23), N_BIG)
        assert np.mean(draw > 0.5) > 0.6

    def test_mirror_is_the_reflected_draw(self):
        plain = sample(TruncExp(2.0, 0.1, 0.9), SeedSpec(5), 5000)
        mirrored = sample(TruncExp(2.0, 0.1, 0.9, mirror=True), SeedSpec(5), 5000)
        np.testing.assert_allclose(mirrored, 1.0 - plain, rtol=0, atol=1e-12)


class TestGoodnessOfFit:
    @pytest.mark.parametrize(
        "spec",
        [
            Uniform(0.001, 0.999),
            Uniform(0.501, 0.999),
            TruncNormal(0.5, 0.1, 0.001, 0.999),
            TruncNormal(0.5, 0.3, 0.001, 0.999),
            TruncExp(1.0, 0.001, 0.999),
            TruncExp(1.0, 0.501, 0.999),
            TruncExp(2.0, 0.501, 0.999, mirror=True),
        ],
        ids=lambda s: s.spec_string(),
    )
    def test_kolmogorov_smirnov(self, spec):
        draw = sample(spec, SeedSpec(31, 9), N_BIG)
        result = scipy.stats.kstest(draw, spec.cdf)
        assert result.pvalue > KS_ALPHA

    def test_truncnormal_cdf_against_scipy(self):
        spec = TruncNormal(0.5, 0.2, 0.1, 0.9)
        a = (spec.lo - spec.mean) / spec.sigma
        b = (spec.hi - spec.mean) / spec.sigma
        xs = np.linspace(0.05, 0.95, 50)
        np.testing.assert_allclose(
            spec.cdf(xs),
            scipy.stats.truncnorm.cdf(xs, a, b, loc=spec.mean, scale=spec.sigma),
            atol=1e-12,
        )


class TestParseDistribution:
    def test_round_trips(self):
        for text in (
            "uniform:0.001:0.999",
            "truncnormal:0.5:0.1:0.001:0.999",
            "truncexp:1:0.501:0.999",
            "truncexp:2:0.1:0.9:mirror",
        ):
            spec = parse_distribution(text)
            again = parse_distribution(spec.spec_string())
            assert again == spec

    def test_mirror_flag(self):
        spec = parse_distribution("truncexp:1:0.1:0.9", mirror_exp=True)
        assert spec.mirror

    @pytest.mark.parametrize(
        "bad",
        ["uniform:0.1", "gauss:1:2", "truncnormal:a:b:c:d", "truncexp:1:0.9:0.1"],
    )
    def test_rejects_malformed(self, bad):
        with pytest.raises(DomainError):
            parse_distribution(bad)
