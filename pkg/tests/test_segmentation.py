import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from starseg.errors import (
    EmptyInputError,
    InconsistentInputError,
    InsufficientLevelsError,
    InvalidLevelError,
)
from starseg.evaluation import ConfusionCounts, Metrics, confusion, f1_score, metrics
from starseg.segmentation import (
    SweepEntry,
    ThresholdPolicy,
    band_sum_map,
    binarize,
    detail_sum_map,
    score_map,
    segment,
    select_optimal_level,
    sweep_levels,
)
from starseg.starlet import smooth, starlet_decompose
from starseg.synth import SynthParams, generate

from oracles import otsu_exhaustive


@pytest.fixture(scope="module")
def sample7():
    # 300x300 so that the deepest swept level (8) fits the mirror margin
    return generate(SynthParams(width=300, height=300, blob_count=10, noise_sigma=0.05, seed=7))


def entry(level, p, r):
    return SweepEntry(level, ConfusionCounts(0, 0, 0, 1), Metrics(p, r, 0.0, f1_score(p, r)))


class TestScoreMaps:
    def test_constant_image(self):
        img = np.full((32, 32), 0.5)
        s = detail_sum_map(starlet_decompose(img, 3), img)
        np.testing.assert_allclose(s, -0.5, atol=1e-14)

    @pytest.mark.parametrize("seed,levels", [(0, 3), (1, 4), (2, 5)])
    def test_telescoping(self, seed, levels):
        img = np.random.default_rng(seed).random((48, 40))
        d = starlet_decompose(img, levels)
        expected = (d.smoothed(2) - d.residual) - img
        assert np.abs(detail_sum_map(d, img) - expected).max() <= 1e-10

    @pytest.mark.parametrize("size,levels", [(64, 5), (65, 6)])
    def test_compositional_oracle_single_blob(self, size, levels):
        # 64x64 supports at most L=5 with a 2**L mirror margin; 65x65 reaches L=6
        sample = generate(SynthParams(width=size, height=size, blob_count=1, radius_range=(6, 6), seed=42))
        img = sample.image
        c = [img]
        for j in range(1, levels + 1):
            c.append(smooth(c[-1], j))
        planes = [c[j - 1] - c[j] for j in range(1, levels + 1)]
        expected = sum(planes[2:]) - img
        d = starlet_decompose(img, levels)
        assert np.abs(detail_sum_map(d, img) - expected).max() <= 1e-10
        assert np.abs(band_sum_map(d) - (expected + img)).max() <= 1e-10

    def test_jmin_parameter(self):
        img = np.random.default_rng(3).random((32, 32))
        d = starlet_decompose(img, 4)
        np.testing.assert_allclose(band_sum_map(d, j_min=1), img - d.residual, atol=1e-12)

    def test_insufficient_levels(self):
        img = np.zeros((32, 32))
        with pytest.raises(InsufficientLevelsError):
            detail_sum_map(starlet_decompose(img, 2), img)

    def test_shape_mismatch(self):
        d = starlet_decompose(np.zeros((32, 32)), 3)
        with pytest.raises(InconsistentInputError):
            detail_sum_map(d, np.zeros((32, 33)))
        with pytest.raises(InconsistentInputError):
            score_map(d, np.zeros((31, 32)), score="band")

    def test_unknown_score(self):
        d = starlet_decompose(np.zeros((32, 32)), 3)
        with pytest.raises(ValueError):
            score_map(d, None, score="nope")


class TestBinarize:
    def test_otsu_two_levels(self):
        s = np.array([0.1] * 100 + [0.9] * 20).reshape(10, 12)
        m = binarize(s, "otsu")
        assert m.sum() == 20 and m[s == 0.9].all()
        np.testing.assert_array_equal(m, otsu_exhaustive(s))

    def test_otsu_constant(self):
        assert not binarize(np.full((5, 5), 3.0), "otsu").any()

    def test_positive(self):
        assert binarize(np.array([[-0.5, 0.2, 0.0]]), "positive").tolist() == [[False, True, False]]

    def test_fixed(self):
        s = np.array([[0.1, 0.5, 0.7]])
        assert binarize(s, ThresholdPolicy.fixed(0.5)).tolist() == [[False, False, True]]
        assert binarize(s, 0.05).all()

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, (9, 11), elements=st.floats(-5, 5, allow_nan=False, width=32)))
    def test_otsu_matches_exhaustive_search(self, s):
        np.testing.assert_array_equal(binarize(s, "otsu"), otsu_exhaustive(s))

    def test_otsu_random_matches_exhaustive(self):
        rng = np.random.default_rng(8)
        s = np.concatenate([rng.normal(0, 1, 300), rng.normal(4, 0.5, 60)]).reshape(18, 20)
        np.testing.assert_array_equal(binarize(s, "otsu"), otsu_exhaustive(s))

    @settings(max_examples=50)
    @given(
        arrays(np.int64, (8, 8), elements=st.integers(-64, 64)),
        st.integers(-4, 4),
        st.integers(-100, 100),
    )
    def test_otsu_affine_invariant(self, ints, log_a, b):
        # dyadic data and scale keep the normalization exact
        s = ints / 64.0
        a = 2.0 ** log_a
        np.testing.assert_array_equal(binarize(s, "otsu"), binarize(a * s + b, "otsu"))

    @given(
        arrays(np.float64, (6, 6), elements=st.floats(-1, 1, allow_nan=False)),
        st.floats(-1, 1),
        st.floats(-1, 1),
    )
    def test_fixed_antitone(self, s, t1, t2):
        lo, hi = sorted((t1, t2))
        assert not (binarize(s, hi) & ~binarize(s, lo)).any()

    @pytest.mark.parametrize("text,expected", [
        ("otsu", ThresholdPolicy("otsu")),
        ("positive", ThresholdPolicy("positive")),
        ("fixed:0.25", ThresholdPolicy("fixed", 0.25)),
        ("-1", ThresholdPolicy("fixed", -1.0)),
    ])
    def test_policy_parse(self, text, expected):
        assert ThresholdPolicy.parse(text) == expected

    @pytest.mark.parametrize("bad", ["median", "fixed:nan", "fixed:"])
    def test_policy_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            ThresholdPolicy.parse(bad)


class TestSegment:
    def test_constant_image_empty(self):
        assert not segment(np.full((40, 40), 0.3), 4).any()

    def test_level_below_jmin(self):
        with pytest.raises(InsufficientLevelsError):
            segment(np.zeros((32, 32)), 2)

    def test_synthetic_seed7(self, sample7):
        sample = sample7
        mask = segment(sample.image, 6, "otsu")
        assert metrics(confusion(mask, sample.truth)).accuracy >= 0.85

    def test_literal_score_mode_is_wired(self):
        img = generate(SynthParams(width=64, height=64, blob_count=3, seed=1)).image
        d = starlet_decompose(img, 5)
        expected = binarize(detail_sum_map(d, img), "otsu")
        np.testing.assert_array_equal(segment(img, 5, score="band_minus_input"), expected)

    def test_deterministic(self):
        img = generate(SynthParams(width=64, height=64, blob_count=4, seed=3)).image
        assert segment(img, 5).tobytes() == segment(img, 5).tobytes()


class TestSweep:
    def test_single_level(self, sample7):
        result = sweep_levels(sample7.image, sample7.truth, 5, 5)
        assert [e.level for e in result] == [5]
        assert result.capped_at is None

    def test_matches_per_level_recomputation(self, sample7):
        result = sweep_levels(sample7.image, sample7.truth, 3, 8)
        assert [e.level for e in result] == list(range(3, 9))
        for e in result:
            mask = segment(sample7.image, e.level, "otsu")
            c = confusion(mask, sample7.truth)
            assert e.counts == c
            assert e.metrics == metrics(c)

    def test_cap_for_small_image(self):
        s = generate(SynthParams(width=32, height=32, blob_count=2, radius_range=(3, 4), seed=5))
        result = sweep_levels(s.image, s.truth, 3, 10)
        assert [e.level for e in result] == [3, 4]
        assert result.capped_at == 4
        assert result.requested == (3, 10)

    def test_nothing_fits(self):
        with pytest.raises(InvalidLevelError):
            sweep_levels(np.zeros((12, 12)), np.zeros((12, 12), bool), 4, 6)

    def test_shape_mismatch(self):
        with pytest.raises(InconsistentInputError):
            sweep_levels(np.zeros((32, 32)), np.zeros((32, 31), bool))

    def test_range_below_jmin(self):
        with pytest.raises(InsufficientLevelsError):
            sweep_levels(np.zeros((32, 32)), np.zeros((32, 32), bool), 2, 4)


class TestSelect:
    def test_reported_pair(self):
        # L=6: P=26.89%, R=62.13%; L=7: P=28.49%, R=89.02%
        sweep = [entry(6, 0.2689, 0.6213), entry(7, 0.2849, 0.8902)]
        assert f1_score(0.2689, 0.6213) == pytest.approx(0.37535, abs=1e-5)
        assert f1_score(0.2849, 0.8902) == pytest.approx(0.43165, abs=1e-5)
        assert select_optimal_level(sweep) == 7

    def test_singleton(self):
        assert select_optimal_level([entry(4, 0.3, 0.3)]) == 4

    def test_tie_prefers_smaller(self):
        assert select_optimal_level([entry(8, 0.5, 0.6), entry(5, 0.5, 0.6)]) == 5

    def test_zero_f1(self):
        assert select_optimal_level([entry(9, 0, 0), entry(3, 0, 0)]) == 3

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            select_optimal_level([])

    @settings(max_examples=30)
    @given(st.lists(st.tuples(st.integers(3, 10), st.floats(0, 1), st.floats(0, 1)),
                    min_size=1, max_size=6, unique_by=lambda t: t[0]))
    def test_permutation_invariant(self, raw):
        entries = [entry(*t) for t in raw]
        chosen = select_optimal_level(entries)
        for perm in itertools.islice(itertools.permutations(entries), 24):
            assert select_optimal_level(list(perm)) == chosen
