"""Target distribution, parameter optimisation and matcher inverses."""

import numpy as np
import pytest

from pasbicm.analysis import binary_entropy, required_snr
from pasbicm.constellation import AskConstellation, SubConstellation
from pasbicm.shaping import (
    CcdmMatcher,
    CompositionError,
    MatcherUnderflowError,
    ShapingParams,
    export_params,
    full_alphabet_distribution,
    induce_distribution,
    optimize_params,
)

SUB16 = SubConstellation(AskConstellation(4))
PAPER = ShapingParams((0.08, 0.28))


class TestInducedDistribution:
    def test_reference_parameters(self):
        d = induce_distribution(PAPER, SUB16)
        assert d.symbols.tolist() == [-15, -11, -7, -3, 1, 5, 9, 13]
        assert np.allclose(d.prob, [0.02, 0.07, 0.18, 0.23, 0.23, 0.18, 0.07, 0.02])

    def test_unbiased_parameters_are_uniform(self):
        d = induce_distribution(ShapingParams((0.5, 0.5)), SUB16)
        assert np.allclose(d.prob, 1 / 8)

    def test_extreme_parameters_collapse_support(self):
        d = induce_distribution(ShapingParams((0.0, 0.0)), SUB16)
        support = d.symbols[d.prob > 0]
        assert support.tolist() == [-7, -3, 1, 5]
        assert np.allclose(d.prob[d.prob > 0], 0.25)

    def test_symmetry(self):
        for p in [(0.08, 0.28), (0.3, 0.1), (0.0, 0.5)]:
            d = induce_distribution(ShapingParams(p), SUB16)
            assert np.allclose(d.prob, d.prob[::-1])

    def test_wrong_parameter_count_rejected(self):
        with pytest.raises(ValueError):
            induce_distribution(ShapingParams((0.1, 0.2, 0.3)), SUB16)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            ShapingParams((-0.1, 0.3))

    def test_full_alphabet_split(self):
        d = full_alphabet_distribution(PAPER, SUB16)
        assert d.prob[0] == pytest.approx(0.01)
        assert d.prob[1] == pytest.approx(0.01)
        assert d.average_energy() == pytest.approx(37.64)


class TestOptimizer:
    def test_recovers_reference_point(self):
        params = optimize_params(SUB16, 2.63)
        assert abs(params.p[0] - 0.08) <= 0.015
        assert abs(params.p[1] - 0.28) <= 0.015

    def test_optimized_beats_uniform_below_three_bits(self):
        from pasbicm.analysis import InputDistribution

        uniform = InputDistribution.uniform(SUB16.base.symbols)
        for rate in (2.0, 2.63, 3.0):
            params = optimize_params(SUB16, rate, coarse_step=0.08)
            shaped = full_alphabet_distribution(params, SUB16)
            assert required_snr(shaped, rate) <= required_snr(uniform, rate) + 1e-6

    def test_high_rate_approaches_uniform(self):
        # Close to the bits-per-symbol ceiling hardly any shaping is
        # feasible, so the optimum drifts towards the unbiased sources.
        params = optimize_params(SUB16, 3.9, coarse_step=0.08)
        assert all(v >= 0.35 for v in params.p)


class TestMatcher:
    def test_ten_choose_one_block(self):
        # One zero among ten bits carries three payload bits; the index
        # enumerates the zero position (lexicographic order, zero first).
        m = CcdmMatcher(ShapingParams((0.08, 0.28)))
        b2 = np.zeros(10, dtype=np.uint8)
        (pos0, zeros0, bits0), (_, _, bits1) = m.plan(b2)
        assert pos0.size == 10 and zeros0 == 1
        assert bits0 == 3 and bits1 == 0
        for index in range(8):
            payload = np.array([(index >> 2) & 1, (index >> 1) & 1, index & 1], dtype=np.uint8)
            b3, consumed = m.encode(payload, b2)
            assert consumed == 3
            assert np.count_nonzero(b3 == 0) == 1
            assert int(np.flatnonzero(b3 == 0)[0]) == index
            assert np.array_equal(m.decode(b3, b2), payload)

    def test_two_choose_one_block(self):
        m = CcdmMatcher(ShapingParams((0.5, 0.5)))
        b2 = np.zeros(2, dtype=np.uint8)
        (_, zeros0, bits0), _ = m.plan(b2)
        assert zeros0 == 1 and bits0 == 1

    def test_round_trip_thousand_frames(self):
        rng = np.random.default_rng(11)
        m = CcdmMatcher(PAPER)
        for _ in range(1000):
            k = int(rng.integers(1, 120))
            b2 = rng.integers(0, 2, size=k).astype(np.uint8)
            payload = rng.integers(0, 2, size=m.payload_bits(b2)).astype(np.uint8)
            b3, consumed = m.encode(payload, b2)
            assert consumed == payload.size
            assert np.array_equal(m.decode(b3, b2), payload)

    def test_single_flip_breaks_composition(self):
        rng = np.random.default_rng(5)
        m = CcdmMatcher(PAPER)
        b2 = rng.integers(0, 2, size=64).astype(np.uint8)
        payload = rng.integers(0, 2, size=m.payload_bits(b2)).astype(np.uint8)
        b3, _ = m.encode(payload, b2)
        b3[17] ^= 1
        with pytest.raises(CompositionError):
            m.decode(b3, b2)

    def test_empty_frame(self):
        m = CcdmMatcher(PAPER)
        b2 = np.empty(0, dtype=np.uint8)
        b3, consumed = m.encode(np.empty(0, dtype=np.uint8), b2)
        assert b3.size == 0 and consumed == 0
        assert m.decode(b3, b2).size == 0

    def test_underflow_raises(self):
        m = CcdmMatcher(PAPER)
        b2 = np.zeros(50, dtype=np.uint8)
        with pytest.raises(MatcherUnderflowError):
            m.encode(np.zeros(2, dtype=np.uint8), b2)

    def test_output_ignores_sign_plane(self):
        # The matcher never reads b4: same payload and b2 must give the
        # same shaped plane regardless of any sign-bit context.
        m = CcdmMatcher(PAPER)
        rng = np.random.default_rng(3)
        b2 = rng.integers(0, 2, size=40).astype(np.uint8)
        payload = rng.integers(0, 2, size=m.payload_bits(b2)).astype(np.uint8)
        first, _ = m.encode(payload, b2)
        second, _ = m.encode(payload, b2)
        assert np.array_equal(first, second)


class TestMatcherStatistics:
    def test_empirical_distribution_matches_target(self):
        rng = np.random.default_rng(23)
        m = CcdmMatcher(PAPER)
        target = induce_distribution(PAPER, SUB16)
        counts = np.zeros(8)
        k = 1000
        n_frames = 120  # 1.2e5 symbols
        for _ in range(n_frames):
            b2 = rng.integers(0, 2, size=k).astype(np.uint8)
            b4 = rng.integers(0, 2, size=k).astype(np.uint8)
            payload = rng.integers(0, 2, size=m.payload_bits(b2)).astype(np.uint8)
            b3, _ = m.encode(payload, b2)
            sym = SUB16.map_reduced(np.stack([b2, b3, b4], axis=1))
            idx = np.searchsorted(SUB16.members, sym)
            counts += np.bincount(idx, minlength=8)
        empirical = counts / counts.sum()
        tv = 0.5 * np.abs(empirical - target.prob).sum()
        assert tv < 0.01, f"TV distance {tv}"

    def test_rate_approaches_entropy_from_below(self):
        # With balanced sub-blocks the per-frame payload stays below the
        # conditional entropy; the gap shrinks as the block grows.
        rng = np.random.default_rng(29)
        m = CcdmMatcher(PAPER)
        bound = 0.5 * binary_entropy(0.08) + 0.5 * binary_entropy(0.28)
        gaps = []
        for k in (100, 1000, 10000):
            b2 = rng.permutation(np.repeat(np.array([0, 1], dtype=np.uint8), k // 2))
            rate = m.payload_bits(b2) / k
            assert rate <= bound + 1e-12
            gaps.append(bound - rate)
        assert gaps[0] > gaps[1] > gaps[2] > 0

    def test_mean_rate_below_entropy_with_random_split(self):
        rng = np.random.default_rng(31)
        m = CcdmMatcher(PAPER)
        bound = 0.5 * binary_entropy(0.08) + 0.5 * binary_entropy(0.28)
        k = 2000
        rates = []
        for _ in range(30):
            b2 = rng.integers(0, 2, size=k).astype(np.uint8)
            rates.append(m.payload_bits(b2) / k)
        assert np.mean(rates) <= bound


def test_export_params(tmp_path):
    path = tmp_path / "shaping.txt"
    export_params(PAPER, 4, path)
    text = path.read_text()
    assert "p1 = 0.08" in text
    assert "p2 = 0.28" in text
    assert "bits_per_symbol = 4" in text
    assert "round-half-up" in text
