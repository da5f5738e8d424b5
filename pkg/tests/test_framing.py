"""Frame geometry, rate accounting, placement audit and round trips."""

from fractions import Fraction

import numpy as np
import pytest

from pasbicm.analysis import binary_entropy
from pasbicm.channel import Demapper, route_to_decoder, transmit
from pasbicm.framing import (
    PROV_DM,
    PROV_INFO,
    PROV_PARITY,
    FrameAssembler,
    FrameConfig,
    code_rate,
    info_rate,
    uniform_layout,
)
from pasbicm.ldpc import BG1, lift, load_base_graph
from pasbicm.shaping import ShapingParams, full_alphabet_distribution, induce_distribution

PAPER = ShapingParams((0.08, 0.28))
BG = load_base_graph(BG1)


def small_cfg(k=48, Z=16, c_prime=None, prefix=None):
    code = lift(BG, Z)
    return FrameConfig(code=code, k=k, c_prime=k if c_prime is None else c_prime,
                       params=PAPER, punctured_prefix=prefix)


def draw_frame(asm, rng):
    cfg = asm.cfg
    info = rng.integers(0, 2, size=cfg.k + cfg.c_prime + cfg.k).astype(np.uint8)
    return asm.assemble(info), info


class TestConfigAndRate:
    def test_reference_rate_small(self):
        cfg = small_cfg(k=100, Z=10, c_prime=20, prefix=20)
        assert code_rate(cfg) == Fraction(220, 420)

    def test_reference_rate_flagship(self):
        cfg = FrameConfig(code=lift(BG, 384), k=1969, c_prime=1969, params=PAPER)
        assert code_rate(cfg) == Fraction(5907, 8644)
        assert cfg.parity_retained == 1969 + 2 * 384
        assert cfg.transmitted_bits == 7876

    def test_plain_scheme_reaches_pas_baseline_rate(self):
        # No puncturing, every sign bit systematic: only the selector
        # plane carries parity and the code rate is (m-1)/m.
        cfg = small_cfg(k=64, Z=16, prefix=0)
        assert cfg.parity_retained == cfg.k
        assert code_rate(cfg) == Fraction(3, 4)

    def test_bit_count_audit(self):
        for cfg in (
            small_cfg(),
            small_cfg(k=64, c_prime=40),
            small_cfg(k=64, Z=16, prefix=0),
            FrameConfig(code=lift(BG, 384), k=1969, c_prime=1969, params=PAPER),
        ):
            transmitted_systematic = cfg.systematic_payload - cfg.c
            assert transmitted_systematic + cfg.parity_retained == cfg.m * cfg.k

    def test_invalid_geometry_rejected(self):
        with pytest.raises(ValueError):
            small_cfg(k=24)  # c = 2Z = 32 > k
        with pytest.raises(ValueError):
            small_cfg(k=48, c_prime=20)  # c_prime < c
        with pytest.raises(ValueError):
            FrameConfig(code=lift(BG, 16), k=200, c_prime=200, params=PAPER)  # payload

    def test_info_rate_accounting(self):
        cfg = small_cfg(k=100, Z=16, c_prime=100, prefix=32)
        dm_entropy = 0.5 * binary_entropy(0.08) + 0.5 * binary_entropy(0.28)
        assert info_rate(cfg, dm_entropy * cfg.k) == pytest.approx(2.0 + dm_entropy)
        assert info_rate(cfg, 1.0 * cfg.k) == pytest.approx(3.0)

    def test_small_block_rate_below_entropy(self):
        cfg = small_cfg(k=48, Z=16)
        asm = FrameAssembler(cfg)
        rng = np.random.default_rng(5)
        bound = 0.5 * binary_entropy(0.08) + 0.5 * binary_entropy(0.28)
        tx, _ = draw_frame(asm, rng)
        dm_payload = tx.consumed - cfg.k - cfg.c_prime
        assert dm_payload / cfg.k < bound


class TestLayout:
    def test_placement_is_bijection(self):
        for cfg in (small_cfg(), small_cfg(k=64, c_prime=40), small_cfg(prefix=0)):
            assert FrameAssembler(cfg).layout.audit()

    def test_flagship_placement(self):
        cfg = FrameConfig(code=lift(BG, 384), k=1969, c_prime=1969, params=PAPER)
        lay = FrameAssembler(cfg).layout
        assert lay.audit()
        assert lay.prefix_cols.size == 768
        assert lay.filler_cols.size == cfg.code.k_sys - 5907
        assert lay.discarded_cols.size == cfg.code.n_cols - cfg.code.k_sys - 2737

    def test_provenance_assignment(self):
        cfg = small_cfg(k=64, c_prime=48)
        prov = FrameAssembler(cfg).layout.tx_provenance
        assert np.all(prov[:, 0] == PROV_PARITY)
        assert np.all(prov[:, 1] == PROV_INFO)
        assert np.all(prov[:, 2] == PROV_DM)
        n_sign_tx = cfg.c_prime - cfg.c
        assert np.all(prov[:n_sign_tx, 3] == PROV_INFO)
        assert np.all(prov[n_sign_tx:, 3] == PROV_PARITY)
        assert np.count_nonzero(prov[:, 3] == PROV_PARITY) == cfg.k - cfg.c_prime + cfg.c

    def test_descriptor_export(self, tmp_path):
        cfg = small_cfg()
        lay = FrameAssembler(cfg).layout
        path = tmp_path / "layout.txt"
        lay.save(path)
        text = path.read_text()
        assert f"symbols_per_frame = {cfg.k}" in text
        assert "map_b1" in text and "map_b4" in text
        assert f"code_rate = {code_rate(cfg)}" in text


class TestRoundTrip:
    def test_loopback_recovers_info_thousand_frames(self):
        asm = FrameAssembler(small_cfg())
        rng = np.random.default_rng(7)
        for _ in range(1000):
            tx, info = draw_frame(asm, rng)
            out, payload, ok = asm.disassemble(tx.codeword)
            assert ok
            assert np.array_equal(out, info[:tx.consumed])

    def test_loopback_without_puncturing(self):
        asm = FrameAssembler(small_cfg(prefix=0))
        rng = np.random.default_rng(11)
        for _ in range(50):
            tx, info = draw_frame(asm, rng)
            out, _, ok = asm.disassemble(tx.codeword)
            assert ok and np.array_equal(out, info[:tx.consumed])

    def test_single_flip_in_shaped_plane_flags_frame(self):
        asm = FrameAssembler(small_cfg())
        rng = np.random.default_rng(13)
        tx, _ = draw_frame(asm, rng)
        corrupted = tx.codeword.copy()
        corrupted[asm.layout.b3_cols[10]] ^= 1
        _, _, ok = asm.disassemble(corrupted)
        assert not ok

    def test_random_garbage_flags_frame(self):
        asm = FrameAssembler(small_cfg())
        rng = np.random.default_rng(17)
        for _ in range(20):
            garbage = rng.integers(0, 2, size=asm.cfg.code.n_cols).astype(np.uint8)
            _, _, ok = asm.disassemble(garbage)
            assert not ok

    def test_symbol_planes_match_gray_labels(self):
        asm = FrameAssembler(small_cfg())
        rng = np.random.default_rng(19)
        tx, _ = draw_frame(asm, rng)
        labels = asm.labelling.bits_of(tx.symbols)
        assert np.array_equal(labels, tx.planes.stacked())

    def test_noiseless_chain_with_decoder(self):
        cfg = small_cfg()
        asm = FrameAssembler(cfg)
        dem = Demapper(asm.labelling, full_alphabet_distribution(PAPER, asm.sub))
        rng = np.random.default_rng(23)
        tx, info = draw_frame(asm, rng)
        y = transmit(tx.symbols.astype(float), 1e-4, rng)
        llr = route_to_decoder(dem.llrs(y, 1e-4), asm.layout)
        bits, converged, iters = cfg.code.decode(llr, max_iter=50)
        assert converged
        out, _, ok = asm.disassemble(bits)
        assert ok and np.array_equal(out, info[:tx.consumed])


class TestEmpiricalDistribution:
    def test_symbol_histogram_tracks_target(self):
        cfg = small_cfg(k=100, Z=16, c_prime=100, prefix=32)
        asm = FrameAssembler(cfg)
        rng = np.random.default_rng(29)
        target_sub = induce_distribution(PAPER, asm.sub)
        counts = np.zeros(16)
        n_frames = 250  # 2.5e4 symbols: coarse check, the flagship-size
        # version lives in the acceptance suite
        for _ in range(n_frames):
            tx, _ = draw_frame(asm, rng)
            idx = asm.labelling.constellation.index_of(tx.symbols)
            counts += np.bincount(idx, minlength=16)
        empirical = counts / counts.sum()
        full_target = np.repeat(target_sub.prob, 2) / 2.0
        tv = 0.5 * np.abs(empirical - full_target).sum()
        assert tv < 0.03, f"TV distance {tv}"


class TestUniformLayout:
    def test_bijection_and_sizes(self):
        code = lift(BG, 16)
        lay = uniform_layout(code, n_tx_bits=192, m=4, k_info=128)
        assert lay.tx_code_cols.shape == (48, 4)
        used = lay.tx_code_cols.ravel()
        assert np.unique(used).size == used.size
        assert lay.parity_retained == 192 - (128 - 32)
        assert not np.intersect1d(used, lay.filler_cols).size
        assert not np.intersect1d(used, lay.prefix_cols).size

    def test_systematic_bits_land_on_reliable_levels(self):
        # earliest rate-matched bits (systematic) occupy the sign level,
        # the parity-heavy tail the selector level
        code = lift(BG, 16)
        lay = uniform_layout(code, n_tx_bits=192, m=4, k_info=128)
        assert np.array_equal(lay.tx_code_cols[:, 3], np.arange(32, 80))
        tail = lay.tx_code_cols[:, 0]
        assert np.all(tail >= code.k_sys)

    def test_bpsk_variant(self):
        code = lift(BG, 16)
        lay = uniform_layout(code, n_tx_bits=200, m=1, k_info=128)
        assert lay.tx_code_cols.shape == (200, 1)

    def test_bad_geometry_rejected(self):
        code = lift(BG, 16)
        with pytest.raises(ValueError):
            uniform_layout(code, n_tx_bits=190, m=4, k_info=128)
        with pytest.raises(ValueError):
            uniform_layout(code, n_tx_bits=192, m=4, k_info=16)
