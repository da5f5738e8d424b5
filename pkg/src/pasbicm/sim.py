"""Monte Carlo link simulation: shaped, unshaped and binary reference modes.

Every frame is reproducible in isolation: the per-frame random stream is
derived from (seed, frame_index), so a single frame replays bit-identically
no matter how the sweep was batched or scheduled.  Frames are decoded in
batches to keep the min-sum kernel busy.

SNR convention follows the rest of the package: snr_db = Es/sigma^2 in dB
with Es the average energy of the mode's own transmit distribution.
"""

import argparse
import hashlib
import sys
import time
from dataclasses import dataclass, fields

import numpy as np

from .analysis import InputDistribution
from .channel import Demapper, noise_variance, route_to_decoder, transmit
from .constellation import AskConstellation, Labelling
from .framing import FrameAssembler, FrameConfig, info_rate, uniform_layout
from .ldpc import BG1, lift, load_base_graph
from .shaping import ShapingParams, full_alphabet_distribution

MODES = ("shaped", "uniform", "ldpc-ref")

# fixed stream ids so info bits, noise and calibration never alias
_CALIBRATION_SEED = 0x0DCA11B
_CALIBRATION_FRAMES = 256


@dataclass
class RunConfig:
    """Resolved simulation settings (file values overridden by CLI flags)."""

    mode: str = "shaped"
    snr_db: tuple = ()
    seed: int = 1
    out: str | None = None
    max_iter: int = 50
    min_block_errors: int = 50
    max_frames: int = 20000
    batch_frames: int = 32
    # shaped / uniform frame geometry
    symbols_per_frame: int = 1969
    lifting_size: int = 384
    sign_bits_systematic: int | None = None  # defaults to symbols_per_frame
    p1: float = 0.08
    p2: float = 0.28
    # binary reference geometry (rate 0.75 at block length 7872)
    ref_info_bits: int = 5904
    ref_tx_bits: int = 7872
    ref_lifting_size: int = 288

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        self.snr_db = tuple(float(s) for s in self.snr_db)
        if self.snr_db and not all(b > a for a, b in zip(self.snr_db, self.snr_db[1:])):
            raise ValueError("the SNR sweep must be strictly increasing")
        if self.sign_bits_systematic is None:
            self.sign_bits_systematic = self.symbols_per_frame
        if self.min_block_errors < 1 or self.max_frames < 1:
            raise ValueError("stop rule must be positive")


@dataclass
class PointStats:
    """Counters for one SNR point."""

    snr_db: float
    frames: int
    bit_errors: int
    block_errors: int
    ber: float
    bler: float
    avg_iters: float
    info_bpcu: float
    censored: bool


@dataclass
class SimReport:
    mode: str
    points: list
    config_echo: dict
    data_checksums: dict
    wall_time_s: float


@dataclass
class _Prepared:
    llr: np.ndarray
    reference: np.ndarray
    payload_bits: int


class _ShapedChain:
    """Full modified-shaping chain on the lifted 16-ASK frame."""

    def __init__(self, rc: RunConfig):
        code = lift(load_base_graph(BG1), rc.lifting_size)
        params = ShapingParams((rc.p1, rc.p2))
        self.cfg = FrameConfig(
            code=code, k=rc.symbols_per_frame,
            c_prime=rc.sign_bits_systematic, params=params,
        )
        self.asm = FrameAssembler(self.cfg)
        dist = full_alphabet_distribution(params, self.asm.sub)
        self.demapper = Demapper(self.asm.labelling, dist)
        self.es = dist.average_energy()
        self.code = code
        self.n_reference = self.cfg.systematic_payload
        self._draw = self.cfg.k + self.cfg.c_prime + self.cfg.k

    def prepare(self, seed, frame_index, noise_var) -> _Prepared:
        rng = np.random.default_rng([seed, frame_index])
        info = rng.integers(0, 2, size=self._draw, dtype=np.uint8)
        tx = self.asm.assemble(info)
        y = transmit(tx.symbols.astype(np.float64), noise_var, rng)
        llr = route_to_decoder(self.demapper.llrs(y, noise_var), self.asm.layout)
        payload = tx.consumed - self.cfg.k - self.cfg.c_prime
        return _Prepared(llr, tx.codeword[: self.n_reference], payload)

    def info_bpcu(self, payload_mean: float) -> float:
        return info_rate(self.cfg, payload_mean)


class _UniformChain:
    """Same code and constellation, unshaped, at matched information rate."""

    def __init__(self, rc: RunConfig):
        code = lift(load_base_graph(BG1), rc.lifting_size)
        k = rc.symbols_per_frame
        target_bpcu = _expected_shaped_bpcu(rc)
        self.k_info = int(round(k * target_bpcu))
        self.layout = uniform_layout(code, 4 * k, 4, self.k_info)
        self.labelling = Labelling(AskConstellation(4))
        self.demapper = Demapper(self.labelling)
        self.es = InputDistribution.uniform(self.labelling.constellation.symbols).average_energy()
        self.code = code
        self.k = k
        self.n_reference = self.k_info

    def prepare(self, seed, frame_index, noise_var) -> _Prepared:
        rng = np.random.default_rng([seed, frame_index])
        info = rng.integers(0, 2, size=self.k_info, dtype=np.uint8)
        sys_input = np.zeros(self.code.k_sys, dtype=np.uint8)
        sys_input[: self.k_info] = info
        codeword = self.code.encode(sys_input)
        bits = codeword[self.layout.tx_code_cols]
        symbols = self.labelling.symbol_of(bits)
        y = transmit(symbols.astype(np.float64), noise_var, rng)
        llr = route_to_decoder(self.demapper.llrs(y, noise_var), self.layout)
        return _Prepared(llr, codeword[: self.k_info], self.k_info)

    def info_bpcu(self, payload_mean: float) -> float:
        return self.k_info / self.k


class _BinaryReferenceChain:
    """Plain rate-0.75 binary transmission for the reference point."""

    def __init__(self, rc: RunConfig):
        code = lift(load_base_graph(BG1), rc.ref_lifting_size)
        self.layout = uniform_layout(code, rc.ref_tx_bits, 1, rc.ref_info_bits)
        self.code = code
        self.k_info = rc.ref_info_bits
        self.n_tx = rc.ref_tx_bits
        self.es = 1.0
        self.n_reference = self.k_info

    def prepare(self, seed, frame_index, noise_var) -> _Prepared:
        rng = np.random.default_rng([seed, frame_index])
        info = rng.integers(0, 2, size=self.k_info, dtype=np.uint8)
        sys_input = np.zeros(self.code.k_sys, dtype=np.uint8)
        sys_input[: self.k_info] = info
        codeword = self.code.encode(sys_input)
        bits = codeword[self.layout.tx_code_cols.ravel()]
        symbols = 1.0 - 2.0 * bits.astype(np.float64)
        y = transmit(symbols, noise_var, rng)
        planes = (2.0 * y / noise_var)[:, None]
        llr = route_to_decoder(planes, self.layout)
        return _Prepared(llr, codeword[: self.k_info], self.k_info)

    def info_bpcu(self, payload_mean: float) -> float:
        return self.k_info / self.n_tx


def _expected_shaped_bpcu(rc: RunConfig) -> float:
    """Average shaped information rate, estimated once from synthetic b2
    draws with a fixed calibration seed so both modes agree on the match."""
    from .shaping import CcdmMatcher

    matcher = CcdmMatcher(ShapingParams((rc.p1, rc.p2)))
    rng = np.random.default_rng([_CALIBRATION_SEED, rc.symbols_per_frame])
    k = rc.symbols_per_frame
    cp = rc.sign_bits_systematic
    total = 0
    for _ in range(_CALIBRATION_FRAMES):
        b2 = rng.integers(0, 2, size=k, dtype=np.uint8)
        total += matcher.payload_bits(b2)
    return (k + cp + total / _CALIBRATION_FRAMES) / k


def build_chain(rc: RunConfig):
    if rc.mode == "shaped":
        return _ShapedChain(rc)
    if rc.mode == "uniform":
        return _UniformChain(rc)
    return _BinaryReferenceChain(rc)


def run_frame(chain, seed, frame_index, snr_db, max_iter=50):
    """Replay one frame end to end; used by the sweep and for auditing."""
    nv = noise_variance(chain.es, snr_db)
    prep = chain.prepare(seed, frame_index, nv)
    bits, converged, iters = chain.code.decode(prep.llr, max_iter=max_iter)
    diffs = int(np.count_nonzero(bits[: prep.reference.size] != prep.reference))
    return {
        "llr": prep.llr,
        "decoded": bits,
        "bit_errors": diffs,
        "block_error": diffs > 0,
        "iterations": iters,
        "converged": converged,
        "payload_bits": prep.payload_bits,
    }


def _run_point(chain, rc: RunConfig, snr_db: float, log) -> PointStats:
    nv = noise_variance(chain.es, snr_db)
    frames = bit_errors = block_errors = 0
    iter_sum = 0
    payload_sum = 0
    while block_errors < rc.min_block_errors and frames < rc.max_frames:
        batch = min(rc.batch_frames, rc.max_frames - frames)
        prepared = [chain.prepare(rc.seed, frames + b, nv) for b in range(batch)]
        llrs = np.stack([p.llr for p in prepared]).astype(np.float32)
        hard, _, iters = chain.code.decode_batch(llrs, max_iter=rc.max_iter)
        for b, prep in enumerate(prepared):
            diffs = int(np.count_nonzero(hard[b, : prep.reference.size] != prep.reference))
            bit_errors += diffs
            block_errors += diffs > 0
            payload_sum += prep.payload_bits
            iter_sum += int(iters[b])
        frames += batch
        log(f"  snr {snr_db:+.2f} dB: {frames} frames, {block_errors} block errors\r")
    censored = block_errors < rc.min_block_errors
    log("\n")
    return PointStats(
        snr_db=snr_db,
        frames=frames,
        bit_errors=bit_errors,
        block_errors=block_errors,
        ber=bit_errors / (frames * chain.n_reference),
        bler=block_errors / frames,
        avg_iters=iter_sum / frames,
        info_bpcu=chain.info_bpcu(payload_sum / frames),
        censored=censored,
    )


def _data_checksums() -> dict:
    from . import ldpc

    out = {}
    for name in ("nr_ldpc_bg1.csv", "nr_ldpc_bg2.csv", "nr_lifting_sizes.csv"):
        digest = hashlib.sha256(ldpc._data_path(name).read_bytes()).hexdigest()
        out[name] = digest[:16]
    return out


def run_sweep(rc: RunConfig, log=None) -> SimReport:
    """Run the configured sweep and return the collected statistics."""
    if log is None:
        def log(msg):
            sys.stderr.write(msg)
            sys.stderr.flush()
    start = time.time()
    chain = build_chain(rc)
    points = []
    for snr in rc.snr_db:
        stats = _run_point(chain, rc, snr, log)
        if stats.censored:
            log(f"  snr {snr:+.2f} dB censored: {stats.block_errors} "
                f"block errors in {stats.frames} frames\n")
        points.append(stats)
    echo = {f.name: str(getattr(rc, f.name)) for f in fields(rc)}
    return SimReport(
        mode=rc.mode,
        points=points,
        config_echo=echo,
        data_checksums=_data_checksums(),
        wall_time_s=time.time() - start,
    )


def emit_csv(report: SimReport, path) -> None:
    """Deterministic CSV: one header, one line per SNR point."""
    with open(path, "w", newline="\n") as f:
        f.write("snr_db,frames,bit_errors,block_errors,ber,bler,avg_iters,info_bpcu\n")
        for p in report.points:
            f.write(
                f"{p.snr_db:.6g},{p.frames},{p.bit_errors},{p.block_errors},"
                f"{p.ber:.6g},{p.bler:.6g},{p.avg_iters:.6g},{p.info_bpcu:.6g}\n"
            )


# ---------------------------------------------------------------------------
# configuration file and command line

_INT_KEYS = {"seed", "max_iter", "min_block_errors", "max_frames", "batch_frames",
             "symbols_per_frame", "lifting_size", "sign_bits_systematic",
             "ref_info_bits", "ref_tx_bits", "ref_lifting_size"}
_FLOAT_KEYS = {"p1", "p2"}


def load_config_file(path) -> dict:
    """Flat key = value text; '#' starts a comment."""
    values = {}
    valid = {f.name for f in fields(RunConfig)}
    with open(path) as f:
        for ln, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{ln}: expected key = value")
            key, val = (part.strip() for part in line.split("=", 1))
            if key not in valid:
                raise ValueError(f"{path}:{ln}: unknown key {key!r}")
            if key in _INT_KEYS:
                values[key] = int(val)
            elif key in _FLOAT_KEYS:
                values[key] = float(val)
            elif key == "snr_db":
                values[key] = tuple(float(v) for v in val.split(","))
            else:
                values[key] = val
    return values


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sim",
        description="AWGN Monte Carlo sweep for the shaped BICM link",
    )
    parser.add_argument("--mode", choices=MODES)
    parser.add_argument("--config", help="flat key=value settings file")
    parser.add_argument("--snr", help="comma-separated SNR sweep in dB")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="CSV output path")
    parser.add_argument("--frames", type=int, help="maximum frames per point")
    parser.add_argument("--min-errors", type=int, help="block errors per point")
    parser.add_argument("--max-iter", type=int, help="decoder iterations")
    args = parser.parse_args(argv)
    try:
        values = load_config_file(args.config) if args.config else {}
        if args.mode is not None:
            values["mode"] = args.mode
        if args.snr is not None:
            values["snr_db"] = tuple(float(v) for v in args.snr.split(","))
        if args.seed is not None:
            values["seed"] = args.seed
        if args.out is not None:
            values["out"] = args.out
        if args.frames is not None:
            values["max_frames"] = args.frames
        if args.min_errors is not None:
            values["min_block_errors"] = args.min_errors
        if args.max_iter is not None:
            values["max_iter"] = args.max_iter
        rc = RunConfig(**values)
    except (ValueError, TypeError, OSError) as exc:
        print(f"sim: {exc}", file=sys.stderr)
        return 2

    report = run_sweep(rc)
    for p in report.points:
        flag = " censored" if p.censored else ""
        print(
            f"snr {p.snr_db:+.2f} dB  frames {p.frames}  bler {p.bler:.3e}  "
            f"ber {p.ber:.3e}  iters {p.avg_iters:.1f}  bpcu {p.info_bpcu:.4f}{flag}",
            file=sys.stderr,
        )
    print(f"wall time {report.wall_time_s:.1f} s", file=sys.stderr)
    if rc.out:
        try:
            emit_csv(report, rc.out)
        except OSError as exc:
            print(f"sim: cannot write {rc.out}: {exc}", file=sys.stderr)
            return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
