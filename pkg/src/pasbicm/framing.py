"""Frame assembly for shaped transmission over the systematic LDPC code.

Transmitter layout per frame of k symbols (4 label bits each):

* b2 carries k uniform info bits and b3 the matched (shaped) plane; both
  enter the code as systematic bits.
* c' sign bits are also systematic input.  The first c of them sit in the
  always-punctured prefix of the code (they are never transmitted and the
  decoder recovers them); the remaining c' - c are transmitted directly
  as sign bits of the first symbols.
* After rate matching keeps the first k + (k - c') + c parity bits, k of
  them become the sub-constellation selector plane b1 and the rest fill
  the sign-bit positions whose systematic values went into the prefix.

The receiver inverts the placement, reads the recovered prefix out of the
decoder output and unmatches the shaped plane.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .constellation import AskConstellation, Labelling, SubConstellation
from .ldpc import LiftedCode
from .shaping import CcdmMatcher, CompositionError, ShapingParams

# provenance codes for transmitted label bits
PROV_INFO = 0
PROV_DM = 1
PROV_PARITY = 2
PROV_PUNCTURED = 3
PROV_NAMES = {0: "info", 1: "dm", 2: "parity", 3: "punctured"}


@dataclass
class FrameConfig:
    """Geometry of one shaped frame tied to a lifted code.

    k: symbols per frame; c_prime: sign bits used as systematic input;
    punctured_prefix: length of the never-transmitted systematic prefix
    (2Z for the 5G-style code, 0 for the plain scheme without
    puncturing).  One quantification bit per symbol is fixed.
    """

    code: LiftedCode
    k: int
    c_prime: int
    params: ShapingParams
    punctured_prefix: int | None = None
    m: int = 4
    q: int = 1

    def __post_init__(self):
        if self.m != 4 or self.q != 1:
            raise ValueError("frame assembly is implemented for 16-ASK with one selector bit")
        if self.punctured_prefix is None:
            self.punctured_prefix = 2 * self.code.Z
        c = self.punctured_prefix
        if c not in (0, 2 * self.code.Z):
            raise ValueError("punctured prefix must be 0 or 2Z")
        if not c <= self.c_prime <= self.k:
            raise ValueError(f"need {c} <= c_prime <= k, got c_prime={self.c_prime}, k={self.k}")
        if self.systematic_payload > self.code.k_sys:
            raise ValueError(
                f"systematic payload {self.systematic_payload} exceeds k_sys={self.code.k_sys}"
            )
        if self.parity_retained > self.code.n_cols - self.code.k_sys:
            raise ValueError("rate matching would retain more parity than the code has")

    @property
    def c(self) -> int:
        return self.punctured_prefix

    @property
    def systematic_payload(self) -> int:
        return (self.m - 1 - self.q) * self.k + self.c_prime

    @property
    def parity_retained(self) -> int:
        return self.q * self.k + self.k - self.c_prime + self.c

    @property
    def transmitted_bits(self) -> int:
        return self.m * self.k


def code_rate(cfg: FrameConfig) -> Fraction:
    """Exact code rate: systematic payload over transmitted plus punctured
    bits (raising c_prime swaps parity for systematic, so the block length
    stays m*k + c)."""
    return Fraction(cfg.systematic_payload, cfg.transmitted_bits + cfg.c)


def info_rate(cfg: FrameConfig, payload_consumed_avg: float) -> float:
    """Information rate in bits per channel use: uniform planes plus the
    average matcher payload, per symbol."""
    return (cfg.k + cfg.c_prime + payload_consumed_avg) / cfg.k


class FrameLayout:
    """Index maps tying transmitted label bits to code columns.

    tx_code_cols[t, j] is the code column carried by bit level j+1 of
    symbol t. filler_cols are the shortened (known-zero) systematic
    columns; the punctured prefix and discarded parity occupy the
    remaining columns.
    """

    def __init__(self, cfg: FrameConfig):
        code, k, c, cp = cfg.code, cfg.k, cfg.c, cfg.c_prime
        k_sys = code.k_sys
        self.cfg = cfg
        self.n_code_cols = code.n_cols
        self.prefix_cols = np.arange(0, c)
        self.b2_cols = np.arange(c, c + k)
        self.b3_cols = np.arange(c + k, c + 2 * k)
        self.sign_rest_cols = np.arange(c + 2 * k, c + 2 * k + (cp - c))
        self.filler_cols = np.arange(cfg.systematic_payload, k_sys)
        self.parity_cols = np.arange(k_sys, k_sys + cfg.parity_retained)
        self.discarded_cols = np.arange(k_sys + cfg.parity_retained, code.n_cols)

        tx = np.empty((k, 4), dtype=np.int64)
        tx[:, 0] = self.parity_cols[:k]  # selector plane is pure parity
        tx[:, 1] = self.b2_cols
        tx[:, 2] = self.b3_cols
        n_sign_tx = cp - c
        tx[:n_sign_tx, 3] = self.sign_rest_cols
        tx[n_sign_tx:, 3] = self.parity_cols[k:]
        self.tx_code_cols = tx

        prov = np.empty((k, 4), dtype=np.uint8)
        prov[:, 0] = PROV_PARITY
        prov[:, 1] = PROV_INFO
        prov[:, 2] = PROV_DM
        prov[:n_sign_tx, 3] = PROV_INFO
        prov[n_sign_tx:, 3] = PROV_PARITY
        self.tx_provenance = prov

    def audit(self) -> bool:
        """Check the placement is a bijection onto the non-filler,
        non-punctured, non-discarded code columns."""
        used = np.sort(self.tx_code_cols.ravel())
        if np.unique(used).size != used.size:
            return False
        excluded = np.concatenate([self.prefix_cols, self.filler_cols, self.discarded_cols])
        expected = np.setdiff1d(np.arange(self.n_code_cols), excluded)
        return np.array_equal(used, expected)

    def describe(self) -> str:
        cfg = self.cfg
        lines = [
            f"symbols_per_frame = {cfg.k}",
            f"lifting_size = {cfg.code.Z}",
            f"punctured_prefix = {cfg.c}",
            f"systematic_sign_bits = {cfg.c_prime}",
            f"systematic_payload = {cfg.systematic_payload}",
            f"parity_retained = {cfg.parity_retained}",
            f"filler_bits = {self.filler_cols.size}",
            f"code_rate = {code_rate(cfg)}",
        ]
        for j, name in enumerate(("b1", "b2", "b3", "b4")):
            cols = " ".join(str(v) for v in self.tx_code_cols[:, j])
            lines.append(f"map_{name} = {cols}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w", newline="\n") as f:
            f.write(self.describe())


@dataclass
class BitPlanes:
    """Transmitted label-bit planes with per-bit provenance codes."""

    b1: np.ndarray
    b2: np.ndarray
    b3: np.ndarray
    b4: np.ndarray
    provenance: np.ndarray  # (k, 4) uint8, PROV_* codes

    def stacked(self) -> np.ndarray:
        return np.stack([self.b1, self.b2, self.b3, self.b4], axis=1)


@dataclass
class TxFrame:
    """One assembled frame: symbols, label planes, the full codeword and
    the number of info bits consumed."""

    symbols: np.ndarray
    planes: BitPlanes
    codeword: np.ndarray
    consumed: int


class FrameAssembler:
    """Bidirectional frame processing for one configuration."""

    def __init__(self, cfg: FrameConfig):
        self.cfg = cfg
        self.layout = FrameLayout(cfg)
        self.matcher = CcdmMatcher(cfg.params)
        constellation = AskConstellation(cfg.m)
        self.labelling = Labelling(constellation)
        self.sub = SubConstellation(constellation)

    def payload_bits(self, b2: np.ndarray) -> int:
        return self.matcher.payload_bits(b2)

    def assemble(self, info_bits: np.ndarray) -> TxFrame:
        """Build one frame from the front of an info bit stream.

        The consumed count covers k bits for b2, c' sign bits, then the
        matcher payload (variable, depends on the drawn b2).
        """
        cfg = self.cfg
        info_bits = np.asarray(info_bits, dtype=np.uint8)
        k, c, cp = cfg.k, cfg.c, cfg.c_prime
        if info_bits.size < k + cp:
            raise ValueError("info stream shorter than the uniform bit planes")
        b2 = info_bits[:k]
        sign = info_bits[k:k + cp]
        b3, dm_consumed = self.matcher.encode(info_bits[k + cp:], b2)

        sys_input = np.zeros(cfg.code.k_sys, dtype=np.uint8)
        sys_input[self.layout.prefix_cols] = sign[:c]
        sys_input[self.layout.b2_cols] = b2
        sys_input[self.layout.b3_cols] = b3
        sys_input[self.layout.sign_rest_cols] = sign[c:]
        codeword = cfg.code.encode(sys_input)
        parity = codeword[cfg.code.k_sys:][:cfg.parity_retained]

        b1 = parity[:k]
        b4 = np.empty(k, dtype=np.uint8)
        n_sign_tx = cp - c
        b4[:n_sign_tx] = sign[c:]
        b4[n_sign_tx:] = parity[k:]
        planes = BitPlanes(b1, b2, b3, b4, self.layout.tx_provenance)
        symbols = self.sub.map_full(b1, np.stack([b2, b3, b4], axis=1))
        return TxFrame(symbols, planes, codeword, k + cp + dm_consumed)

    def disassemble(self, decoded_bits: np.ndarray):
        """Invert the assembly from a full decoder output.

        Returns (info_bits, dm_payload, ok); ok is False when the shaped
        plane fails its composition check.
        """
        cfg = self.cfg
        decoded_bits = np.asarray(decoded_bits, dtype=np.uint8)
        if decoded_bits.size != cfg.code.n_cols:
            raise ValueError("decoder output must cover every code column")
        sign_prefix = decoded_bits[self.layout.prefix_cols]
        b2 = decoded_bits[self.layout.b2_cols]
        b3 = decoded_bits[self.layout.b3_cols]
        sign_rest = decoded_bits[self.layout.sign_rest_cols]
        try:
            payload = self.matcher.decode(b3, b2)
        except CompositionError:
            return np.concatenate([b2, sign_prefix, sign_rest]), None, False
        info = np.concatenate([b2, sign_prefix, sign_rest, payload])
        return info, payload, True

def uniform_layout(code: LiftedCode, n_tx_bits: int, m: int, k_info: int,
                   level_order=None):
    """Layout for the unshaped baseline: k_info systematic bits (first 2Z
    punctured) followed by retained parity, demultiplexed chunk-wise onto
    the label bits.

    Mirroring the standard row/column interleaver, chunk j of the
    rate-matched stream lands on bit level level_order[j]; the default
    order puts early (systematic-heavy) bits on the most reliable Gray
    levels, sign level first, selector level last.
    """
    c = 2 * code.Z
    if not c < k_info <= code.k_sys:
        raise ValueError("info size must exceed the punctured prefix and fit the code")
    if n_tx_bits % m:
        raise ValueError("transmitted bits must fill whole symbols")
    parity_keep = n_tx_bits - (k_info - c)
    if parity_keep < 0 or parity_keep > code.n_cols - code.k_sys:
        raise ValueError("transmitted length incompatible with the code")
    if level_order is None:
        level_order = tuple(range(m - 1, -1, -1))
    if sorted(level_order) != list(range(m)):
        raise ValueError("level_order must permute the bit levels")
    tx_cols = np.concatenate([
        np.arange(c, k_info),
        np.arange(code.k_sys, code.k_sys + parity_keep),
    ])
    n_symbols = n_tx_bits // m
    chunks = tx_cols.reshape(m, n_symbols)

    class _Layout:
        pass

    lay = _Layout()
    lay.n_code_cols = code.n_cols
    lay.tx_code_cols = np.empty((n_symbols, m), dtype=np.int64)
    for j, level in enumerate(level_order):
        lay.tx_code_cols[:, level] = chunks[j]
    lay.filler_cols = np.arange(k_info, code.k_sys)
    lay.prefix_cols = np.arange(0, c)
    lay.discarded_cols = np.arange(code.k_sys + parity_keep, code.n_cols)
    lay.k_info = k_info
    lay.parity_retained = parity_keep
    return lay
