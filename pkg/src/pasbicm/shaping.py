"""Target-distribution model and the invertible distribution matcher.

The target over the reference sub-constellation is parametrised by the
conditional zero-probabilities of the shaped bit level b3: one free value
per value of the (uniform, independent) bit level b2.  Mirroring the free
vector makes the induced symbol distribution symmetric by construction.

The matcher realising the biased b3 stream is a constant-composition
matcher: each b2-conditioned sub-block carries an enumerative index of a
fixed-weight word, computed with exact integer arithmetic, so encode and
decode are bit-exact inverses on every platform.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from .analysis import InputDistribution, required_snr
from .constellation import SubConstellation


class MatcherUnderflowError(ValueError):
    """Raised when the info stream has fewer bits than a frame consumes."""


class CompositionError(ValueError):
    """Raised when a shaped word does not carry the agreed zero counts."""


@dataclass(frozen=True)
class ShapingParams:
    """Free shaping parameters: p[v] = P(b3 = 0 | b2 = v).

    For a 2^m-ASK there are 2^(m-3) free values; the complementary half of
    the conditional table is implied by symmetry (the induced symbol
    distribution pairs each value p with 1 - p).
    """

    p: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        if any(not 0.0 <= v <= 1.0 for v in self.p):
            raise ValueError("shaping probabilities must lie in [0, 1]")

    @property
    def half_vector(self) -> np.ndarray:
        """The first-half conditional column of the induced distribution."""
        p = np.asarray(self.p, dtype=float)
        return np.concatenate([p, 1.0 - p[::-1]])


def induce_distribution(params: ShapingParams, sub: SubConstellation) -> InputDistribution:
    """Symbol distribution over the sub-constellation for given parameters.

    In ascending symbol order the first half carries the conditional
    column and the second half its complement, scaled by the quantum
    (1/2)^(m'-1); the result is symmetric and sums to one exactly.
    """
    half = params.half_vector
    if half.size != sub.size // 2:
        raise ValueError(
            f"expected {sub.size // 4} free parameters for this alphabet, got {len(params.p)}"
        )
    quantum = 0.5 ** (int(np.log2(sub.size)) - 1)
    prob = np.concatenate([half, 1.0 - half]) * quantum
    return InputDistribution(sub.members.astype(float), prob)


def full_alphabet_distribution(params: ShapingParams, sub: SubConstellation) -> InputDistribution:
    """Distribution over the full alphabet: each sub-constellation mass is
    split evenly between a member and its +2 shift (the selector bit is a
    parity bit, hence equiprobable)."""
    d = induce_distribution(params, sub)
    prob = np.zeros(2 * sub.size)
    prob[0::2] = d.prob / 2.0
    prob[1::2] = d.prob / 2.0
    return InputDistribution(sub.base.symbols.astype(float), prob)


def optimize_params(sub: SubConstellation, target_rate: float,
                    coarse_step: float = 0.04, refine_step: float = 0.01) -> ShapingParams:
    """Grid-search the shaping parameters minimising required SNR at a rate.

    A coarse scan over [0, 0.6]^n is refined once around the best cell;
    the documented resolution is refine_step (0.01 by default).  Only
    m = 4 (two free parameters) is supported, matching the matcher.
    """
    if sub.size != 8:
        raise ValueError("parameter optimisation is implemented for 16-ASK")
    if target_rate >= sub.m:
        raise ValueError("target rate must be below the bits-per-symbol budget")

    last = {"snr": None}

    def objective(p1, p2):
        d = full_alphabet_distribution(ShapingParams((p1, p2)), sub)
        if d.entropy() <= target_rate + 1e-9:
            return np.inf
        # Warm-start the bisection bracket from the previous candidate;
        # neighbouring grid points land within a couple of dB.
        if last["snr"] is not None:
            lo, hi = last["snr"] - 3.0, last["snr"] + 3.0
            try:
                snr = required_snr(d, target_rate, lo_db=lo, hi_db=hi)
            except ValueError:
                snr = required_snr(d, target_rate)
        else:
            snr = required_snr(d, target_rate)
        last["snr"] = snr
        return snr

    def scan(grid1, grid2):
        best, arg = np.inf, None
        for a in grid1:
            for b in grid2:
                v = objective(a, b)
                if v < best:
                    best, arg = v, (a, b)
        return arg

    coarse = np.arange(0.0, 0.6 + 1e-9, coarse_step)
    a0, b0 = scan(coarse, coarse)
    fine_a = np.clip(np.arange(a0 - coarse_step, a0 + coarse_step + 1e-9, refine_step), 0.0, 1.0)
    fine_b = np.clip(np.arange(b0 - coarse_step, b0 + coarse_step + 1e-9, refine_step), 0.0, 1.0)
    a1, b1 = scan(fine_a, fine_b)
    return ShapingParams((round(a1, 6), round(b1, 6)))


def _unrank(index: int, length: int, zeros: int) -> np.ndarray:
    """Word number `index` among length-`length` words with `zeros` zeros.

    Lexicographic order with 0 sorting before 1.  Binomial counts are
    updated incrementally with exact integer arithmetic.
    """
    word = np.empty(length, dtype=np.uint8)
    total = comb(length, zeros)
    n, c = length, zeros
    for i in range(length):
        if c == 0:
            word[i:] = 1
            break
        if c == n:
            word[i:] = 0
            break
        head_zero = total * c // n  # C(n-1, c-1)
        if index < head_zero:
            word[i] = 0
            total = head_zero
            c -= 1
        else:
            word[i] = 1
            index -= head_zero
            total -= head_zero  # C(n-1, c)
        n -= 1
    return word


def _rank(word: np.ndarray, zeros: int) -> int:
    """Inverse of _unrank for a word with the agreed number of zeros."""
    length = word.size
    total = comb(length, zeros)
    n, c = length, zeros
    index = 0
    for bit in word:
        if c == 0 or c == n:
            break
        head_zero = total * c // n
        if bit:
            index += head_zero
            total -= head_zero
        else:
            total = head_zero
            c -= 1
        n -= 1
    return index


def _bits_to_int(bits: np.ndarray) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def _int_to_bits(value: int, width: int) -> np.ndarray:
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


class CcdmMatcher:
    """Constant-composition matcher for the shaped bit plane.

    Positions are partitioned by the value of b2; each part carries a
    fixed-weight word whose zero count is round(part_size * p[v]) (ties
    rounding half up) and whose index encodes floor(log2 C(size, zeros))
    payload bits.  Decoding checks the composition and recovers the exact
    payload prefix.
    """

    def __init__(self, params: ShapingParams):
        if len(params.p) != 2:
            raise ValueError("the matcher supports the 16-ASK source layout (two sources)")
        self.params = params

    @staticmethod
    def _composition(size: int, p_zero: float) -> int:
        return int(np.floor(size * p_zero + 0.5))

    def plan(self, b2: np.ndarray):
        """Sub-block geometry for a given b2 vector.

        Returns (positions, zeros, payload_bits) per source value v=0,1.
        """
        b2 = np.asarray(b2)
        out = []
        for v in (0, 1):
            pos = np.flatnonzero(b2 == v)
            zeros = self._composition(pos.size, self.params.p[v])
            count = comb(pos.size, zeros)
            out.append((pos, zeros, max(count.bit_length() - 1, 0)))
        return out

    def payload_bits(self, b2: np.ndarray) -> int:
        return sum(nbits for _, _, nbits in self.plan(b2))

    def encode(self, info_bits: np.ndarray, b2: np.ndarray):
        """Shape the b3 plane for a given b2 plane.

        Returns (b3, consumed); consumed is the number of info bits read
        from the front of info_bits.
        """
        info_bits = np.asarray(info_bits, dtype=np.uint8)
        b2 = np.asarray(b2)
        b3 = np.empty(b2.size, dtype=np.uint8)
        offset = 0
        for pos, zeros, nbits in self.plan(b2):
            if offset + nbits > info_bits.size:
                raise MatcherUnderflowError(
                    f"need {offset + nbits} payload bits, have {info_bits.size}"
                )
            index = _bits_to_int(info_bits[offset:offset + nbits])
            b3[pos] = _unrank(index, pos.size, zeros)
            offset += nbits
        return b3, offset

    def decode(self, b3: np.ndarray, b2: np.ndarray) -> np.ndarray:
        """Recover the payload prefix from a shaped plane; exact inverse of
        encode for matching b2.  Raises CompositionError on weight mismatch."""
        b3 = np.asarray(b3, dtype=np.uint8)
        b2 = np.asarray(b2)
        if b3.size != b2.size:
            raise ValueError("bit planes must have equal length")
        chunks = []
        for pos, zeros, nbits in self.plan(b2):
            word = b3[pos]
            actual = int(np.count_nonzero(word == 0))
            if actual != zeros:
                raise CompositionError(
                    f"sub-block carries {actual} zeros, expected {zeros}"
                )
            chunks.append(_int_to_bits(_rank(word, zeros), nbits))
        return np.concatenate(chunks) if chunks else np.empty(0, dtype=np.uint8)


def export_params(params: ShapingParams, m: int, path) -> None:
    """Write the shaping configuration as a flat key-value text file."""
    with open(path, "w", newline="\n") as f:
        f.write(f"bits_per_symbol = {m}\n")
        for i, v in enumerate(params.p):
            f.write(f"p{i + 1} = {v}\n")
        f.write("composition_policy = round-half-up\n")
        f.write("payload_per_block = floor-log2-binomial\n")
