"""M-ASK constellations, bit labellings and the two-sub-constellation split.

The alphabet is the usual set of 2^m equally spaced odd integers.  Two
labellings are supported: Gray (binary-reflected) and natural (offset
binary).  In both, the top bit level b_m is the sign bit.  The alphabet
splits into a reference sub-constellation (every second symbol) and its
shift by +2; bit level b1 selects between the two halves through an XOR
rule on the full label, so that the resulting symbol carries exactly the
Gray label (b1, b2, ..., bm).
"""

import numpy as np

GRAY = "gray"
NATURAL = "natural"


def ask_symbols(m: int) -> np.ndarray:
    """Return the 2^m odd-integer symbols of an M-ASK alphabet, ascending."""
    if not 2 <= m <= 8:
        raise ValueError(f"bits per symbol must be in [2, 8], got {m}")
    M = 1 << m
    return np.arange(-M + 1, M, 2, dtype=np.int64)


class AskConstellation:
    """M-ASK alphabet with unit half-spacing.

    Attributes:
        m: bits per symbol.
        symbols: ascending array of the 2^m odd integers.
    """

    def __init__(self, m: int):
        self.m = m
        self.symbols = ask_symbols(m)
        self.size = self.symbols.size

    def index_of(self, x) -> np.ndarray:
        """Map symbol value(s) to alphabet index; raises on foreign values."""
        x = np.asarray(x)
        idx = (x + (self.size - 1)) >> 1
        if np.any((idx < 0) | (idx >= self.size)) or np.any(self.symbols[idx] != x):
            raise ValueError("value outside the constellation alphabet")
        return idx

    def average_energy(self, prob=None) -> float:
        """Mean squared amplitude; uniform weighting when prob is None."""
        p = np.full(self.size, 1.0 / self.size) if prob is None else np.asarray(prob, dtype=float)
        return float(np.sum(p * self.symbols.astype(float) ** 2))


def _gray_code(i: np.ndarray) -> np.ndarray:
    return i ^ (i >> 1)


def _gray_inverse(g: int) -> int:
    i = 0
    while g:
        i ^= g
        g >>= 1
    return i


class Labelling:
    """Bijection between symbols and length-m bit labels (levels b1..bm).

    Gray uses the binary-reflected code on the symbol index; natural uses
    the plain binary expansion.  Bit level j of symbol index i is bit
    (j - 1) of the codeword, so b1 is the least significant level and the
    sign level b_m is the most significant (b_m = 1 iff symbol > 0).
    """

    def __init__(self, constellation: AskConstellation, kind: str = GRAY):
        if kind not in (GRAY, NATURAL):
            raise ValueError(f"unknown labelling kind {kind!r}")
        self.constellation = constellation
        self.kind = kind
        self.m = constellation.m
        idx = np.arange(constellation.size)
        codes = _gray_code(idx) if kind == GRAY else idx
        # table[i, j] = bit level j+1 of symbol index i
        self.table = ((codes[:, None] >> np.arange(self.m)[None, :]) & 1).astype(np.uint8)
        self._index_of_code = np.empty(constellation.size, dtype=np.int64)
        self._index_of_code[codes] = idx

    def bits_of(self, x) -> np.ndarray:
        """Label bits of symbol value(s); shape (..., m), level b1 first."""
        return self.table[self.constellation.index_of(x)]

    def symbol_of(self, bits) -> np.ndarray:
        """Symbol value(s) for label bit vectors of shape (..., m)."""
        bits = np.asarray(bits, dtype=np.int64)
        if bits.shape[-1] != self.m:
            raise ValueError(f"expected {self.m} bit levels, got {bits.shape[-1]}")
        code = (bits << np.arange(self.m)).sum(axis=-1)
        return self.constellation.symbols[self._index_of_code[code]]


class SubConstellation:
    """Reference half of the alphabet: every second symbol from the bottom.

    The members inherit the Gray labels of the full alphabet restricted to
    levels b2..bm (their b1 bits are all equal under Gray labelling once
    the XOR-of-label parity is fixed, so b1 is dropped).
    """

    def __init__(self, constellation: AskConstellation):
        self.base = constellation
        self.m = constellation.m
        self.members = constellation.symbols[::2].copy()
        self.size = self.members.size
        # Reduced labels in member order equal the Gray code of the member
        # index, level b2 first.
        t = np.arange(self.size)
        codes = _gray_code(t)
        self.reduced_table = ((codes[:, None] >> np.arange(self.m - 1)[None, :]) & 1).astype(np.uint8)
        self._member_of_code = np.empty(self.size, dtype=np.int64)
        self._member_of_code[codes] = t

    def map_reduced(self, bits) -> np.ndarray:
        """Member symbol(s) whose reduced Gray label (b2..bm) equals bits."""
        bits = np.asarray(bits, dtype=np.int64)
        if bits.shape[-1] != self.m - 1:
            raise ValueError(f"expected {self.m - 1} bit levels, got {bits.shape[-1]}")
        code = (bits << np.arange(self.m - 1)).sum(axis=-1)
        return self.members[self._member_of_code[code]]

    def apply_shift(self, x, b1, bits) -> np.ndarray:
        """Resolve the transmitted symbol from a member and the b1 bit.

        The symbol stays at x when b1 XOR b2 XOR ... XOR bm = 0 and moves
        to x + 2 otherwise; either way its full Gray label is (b1, bits).
        """
        bits = np.asarray(bits, dtype=np.int64)
        parity = (np.asarray(b1, dtype=np.int64) + bits.sum(axis=-1)) & 1
        return np.asarray(x) + 2 * parity

    def map_full(self, b1, bits) -> np.ndarray:
        """map_reduced followed by apply_shift, vectorised over symbols."""
        x = self.map_reduced(bits)
        return self.apply_shift(x, b1, bits)
