"""Real-valued AWGN channel and prior-aware bit-level soft demapping.

The demapper folds the symbol prior into exact per-level log-likelihood
ratios (positive means bit 0), computed with log-sum-exp stabilisation.
LLRs are routed to decoder columns through a frame layout: transmitted
label bits land on their code columns, filler columns receive the
saturation value (known zeros) and everything else (punctured prefix,
discarded parity) stays at zero.
"""

import numpy as np

from .analysis import InputDistribution
from .constellation import Labelling
from .ldpc import LLR_CLIP


def noise_variance(es: float, snr_db: float) -> float:
    """sigma^2 for a given average symbol energy and Es/sigma^2 in dB."""
    return es / 10.0 ** (snr_db / 10.0)


def transmit(symbols, noise_var: float, rng) -> np.ndarray:
    """AWGN: y = x + n with i.i.d. zero-mean Gaussian noise."""
    x = np.asarray(symbols, dtype=np.float64)
    if noise_var == 0.0:
        return x.copy()
    return x + rng.normal(0.0, np.sqrt(noise_var), size=x.shape)


class Demapper:
    """Exact bitwise soft demapper for one labelling and symbol prior."""

    def __init__(self, labelling: Labelling, prior: InputDistribution | None = None):
        self.labelling = labelling
        self.m = labelling.m
        self.symbols = labelling.constellation.symbols.astype(np.float64)
        if prior is None:
            prior = InputDistribution.uniform(self.symbols)
        if prior.symbols.shape != self.symbols.shape or np.any(prior.symbols != self.symbols):
            raise ValueError("prior must cover the labelling alphabet")
        self.prior = prior
        with np.errstate(divide="ignore"):
            self._log_prior = np.where(prior.prob > 0, np.log(np.maximum(prior.prob, 1e-300)), -np.inf)
        self._zero_masks = [labelling.table[:, j] == 0 for j in range(self.m)]

    def llrs(self, y, noise_var: float) -> np.ndarray:
        """Per-level LLRs for received values y; shape (len(y), m)."""
        y = np.atleast_1d(np.asarray(y, dtype=np.float64))
        w = self._log_prior[None, :] - (y[:, None] - self.symbols[None, :]) ** 2 / (2.0 * noise_var)
        out = np.empty((y.size, self.m))
        for j, mask in enumerate(self._zero_masks):
            out[:, j] = _lse(w[:, mask]) - _lse(w[:, ~mask])
        return out

    def posteriors(self, y, noise_var: float) -> np.ndarray:
        """Brute-force bit posteriors P(bit_j = 0 | y) by direct summation.

        Kept independent of the LLR path so the two can cross-check each
        other; works in the probability domain.
        """
        y = np.atleast_1d(np.asarray(y, dtype=np.float64))
        like = self.prior.prob[None, :] * np.exp(
            -((y[:, None] - self.symbols[None, :]) ** 2) / (2.0 * noise_var)
        )
        out = np.empty((y.size, self.m))
        total = like.sum(axis=1)
        for j, mask in enumerate(self._zero_masks):
            out[:, j] = like[:, mask].sum(axis=1) / total
        return out


def _lse(w: np.ndarray) -> np.ndarray:
    if w.shape[1] == 0:
        return np.full(w.shape[0], -np.inf)
    amax = np.max(w, axis=1)
    safe = np.where(np.isfinite(amax), amax, 0.0)
    return np.log(np.sum(np.exp(w - safe[:, None]), axis=1)) + np.where(
        np.isfinite(amax), safe, amax
    )


def route_to_decoder(llr_planes: np.ndarray, layout) -> np.ndarray:
    """Scatter transmitted-bit LLRs into a decoder input vector.

    llr_planes has shape (k, m) matching layout.tx_code_cols; filler
    columns are pinned to the saturation value, all remaining columns
    (punctured prefix, discarded parity) stay at zero.
    """
    llr_planes = np.asarray(llr_planes)
    if llr_planes.shape != layout.tx_code_cols.shape:
        raise ValueError(
            f"LLR planes {llr_planes.shape} do not match layout {layout.tx_code_cols.shape}"
        )
    vec = np.zeros(layout.n_code_cols, dtype=np.float64)
    vec[layout.tx_code_cols.ravel()] = np.clip(llr_planes.ravel(), -LLR_CLIP, LLR_CLIP)
    vec[layout.filler_cols] = LLR_CLIP
    return vec
