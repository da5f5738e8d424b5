"""Probabilistic amplitude shaping for BICM over AWGN.

Shaped 16-ASK transmission where the sub-constellation selector bit
carries code parity, with a quasi-cyclic LDPC codec, exact soft demapping
and a reproducible Monte Carlo harness.
"""

from .analysis import (
    InputDistribution,
    binary_entropy,
    maxwell_boltzmann,
    mb_required_snr,
    mutual_information,
    required_snr,
)
from .channel import Demapper, noise_variance, route_to_decoder, transmit
from .constellation import AskConstellation, Labelling, SubConstellation, ask_symbols
from .framing import FrameAssembler, FrameConfig, code_rate, info_rate
from .ldpc import BG1, BG2, BaseGraph, LiftedCode, lift, load_base_graph
from .shaping import (
    CcdmMatcher,
    ShapingParams,
    full_alphabet_distribution,
    induce_distribution,
    optimize_params,
)
from .sim import RunConfig, SimReport, emit_csv, run_sweep

__version__ = "0.1.0"
