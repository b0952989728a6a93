"""Error accumulation and link metrics.

TrialResult is a plain additive accumulator: merging results from trials run in
any grouping gives the same totals as one long run, which is what makes the
serial and multiprocess execution paths bit-identical when folded in trial order.

Two EVM conventions coexist:
  evm()        pooled RMS over every accumulated symbol, sqrt(sum|e|^2 / sum|x|^2)
  frame_evm()  mean over frames of the per-frame RMS EVM
The pooled form is the textbook estimator; the frame-mean form is what link
budget floors are quoted in and is the `evm` column of sweep CSVs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

__all__ = [
    "TrialResult",
    "merge",
    "noise_variance",
    "evm",
    "frame_evm",
    "ser",
    "rel_improvement",
    "ser_qam_awgn",
]


@dataclass(frozen=True)
class TrialResult:
    """Additive error totals for one or more simulated frames."""

    symbol_errors: int = 0
    symbols: int = 0
    err_energy: float = 0.0
    ref_energy: float = 0.0
    frames: int = 0
    frame_evm_sum: float = 0.0

    def __post_init__(self):
        if self.symbol_errors < 0 or self.symbols < 0:
            raise ValueError("counts must be >= 0")
        if self.symbol_errors > self.symbols:
            raise ValueError(f"symbol_errors {self.symbol_errors} > symbols {self.symbols}")
        if self.err_energy < 0 or self.ref_energy < 0:
            raise ValueError("energies must be >= 0")

    def __add__(self, other: "TrialResult") -> "TrialResult":
        return TrialResult(
            self.symbol_errors + other.symbol_errors,
            self.symbols + other.symbols,
            self.err_energy + other.err_energy,
            self.ref_energy + other.ref_energy,
            self.frames + other.frames,
            self.frame_evm_sum + other.frame_evm_sum,
        )


def merge(results) -> TrialResult:
    """Fold an iterable of accumulators in the order given."""
    total = TrialResult()
    for r in results:
        total = total + r
    return total


def noise_variance(snr_db: float, n_streams: int) -> float:
    """Per-entry complex noise variance giving the requested post-ZF stream SNR.

    Total transmit energy per channel use is n_streams (unit-energy symbols),
    so sigma^2_w = n_streams / 10^(snr_db/10).
    """
    if n_streams < 1:
        raise ValueError(f"n_streams must be >= 1, got {n_streams}")
    return n_streams / (10.0 ** (snr_db / 10.0))


def evm(acc: TrialResult) -> float:
    """Pooled RMS EVM over all accumulated symbols."""
    if acc.ref_energy <= 0.0:
        raise ValueError("empty accumulator: no reference energy")
    return math.sqrt(acc.err_energy / acc.ref_energy)


def frame_evm(acc: TrialResult) -> float:
    """Mean over frames of the per-frame RMS EVM."""
    if acc.frames <= 0:
        raise ValueError("empty accumulator: no frames")
    return acc.frame_evm_sum / acc.frames


def ser(acc: TrialResult) -> float:
    """Symbol error rate."""
    if acc.symbols <= 0:
        raise ValueError("empty accumulator: no symbols")
    return acc.symbol_errors / acc.symbols


def rel_improvement(ser_plain: float, ser_comp: float) -> float:
    """Relative SER improvement (ser_plain - ser_comp) / ser_plain.

    Undefined when the uncompensated link already makes no errors; reported as
    NaN so table writers can render it as not-applicable.
    """
    if ser_plain < 0 or ser_comp < 0:
        raise ValueError("rates must be >= 0")
    if ser_plain == 0.0:
        return math.nan
    return (ser_plain - ser_comp) / ser_plain


def _qfunc(x):
    return 0.5 * erfc(np.asarray(x) / math.sqrt(2.0))


def ser_qam_awgn(m: int, snr_linear: float) -> float:
    """Closed-form square-QAM symbol error rate on an AWGN channel.

    p_axis = 2 (1 - 1/sqrt(M)) Q(sqrt(3 snr / (M-1))), SER = 1 - (1 - p_axis)^2.
    """
    root = math.isqrt(m)
    if root * root != m or m < 4:
        raise ValueError(f"m must be a square >= 4, got {m}")
    if snr_linear < 0:
        raise ValueError("snr must be >= 0")
    p = 2.0 * (1.0 - 1.0 / root) * float(_qfunc(math.sqrt(3.0 * snr_linear / (m - 1))))
    return 1.0 - (1.0 - p) ** 2
