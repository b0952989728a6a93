"""Receive chain: LS channel estimation, ZF equalization, decision-directed phase tracking.

CSI modes
---------
perfect         use the true channel matrix, no training needed
training        LS estimate from the noise-free received training block; phase
                noise still acts during training, so the estimate absorbs the
                oscillators' training-time phase reference (default)
training-noisy  LS estimate from the noisy received training block
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelMatrix
from .metrics import TrialResult, noise_variance
from .modem import Constellation, Frame, nearest_point
from .numerics import RandomSource, pinv, sample_cgauss

__all__ = [
    "CSI_MODES",
    "RxConfig",
    "estimate_channel",
    "zf_equalize",
    "PnTracker",
    "track_and_compensate",
    "simulate_trial",
    "run_frame",
]

CSI_MODES = ("perfect", "training", "training-noisy")

TRACKER_MODES = ("per_stream", "averaged")


@dataclass(frozen=True)
class RxConfig:
    """Receiver options for one run."""

    compensation: bool = False
    alpha: float = 0.1
    tracker_mode: str = "per_stream"
    csi: str = "training"

    def __post_init__(self):
        if self.csi not in CSI_MODES:
            raise ValueError(f"csi must be one of {CSI_MODES}, got {self.csi!r}")
        if self.tracker_mode not in TRACKER_MODES:
            raise ValueError(f"tracker_mode must be one of {TRACKER_MODES}, got {self.tracker_mode!r}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")


def estimate_channel(y_t: np.ndarray, x_t: np.ndarray) -> np.ndarray:
    """Least-squares channel estimate Y_t X_t^H / L_t for orthogonal training.

    Requires X_t X_t^H = L_t I (Hadamard or DFT training satisfies this); the
    LS solution then reduces to the correlation form above.
    """
    y_t = np.asarray(y_t)
    x_t = np.asarray(x_t)
    if x_t.ndim != 2 or x_t.shape[1] < 1:
        raise ValueError("training block must be a non-empty matrix")
    l_t = x_t.shape[1]
    gram = x_t @ x_t.conj().T
    if np.linalg.norm(gram - l_t * np.eye(x_t.shape[0])) > 1e-8 * l_t:
        raise ValueError("training matrix is not orthogonal (X_t X_t^H != L_t I)")
    return y_t @ x_t.conj().T / l_t


def zf_equalize(h_hat: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Zero-forcing equalization; raises RankDeficiencyError on an unusable estimate."""
    return pinv(h_hat) @ y


@dataclass
class PnTracker:
    """First-order decision-directed phase tracker, one state per stream.

    Each step de-rotates the incoming symbol vector by the current estimate,
    makes hard decisions, then nudges every stream's estimate toward the
    residual angle of its own decision: theta += alpha * arg(x_hat conj(x_bar)).
    In averaged mode the per-stream estimates are collapsed to their arithmetic
    mean after each update, which suits links where all streams share one
    oscillator pair.
    """

    alpha: float = 0.1
    mode: str = "per_stream"
    theta_hat: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @classmethod
    def fresh(cls, n: int, alpha: float = 0.1, mode: str = "per_stream") -> "PnTracker":
        if mode not in TRACKER_MODES:
            raise ValueError(f"mode must be one of {TRACKER_MODES}, got {mode!r}")
        return cls(alpha, mode, np.zeros(n))

    def step(self, z_col: np.ndarray, c: Constellation) -> tuple[np.ndarray, np.ndarray]:
        """Compensate one symbol vector, decide, update. Returns (x_hat, labels)."""
        x_hat = z_col * np.exp(-1j * self.theta_hat)
        idx = np.abs(x_hat[:, None] - c.points).argmin(axis=1)
        self.theta_hat += self.alpha * np.angle(x_hat * c.points[idx].conj())
        if self.mode == "averaged":
            self.theta_hat[:] = self.theta_hat.mean()
        return x_hat, idx


def track_and_compensate(
    tracker: PnTracker, z: np.ndarray, c: Constellation
) -> tuple[np.ndarray, np.ndarray]:
    """Run the tracker across equalized symbols column by column.

    Returns (x_hat, labels) with x_hat the de-rotated symbols used for both
    decisions and EVM.  The tracker is advanced in place.
    """
    n, l = z.shape
    x_hat = np.empty_like(z)
    idx = np.empty((n, l), dtype=np.int64)
    for k in range(l):
        x_hat[:, k], idx[:, k] = tracker.step(z[:, k], c)
    return x_hat, idx


def _channel_matrix(channel) -> np.ndarray:
    if isinstance(channel, ChannelMatrix):
        return channel.h
    return np.asarray(channel)


def simulate_trial(
    channel,
    bank,
    frame: Frame,
    snr_db_list,
    cfg: RxConfig,
    rs: RandomSource,
) -> list[TrialResult]:
    """Push one frame through the link at each SNR, reusing one noise draw.

    The unit-variance noise matrix is drawn once and scaled per SNR point, so
    the SNR sweep for a given trial is driven by common random numbers.  bank is
    (theta_tx, theta_rx) with shape (n, l_f) each, or None for no phase noise.
    """
    h = _channel_matrix(channel)
    n, l_t, l_d = frame.n, frame.l_t, frame.l_d
    if h.shape != (n, n):
        raise ValueError(f"channel shape {h.shape} does not match frame n={n}")
    x = frame.x
    if bank is None:
        y_clean = h @ x
    else:
        theta_tx, theta_rx = bank
        if theta_tx.shape != (n, frame.l_f) or theta_rx.shape != (n, frame.l_f):
            raise ValueError("oscillator bank shape does not match frame")
        y_clean = np.exp(1j * theta_rx) * (h @ (np.exp(1j * theta_tx) * x))
    if cfg.csi != "perfect" and l_t == 0:
        raise ValueError(f"csi={cfg.csi!r} needs a training prefix, frame has none")

    w_unit = sample_cgauss(rs, (n, frame.l_f), 1.0)
    x_d = x[:, l_t:]
    ref_energy = float(np.sum(x_d.real**2 + x_d.imag**2))

    g = None
    if cfg.csi == "perfect":
        g = pinv(h)
    elif cfg.csi == "training":
        g = pinv(estimate_channel(y_clean[:, :l_t], x[:, :l_t]))

    out = []
    for snr_db in snr_db_list:
        sigma_w = math.sqrt(noise_variance(snr_db, n))
        y = y_clean + sigma_w * w_unit
        if cfg.csi == "training-noisy":
            g_snr = pinv(estimate_channel(y[:, :l_t], x[:, :l_t]))
        else:
            g_snr = g
        z = g_snr @ y[:, l_t:]
        if cfg.compensation:
            tracker = PnTracker.fresh(n, cfg.alpha, cfg.tracker_mode)
            x_hat, idx = track_and_compensate(tracker, z, frame.constellation)
        else:
            x_hat = z
            idx = nearest_point(frame.constellation, z)
        errors = int(np.count_nonzero(idx != frame.data_indices))
        e = x_hat - x_d
        err_energy = float(np.sum(e.real**2 + e.imag**2))
        # per-frame RMS EVM with the unit-energy symbol normalization
        fe = math.sqrt(err_energy / (n * l_d))
        out.append(TrialResult(errors, n * l_d, err_energy, ref_energy, 1, fe))
    return out


def run_frame(channel, bank, frame: Frame, snr_db: float, cfg: RxConfig, rs: RandomSource) -> TrialResult:
    """Single-SNR convenience wrapper around simulate_trial."""
    return simulate_trial(channel, bank, frame, [snr_db], cfg, rs)[0]
