"""Oscillator phase noise: Wiener (free-running) and stationary (mask-shaped) models.

Conventions
-----------
Mask levels and the Lorentzian reference are two-sided phase PSDs in dBc/Hz
(equivalently dB(rad^2/Hz)); far from the carrier the SSB phase-noise level
equals the phase PSD under this convention.  One-sided Welch estimates must be
halved before comparing against these levels.

The Wiener process theta(n) = theta(n-1) + delta(n), delta ~ N(0, sigma2_delta),
has increment variance sigma2_delta = 4 pi beta T_s for a Lorentzian of
half-width beta, and its random-walk PSD sigma2_delta T_s / (4 sin^2(pi f T_s))
matches the Lorentzian tail beta/(pi (beta^2 + f^2)) for beta << f << 1/T_s.

Stationary paths are unit white Gaussian noise shaped by a linear-phase FIR
whose magnitude is the square root of the target PSD; the filter transient is
removed structurally by 'valid' convolution, so every returned sample has the
full stationary statistics.  A filter_len-tap filter cannot resolve spectral
features below f_sample / filter_len (about 244 kHz at the defaults), which
bounds how faithfully the lowest mask corner is rendered.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve, firwin2

from .numerics import RandomSource

__all__ = [
    "WienerModel",
    "StationaryModel",
    "OscillatorTopology",
    "beta_from_sigma2",
    "sigma2_from_beta",
    "lorentzian_level",
    "wiener_path",
    "mask_level_db",
    "design_mask_filter",
    "stationary_path",
    "oscillator_bank",
    "BUILTIN_MASKS",
    "builtin_mask",
    "load_mask",
    "save_mask",
    "resolve_mask",
]


@dataclass(frozen=True)
class WienerModel:
    """Free-running oscillator: Gaussian random-walk phase."""

    sigma2_delta: float
    ts: float = 1e-9
    theta0: float = 0.0

    def __post_init__(self):
        if self.sigma2_delta < 0:
            raise ValueError("sigma2_delta must be >= 0")
        if self.ts <= 0:
            raise ValueError("ts must be > 0")


def _validate_mask(mask) -> tuple[tuple[float, float], ...]:
    pts = tuple((float(f), float(l)) for f, l in mask)
    if not pts:
        raise ValueError("mask needs at least one (offset_hz, level_db) point")
    offs = [f for f, _ in pts]
    if any(f <= 0 for f in offs):
        raise ValueError("mask offsets must be > 0")
    if any(b <= a for a, b in zip(offs, offs[1:])):
        raise ValueError("mask offsets must be strictly ascending")
    if not all(math.isfinite(l) for _, l in pts):
        raise ValueError("mask levels must be finite")
    return pts


@dataclass(frozen=True)
class StationaryModel:
    """PLL-style oscillator: stationary phase with a mask-shaped PSD.

    mask is a sequence of (offset_hz, level_dbc_per_hz) points, ascending in
    offset, interpreted piecewise-linearly in log-log with flat extension on
    both ends.  theta_const adds a fixed phase offset.  f_sample is the
    simulation rate the shaping filter is designed for.
    """

    mask: tuple[tuple[float, float], ...]
    theta_const: float = 0.0
    filter_len: int = 4097
    f_sample: float = 1e9

    def __post_init__(self):
        object.__setattr__(self, "mask", _validate_mask(self.mask))
        if self.filter_len < 3 or self.filter_len % 2 == 0:
            raise ValueError("filter_len must be odd and >= 3")
        if self.f_sample <= 0:
            raise ValueError("f_sample must be > 0")


@dataclass(frozen=True)
class OscillatorTopology:
    """Which antennas share oscillators on each side."""

    tx_mode: str
    rx_mode: str

    def __post_init__(self):
        for m in (self.tx_mode, self.rx_mode):
            if m not in ("common", "individual"):
                raise ValueError(f"oscillator mode must be common or individual, got {m!r}")

    @classmethod
    def from_name(cls, name: str) -> "OscillatorTopology":
        """Parse names like 'common-common', 'individual/common', 'individual-Tx/common-Rx'."""
        tokens = [t for t in re.split(r"[-/_\s]+", name.strip().lower()) if t not in ("tx", "rx", "")]
        if len(tokens) != 2:
            raise ValueError(f"cannot parse oscillator topology {name!r}")
        return cls(tokens[0], tokens[1])

    @property
    def name(self) -> str:
        return f"{self.tx_mode}-{self.rx_mode}"

    @property
    def fully_common(self) -> bool:
        return self.tx_mode == "common" and self.rx_mode == "common"


def beta_from_sigma2(sigma2_delta: float, ts: float) -> float:
    """Lorentzian half-width (3 dB linewidth / 2) implied by the walk variance."""
    if ts <= 0:
        raise ValueError("ts must be > 0")
    return sigma2_delta / (4.0 * math.pi * ts)


def sigma2_from_beta(beta: float, ts: float) -> float:
    """Per-sample increment variance for a target Lorentzian half-width."""
    if ts <= 0:
        raise ValueError("ts must be > 0")
    return 4.0 * math.pi * beta * ts


def lorentzian_level(beta: float, f) -> np.ndarray:
    """Two-sided Lorentzian phase PSD in dBc/Hz: 10 log10(beta / (pi (beta^2 + f^2)))."""
    if beta <= 0:
        raise ValueError("beta must be > 0")
    f = np.asarray(f, dtype=float)
    return 10.0 * np.log10(beta / (math.pi * (beta**2 + f**2)))


def wiener_path(model: WienerModel, n: int, rs: RandomSource) -> np.ndarray:
    """Random-walk phase path of length n; path[0] == theta0 exactly."""
    if n < 1:
        raise ValueError(f"path length must be >= 1, got {n}")
    g = rs.generator()
    inc = g.normal(0.0, math.sqrt(model.sigma2_delta), n - 1)
    path = np.empty(n)
    path[0] = model.theta0
    np.cumsum(inc, out=path[1:])
    path[1:] += model.theta0
    return path


def mask_level_db(mask, f) -> np.ndarray:
    """Mask level at frequency f: log-log interpolation, flat beyond the end points."""
    pts = _validate_mask(mask)
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequencies must be > 0")
    offs = np.log10([p[0] for p in pts])
    lvls = [p[1] for p in pts]
    return np.interp(np.log10(f), offs, lvls)


@lru_cache(maxsize=32)
def _cached_taps(mask, filter_len: int, f_sample: float):
    nyq = f_sample / 2.0
    if mask[-1][0] >= nyq:
        raise ValueError(f"mask offset {mask[-1][0]:g} Hz at or above Nyquist {nyq:g} Hz")
    # dense log grid so firwin2's linear-in-f interpolation tracks the log-log mask
    f_pts = np.logspace(math.log10(nyq) - 8.0, math.log10(nyq), 1025)
    f_pts[-1] = nyq
    level = mask_level_db(mask, f_pts)
    # drive is unit-variance white noise with two-sided PSD 1/f_sample, so
    # |G(f)|^2 / f_sample must equal the target PSD 10^(level/10)
    amp = np.sqrt(10.0 ** (level / 10.0) * f_sample)
    freq = np.concatenate(([0.0], f_pts / nyq))
    gain = np.concatenate(([amp[0]], amp))
    # kaiser beta trades corner smearing (mainlobe) against floor leakage
    # (sidelobes); 5.0 keeps both inside the mask tolerances at 4097 taps
    taps = firwin2(filter_len, freq, gain, window=("kaiser", 5.0))
    taps.flags.writeable = False
    return taps


def design_mask_filter(model: StationaryModel, f_sample: float | None = None) -> np.ndarray:
    """Linear-phase FIR whose magnitude response renders the mask PSD.

    Designs are cached on (mask, filter_len, f_sample); the returned array is
    read-only.
    """
    fs = model.f_sample if f_sample is None else float(f_sample)
    return _cached_taps(model.mask, model.filter_len, fs)


def stationary_path(model: StationaryModel, taps: np.ndarray, n: int, rs: RandomSource) -> np.ndarray:
    """Stationary phase path of length n: shaped white noise plus theta_const.

    The white drive is drawn longer than n and convolved in 'valid' mode, so no
    filter warm-up transient reaches the output.
    """
    if n < 1:
        raise ValueError(f"path length must be >= 1, got {n}")
    g = rs.generator()
    drive = g.normal(0.0, 1.0, n + len(taps) - 1)
    return model.theta_const + fftconvolve(drive, taps, mode="valid")


def _model_path(model, n: int, rs: RandomSource) -> np.ndarray:
    if isinstance(model, WienerModel):
        return wiener_path(model, n, rs)
    if isinstance(model, StationaryModel):
        return stationary_path(model, design_mask_filter(model), n, rs)
    raise TypeError(f"unsupported phase noise model {type(model).__name__}")


_TX_KEY = 0
_RX_KEY = 1


def oscillator_bank(
    topology: OscillatorTopology,
    tx_model,
    rx_model,
    n_ant: int,
    n_samples: int,
    rs: RandomSource,
) -> tuple[np.ndarray, np.ndarray]:
    """Phase trajectories for both sides, shape (n_ant, n_samples) each.

    A common side generates a single path broadcast to all antennas; an
    individual side generates n_ant independent paths.  The tx and rx banks are
    independent of each other in every topology.
    """
    if n_ant < 1:
        raise ValueError("n_ant must be >= 1")

    def side(mode, model, key):
        if mode == "common":
            p = _model_path(model, n_samples, rs.derive(key, 0))
            return np.tile(p, (n_ant, 1))
        return np.stack([_model_path(model, n_samples, rs.derive(key, i)) for i in range(n_ant)])

    return side(topology.tx_mode, tx_model, _TX_KEY), side(topology.rx_mode, rx_model, _RX_KEY)


def _std_mask(a: float) -> tuple[tuple[float, float], ...]:
    return ((1e5, a + 20.0), (1e6, a), (1e7, a - 20.0), (1e8, a - 40.0))


BUILTIN_MASKS: dict[str, tuple[tuple[float, float], ...]] = {
    "reynolds85": _std_mask(-85.0),
    "dancila115": _std_mask(-115.0),
}


def builtin_mask(name: str) -> tuple[tuple[float, float], ...]:
    key = name.strip().lower()
    if key not in BUILTIN_MASKS:
        raise ValueError(f"unknown builtin mask {name!r}; choose from {sorted(BUILTIN_MASKS)}")
    return BUILTIN_MASKS[key]


def load_mask(path) -> tuple[tuple[float, float], ...]:
    """Read a mask file: one 'offset_hz level_db' pair per line, '#' comments."""
    pts = []
    with open(path) as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{ln}: expected 'offset_hz level_db', got {raw!r}")
            try:
                pts.append((float(parts[0]), float(parts[1])))
            except ValueError as e:
                raise ValueError(f"{path}:{ln}: {e}") from None
    return _validate_mask(pts)


def save_mask(path, mask) -> None:
    pts = _validate_mask(mask)
    with open(path, "w") as fh:
        fh.write("# offset_hz  level_dbc_per_hz\n")
        for f, l in pts:
            fh.write(f"{f:.10g} {l:.10g}\n")


def resolve_mask(spec: str) -> tuple[tuple[float, float], ...]:
    """Mask from a builtin name or a file path."""
    key = spec.strip()
    if key.lower() in BUILTIN_MASKS:
        return BUILTIN_MASKS[key.lower()]
    if not os.path.exists(key):
        raise ValueError(
            f"mask {spec!r} is neither a builtin ({', '.join(sorted(BUILTIN_MASKS))}) nor a file"
        )
    return load_mask(key)
