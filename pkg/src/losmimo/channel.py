"""LOS MIMO channel construction: deterministic LOS part, Rayleigh scatter, Rician mix."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import RandomSource, dft_matrix, sample_cgauss

__all__ = [
    "ChannelMatrix",
    "los_dft",
    "UlaGeometry",
    "ula_channel",
    "optimal_spacing",
    "sample_nlos",
    "rician_mix",
]


@dataclass(frozen=True)
class ChannelMatrix:
    """Composite channel with its ingredients kept for diagnostics."""

    h: np.ndarray
    h_los: np.ndarray
    h_nlos: np.ndarray | None
    k_linear: float


def los_dft(n: int) -> np.ndarray:
    """Canonical orthogonal LOS response: unit-modulus DFT matrix, H^H H = n I."""
    return dft_matrix(n)


@dataclass(frozen=True)
class UlaGeometry:
    """Two parallel broadside uniform linear arrays facing each other.

    n elements each, tx_spacing/rx_spacing in meters, link_distance between the
    array planes, carrier wavelength in meters.
    """

    n: int
    tx_spacing: float
    rx_spacing: float
    link_distance: float
    wavelength: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if min(self.tx_spacing, self.rx_spacing, self.link_distance, self.wavelength) <= 0:
            raise ValueError("geometry lengths must be > 0")


def ula_channel(g: UlaGeometry) -> np.ndarray:
    """Free-space LOS response from exact element-to-element path lengths.

    H[m, k] = exp(j 2 pi r_mk / lambda) with r_mk the Euclidean distance from
    tx element k to rx element m; no amplitude taper (far-field, common gain).
    """
    tx = (np.arange(g.n) - (g.n - 1) / 2.0) * g.tx_spacing
    rx = (np.arange(g.n) - (g.n - 1) / 2.0) * g.rx_spacing
    dist = np.sqrt(g.link_distance**2 + np.subtract.outer(rx, tx) ** 2)
    return np.exp(2j * np.pi * dist / g.wavelength)


def optimal_spacing(wavelength: float, link_distance: float, n: int) -> float:
    """Spacing product d_t * d_r making the ULA response orthogonal: lambda R / n."""
    if min(wavelength, link_distance) <= 0 or n < 1:
        raise ValueError("arguments must be positive")
    return wavelength * link_distance / n


def sample_nlos(n: int, rs: RandomSource) -> np.ndarray:
    """i.i.d. unit-variance complex Gaussian scatter matrix, redrawn per frame."""
    return sample_cgauss(rs, (n, n), 1.0)


def rician_mix(h_los: np.ndarray, h_nlos: np.ndarray | None, k_linear: float) -> ChannelMatrix:
    """Rician combination sqrt(K/(1+K)) H_los + sqrt(1/(1+K)) H_nlos.

    k_linear = inf selects the pure LOS channel (h_nlos may be None then);
    k_linear = 0 is pure scatter.
    """
    h_los = np.asarray(h_los)
    if math.isinf(k_linear):
        return ChannelMatrix(h_los.copy(), h_los, None, k_linear)
    if k_linear < 0:
        raise ValueError(f"k_linear must be >= 0, got {k_linear}")
    if h_nlos is None:
        raise ValueError("h_nlos required for finite k_linear")
    h_nlos = np.asarray(h_nlos)
    if h_nlos.shape != h_los.shape:
        raise ValueError(f"shape mismatch: {h_los.shape} vs {h_nlos.shape}")
    a = math.sqrt(k_linear / (1.0 + k_linear))
    b = math.sqrt(1.0 / (1.0 + k_linear))
    return ChannelMatrix(a * h_los + b * h_nlos, h_los, h_nlos, k_linear)
