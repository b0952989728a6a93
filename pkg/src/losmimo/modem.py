"""Constellations, symbol mapping, and frame assembly."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import RandomSource, dft_matrix, hadamard

__all__ = [
    "Constellation",
    "make_constellation",
    "modulate",
    "nearest_point",
    "Frame",
    "build_frame",
]

# Gray sequences: k-th entry is the bit label whose point sits at position k
# along the axis (QAM) or around the circle (PSK).
_GRAY2 = (0b00, 0b01, 0b11, 0b10)
_GRAY3 = (0b000, 0b001, 0b011, 0b010, 0b110, 0b111, 0b101, 0b100)
_GRAY4 = (0, 1, 3, 2, 6, 7, 5, 4, 12, 13, 15, 14, 10, 11, 9, 8)


@dataclass(frozen=True)
class Constellation:
    """Unit-mean-energy symbol alphabet; points indexed by bit label."""

    name: str
    points: np.ndarray

    @property
    def order(self) -> int:
        return len(self.points)

    def __post_init__(self):
        ex = float(np.mean(np.abs(self.points) ** 2))
        if abs(ex - 1.0) > 1e-12:
            raise ValueError(f"{self.name}: mean symbol energy {ex!r} != 1")


def _qam_points(m: int) -> np.ndarray:
    side = int(round(m ** 0.5))
    gray = {4: _GRAY2, 8: _GRAY3}[side] if side in (4, 8) else None
    if gray is None:
        raise ValueError(f"unsupported QAM order {m}")
    levels = np.arange(-(side - 1), side, 2, dtype=float)
    # label -> axis position, so point index equals the Gray bit label
    pos = {label: k for k, label in enumerate(gray)}
    norm = np.sqrt(np.mean(levels**2) * 2.0)
    pts = np.empty(m, dtype=complex)
    bits = side.bit_length() - 1
    for label in range(m):
        hi, lo = label >> bits, label & (side - 1)
        pts[label] = (levels[pos[hi]] + 1j * levels[pos[lo]]) / norm
    return pts


def _psk_points(m: int) -> np.ndarray:
    gray = {8: _GRAY3, 16: _GRAY4}[m]
    pts = np.empty(m, dtype=complex)
    for k, label in enumerate(gray):
        pts[label] = np.exp(2j * np.pi * k / m)
    return pts


_BUILDERS = {
    "BPSK": lambda: np.array([1.0 + 0j, -1.0 + 0j]),
    "QAM16": lambda: _qam_points(16),
    "QAM64": lambda: _qam_points(64),
    "PSK8": lambda: _psk_points(8),
    "PSK16": lambda: _psk_points(16),
}


def make_constellation(name: str) -> Constellation:
    """Gray-mapped constellation by name: BPSK, QAM16, QAM64, PSK8, PSK16."""
    key = name.upper()
    if key not in _BUILDERS:
        raise ValueError(f"unknown constellation {name!r}; choose from {sorted(_BUILDERS)}")
    return Constellation(key, _BUILDERS[key]())


def modulate(c: Constellation, indices: np.ndarray) -> np.ndarray:
    """Map integer labels to constellation points."""
    idx = np.asarray(indices)
    if idx.size and (idx.min() < 0 or idx.max() >= c.order):
        raise ValueError(f"labels out of range for {c.name}")
    return c.points[idx]


def nearest_point(c: Constellation, z) -> np.ndarray:
    """Minimum-distance hard decision; ties resolve to the lowest index."""
    z = np.asarray(z)
    if not np.all(np.isfinite(z)):
        raise ValueError("non-finite input to nearest_point")
    d = np.abs(z[..., None] - c.points) ** 2
    return np.argmin(d, axis=-1)


@dataclass(frozen=True)
class Frame:
    """One transmit block: optional training prefix followed by payload.

    x has shape (n, l_t + l_d); the first l_t columns are the training matrix,
    data_indices holds the payload labels (n, l_d).
    """

    n: int
    l_t: int
    l_d: int
    x: np.ndarray
    data_indices: np.ndarray
    constellation: Constellation

    @property
    def l_f(self) -> int:
        return self.l_t + self.l_d


def build_frame(
    n: int,
    l_d: int,
    c: Constellation,
    rs: RandomSource,
    training: bool = True,
    dft_training: bool = False,
) -> Frame:
    """Assemble a frame with uniform random payload.

    training=True prepends an orthogonal pilot block of length l_t = n: Hadamard
    +/-1 columns by default, or unit-modulus DFT columns when dft_training is
    set (the fallback for orders with no Hadamard construction).
    """
    if n < 1 or l_d < 1:
        raise ValueError("n and l_d must be >= 1")
    g = rs.generator()
    data_idx = g.integers(0, c.order, size=(n, l_d))
    xd = c.points[data_idx]
    if training:
        xt = dft_matrix(n) if dft_training else hadamard(n).astype(complex)
        x = np.concatenate([xt, xd], axis=1)
        l_t = n
    else:
        x = xd
        l_t = 0
    return Frame(n, l_t, l_d, x, data_idx, c)
