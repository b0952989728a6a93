import math

import numpy as np
import pytest

from losmimo.channel import (
    UlaGeometry,
    los_dft,
    optimal_spacing,
    rician_mix,
    sample_nlos,
    ula_channel,
)
from losmimo.numerics import RandomSource


class TestLosDft:
    @pytest.mark.parametrize("n", (2, 4, 8, 16))
    def test_orthogonal_columns(self, n):
        h = los_dft(n)
        assert np.allclose(h.conj().T @ h, n * np.eye(n), atol=1e-9)
        assert np.allclose(np.abs(h), 1.0)


class TestUlaChannel:
    def test_optimal_spacing_gives_orthogonal_channel(self):
        lam, r, n = 0.005, 100.0, 4
        d = math.sqrt(optimal_spacing(lam, r, n))
        h = ula_channel(UlaGeometry(n, d, d, r, lam))
        gram = h.conj().T @ h
        # off-diagonal leakage is a geometry artifact, small at R >> aperture
        off = gram - np.diag(np.diag(gram))
        assert np.allclose(np.diag(gram).real, n, rtol=1e-12)
        assert np.max(np.abs(off)) / n < 0.05

    def test_unit_modulus(self):
        h = ula_channel(UlaGeometry(3, 0.1, 0.2, 50.0, 0.01))
        assert np.allclose(np.abs(h), 1.0)

    def test_symmetry_of_reciprocal_geometry(self):
        g = UlaGeometry(4, 0.3, 0.3, 80.0, 0.005)
        h = ula_channel(g)
        assert np.allclose(h, h.T)

    def test_bad_geometry_rejected(self):
        with pytest.raises(ValueError):
            UlaGeometry(4, -0.1, 0.1, 10.0, 0.01)
        with pytest.raises(ValueError):
            UlaGeometry(0, 0.1, 0.1, 10.0, 0.01)

    def test_optimal_spacing_formula(self):
        assert optimal_spacing(0.005, 100.0, 4) == pytest.approx(0.125)


class TestSampleNlos:
    def test_unit_variance_entries(self):
        rs = RandomSource(3, 0)
        acc = np.zeros((4, 4))
        trials = 2000
        for k in range(trials):
            h = sample_nlos(4, rs.derive(k))
            acc += np.abs(h) ** 2
        assert np.allclose(acc / trials, 1.0, atol=0.1)

    def test_wishart_mean(self):
        # E[H^H H] / N = I for i.i.d. unit-variance entries
        rs = RandomSource(3, 1)
        n, trials = 4, 10_000
        acc = np.zeros((n, n), dtype=complex)
        for k in range(trials):
            h = sample_nlos(n, rs.derive(k))
            acc += h.conj().T @ h
        assert np.allclose(acc / (trials * n), np.eye(n), atol=0.02)


class TestRicianMix:
    def test_pure_los_at_infinite_k(self):
        h_los = los_dft(4)
        cm = rician_mix(h_los, None, math.inf)
        assert np.array_equal(cm.h, h_los)
        assert cm.h_nlos is None

    def test_pure_scatter_at_zero_k(self):
        h_los = los_dft(4)
        h_nlos = sample_nlos(4, RandomSource(4, 0))
        cm = rician_mix(h_los, h_nlos, 0.0)
        assert np.allclose(cm.h, h_nlos)

    def test_k_10db_weights(self):
        h_los = los_dft(2)
        h_nlos = np.full((2, 2), 1.0 + 0j)
        k = 10.0
        cm = rician_mix(h_los, h_nlos, k)
        a = math.sqrt(k / (1 + k))
        b = math.sqrt(1 / (1 + k))
        assert a == pytest.approx(0.95346, abs=1e-5)
        assert b == pytest.approx(0.30151, abs=1e-5)
        assert np.allclose(cm.h, a * h_los + b * h_nlos)

    def test_average_power_preserved(self):
        # component weights are a power split: a^2 + b^2 = 1
        rs = RandomSource(4, 1)
        n, trials, k = 4, 4000, 10.0
        total = 0.0
        for i in range(trials):
            cm = rician_mix(los_dft(n), sample_nlos(n, rs.derive(i)), k)
            total += float(np.mean(np.abs(cm.h) ** 2))
        assert total / trials == pytest.approx(1.0, rel=0.02)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            rician_mix(los_dft(4), np.zeros((3, 3), dtype=complex), 1.0)

    def test_negative_k_rejected(self):
        with pytest.raises(ValueError):
            rician_mix(los_dft(2), np.zeros((2, 2), dtype=complex), -0.5)

    def test_missing_nlos_rejected(self):
        with pytest.raises(ValueError):
            rician_mix(los_dft(2), None, 1.0)
