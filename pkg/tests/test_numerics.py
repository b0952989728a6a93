import numpy as np
import pytest

from losmimo.numerics import (
    HadamardConstructionError,
    RandomSource,
    RankDeficiencyError,
    dft_matrix,
    hadamard,
    pinv,
    sample_cgauss,
)


class TestRandomSource:
    def test_same_source_reproduces(self):
        rs = RandomSource(42, 7)
        a = rs.generator().normal(size=100)
        b = rs.generator().normal(size=100)
        assert np.array_equal(a, b)

    def test_streams_differ(self):
        a = RandomSource(42, 0).generator().normal(size=100)
        b = RandomSource(42, 1).generator().normal(size=100)
        assert not np.array_equal(a, b)

    def test_master_seeds_differ(self):
        a = RandomSource(1, 0).generator().normal(size=100)
        b = RandomSource(2, 0).generator().normal(size=100)
        assert not np.array_equal(a, b)

    def test_derive_creates_distinct_streams(self):
        rs = RandomSource(42, 3)
        children = [rs.derive(0), rs.derive(1), rs.derive(0, 0), rs.derive(0, 1)]
        draws = [c.generator().normal(size=50) for c in children]
        for i in range(len(draws)):
            for j in range(i + 1, len(draws)):
                assert not np.array_equal(draws[i], draws[j])

    def test_derive_is_pure(self):
        rs = RandomSource(42, 3)
        assert rs.derive(1, 2) == rs.derive(1, 2)
        assert rs.subpath == ()

    def test_cross_stream_correlation_small(self):
        n = 100_000
        a = sample_cgauss(RandomSource(7, 0), n)
        b = sample_cgauss(RandomSource(7, 1), n)
        rho = np.abs(np.vdot(a, b)) / n
        assert rho < 0.01


class TestSampleCgauss:
    def test_moments(self):
        z = sample_cgauss(RandomSource(11, 0), 1_000_000, variance=1.0)
        var = float(np.mean(np.abs(z) ** 2))
        assert 0.99 < var < 1.01
        assert abs(np.mean(z)) < 0.005

    def test_variance_scaling(self):
        z = sample_cgauss(RandomSource(11, 1), 200_000, variance=4.0)
        assert abs(np.mean(np.abs(z) ** 2) - 4.0) < 0.05

    def test_circularity(self):
        # pseudo-variance E[z^2] vanishes for circular symmetry
        z = sample_cgauss(RandomSource(11, 2), 500_000)
        assert abs(np.mean(z**2)) < 0.01

    def test_zero_variance(self):
        z = sample_cgauss(RandomSource(11, 3), 10, variance=0.0)
        assert np.all(z == 0)

    def test_shape_tuple(self):
        z = sample_cgauss(RandomSource(11, 4), (3, 5))
        assert z.shape == (3, 5)

    def test_negative_variance_rejected(self):
        with pytest.raises(ValueError):
            sample_cgauss(RandomSource(11, 5), 4, variance=-1.0)

    def test_deterministic(self):
        rs = RandomSource(12, 6)
        assert np.array_equal(sample_cgauss(rs, 32), sample_cgauss(rs, 32))


class TestPinv:
    def test_identity_inverse(self):
        m = np.eye(3, dtype=complex)
        assert np.allclose(pinv(m), m)

    def test_matches_numpy_on_well_conditioned(self):
        g = RandomSource(5, 0).generator()
        m = g.normal(size=(4, 4)) + 1j * g.normal(size=(4, 4))
        assert np.allclose(pinv(m), np.linalg.pinv(m), atol=1e-12)

    def test_reconstruction(self):
        g = RandomSource(5, 1).generator()
        m = g.normal(size=(6, 6)) + 1j * g.normal(size=(6, 6))
        assert np.allclose(m @ pinv(m) @ m, m, atol=1e-10)

    def test_singular_raises(self):
        m = np.ones((3, 3))
        with pytest.raises(RankDeficiencyError):
            pinv(m)

    def test_cond_limit_enforced(self):
        m = np.diag([1.0, 1e-13])
        with pytest.raises(RankDeficiencyError):
            pinv(m)
        # same matrix passes with a looser limit
        out = pinv(m, cond_limit=1e14)
        assert np.allclose(out, np.diag([1.0, 1e13]))


SUPPORTED_ORDERS = (1, 2, 4, 8, 12, 16, 20, 24, 32, 40, 48, 64, 80, 96)


class TestHadamard:
    @pytest.mark.parametrize("n", SUPPORTED_ORDERS)
    def test_orthogonal_and_unimodular(self, n):
        h = hadamard(n)
        assert h.dtype == np.int64
        assert np.all(np.abs(h) == 1)
        assert np.array_equal(h @ h.T, n * np.eye(n, dtype=np.int64))

    def test_order_2_matches_sylvester(self):
        assert np.array_equal(hadamard(2), np.array([[1, 1], [1, -1]]))

    @pytest.mark.parametrize("n", (3, 6, 10))
    def test_non_multiple_of_four_rejected(self, n):
        with pytest.raises(HadamardConstructionError):
            hadamard(n)

    def test_unreachable_order_mentions_fallback(self):
        with pytest.raises(HadamardConstructionError, match="DFT"):
            hadamard(28)

    def test_order_92_unreachable(self):
        with pytest.raises(HadamardConstructionError):
            hadamard(92)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            hadamard(0)


class TestDftMatrix:
    @pytest.mark.parametrize("n", (1, 2, 3, 4, 7, 16))
    def test_scaled_unitary(self, n):
        w = dft_matrix(n)
        assert np.allclose(w.conj().T @ w, n * np.eye(n), atol=1e-10)
        assert np.allclose(np.abs(w), 1.0)

    def test_n2_equals_hadamard(self):
        assert np.allclose(dft_matrix(2), hadamard(2))
