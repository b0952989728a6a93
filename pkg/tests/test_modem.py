import numpy as np
import pytest

from losmimo.modem import Frame, build_frame, make_constellation, modulate, nearest_point
from losmimo.numerics import RandomSource, dft_matrix, hadamard

NAMES = ("BPSK", "QAM16", "QAM64", "PSK8", "PSK16")
ORDERS = {"BPSK": 2, "QAM16": 16, "QAM64": 64, "PSK8": 8, "PSK16": 16}


class TestConstellations:
    @pytest.mark.parametrize("name", NAMES)
    def test_unit_mean_energy(self, name):
        c = make_constellation(name)
        assert abs(np.mean(np.abs(c.points) ** 2) - 1.0) <= 1e-12

    @pytest.mark.parametrize("name", NAMES)
    def test_order_and_distinct_points(self, name):
        c = make_constellation(name)
        assert c.order == ORDERS[name]
        assert len(np.unique(np.round(c.points, 12))) == c.order

    def test_case_insensitive(self):
        assert make_constellation("qam16").name == "QAM16"

    def test_unknown_rejected(self):
        with pytest.raises(ValueError, match="unknown constellation"):
            make_constellation("QAM32")

    def test_qam16_scaling(self):
        c = make_constellation("QAM16")
        mags = np.unique(np.round(np.abs(c.points) ** 2 * 10, 9))
        assert np.allclose(mags, [2, 10, 18])

    def test_qam64_scaling(self):
        c = make_constellation("QAM64")
        assert np.max(np.abs(c.points.real)) == pytest.approx(7 / np.sqrt(42))

    @pytest.mark.parametrize("name", ("PSK8", "PSK16"))
    def test_psk_unit_modulus(self, name):
        c = make_constellation(name)
        assert np.allclose(np.abs(c.points), 1.0)

    def test_qam16_gray_neighbors(self):
        # horizontally or vertically adjacent grid points differ in one bit
        c = make_constellation("QAM16")
        step = 2 / np.sqrt(10)
        for a in range(16):
            for b in range(a + 1, 16):
                d = c.points[a] - c.points[b]
                if abs(abs(d) - step) < 1e-9 and (abs(d.real) < 1e-9 or abs(d.imag) < 1e-9):
                    assert bin(a ^ b).count("1") == 1

    @pytest.mark.parametrize("name", ("PSK8", "PSK16"))
    def test_psk_gray_neighbors(self, name):
        c = make_constellation(name)
        order = np.argsort(np.angle(c.points))
        ring = np.concatenate([order, order[:1]])
        for a, b in zip(ring[:-1], ring[1:]):
            assert bin(int(a) ^ int(b)).count("1") == 1


class TestModulate:
    def test_roundtrip_all_points(self):
        for name in NAMES:
            c = make_constellation(name)
            idx = np.arange(c.order)
            assert np.array_equal(nearest_point(c, modulate(c, idx)), idx)

    def test_out_of_range_rejected(self):
        c = make_constellation("QAM16")
        with pytest.raises(ValueError):
            modulate(c, np.array([16]))

    def test_shape_preserved(self):
        c = make_constellation("PSK8")
        idx = np.zeros((3, 5), dtype=int)
        assert modulate(c, idx).shape == (3, 5)


class TestNearestPoint:
    def test_perturbation_within_half_distance(self):
        c = make_constellation("QAM16")
        idx = np.arange(16)
        z = modulate(c, idx) + (0.05 + 0.05j)
        assert np.array_equal(nearest_point(c, z), idx)

    def test_tie_breaks_to_lowest_index(self):
        c = make_constellation("QAM16")
        # origin is equidistant from the four inner points; lowest label wins
        inner = np.nonzero(np.isclose(np.abs(c.points) ** 2, 0.2))[0]
        assert nearest_point(c, 0.0 + 0.0j) == inner.min()

    def test_matrix_input(self):
        c = make_constellation("PSK8")
        z = modulate(c, np.array([[0, 1], [2, 3]]))
        assert np.array_equal(nearest_point(c, z), [[0, 1], [2, 3]])

    def test_non_finite_rejected(self):
        c = make_constellation("BPSK")
        with pytest.raises(ValueError):
            nearest_point(c, np.array([np.nan + 0j]))


class TestBuildFrame:
    RS = RandomSource(55, 0)

    def test_training_prefix_is_hadamard(self):
        c = make_constellation("QAM16")
        f = build_frame(4, 100, c, self.RS.derive(0))
        assert f.l_t == 4 and f.l_d == 100 and f.l_f == 104
        assert np.array_equal(f.x[:, :4].real, hadamard(4))
        assert np.all(f.x[:, :4].imag == 0)

    def test_payload_matches_indices(self):
        c = make_constellation("PSK16")
        f = build_frame(4, 50, c, self.RS.derive(1))
        assert np.array_equal(f.x[:, f.l_t :], c.points[f.data_indices])

    def test_no_training(self):
        c = make_constellation("QAM16")
        f = build_frame(4, 64, c, self.RS.derive(2), training=False)
        assert f.l_t == 0 and f.l_f == 64
        assert f.x.shape == (4, 64)

    def test_dft_training_fallback(self):
        c = make_constellation("QAM16")
        f = build_frame(3, 10, c, self.RS.derive(3), dft_training=True)
        assert np.allclose(f.x[:, :3], dft_matrix(3))

    def test_data_roughly_uniform(self):
        c = make_constellation("QAM16")
        f = build_frame(8, 4000, c, self.RS.derive(4))
        counts = np.bincount(f.data_indices.ravel(), minlength=16)
        assert counts.min() > 0.85 * counts.mean()

    def test_deterministic(self):
        c = make_constellation("QAM64")
        rs = self.RS.derive(5)
        a = build_frame(4, 32, c, rs)
        b = build_frame(4, 32, c, rs)
        assert np.array_equal(a.x, b.x)

    def test_bad_sizes_rejected(self):
        c = make_constellation("BPSK")
        with pytest.raises(ValueError):
            build_frame(0, 10, c, self.RS.derive(6))
        with pytest.raises(ValueError):
            build_frame(4, 0, c, self.RS.derive(7))

    def test_frame_is_dataclass_with_constellation(self):
        c = make_constellation("BPSK")
        f = build_frame(2, 5, c, self.RS.derive(8))
        assert isinstance(f, Frame)
        assert f.constellation is c
