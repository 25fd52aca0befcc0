import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gabortraj import (HermiteExpansion, PeriodicOffsets, PolyanalyticSamples, SampledField,
                       cauchy_reconstruct, cg_reconstruct, line_uniqueness_check, make_circles,
                       metaplectic_rotate, sample_field, stft_circle_reconstruct, stft_point)
from gabortraj.exceptions import IllPosedError, PreconditionError
from gabortraj.hermite import eval_expansion
from gabortraj.reconstruction import lagrange_weights, window_real_zeros

h0 = HermiteExpansion.basis(0)
h1 = HermiteExpansion.basis(1)
G01 = HermiteExpansion([1, 1])


@pytest.fixture(scope="module")
def o_half():
    return make_circles(0.5, 16).quadrature(0.02)


class TestCG:
    def test_gaussian(self, o_half):
        res = cg_reconstruct(sample_field(h0, h0, o_half), N=8, truth=h0)
        assert res.rel_error <= 1e-6

    @pytest.mark.parametrize("method", ["cr", "cg"])
    def test_random_signal(self, o_half, method):
        f = HermiteExpansion.random(8, 1)
        res = cg_reconstruct(sample_field(f, h0, o_half), N=8, truth=f, method=method)
        assert res.rel_error <= 1e-6
        assert res.iterations <= 90

    def test_residuals_monotone(self, o_half):
        f = HermiteExpansion.random(8, 5)
        res = cg_reconstruct(sample_field(f, h0, o_half), N=8, method="cr")
        hist = np.array(res.residual_history)
        assert np.all(np.diff(hist) <= 1e-12 * hist[0])

    def test_zero_samples(self, o_half):
        sf = SampledField(o_half.nodes, o_half.weights, np.zeros(len(o_half)))
        res = cg_reconstruct(sf, N=8)
        assert np.all(res.estimate.coeffs == 0)

    def test_sparse_circles_ill_posed(self):
        q = make_circles(4, 2).quadrature(0.02)
        f = HermiteExpansion.random(8, 1)
        with pytest.raises(IllPosedError) as info:
            cg_reconstruct(sample_field(f, h0, q), N=8)
        assert info.value.lower_bound < 1e-8

    def test_linearity(self, o_half):
        f1, f2 = HermiteExpansion.random(6, 2), HermiteExpansion.random(6, 3)
        a, b = 0.7 - 0.2j, -1.3
        mix = HermiteExpansion(a * f1.coeffs + b * f2.coeffs)
        r = [cg_reconstruct(sample_field(f, h0, o_half), N=6).estimate.coeffs for f in (f1, f2, mix)]
        np.testing.assert_allclose(r[2], a * r[0] + b * r[1], atol=1e-8)

    def test_error_bound(self, o_half):
        f = HermiteExpansion.random(8, 9)
        res = cg_reconstruct(sample_field(f, h0, o_half), N=8, tol=1e-6, truth=f)
        assert res.rel_error <= math.sqrt(res.B_N / res.A_N) * 1e-6 * 10

    def test_json(self, o_half):
        res = cg_reconstruct(sample_field(h0, h0, o_half), N=2, truth=h0)
        d = json.loads(res.to_json())
        assert {"coeffs", "rel_error", "iterations"} <= set(d)

    def test_unknown_method(self, o_half):
        with pytest.raises(PreconditionError):
            cg_reconstruct(sample_field(h0, h0, o_half), N=2, method="gmres")


class TestCauchy:
    def test_constant(self):
        s = PolyanalyticSamples.from_function(lambda t: np.ones_like(t), 1, (2.0, 3.0))
        assert abs(cauchy_reconstruct(s, 0.4 + 0.3j) - 1) <= 1e-12

    @pytest.mark.parametrize("z", [0.3 + 0.2j, -0.9j, 0.5 - 0.5j])
    def test_modulus_squared(self, z):
        s = PolyanalyticSamples.from_function(lambda t: np.abs(t) ** 2, 1, (2.0, 3.0))
        assert abs(cauchy_reconstruct(s, z) - abs(z) ** 2) <= 1e-10

    def test_interpolation_identity(self):
        for s in np.linspace(0, 1, 11):
            P = lagrange_weights((2.0, 3.0), s)
            assert P[0] * 4 + P[1] * 9 == pytest.approx(s, abs=1e-14)

    def test_reduced_order_one(self):
        G = lambda t: t ** 2 * np.abs(t) ** 2 + t ** 3
        z = 0.3 + 0.2j
        s = PolyanalyticSamples.from_function(G, 1, (2.0, 3.0), M=256)
        assert abs(cauchy_reconstruct(s, z) - G(np.array(z))) <= 1e-8

    @given(st.integers(0, 2 ** 16))
    @settings(max_examples=15)
    def test_M_doubling_and_radii(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        G = lambda t: a[0] + a[1] * t + a[2] * np.abs(t) ** 2 + a[3] * t * np.abs(t) ** 2
        z = complex(*(0.5 * rng.uniform(-1, 1, 2)))
        one = cauchy_reconstruct(PolyanalyticSamples.from_function(G, 1, (2.0, 3.0), 128), z)
        two = cauchy_reconstruct(PolyanalyticSamples.from_function(G, 1, (2.0, 3.0), 256), z)
        other = cauchy_reconstruct(PolyanalyticSamples.from_function(G, 1, (1.5, 2.5), 128), z)
        assert abs(one - two) <= 1e-9
        assert abs(one - other) <= 1e-8

    def test_outside_disk(self):
        s = PolyanalyticSamples.from_function(lambda t: np.ones_like(t), 0, (2.0,))
        with pytest.raises(PreconditionError):
            cauchy_reconstruct(s, 2.5)

    def test_extra_radii_need_flag(self):
        G = lambda t: np.abs(t) ** 2
        s = PolyanalyticSamples.from_function(G, 1, (2.0, 3.0, 4.0))
        with pytest.raises(PreconditionError):
            cauchy_reconstruct(s, 0.5)
        assert abs(cauchy_reconstruct(s, 0.5, least_squares=True) - 0.25) <= 1e-10

    def test_sample_validation(self):
        with pytest.raises(PreconditionError):
            PolyanalyticSamples(1, (3.0, 2.0), np.ones((2, 64)))
        with pytest.raises(PreconditionError):
            PolyanalyticSamples(1, (2.0, 3.0), np.ones((2, 32)))
        with pytest.raises(PreconditionError):
            PolyanalyticSamples(1, (2.0,), np.ones((1, 64)))

    def test_csv_roundtrip(self):
        s = PolyanalyticSamples.from_function(lambda t: t * np.conj(t) + 1j, 1, (2.0, 3.0), 64)
        text = s.to_csv()
        assert text.splitlines()[0] == "circle,angle,re,im"
        back = PolyanalyticSamples.from_csv(text, 1, (2.0, 3.0))
        np.testing.assert_array_equal(back.values, s.values)


class TestSTFTCircle:
    def test_gaussian(self):
        v = stft_circle_reconstruct(h0, h0, (4.0,), (0.5, 0.0), M=256)
        assert abs(v - stft_point(h0, h0, (0.5, 0.0))) <= 1e-8

    def test_order_one(self):
        f = HermiteExpansion.random(6, 7)
        z = (0.3, -0.4)
        v = stft_circle_reconstruct(f, G01, (4.0, 5.0), z, M=512)
        assert abs(v - stft_point(f, G01, z)) <= 1e-6

    def test_zero_signal(self):
        assert stft_circle_reconstruct(HermiteExpansion.zero(), G01, (4.0, 5.0), (0.3, 0.2)) == 0

    def test_origin_excluded(self):
        with pytest.raises(PreconditionError):
            stft_circle_reconstruct(h0, G01, (4.0, 5.0), (0.0, 0.0))

    def test_radii_invariance(self):
        f = HermiteExpansion.random(6, 7)
        for z in [(0.2, 0.1), (-0.6, 0.5)]:
            a = stft_circle_reconstruct(f, G01, (4.0, 5.0), z, M=512)
            b = stft_circle_reconstruct(f, G01, (3.0, 5.0), z, M=512)
            assert abs(a - b) <= 1e-8


class TestUniqueness:
    def test_h1_two_lines(self):
        v = line_uniqueness_check(h1, 0, [0.0, 2.0])
        assert v.unique and v.zeros == (0.0,)

    def test_h1_one_line(self):
        v = line_uniqueness_check(h1, 0, [0.0])
        assert not v.unique and v.witness == 0.0

    @pytest.mark.parametrize("offsets", [[0.0], [1.0, 3.0], PeriodicOffsets(0.5)])
    def test_gaussian(self, offsets):
        v = line_uniqueness_check(h0, 0.3, offsets)
        assert v.unique and v.zeros == ()

    def test_shared_zeros(self):
        # h2 has zeros at +-a; offsets 0 and 2a line two zeros up
        a = window_real_zeros(HermiteExpansion.basis(2))[1]
        v = line_uniqueness_check(HermiteExpansion.basis(2), 0, [0.0, 2 * a])
        assert not v.unique and v.witness == pytest.approx(a)

    @pytest.mark.parametrize("n", [1, 2, 5, 8])
    def test_zeros_are_zeros(self, n):
        Z = window_real_zeros(HermiteExpansion.basis(n))
        assert Z.size == n
        assert np.max(np.abs(eval_expansion(HermiteExpansion.basis(n), Z))) <= 1e-10
        np.testing.assert_allclose(Z, -Z[::-1], atol=1e-12)

    def test_rotated_window(self):
        g = HermiteExpansion([1, 0, 0.5])
        Z = window_real_zeros(g, 0.2)
        mu = metaplectic_rotate(g, 0.2)
        if Z.size:
            assert np.max(np.abs(eval_expansion(mu, Z))) <= 1e-10

    def test_zero_window(self):
        with pytest.raises(PreconditionError):
            line_uniqueness_check(HermiteExpansion.zero(), 0, [0.0])
