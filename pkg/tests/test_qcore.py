"""Exact ring arithmetic, kets, measurements, and Born weights."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from onticlab import (
    Ket,
    ORTHO_EPS,
    ProjectiveMeasurement,
    QuantExt,
    Ray,
    born_probability,
    inner_product,
    ray_dot,
    ray_to_ket,
    same_projector,
)

ints = st.integers(min_value=-50, max_value=50)
quantext = st.builds(QuantExt, ints, ints)


class TestQuantExt:
    @given(quantext, quantext)
    def test_addition_matches_floats(self, x, y):
        assert math.isclose(
            (x + y).to_float(), x.to_float() + y.to_float(), abs_tol=1e-9
        )

    @given(quantext, quantext)
    def test_multiplication_matches_floats(self, x, y):
        assert math.isclose(
            (x * y).to_float(), x.to_float() * y.to_float(), rel_tol=1e-12, abs_tol=1e-9
        )

    @given(quantext, quantext, quantext)
    def test_distributivity(self, x, y, z):
        assert x * (y + z) == x * y + x * z

    @given(quantext)
    def test_zero_test_is_exact(self, x):
        assert x.is_zero() == (x.a == 0 and x.b == 0)
        assert (x - x).is_zero()

    def test_sqrt2_squares_to_two(self):
        r2 = QuantExt(0, 1)
        assert r2 * r2 == QuantExt(2, 0)

    def test_string_forms(self):
        assert str(QuantExt(3, 0)) == "3"
        assert str(QuantExt(0, 1)) == "0+1 r2"
        assert str(QuantExt(1, -2)) == "1-2 r2"


class TestKet:
    def test_norm_enforced(self):
        with pytest.raises(ValueError):
            Ket((0.9, 0.1))

    def test_dim_floor(self):
        with pytest.raises(ValueError):
            Ket((1.0,))

    def test_basis_and_normalized(self):
        k = Ket.basis(3, 1)
        assert k.amps == (0j, 1 + 0j, 0j)
        n = Ket.normalized((1, 1, 1))
        assert math.isclose(abs(inner_product(n, n)), 1.0, abs_tol=1e-12)

    @given(st.integers(2, 5), st.data())
    def test_inner_product_hermitian(self, dim, data):
        amps = data.draw(
            st.lists(
                st.tuples(
                    st.floats(-1, 1, allow_nan=False),
                    st.floats(-1, 1, allow_nan=False),
                ),
                min_size=2 * dim,
                max_size=2 * dim,
            )
        )
        raw_x = [complex(a, b) for a, b in amps[:dim]]
        raw_y = [complex(a, b) for a, b in amps[dim:]]
        if all(abs(a) < 1e-3 for a in raw_x) or all(abs(a) < 1e-3 for a in raw_y):
            return
        x = Ket.normalized(raw_x)
        y = Ket.normalized(raw_y)
        assert inner_product(x, y) == pytest.approx(
            inner_product(y, x).conjugate(), abs=1e-12
        )

    def test_dim_mismatch_rejected(self):
        with pytest.raises(ValueError):
            inner_product(Ket.basis(2, 0), Ket.basis(3, 0))

    def test_analytic_inner_products(self):
        e0 = Ket.basis(2, 0)
        e1 = Ket.basis(2, 1)
        s = 1 / math.sqrt(2)
        sup = Ket((s, s))
        assert inner_product(e0, e0) == pytest.approx(1.0)
        assert inner_product(e0, e1) == pytest.approx(0.0, abs=1e-15)
        assert abs(inner_product(e0, sup)) == pytest.approx(0.70710678, abs=1e-8)


class TestMeasurement:
    def test_completeness_enforced(self):
        with pytest.raises(ValueError):
            ProjectiveMeasurement("M", (Ket.basis(3, 0), Ket.basis(3, 1)))

    def test_orthogonality_enforced(self):
        s = 1 / math.sqrt(2)
        with pytest.raises(ValueError):
            ProjectiveMeasurement("M", (Ket.basis(2, 0), Ket((s, s))))

    def test_born_weights_sum_to_one(self):
        s = 1 / math.sqrt(2)
        m = ProjectiveMeasurement("X", (Ket((s, s)), Ket((s, -s))))
        psi = Ket.normalized((0.6, 0.8))
        total = sum(born_probability(psi, m, k) for k in range(2))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_born_on_own_outcome(self):
        m = ProjectiveMeasurement("Z", (Ket.basis(2, 0), Ket.basis(2, 1)))
        assert born_probability(Ket.basis(2, 0), m, 0) == pytest.approx(1.0)
        assert born_probability(Ket.basis(2, 0), m, 1) == pytest.approx(0.0, abs=1e-12)

    def test_born_on_balanced_superposition(self):
        m = ProjectiveMeasurement("Z", (Ket.basis(2, 0), Ket.basis(2, 1)))
        s = 1 / math.sqrt(2)
        assert born_probability(Ket((s, s)), m, 1) == pytest.approx(0.5)

    def test_outcome_range_checked(self):
        m = ProjectiveMeasurement("Z", (Ket.basis(2, 0), Ket.basis(2, 1)))
        with pytest.raises(ValueError):
            born_probability(Ket.basis(2, 0), m, 2)


class TestRay:
    def test_zero_ray_rejected(self):
        with pytest.raises(ValueError):
            Ray((QuantExt(0, 0), QuantExt(0, 0)))

    @given(st.lists(ints, min_size=3, max_size=3), st.integers(1, 7))
    def test_projective_equality_under_scaling(self, coords, scale):
        if all(c == 0 for c in coords):
            return
        base = Ray(tuple(QuantExt(c, 0) for c in coords))
        scaled = Ray(tuple(QuantExt(c * scale, 0) for c in coords))
        assert base.projectively_equal(scaled)

    def test_projective_inequality(self):
        x = Ray((QuantExt(1, 0), QuantExt(0, 0), QuantExt(0, 0)))
        y = Ray((QuantExt(1, 0), QuantExt(1, 0), QuantExt(0, 0)))
        assert not x.projectively_equal(y)

    def test_ray_dot_exact_cancellation(self):
        # (1, r2, 1) . (1, 0, -1) = 0 exactly in the ring
        x = Ray((QuantExt(1, 0), QuantExt(0, 1), QuantExt(1, 0)))
        y = Ray((QuantExt(1, 0), QuantExt(0, 0), QuantExt(-1, 0)))
        assert ray_dot(x, y).is_zero()
        # (r2, 1, 0) . (1, -r2, 0): the cross terms cancel exactly
        u = Ray((QuantExt(0, 1), QuantExt(1, 0), QuantExt(0, 0)))
        v = Ray((QuantExt(1, 0), QuantExt(0, -1), QuantExt(0, 0)))
        assert ray_dot(u, v).is_zero()
        # integer-only orthogonal pair
        p = Ray((QuantExt(1, 0), QuantExt(1, 0), QuantExt(0, 0)))
        n = Ray((QuantExt(1, 0), QuantExt(-1, 0), QuantExt(0, 0)))
        assert ray_dot(p, n).is_zero()

    def test_ray_to_ket_unit_norm(self):
        x = Ray((QuantExt(1, 0), QuantExt(0, 1), QuantExt(-1, 0)))
        k = ray_to_ket(x)
        assert abs(abs(inner_product(k, k)) - 1.0) < 1e-12

    def test_ray_to_ket_analytic_values(self):
        axis = ray_to_ket(Ray((QuantExt(1, 0), QuantExt(0, 0), QuantExt(0, 0))))
        assert axis.amps == pytest.approx((1 + 0j, 0j, 0j))
        diag = ray_to_ket(Ray((QuantExt(1, 0), QuantExt(1, 0), QuantExt(0, 0))))
        assert diag.amps[0].real == pytest.approx(0.70710678, abs=1e-8)
        assert diag.amps[1].real == pytest.approx(0.70710678, abs=1e-8)
        assert diag.amps[2] == pytest.approx(0j)

    def test_exact_and_float_orthogonality_agree(self):
        x = Ray((QuantExt(0, 1), QuantExt(1, 0), QuantExt(1, 0)))
        y = Ray((QuantExt(0, 1), QuantExt(1, 0), QuantExt(-1, 0)))
        z = Ray((QuantExt(0, 0), QuantExt(1, 0), QuantExt(-1, 0)))
        assert not ray_dot(x, y).is_zero()
        assert ray_dot(x, z).is_zero()
        assert abs(inner_product(ray_to_ket(x), ray_to_ket(z))) <= ORTHO_EPS


class TestSameProjector:
    def test_phase_invariance(self):
        s = 1 / math.sqrt(2)
        x = Ket((s, s))
        y = Ket((-s, -s))
        z = Ket((s * 1j, s * 1j))
        assert same_projector(x, y)
        assert same_projector(x, z)

    def test_distinct_projectors(self):
        s = 1 / math.sqrt(2)
        assert not same_projector(Ket((s, s)), Ket((s, -s)))
