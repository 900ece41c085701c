import math

import numpy as np
import pytest
from scipy.special import gamma

from sqmap.errors import ConvergenceError, PoleProximityError, SpecificationError
from sqmap.geometry import curve_is_simple
from sqmap.laurent import (
    Coefficient,
    Composition,
    ExteriorSquareMap,
    Identity,
    InverseMap,
    MultipoleSeries,
    coefficient_a1,
    compose,
    contour_a1,
    inverse,
    invert,
    joukowski,
)


def random_multipole(rng, n_poles=2, order=3, amplitude=0.5, spread=1.5):
    poles = []
    for _ in range(n_poles):
        p = complex(*rng.uniform(-spread, spread, size=2))
        coeffs = amplitude * (rng.uniform(-1, 1, size=order) + 1j * rng.uniform(-1, 1, size=order))
        coeffs = coeffs / np.arange(1, order + 1) ** 2
        poles.append((p, tuple(coeffs)))
    return MultipoleSeries(tuple(poles))


class TestEvaluate:
    def test_identity(self):
        assert Identity().evaluate(2 + 1j) == 2 + 1j

    def test_joukowski_at_two(self):
        assert joukowski(+1, 1.0, 0).evaluate(2.0) == pytest.approx(2.5)

    def test_vertical_joukowski_at_i(self):
        m = MultipoleSeries(((0j, (-1.0,)),))
        assert m.evaluate(1j) == pytest.approx(2j)

    def test_vectorized(self):
        m = joukowski(+1)
        z = np.array([2.0, 2j, -2.0])
        np.testing.assert_allclose(m.evaluate(z), z + 1 / z)

    def test_pole_guard(self):
        m = MultipoleSeries(((1j, (0.5,)),))
        with pytest.raises(PoleProximityError):
            m.evaluate(1j + 1e-12)

    def test_inert_pole_is_not_guarded(self):
        m = MultipoleSeries(((1j, (0.0, 0.0)),))
        assert m.is_identity
        assert m.evaluate(1j) == 1j


class TestDerivative:
    def test_identity(self):
        assert Identity().derivative(5 - 3j) == 1.0

    def test_joukowski(self):
        assert joukowski(+1).derivative(2.0) == pytest.approx(0.75)

    def test_exterior_square_formula(self):
        # Direct evaluation of the branch of (1 + z**-4)**(1/2) at z = 2.
        m = ExteriorSquareMap()
        assert m.derivative(2.0) == pytest.approx(math.sqrt(17.0) / 4.0, abs=1e-12)

    def test_against_central_differences(self):
        rng = np.random.default_rng(11)
        h = 1e-5
        for _ in range(5):
            m = random_multipole(rng)
            count = 0
            while count < 100:
                z = complex(*rng.uniform(-4, 4, size=2))
                if min(abs(z - p) for p, _ in m.poles) < 0.5:
                    continue
                count += 1
                fd = (m.evaluate(z + h) - m.evaluate(z - h)) / (2 * h)
                an = m.derivative(z)
                assert abs(fd - an) <= 1e-6 * max(1.0, abs(an))

    def test_composition_chain_rule(self):
        f = joukowski(+1)
        g = MultipoleSeries(((0j, (0.0, 0.1)),))
        comp = Composition(f, g)
        z = 2.0 + 1.5j
        h = 1e-6
        fd = (comp.evaluate(z + h) - comp.evaluate(z - h)) / (2 * h)
        assert abs(comp.derivative(z) - fd) < 1e-7


class TestCoefficient:
    def test_identity_zero(self):
        assert coefficient_a1(Identity()).value == 0j

    def test_vertical_joukowski(self):
        m = joukowski(-1)
        c = coefficient_a1(m, cross_check=True)
        assert c.value == -1.0
        assert c.alpha == -1.0 and c.beta == 0.0

    def test_exterior_square_zero(self):
        # Term-by-term integration of (1 + z**-4)**(1/2) never makes a 1/z term.
        m = ExteriorSquareMap()
        assert abs(contour_a1(m, radius=3.0)) < 1e-12
        assert coefficient_a1(m, cross_check=True, radius=3.0).value == 0j

    def test_contour_matches_analytic(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            m = random_multipole(rng)
            q = contour_a1(m)
            assert abs(q - m.a1) < 1e-9

    def test_contour_stable_under_doubling(self):
        rng = np.random.default_rng(6)
        m = random_multipole(rng)
        R = 2.0 * (m.far_radius + 1.0)
        assert abs(contour_a1(m, R) - contour_a1(m, 2 * R)) < 1e-8

    def test_coefficient_type(self):
        c = Coefficient(1.5 - 0.5j)
        assert complex(c) == 1.5 - 0.5j


class TestCompose:
    def test_identity_left(self):
        m = joukowski(-1)
        assert compose(Identity(), m).a1 == m.a1

    def test_composite_slit_competitor(self):
        # Horizontal Joukowski after the inverse of the vertical one: a1 = 1 + 1.
        comp = compose(joukowski(+1), inverse(joukowski(-1)))
        assert comp.a1 == 2.0
        q = contour_a1(comp, radius=8.0)
        assert abs(q - 2.0) < 1e-8

    def test_inverse_roundtrip_a1(self):
        m = joukowski(+1)
        comp = compose(m, inverse(m))
        assert comp.a1 == 0j

    def test_roundtrip_pointwise(self):
        m = joukowski(+1)
        comp = compose(m, inverse(m))
        z = np.array([3.0 + 1j, -2.5, 5j])
        np.testing.assert_allclose(comp.evaluate(z), z, atol=1e-10)

    def test_additivity_random(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            f = random_multipole(rng, n_poles=1)
            g = random_multipole(rng, n_poles=1)
            assert compose(f, g).a1 == f.a1 + g.a1

    def test_containment_check_failure(self):
        # Inner pushes the circle straight into the outer map's pole.
        outer = MultipoleSeries(((0j, (1.0,)),))
        inner = MultipoleSeries(((3.0 + 0j, (2.25,)),))  # inner(0) stays near 0.. use samples at pole
        with pytest.raises(SpecificationError):
            compose(outer, Identity(), check_samples=np.array([0.0 + 0j]))
        # sanity: a valid check passes
        compose(outer, inner, check_samples=np.array([10.0 + 0j, 10j]))


class TestInvert:
    def test_identity(self):
        assert invert(Identity(), 5.0) == 5.0

    def test_joukowski_forward_value(self):
        assert invert(joukowski(+1), 2.5) == pytest.approx(2.0, abs=1e-10)

    def test_inverse_a1_negation(self):
        inv = inverse(joukowski(-1))
        assert inv.a1 == 1.0
        q = contour_a1(inv, radius=8.0)
        assert abs(q - 1.0) < 1e-8

    def test_inverse_negation_random(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            m = random_multipole(rng, n_poles=1, amplitude=0.2)
            inv = inverse(m)
            assert inv.a1 == -m.a1
            assert abs(contour_a1(inv) + m.a1) < 1e-8

    def test_derivative_guard_raises(self):
        # w = 1 seeds Newton at z0 = 1, a critical point of z + 1/z.
        with pytest.raises(ConvergenceError):
            invert(joukowski(+1), 1.0)

    def test_nonconvergence_or_pole_signal(self):
        # w strictly inside the slit [-2, 2]: no preimage is reachable by
        # plain Newton from z0 = w, and the failure is never silent.
        with pytest.raises((ConvergenceError, PoleProximityError)):
            invert(joukowski(+1), 0.5)

    def test_path_continuation_near_slit(self):
        # March the inverse of the vertical Joukowski along a thin rectangle
        # hugging the slit [-2i, 2i]; all preimages must stay outside the
        # unit circle (single branch).
        g = joukowski(-1)
        ginv = inverse(g)
        t = np.linspace(-1.9, 1.9, 101)
        path = np.concatenate([0.2 + 1j * t, (0.2 - 1j * t[:0:-1] * 0)[:0]])
        z = ginv.evaluate_path(path)
        assert np.min(np.abs(z)) > 1.0
        np.testing.assert_allclose(g.evaluate(z), path, atol=1e-9)


class TestNormalization:
    def test_far_field_decay(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            m = random_multipole(rng)
            C = m.coefficient_bound() * 2.0
            R0 = 2.0 * (m.far_radius + 1.0)
            for scale in (1.0, 2.0, 5.0):
                z = R0 * scale * np.exp(1j * rng.uniform(0, 2 * math.pi, size=16))
                assert np.max(np.abs(m.evaluate(z) - z)) <= C / (R0 * scale)


class TestExteriorSquare:
    def test_half_side_closed_form(self):
        m = ExteriorSquareMap()
        exact = 2.0 * math.pi**1.5 / gamma(0.25) ** 2
        assert m.image_half_side == pytest.approx(exact, abs=1e-6)

    def test_image_is_square(self):
        m = ExteriorSquareMap()
        th = np.linspace(0, 2 * math.pi, 2000, endpoint=False)
        img = m.evaluate_path(np.exp(1j * th))
        h = m.image_half_side
        # every point sits on the square boundary
        on_boundary = np.minimum(
            np.abs(np.abs(img.real) - h), np.abs(np.abs(img.imag) - h)
        )
        assert np.max(on_boundary) < 1e-6
        assert np.max(np.abs(img.real)) <= h + 1e-6
        assert curve_is_simple(img)

    def test_image_closes(self):
        m = ExteriorSquareMap()
        a = m.evaluate(np.exp(1j * 1e-7))
        b = m.evaluate(np.exp(-1j * 1e-7))
        assert abs(a - b) < 1e-6

    def test_rejects_interior(self):
        with pytest.raises(SpecificationError):
            ExteriorSquareMap().evaluate(0.5)
