import math

import numpy as np
import pytest

from rectbasis import orlicz
from rectbasis.data import (
    ConvexPolygon,
    OrliczFunction,
    SeparationCertificate,
    SimpleFunction,
)
from rectbasis.errors import (
    InvalidInputError,
    UnboundedConjugateError,
    UnsupportedInputError,
)


def _square(x0: float, y0: float) -> ConvexPolygon:
    return ConvexPolygon.from_xy(
        [[x0, y0], [x0 + 1.0, y0], [x0 + 1.0, y0 + 1.0], [x0, y0 + 1.0]]
    )


class TestOrliczFunction:
    def test_evaluate(self):
        e = math.e
        assert orlicz.evaluate(OrliczFunction.phi_beta(1.0), e) == pytest.approx(2 * e)
        assert orlicz.evaluate(OrliczFunction.loglog(), e**e) == pytest.approx(
            2 * e**e
        )
        assert orlicz.evaluate(OrliczFunction.exp(), 1.0) == pytest.approx(e - 1.0)
        assert orlicz.evaluate(OrliczFunction.power(2.0, 3.0), 2.0) == 12.0
        values = orlicz.evaluate(OrliczFunction.identity(), np.array([0.0, 0.5]))
        assert values == pytest.approx([0.0, 0.5])

    def test_evaluate_negative(self):
        with pytest.raises(InvalidInputError):
            orlicz.evaluate(OrliczFunction.identity(), -1.0)

    def test_tabulated(self):
        phi = OrliczFunction.tabulated([0.0, 1.0, 2.0], [0.0, 1.0, 3.0])
        assert orlicz.evaluate(phi, 1.5) == pytest.approx(2.0)
        assert orlicz.evaluate(phi, 3.0) == pytest.approx(5.0)
        with pytest.raises(InvalidInputError):
            OrliczFunction.tabulated([0.0, 1.0], [1.0, 2.0])

    def test_convexity(self):
        assert orlicz.check_convexity(OrliczFunction.phi_beta(2.0))
        concave = OrliczFunction.tabulated([0.0, 1.0, 2.0], [0.0, 2.0, 3.0])
        with pytest.warns(UserWarning):
            assert not orlicz.check_convexity(concave)

    def test_names(self):
        assert OrliczFunction.from_name("identity").name == "identity"
        assert OrliczFunction.from_name("power:3:2").name == "power:3:2"
        assert OrliczFunction.from_name("phi_beta:0.5").name == "phi_beta:0.5"
        assert OrliczFunction.from_name("loglog").kind == "loglog"
        for name in ("bogus", "power:x", "exp:2"):
            with pytest.raises(InvalidInputError):
                OrliczFunction.from_name(name)

    def test_invalid_parameters(self):
        with pytest.raises(InvalidInputError):
            OrliczFunction.power(0.5)
        with pytest.raises(InvalidInputError):
            OrliczFunction.phi_beta(0.0)
        with pytest.raises(InvalidInputError):
            OrliczFunction("cubic")


class TestConjugate:
    def test_closed_forms(self):
        assert orlicz.closed_form_conjugate(
            OrliczFunction.power(2.0), 3.0
        ) == pytest.approx(2.25)
        assert orlicz.closed_form_conjugate(
            OrliczFunction.phi_beta(1.0), 3.0
        ) == pytest.approx(math.e)
        assert orlicz.closed_form_conjugate(OrliczFunction.loglog(), 3.0) is None

    def test_search_matches_closed_form(self):
        result = orlicz.conjugate(OrliczFunction.power(2.0), 3.0)
        assert result.attained
        assert result.value == pytest.approx(2.25, rel=1e-9)
        assert result.argmax == pytest.approx(1.5, rel=1e-6)
        result = orlicz.conjugate(OrliczFunction.phi_beta(1.0), 3.0)
        assert result.value == pytest.approx(math.e, rel=1e-9)
        assert result.argmax == pytest.approx(math.e, rel=1e-6)

    def test_half_square(self):
        psi = orlicz.conjugate_function(OrliczFunction.power(2.0, 0.5))
        s = np.linspace(0.0, 20.0, 41)
        assert psi(s) == pytest.approx(0.5 * s**2, rel=1e-8, abs=1e-12)

    def test_young_inequality(self):
        phi = OrliczFunction.phi_beta(1.0)
        psi = orlicz.conjugate_function(phi)
        rng = np.random.default_rng(0)
        s = rng.uniform(0.0, 10.0, 10_000)
        t = np.exp(rng.uniform(-5.0, 10.0, 10_000))
        rhs = orlicz.evaluate(phi, t) + psi(s)
        assert np.all(s * t <= rhs + 1e-6 * (1.0 + rhs))

    @pytest.mark.parametrize(
        "phi, s_max",
        [
            (OrliczFunction.power(2.0), 45.0),
            (OrliczFunction.phi_beta(1.0), 6.0),
            (OrliczFunction.phi_beta(2.0), 26.0),
        ],
    )
    def test_biconjugate(self, phi: OrliczFunction, s_max: float):
        s = np.linspace(0.0, s_max, 20_001)
        psi = orlicz.conjugate_function(phi)(s)
        t = np.linspace(0.0, 20.0, 81)
        biconjugate = np.max(np.outer(t, s) - psi[np.newaxis, :], axis=1)
        expected = orlicz.evaluate(phi, t)
        assert np.all(biconjugate <= expected + 1e-6 * (1.0 + expected))
        assert biconjugate == pytest.approx(expected, rel=1e-4, abs=1e-4)

    def test_identity_is_unbounded(self):
        with pytest.raises(UnboundedConjugateError):
            orlicz.conjugate(OrliczFunction.identity(), 2.0)
        result = orlicz.conjugate(OrliczFunction.identity(), 2.0, strict=False)
        assert not result.attained
        assert orlicz.conjugate(OrliczFunction.identity(), 0.5).value == 0.0

    def test_vectorized(self):
        psi = orlicz.conjugate_function(OrliczFunction.power(2.0))
        assert psi(np.array([0.0, 2.0, 4.0])) == pytest.approx([0.0, 1.0, 4.0])
        assert psi(2.0) == pytest.approx(1.0)
        values = orlicz.conjugate_function(OrliczFunction.loglog())(
            np.array([1.0, 2.0, 3.0])
        )
        assert values[0] == pytest.approx(0.0, abs=1e-9)
        assert np.all(np.diff(values) > 0.0)
        with pytest.raises(InvalidInputError):
            psi(np.array([-1.0]))


class TestGrowth:
    def test_delta2(self):
        result = orlicz.delta2_check(OrliczFunction.power(2.0), 1.0, 1e6)
        assert result.satisfied
        assert result.K == pytest.approx(4.0)
        result = orlicz.delta2_check(OrliczFunction.exp(), 1.0, 100.0)
        assert not result.satisfied
        assert result.witness is not None
        with pytest.raises(InvalidInputError):
            orlicz.delta2_check(OrliczFunction.exp(), 0.0, 1.0)

    def test_little_o(self):
        result = orlicz.little_o(
            OrliczFunction.identity(), OrliczFunction.phi_beta(1.0), epsilon=0.05
        )
        assert result.decreasing
        assert result.vanishing
        assert result.final_ratio == pytest.approx(1.0 / (1.0 + math.log(1e12)))

    def test_domination_constant(self):
        K = orlicz.domination_constant(
            OrliczFunction.power(2.0), orlicz.envelope("exp"), 5.0
        )
        assert K == pytest.approx(math.exp(-2.0), rel=1e-9)
        K1 = orlicz.domination_constant(
            OrliczFunction.phi_beta(1.0), orlicz.envelope("exp"), 30.0
        )
        assert K1 == pytest.approx(math.exp(-2.0), rel=1e-6)
        with pytest.raises(InvalidInputError):
            orlicz.envelope("gaussian")

    def test_target_function(
        self,
        lacunary_certificate: SeparationCertificate,
        superlacunary_certificate: SeparationCertificate,
        power_certificate: SeparationCertificate,
    ):
        assert orlicz.target_function(lacunary_certificate).name == "phi_beta:1"
        assert orlicz.target_function(superlacunary_certificate).name == "loglog"
        assert orlicz.target_function(power_certificate).name == "phi_beta:2"


class TestIntegrals:
    def test_integral(self):
        f = SimpleFunction.of([(2.0, _square(0.0, 0.0)), (3.0, _square(2.0, 0.0))])
        assert orlicz.integral(OrliczFunction.power(2.0), f) == pytest.approx(13.0)
        assert orlicz.integral(lambda t: 2.0 * t, f) == pytest.approx(10.0)
        assert f.max_coefficient == 3.0

    def test_integral_requires_disjoint_regions(self):
        f = SimpleFunction.of([(1.0, _square(0.0, 0.0)), (1.0, _square(0.5, 0.0))])
        with pytest.raises(UnsupportedInputError):
            orlicz.integral(OrliczFunction.identity(), f)

    def test_simple_function_coefficients(self):
        with pytest.raises(InvalidInputError):
            SimpleFunction.indicator(_square(0.0, 0.0), 0.0)

    def test_weak_type_bound(self):
        f = SimpleFunction.indicator(_square(0.0, 0.0), 2.0)
        bound = orlicz.weak_type_bound(OrliczFunction.identity(), f, 2.0, 3.0)
        assert bound == pytest.approx(3.0)
        with pytest.raises(InvalidInputError):
            orlicz.weak_type_bound(OrliczFunction.identity(), f, 0.0)

    def test_overlap_integral(self):
        squares = [_square(0.0, 0.0), _square(0.5, 0.0)]
        assert orlicz.overlap_integral(
            OrliczFunction.identity(), squares
        ) == pytest.approx(2.0)
        assert orlicz.overlap_integral(
            OrliczFunction.power(2.0), squares
        ) == pytest.approx(3.0)
        assert orlicz.overlap_integral(OrliczFunction.identity(), []) == 0.0
