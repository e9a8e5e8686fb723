import math
from typing import List

import numpy as np
import pandas as pd
import pytest

from rectbasis import construct, maximal, orlicz
from rectbasis.data import (
    AngleSequence,
    Construction,
    Disk,
    OrliczFunction,
    Point,
    RotatedRect,
    SeparationCertificate,
    SimpleFunction,
    StokolosInput,
)
from rectbasis.errors import InvalidInputError

REGIMES = ["lacunary", "superlacunary", "power"]


def _stokolos_input(
    family: List[Construction], dominated: bool = True
) -> StokolosInput:
    cert = family[0].cert
    target = orlicz.target_function(cert)
    s_max = float(max(c.k for c in family) + 1)
    return StokolosInput(
        families=family,
        phi=target,
        psi=orlicz.conjugate_function(target),
        dominating=maximal.dominating_function(cert, s_max) if dominated else None,
        random_subsets=5,
    )


class TestBlowup:
    @pytest.mark.parametrize("regime", REGIMES)
    def test_maximal_lower_bound(self, request, regime: str):
        for c in request.getfixturevalue(f"{regime}_family"):
            f = maximal.blowup_function(c)
            assert maximal.maximal_lower_on_Y(c, f) >= 1.0 - 1e-9

    def test_maximal_lower_bound_inputs(self, lacunary_family: List[Construction]):
        c = lacunary_family[0]
        assert maximal.maximal_lower_on_Y(c, SimpleFunction(())) == 0.0
        other = SimpleFunction.indicator(Disk(Point(1.0, 1.0), c.ell))
        with pytest.raises(InvalidInputError):
            maximal.maximal_lower_on_Y(c, other)

    @pytest.mark.parametrize("regime", REGIMES)
    def test_blowup_claim(self, request, regime: str):
        family = request.getfixturevalue(f"{regime}_family")[1:]
        reports = maximal.blowup_series(family)
        assert [r.k for r in reports] == [c.k for c in family]
        for r, c in zip(reports, family):
            assert r.superlevel_area == c.Y_area
            assert r.passed, r

    def test_growth_constants(
        self,
        lacunary_family: List[Construction],
        superlacunary_family: List[Construction],
        power_family: List[Construction],
    ):
        assert maximal.growth_constant(
            lacunary_family, OrliczFunction.phi_beta(1.0)
        ) == pytest.approx(1.0)
        assert maximal.growth_constant(
            superlacunary_family, OrliczFunction.loglog()
        ) == pytest.approx(math.log(4.0))
        assert maximal.growth_constant(
            power_family[1:], OrliczFunction.phi_beta(2.0)
        ) == pytest.approx(1.0)
        assert maximal.growth_estimate(
            power_family[1:], OrliczFunction.phi_beta(2.0)
        ) == pytest.approx(1.25)
        assert maximal.growth_constant(
            power_family[1:], OrliczFunction.phi_beta(1.0)
        ) == maximal.growth_estimate(power_family[1:], OrliczFunction.phi_beta(1.0))
        assert maximal.growth_constant([], OrliczFunction.phi_beta(1.0)) == 1.0

    def test_blowup_constant(self, lacunary_certificate: SeparationCertificate):
        gamma1 = maximal.blowup_constant(
            lacunary_certificate, OrliczFunction.phi_beta(1.0), 1.0
        )
        cert = lacunary_certificate
        assert gamma1 > 0.0
        assert maximal.blowup_constant(
            cert, OrliczFunction.phi_beta(1.0), 2.0
        ) == pytest.approx(0.5 * gamma1)
        with pytest.raises(InvalidInputError):
            maximal.blowup_constant(cert, OrliczFunction.identity(), 1.0)

    @pytest.mark.parametrize("regime", ["lacunary", "power"])
    def test_divergence(self, request, regime: str):
        seq: AngleSequence = request.getfixturevalue(f"{regime}_sequence")
        cert: SeparationCertificate = request.getfixturevalue(f"{regime}_certificate")
        constructions = [
            construct.build_construction(seq, cert, k, 1.0) for k in (2, 6, 10)
        ]
        reports = maximal.blowup_series(
            constructions, psi=OrliczFunction.identity()
        )
        divergence = [r.divergence for r in reports]
        assert np.all(np.diff(divergence) > 0.0)
        assert divergence[-1] > 10.0
        assert all(r.passed for r in reports)

    def test_verify_blowup(self, lacunary_family: List[Construction]):
        report = maximal.verify_blowup(
            lacunary_family[1:], psi=OrliczFunction.identity()
        )
        assert report.passed, report.first_failure
        assert len(report.select("maximal-lower")) == 4
        assert len(report.select("blowup")) == 4
        assert len(report.select("divergence-increasing")) == 3

    def test_blowup_frame(self, power_family: List[Construction]):
        frame = maximal.blowup_frame(maximal.blowup_series(power_family[1:]))
        assert list(frame.columns) == [
            "k",
            "superlevel_area",
            "phi_integral",
            "ratio",
            "gamma1",
            "M_tilde",
            "divergence",
        ]
        assert list(frame["k"]) == [2, 3, 4, 5]
        assert maximal.blowup_series([]) == []


class TestOverlapConstants:
    def test_lacunary_bound(self, lacunary_family: List[Construction]):
        report = maximal.verify_overlap_constants(lacunary_family[1:])
        assert report.passed, report.first_failure
        assert len(report) == 4
        for row in report:
            assert 0.0 < row.lhs < row.rhs

    def test_superlacunary_factor(self, superlacunary_family: List[Construction]):
        report = maximal.verify_overlap_constants(superlacunary_family, ks=[2, 3])
        assert report.passed, report.first_failure
        assert {row.check for row in report} == {
            "factor-decreasing",
            "factor-halved",
        }

    def test_power_factor(self, power_family: List[Construction]):
        report = maximal.verify_overlap_constants(power_family, ks=range(2, 9))
        assert report.passed, report.first_failure
        assert len(report.select("factor-decreasing")) == 6

    def test_series(self, power_certificate: SeparationCertificate):
        frame = maximal.overlap_bound_series(power_certificate, [1, 2], K=1.0)
        assert list(frame.columns) == ["k", "log_factor", "factor", "log_constant"]
        expected = 2.0 * math.log(3.0) + math.sqrt(2.0) * math.log(
            power_certificate.eta
        )
        assert frame["log_factor"].iloc[1] == pytest.approx(expected)
        assert frame["factor"].iloc[1] == pytest.approx(math.exp(expected))

    def test_overlap_constant(self, lacunary_family: List[Construction]):
        c = lacunary_family[2]
        psi = OrliczFunction.identity()
        assert maximal.overlap_constant(c, psi) == pytest.approx(
            len(c.rects), rel=1e-9
        )


class TestStokolos:
    @pytest.mark.parametrize("regime", REGIMES)
    def test_check(self, request, regime: str):
        family = request.getfixturevalue(f"{regime}_family")[1:]
        with pytest.warns(UserWarning, match="E_k"):
            report = maximal.stokolos_check(_stokolos_input(family))
        assert report.passed, report.first_failure
        assert len(report.select("stokolos-equal-area")) == len(family)

    def test_constants(self, lacunary_family: List[Construction]):
        stokolos = _stokolos_input(lacunary_family[1:])
        frame = maximal.stokolos_constants(stokolos)
        assert list(frame.columns) == ["k", "lambda", "c1", "c1_exact", "c2", "c3"]
        assert list(frame["lambda"]) == pytest.approx(stokolos.lambdas)
        assert np.all(frame[["c1", "c2", "c3"]].to_numpy() > 0.0)
        assert np.all(frame["c1"] >= (1.0 - 1e-6) * frame["c1_exact"])
        spread = maximal.constant_spread(frame)
        assert max(spread.values()) <= maximal.STABILITY_BAND

    def test_drifting_constants_fail(self):
        frame = pd.DataFrame(
            {
                "k": [3, 4, 5],
                "lambda": [10.0, 100.0, 1000.0],
                "c1": [2.8e-4, 1.1e-5, 2.8e-7],
                "c2": [0.3, 0.3, 0.3],
                "c3": [0.5, 0.48, 0.47],
            }
        )
        spread = maximal.constant_spread(frame)
        assert spread["c1"] == pytest.approx(1000.0)
        report = maximal.stability_check(frame)
        assert not report.passed
        assert [row.check for row in report.failures] == ["stokolos-c1"]

    def test_rising_constants_fail(self):
        frame = pd.DataFrame(
            {"k": [2, 3], "c1": [1.0, 1.5], "c2": [0.3, 0.7], "c3": [0.5, 0.5]}
        )
        report = maximal.stability_check(frame)
        assert [row.check for row in report.failures] == ["stokolos-c2"]

    def test_nonpositive_constants_fail(self):
        frame = pd.DataFrame(
            {"k": [2, 3], "c1": [1.0, 1.0], "c2": [0.3, 0.3], "c3": [0.0, 0.5]}
        )
        assert math.isinf(maximal.constant_spread(frame)["c3"])
        checks = {row.check for row in maximal.stability_check(frame).failures}
        assert checks == {"stokolos-c3-positive", "stokolos-c3"}

    def test_complementary_function_alone_drifts(
        self, power_family: List[Construction]
    ):
        stokolos = _stokolos_input(power_family[1:], dominated=False)
        frame = maximal.stokolos_constants(stokolos)
        assert list(frame["c1"]) == list(frame["c1_exact"])
        with pytest.warns(UserWarning, match="E_k"):
            report = maximal.stokolos_check(stokolos)
        assert "stokolos-c1" in {row.check for row in report.failures}

    def test_input_order(self, lacunary_family: List[Construction]):
        with pytest.raises(InvalidInputError):
            _stokolos_input(lacunary_family[::-1])


class TestKakeya:
    def test_single_rectangle(self):
        result = maximal.kakeya_ratio([RotatedRect(4.0, 0.5, 0.3)])
        assert result.ratio == pytest.approx(3.0)
        assert result.maximal_check == pytest.approx(1.0 / 3.0)

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_construction(
        self,
        k: int,
        lacunary_sequence: AngleSequence,
        lacunary_certificate: SeparationCertificate,
    ):
        c = construct.build_construction(
            lacunary_sequence, lacunary_certificate, k, 1.0
        )
        result = maximal.kakeya_ratio(c.rects)
        assert result.ratio > 3.0
        assert result.maximal_check >= 1.0 / 3.0 - 1e-9
        assert result.union_area == pytest.approx(c.Y_area)

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            maximal.kakeya_ratio([])
        with pytest.raises(InvalidInputError):
            maximal.kakeya_ratio([RotatedRect(1.0, 1.0, 0.2)])


class TestWeakProbe:
    def test_raster_maximal(self):
        f = np.zeros((8, 8))
        f[3, 3] = 1.0
        assert maximal.raster_maximal(f, [(1, 1)]) == pytest.approx(f)
        m = maximal.raster_maximal(f, [(1, 3)])
        expected = np.zeros((8, 8))
        expected[3, 1:6] = 1.0 / 3.0
        assert m == pytest.approx(expected)

    def test_weak_ratio(self):
        f = np.zeros((8, 8))
        f[3, 3] = 1.0
        assert maximal.weak_ratio(f, [(1, 1)], 0.5) == pytest.approx(0.5)
        with pytest.raises(InvalidInputError):
            maximal.weak_ratio(np.zeros((8, 8)), [(1, 1)], 0.5)

    def test_raster_shapes(self, lacunary_family: List[Construction]):
        shapes = maximal.raster_shapes(lacunary_family, 2.0 / 64)
        assert shapes[0] == (1, 32)
        assert all(h >= 1 and w >= 1 for h, w in shapes)
        assert len(set(shapes)) == len(shapes)

    def test_weak11_search(self, lacunary_family: List[Construction]):
        result = maximal.weak11_probe(lacunary_family, trials=100, seed=2, raster=64)
        assert result.trials == 100
        assert result.raster == 64
        assert len(result.history) == 100
        assert np.all(np.diff(result.history) >= 0.0)
        assert result.constant == result.history[-1]
        assert result.constant > 0.0
        again = maximal.weak11_probe(lacunary_family, trials=100, seed=2, raster=64)
        assert again.constant == result.constant

    def test_weak11_search_inputs(self, lacunary_family: List[Construction]):
        with pytest.raises(InvalidInputError):
            maximal.weak11_probe(lacunary_family, trials=10)
        with pytest.raises(InvalidInputError):
            maximal.weak11_probe([], trials=100)
