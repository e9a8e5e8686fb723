import math
from typing import List

import numpy as np
import pytest

from rectbasis import construct
from rectbasis.data import AngleSequence, Construction, SeparationCertificate
from rectbasis.errors import CapacityError, InvalidInputError

REGIMES = ["lacunary", "superlacunary", "power"]


class TestBuildInterval:
    def test_shape(self, lacunary_certificate: SeparationCertificate):
        L, ell = construct.build_interval(lacunary_certificate, 2, 0.5)
        assert L == 0.5
        expected = 4.0 + 16.0 / 0.15**2 * 0.3**-8
        assert (L / ell) ** 2 == pytest.approx(expected, rel=1e-12)
        assert 0.0 < 2.0 * ell < L

    def test_power_shape_index(self, power_certificate: SeparationCertificate):
        assert construct.shape_index(power_certificate, 3) == 7
        L, ell = construct.build_interval(power_certificate, 3, 1.0)
        expected = 4.0 + 4.0 * (4e-4) ** (-2.0 * math.sqrt(7.0))
        assert (L / ell) ** 2 == pytest.approx(expected, rel=1e-9)

    def test_invalid(self, lacunary_certificate: SeparationCertificate):
        with pytest.raises(InvalidInputError):
            construct.build_interval(lacunary_certificate, 0, 1.0)
        with pytest.raises(InvalidInputError):
            construct.build_interval(lacunary_certificate, 1, 0.0)

    def test_capacity(self, superlacunary_certificate: SeparationCertificate):
        construct.build_interval(superlacunary_certificate, 3, 1.0)
        with pytest.raises(CapacityError):
            construct.build_interval(superlacunary_certificate, 4, 1.0)


class TestBuildConstruction:
    def test_construction(
        self,
        lacunary_sequence: AngleSequence,
        lacunary_certificate: SeparationCertificate,
    ):
        c = construct.build_construction(
            lacunary_sequence, lacunary_certificate, 3, 1.0
        )
        assert len(c.rects) == 4
        assert list(c.indices) == [0, 1, 2, 3]
        assert c.theta_subset == pytest.approx(lacunary_sequence.thetas[:4])
        assert c.tau == 6.0
        assert c.Theta.radius == c.ell
        assert 0.5 * 4 * c.Q_area <= c.Y_area <= 4 * c.Q_area

    def test_invalid(
        self,
        lacunary_certificate: SeparationCertificate,
        superlacunary_sequence: AngleSequence,
        superlacunary_certificate: SeparationCertificate,
        power_sequence: AngleSequence,
    ):
        with pytest.raises(CapacityError):
            construct.build_construction(
                superlacunary_sequence, superlacunary_certificate, 21, 1.0
            )
        with pytest.raises(InvalidInputError):
            construct.build_construction(
                superlacunary_sequence, superlacunary_certificate, 6, 1.0
            )
        with pytest.raises(InvalidInputError):
            construct.build_construction(
                power_sequence, lacunary_certificate, 2, 1.0
            )

    def test_nested_family(self, lacunary_family: List[Construction]):
        assert [c.k for c in lacunary_family] == [1, 2, 3, 4, 5]
        assert lacunary_family[0].epsilon == 1.0
        for prev, c in zip(lacunary_family, lacunary_family[1:]):
            assert c.epsilon == min(prev.ell, 1.0 / prev.k)
        assert construct.verify_nesting(lacunary_family).passed

    @pytest.mark.parametrize("regime", REGIMES)
    def test_nesting(self, request, regime: str):
        family = request.getfixturevalue(f"{regime}_family")
        report = construct.verify_nesting(family)
        assert report.passed
        assert len(report) == 4 * (len(family) - 1)

    def test_nested_family_range(
        self,
        lacunary_sequence: AngleSequence,
        lacunary_certificate: SeparationCertificate,
    ):
        with pytest.raises(InvalidInputError):
            construct.build_nested_family(lacunary_sequence, lacunary_certificate, 0)
        with pytest.raises(CapacityError):
            construct.build_nested_family(lacunary_sequence, lacunary_certificate, 21)

    def test_constructions_in_range(self, lacunary_family: List[Construction]):
        selected = construct.constructions_in_range(lacunary_family, 2, 4)
        assert [c.k for c in selected] == [2, 3, 4]


class TestSubsets:
    def test_exhaustive(self):
        chosen = construct.subsets(3)
        assert len(chosen) == 15
        assert (0, 1, 2, 3) in chosen

    def test_sampled(self):
        chosen = construct.subsets(10, random_subsets=5, seed=1)
        assert len(chosen) == 66 + 5
        assert chosen == construct.subsets(10, random_subsets=5, seed=1)
        assert all(list(s) == sorted(set(s)) for s in chosen)


class TestLemmaA:
    @pytest.mark.parametrize("regime", REGIMES)
    def test_verify(self, request, regime: str):
        for c in request.getfixturevalue(f"{regime}_family"):
            report = construct.verify_lemmaA(c, random_subsets=10)
            assert report.passed, report.first_failure

    def test_rows(self, lacunary_family: List[Construction]):
        report = construct.verify_lemmaA(lacunary_family[2])
        checks = {row.check for row in report}
        assert {
            "interval-width",
            "interval-length",
            "shape-lower",
            "shape-upper",
            "halfrect-disjoint",
            "halfrect-union",
            "union-lower",
            "levelset-containment",
            "levelset-containment-half",
            "overlap-integral[identity]",
            "overlap-integral[psi[phi_beta:1]]",
            "overlap-integral[exp]",
        } <= checks
        assert all(row.k == 3 for row in report)

    def test_default_test_functions(
        self, superlacunary_certificate: SeparationCertificate
    ):
        functions = construct.default_test_functions(superlacunary_certificate)
        names = [name for name, _ in functions]
        assert names == ["identity", "psi[loglog]", "exp"]

    def test_overlap_bound_of_single_rectangle(
        self, lacunary_family: List[Construction]
    ):
        c = lacunary_family[1]
        values = np.arange(1.0, c.k + 2.0)
        assert construct.overlap_bound(c, [0], values) == pytest.approx(c.Q_area)

    def test_overlap_bound_with_custom_function(
        self, lacunary_family: List[Construction]
    ):
        c = lacunary_family[2]
        functions = [("cube", lambda t: np.asarray(t) ** 3)]
        report = construct.verify_overlap_bound(c, functions, seed=4)
        assert len(report) == 1
        row = report.rows[0]
        assert row.check == "overlap-integral[cube]"
        assert row.seed == 4
        assert row.note.startswith("15 subsets")
        assert row.passed

    @pytest.mark.parametrize("regime", REGIMES)
    def test_level_set_containment(self, request, regime: str):
        c = request.getfixturevalue(f"{regime}_family")[-1]
        for halved in (False, True):
            rows = construct.level_set_containment(c, halved=halved)
            assert [j for j, _, _ in rows] == list(range(1, c.k + 1))
            for _, measured, bound in rows:
                assert measured <= bound * (1.0 + 1e-9)

    def test_level_set_containment_of_subfamily(
        self, lacunary_family: List[Construction]
    ):
        c = lacunary_family[-1]
        rows = construct.level_set_containment(c, positions=[0, 2, 5])
        assert len(rows) == 2
        assert all(measured <= bound for _, measured, bound in rows)


class TestPropB:
    @pytest.mark.parametrize("regime", REGIMES)
    def test_verify(self, request, regime: str):
        for c in request.getfixturevalue(f"{regime}_family"):
            report = construct.verify_propB(c)
            assert report.passed, report.first_failure

    def test_quarter_disk_ratio(self, power_family: List[Construction]):
        c = power_family[-1]
        row = construct.verify_propB(c).select("quarter-disk").rows[0]
        assert row.rhs == pytest.approx(0.25 * math.pi * c.ell / c.L)
        assert row.lhs == pytest.approx(row.rhs, rel=1e-9)

    def test_with_overlap_rows(self, lacunary_family: List[Construction]):
        report = construct.verify_propB(
            lacunary_family[1], overlap=True, random_subsets=5
        )
        assert report.passed
        assert any(row.anchor == "overlap-integral-bound" for row in report)
