from typing import List

import pytest

from rectbasis import angles, construct
from rectbasis.data import (
    AngleSequence,
    Construction,
    LacunarySpec,
    PowerSpec,
    SeparationCertificate,
    SuperlacunarySpec,
)


@pytest.fixture(scope="session")
def lacunary_spec() -> LacunarySpec:
    return LacunarySpec(lam=0.3, mu=0.5, m0=0.3, n=20)


@pytest.fixture(scope="session")
def superlacunary_spec() -> SuperlacunarySpec:
    return SuperlacunarySpec(d=2, lam=0.4, mu=0.5, m0=0.4, n=6)


@pytest.fixture(scope="session")
def power_spec() -> PowerSpec:
    return PowerSpec(d=0.5, a=0.02, b=0.02, n=12)


@pytest.fixture(scope="session")
def lacunary_sequence(lacunary_spec: LacunarySpec) -> AngleSequence:
    return angles.generate(lacunary_spec)


@pytest.fixture(scope="session")
def superlacunary_sequence(superlacunary_spec: SuperlacunarySpec) -> AngleSequence:
    return angles.generate(superlacunary_spec)


@pytest.fixture(scope="session")
def power_sequence(power_spec: PowerSpec) -> AngleSequence:
    return angles.generate(power_spec)


@pytest.fixture(scope="session")
def lacunary_certificate(lacunary_spec: LacunarySpec) -> SeparationCertificate:
    return angles.derive_certificate(lacunary_spec)


@pytest.fixture(scope="session")
def superlacunary_certificate(
    superlacunary_spec: SuperlacunarySpec,
) -> SeparationCertificate:
    return angles.derive_certificate(superlacunary_spec)


@pytest.fixture(scope="session")
def power_certificate(power_spec: PowerSpec) -> SeparationCertificate:
    return angles.derive_certificate(power_spec)


@pytest.fixture(scope="session")
def lacunary_family(
    lacunary_sequence: AngleSequence, lacunary_certificate: SeparationCertificate
) -> List[Construction]:
    return construct.build_nested_family(lacunary_sequence, lacunary_certificate, 5)


@pytest.fixture(scope="session")
def superlacunary_family(
    superlacunary_sequence: AngleSequence,
    superlacunary_certificate: SeparationCertificate,
) -> List[Construction]:
    return construct.build_nested_family(
        superlacunary_sequence, superlacunary_certificate, 3
    )


@pytest.fixture(scope="session")
def power_family(
    power_sequence: AngleSequence, power_certificate: SeparationCertificate
) -> List[Construction]:
    return construct.build_nested_family(power_sequence, power_certificate, 5)
