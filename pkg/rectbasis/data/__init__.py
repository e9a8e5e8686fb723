"""Shapes, angle sequences, constructions and report classes"""

from rectbasis.data.construction import Construction, StokolosInput
from rectbasis.data.functions import OrliczFunction, SimpleFunction
from rectbasis.data.report import BlowupReport, ReportRow, VerificationReport
from rectbasis.data.results import (
    ConjugateResult,
    DecayResult,
    Delta2Result,
    KakeyaResult,
    LacunarityResult,
    Measurement,
    ProbeResult,
    StartIndex,
)
from rectbasis.data.run import RunConfig
from rectbasis.data.sequence import (
    AngleSequence,
    DerivedConstants,
    LacunarySpec,
    PowerSpec,
    RegimeSpec,
    SeparationCertificate,
    SuperlacunarySpec,
)
from rectbasis.data.shapes import (
    ORIGIN,
    ConvexPolygon,
    ConvexRegion,
    Disk,
    HalfRect,
    OrientedBox,
    Point,
    Region,
    RotatedRect,
    StretchedRect,
)

__all__ = [
    "Point",
    "ORIGIN",
    "Region",
    "ConvexRegion",
    "ConvexPolygon",
    "OrientedBox",
    "RotatedRect",
    "HalfRect",
    "StretchedRect",
    "Disk",
    "RegimeSpec",
    "LacunarySpec",
    "SuperlacunarySpec",
    "PowerSpec",
    "AngleSequence",
    "SeparationCertificate",
    "DerivedConstants",
    "Construction",
    "StokolosInput",
    "SimpleFunction",
    "OrliczFunction",
    "ReportRow",
    "VerificationReport",
    "BlowupReport",
    "Measurement",
    "ConjugateResult",
    "Delta2Result",
    "LacunarityResult",
    "KakeyaResult",
    "ProbeResult",
    "StartIndex",
    "DecayResult",
    "RunConfig",
]
