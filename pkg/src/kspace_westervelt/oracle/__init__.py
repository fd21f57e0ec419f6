"""Independent references: analytic solutions and a finite-difference solver."""

from .analytic import (
    HarmonicTable,
    bessel_jn,
    bessel_jn_all,
    fubini_harmonics,
    np_per_m_to_db_per_cm,
    thermoviscous_attenuation,
)
from .fdtd import FDTDRun, FDTDSolver, ReferenceNotConverged, band_limited_upsample, fdtd_reference

__all__ = [
    "FDTDRun",
    "FDTDSolver",
    "HarmonicTable",
    "ReferenceNotConverged",
    "band_limited_upsample",
    "bessel_jn",
    "bessel_jn_all",
    "fdtd_reference",
    "fubini_harmonics",
    "np_per_m_to_db_per_cm",
    "thermoviscous_attenuation",
]
