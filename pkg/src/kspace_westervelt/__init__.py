"""k-space solver for the Westervelt equation in inhomogeneous, absorptive media."""

from .analysis import FieldSnapshot, SensorTrace, Spectrum, harmonic_amplitudes, least_square_error, spectrum
from .config import ConfigError, RunConfig, load_config, load_preset
from .grid import GridSpec
from .medium import MediumMaps
from .solver import KSpaceSolver, RunOutputs, SimulationDiverged, UnstableConfiguration, run

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "FieldSnapshot",
    "GridSpec",
    "KSpaceSolver",
    "MediumMaps",
    "RunConfig",
    "RunOutputs",
    "SensorTrace",
    "SimulationDiverged",
    "Spectrum",
    "UnstableConfiguration",
    "harmonic_amplitudes",
    "least_square_error",
    "load_config",
    "load_preset",
    "run",
    "spectrum",
]
