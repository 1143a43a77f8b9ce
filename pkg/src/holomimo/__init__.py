"""Degrees of freedom, diversity and capacity of planar versus height-staggered arrays.

Modules
-------
geometry     element layouts and aperture measures
clarke       point-source spatial correlation under a uniform cap of plane waves
patterns     sampled element far fields, analytic reflector-backed dipoles, CSV I/O
kronecker    pattern correlation, S-parameters and embedded efficiency
metrics      diversity measure, eigen-spectra, ergodic capacity, beamforming gain
channel3gpp  simplified urban-macro scenario generator
io           Touchstone and result-table interchange
cli          ``holomimo`` command-line runner
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    DataError,
    DegenerateInputError,
    FormatError,
    HolomimoError,
    InputFileError,
    InvalidArgumentError,
    NumericError,
    OutputError,
    ParseError,
    UnsupportedVersionError,
)
from .geometry import ArrayGeometry, build_linear_2d, build_linear_3d  # noqa: E402
from .clarke import AngularSpectrum, QuadratureSpec, clarke_correlation  # noqa: E402
from .kronecker import ScatteringMatrix, covariance, embedded_efficiency, pattern_correlation  # noqa: E402
from .metrics import diversity, eigen_spectrum, ergodic_capacity  # noqa: E402

__all__ = [
    "AngularSpectrum", "ArrayGeometry", "ConfigError", "DataError", "DegenerateInputError",
    "FormatError", "HolomimoError", "InputFileError", "InvalidArgumentError", "NumericError",
    "OutputError", "ParseError", "QuadratureSpec", "ScatteringMatrix", "UnsupportedVersionError",
    "build_linear_2d", "build_linear_3d", "clarke_correlation", "covariance", "diversity",
    "eigen_spectrum", "embedded_efficiency", "ergodic_capacity", "pattern_correlation",
]
