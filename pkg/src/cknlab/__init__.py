"""Numerical verification toolkit for the Caffarelli-Kohn-Nirenberg family of inequalities."""

import os as _os

# CKNLAB_THREADS caps BLAS/OpenMP threads; it must be applied before numpy loads
_threads = _os.environ.get("CKNLAB_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .errors import (BoundaryError, CknError, ConstantMismatch, DegenerateParams, DomainError,
                     MissingZ, NonFinite, OriginError, PoleError, PositivityError, SpecError)
from .params import CknParams, classify, derive, dgz_curve, fs_curve, hardy_constant, sobolev_constant

__version__ = "0.1.0"

__all__ = [
    "BoundaryError", "CknError", "ConstantMismatch", "DegenerateParams", "DomainError",
    "MissingZ", "NonFinite", "OriginError", "PoleError", "PositivityError", "SpecError",
    "CknParams", "classify", "derive", "dgz_curve", "fs_curve", "hardy_constant",
    "sobolev_constant",
]
