"""Exact ultrametric algebra for deformation series of gamma and zeta values in positive characteristic."""
from __future__ import annotations

from .errors import ArtifactError
from .ffield import FieldCtx, ff_make
from .laurent import INF, LaurentCtx, RamifiedLaurent, Valuation
from .tate import TailCertificate, TateSeries

__version__ = "0.1.0"

__all__ = ["ArtifactError", "FieldCtx", "ff_make", "INF", "LaurentCtx", "RamifiedLaurent", "Valuation",
           "TailCertificate", "TateSeries", "__version__"]
