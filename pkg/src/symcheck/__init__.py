"""Exact verification of curvature and connection identities on symmetric spaces.

Models are Lie triple systems with exact structure constants; every claim is
checked with rational (or QQ(sqrt d), or GF(p)) linear algebra.
"""

from .errors import SymcheckError
from .spaces import CATALOG, SpaceModel, build_model, parse_spec, validate

__version__ = "0.1.0"

__all__ = ["CATALOG", "SpaceModel", "SymcheckError", "build_model", "parse_spec", "validate", "__version__"]
