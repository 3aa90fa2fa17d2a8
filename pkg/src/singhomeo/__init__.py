"""Exactly evaluable singular homeomorphisms of cubes and estimators for their graphs."""

__version__ = "0.1.0"

from .cantor import CantorScheme, FillScheme, elementary_length, fill_measure, svc_measure
from .errors import (
    ConfigError,
    DomainError,
    InvariantError,
    PreconditionError,
    SingHomeoError,
    UnsupportedExpression,
)
from .grammar import parse, parse_expr
from .homeo import (
    Compose,
    CubeBall,
    HomeoExpr,
    Identity,
    Inverse,
    PowerMap,
    Product1D,
    RadialExpand,
    RadialTwist,
    Slide,
    compose,
    nowhere_twist,
    sample_witness,
    sample_witnesses,
)
from .interval_fn import PLFunc
from .singular import build_singular, strongly_singular_1d

__all__ = [
    "CantorScheme",
    "Compose",
    "ConfigError",
    "CubeBall",
    "DomainError",
    "FillScheme",
    "HomeoExpr",
    "Identity",
    "InvariantError",
    "Inverse",
    "PLFunc",
    "PowerMap",
    "PreconditionError",
    "Product1D",
    "RadialExpand",
    "RadialTwist",
    "SingHomeoError",
    "Slide",
    "UnsupportedExpression",
    "build_singular",
    "compose",
    "elementary_length",
    "fill_measure",
    "nowhere_twist",
    "parse",
    "parse_expr",
    "sample_witness",
    "sample_witnesses",
    "strongly_singular_1d",
    "svc_measure",
]
