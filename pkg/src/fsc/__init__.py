"""Exact function-space index calculus and an FFT Littlewood-Paley toolkit."""

from .embedding import embeds, holder_embedding
from .errors import FscError
from .multiplication import may_multiply
from .spaces import (
    Decision,
    DomainKind,
    Kind,
    SpaceSpec,
    dual_space,
    interpolate,
    lebesgue_regularity,
    parse_space,
    render_space,
)

__version__ = "0.1.0"

__all__ = [
    "Decision",
    "DomainKind",
    "FscError",
    "Kind",
    "SpaceSpec",
    "dual_space",
    "embeds",
    "holder_embedding",
    "interpolate",
    "lebesgue_regularity",
    "may_multiply",
    "parse_space",
    "render_space",
]
