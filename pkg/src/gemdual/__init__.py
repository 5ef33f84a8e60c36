"""Colored-graph 3-manifold encodings, their dual triangulations, and size bounds."""

from gemdual.gem import (
    Gem,
    GemError,
    Instruction,
    MoveError,
    bloboid,
    format_gem,
    format_script,
    parse_gem,
    parse_instruction,
    parse_script,
)

__all__ = [
    "Gem",
    "GemError",
    "Instruction",
    "MoveError",
    "bloboid",
    "format_gem",
    "format_script",
    "parse_gem",
    "parse_instruction",
    "parse_script",
]

__version__ = "0.1.0"
