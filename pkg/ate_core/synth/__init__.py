"""
Synthetic corpus generation.
"""

from .generator import (
    SynthSequence,
    SynthSettings,
    generate_corpus,
    generate_sequence,
    offset_magnitudes,
    target_ate,
)

__all__ = [
    "SynthSequence",
    "SynthSettings",
    "generate_corpus",
    "generate_sequence",
    "offset_magnitudes",
    "target_ate",
]
