"""
Base characterization metric abstraction.

This module defines the abstract interface for per-frame characterization
metrics, allowing image and inertial metrics to be combined freely in a
configured metric set.
"""

from abc import ABC, abstractmethod

from .types import Frame, Modality


class CharacterizationMetric(ABC):
    """
    Abstract base class for per-frame metrics.

    Design Principles:
    - Stateless: a value depends only on the frame it is given
    - One modality per metric; frames lacking it get the neutral value
    - Returns a finite float

    Subclasses set `name` (the row label in characterization matrices) and
    `modality`, and implement `compute`.
    """

    name: str = "base"
    modality: Modality = Modality.IMAGE
    neutral_value: float = 0.0

    def applies_to(self, frame: Frame) -> bool:
        """Whether the frame has the data this metric reads."""
        return frame.has(self.modality)

    @abstractmethod
    def compute(self, frame: Frame) -> float:
        """
        Evaluate the metric on a frame that carries this metric's modality.

        Args:
            frame: The Frame to characterize

        Returns:
            Finite metric value
        """
        pass

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(name={self.name!r})"
