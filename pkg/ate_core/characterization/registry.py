"""
Metric registry for managing available characterization metrics.

Metrics are registered under the name that labels their matrix row, so a
configured metric set is simply an ordered list of names.
"""

from typing import Dict, Iterable, Type

from .base import CharacterizationMetric

# Order of the default set defines the row order of characterization matrices.
DEFAULT_METRICS: tuple[str, ...] = (
    "brightness",
    "contrast",
    "image_entropy",
    "laplacian_variance",
    "gradient_magnitude",
    "underexposure",
    "overexposure",
    "gyro_mean",
    "accel_mean",
    "gyro_std",
)


class MetricRegistry:
    """
    Registry for characterization metrics.

    Allows metrics to be registered with a name and later resolved by that
    name, which is how configuration files select a metric set.
    """

    _metrics: Dict[str, Type[CharacterizationMetric]] = {}

    @classmethod
    def register(cls, name: str, metric_class: Type[CharacterizationMetric]) -> None:
        """
        Register a metric class with a name.

        Args:
            name: The name to register the metric under
            metric_class: The metric class to register
        """
        cls._metrics[name] = metric_class

    @classmethod
    def get(cls, name: str) -> Type[CharacterizationMetric]:
        """
        Get a metric class by name.

        Raises:
            KeyError: If no metric is registered under that name
        """
        try:
            return cls._metrics[name]
        except KeyError:
            raise KeyError(
                f"Unknown characterization metric {name!r}; "
                f"available: {', '.join(sorted(cls._metrics))}"
            ) from None

    @classmethod
    def create(cls, name: str) -> CharacterizationMetric:
        """Create a metric instance by name."""
        return cls.get(name)()

    @classmethod
    def resolve(cls, names: Iterable[str]) -> tuple[CharacterizationMetric, ...]:
        """Instantiate an ordered metric set."""
        metrics = tuple(cls.create(name) for name in names)
        if not metrics:
            raise ValueError("Metric set must not be empty")
        return metrics

    @classmethod
    def list_metrics(cls) -> list[str]:
        """List all registered metric names."""
        return list(cls._metrics.keys())

    @classmethod
    def is_registered(cls, name: str) -> bool:
        return name in cls._metrics


def register_metric(name: str):
    """
    Decorator for registering metric classes.

    Usage:
        @register_metric("my_metric")
        class MyMetric(CharacterizationMetric):
            ...
    """
    def decorator(metric_class: Type[CharacterizationMetric]):
        metric_class.name = name
        MetricRegistry.register(name, metric_class)
        return metric_class
    return decorator
