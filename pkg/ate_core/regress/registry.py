"""
Regressor registry for resolving model families by name.

The CLI selects baselines by name and persisted models name their family,
so loading dispatches through this registry.
"""

from typing import Dict, Optional, Type

from .base import Regressor


class RegressorRegistry:
    """Registry for regressor classes."""

    _regressors: Dict[str, Type[Regressor]] = {}

    @classmethod
    def register(cls, name: str, regressor_class: Type[Regressor]) -> None:
        cls._regressors[name] = regressor_class

    @classmethod
    def get(cls, name: str) -> Optional[Type[Regressor]]:
        return cls._regressors.get(name)

    @classmethod
    def create(cls, name: str, **kwargs) -> Regressor:
        """
        Create an unfitted regressor by name.

        Raises:
            KeyError: If no regressor is registered under the name
        """
        regressor_class = cls.get(name)
        if regressor_class is None:
            raise KeyError(f"Unknown regressor {name!r}; known: {cls.list_regressors()}")
        return regressor_class(**kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> Regressor:
        regressor_class = cls.get(data.get("kind", ""))
        if regressor_class is None:
            raise KeyError(f"Unknown regressor kind {data.get('kind')!r}")
        return regressor_class.from_dict(data)

    @classmethod
    def list_regressors(cls) -> list[str]:
        return list(cls._regressors.keys())

    @classmethod
    def is_registered(cls, name: str) -> bool:
        return name in cls._regressors


def register_regressor(name: str):
    """
    Decorator for registering regressor classes.

    Usage:
        @register_regressor("dummy")
        class DummyRegressor(Regressor):
            ...
    """
    def decorator(regressor_class: Type[Regressor]):
        regressor_class.name = name
        RegressorRegistry.register(name, regressor_class)
        return regressor_class
    return decorator
