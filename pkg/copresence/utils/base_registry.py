from abc import ABC
from typing import Any, Dict, List, Type

from copresence.errors import ConfigError
from copresence.types import BaseIntEnum


class BaseRegistry(ABC):
    """Maps enum keys to implementation classes; one table per subclass."""

    _key_class: Type[BaseIntEnum] = BaseIntEnum
    _registry: Dict[BaseIntEnum, type]

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        cls._registry = {}

    @classmethod
    def register(cls, key: BaseIntEnum, implementation_class: type) -> None:
        existing = cls._registry.get(key)
        if existing is not None and existing is not implementation_class:
            raise ConfigError(
                f"{cls.__name__}: {key} already maps to {existing.__name__}"
            )
        cls._registry[key] = implementation_class

    @classmethod
    def keys(cls) -> List[BaseIntEnum]:
        return sorted(cls._registry)

    @classmethod
    def get(cls, key: BaseIntEnum, *args, **kwargs) -> Any:
        implementation_class = cls._registry.get(key)
        if implementation_class is None:
            known = ", ".join(str(k) for k in cls.keys())
            raise ConfigError(f"{cls.__name__}: no layer for {key} (known: {known})")
        return implementation_class(*args, **kwargs)

    @classmethod
    def get_from_str(cls, key_str: str, *args, **kwargs) -> Any:
        # unknown names fail in from_str with the enum's list of valid values
        return cls.get(cls._key_class.from_str(key_str), *args, **kwargs)
