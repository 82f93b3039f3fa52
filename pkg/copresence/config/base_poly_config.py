from abc import ABC
from dataclasses import dataclass
from typing import Any, Dict

from copresence.config.utils import dataclass_from_dict, get_all_subclasses


@dataclass
class BasePolyConfig(ABC):
    """Config family whose concrete class is chosen by `get_type()`."""

    @classmethod
    def create_from_type(cls, type_: Any, **overrides: Any) -> Any:
        for subclass in get_all_subclasses(cls):
            if subclass.get_type() == type_:
                return subclass(**overrides)
        raise ValueError(f"Invalid type: {type_}")

    @classmethod
    def create_from_dict(cls, data: Dict[str, Any]) -> Any:
        """Reads the `name` key written by `dataclass_to_dict` to pick the subclass."""
        data = dict(data)
        name = data.pop("name", None)
        if name is None:
            raise ValueError(f"{cls.__name__} mapping is missing its 'name' key")
        for subclass in get_all_subclasses(cls):
            if str(subclass.get_type()) == name:
                return dataclass_from_dict(subclass, data)
        raise ValueError(f"Invalid type: {name}")
