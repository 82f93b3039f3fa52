from dataclasses import fields, is_dataclass
from typing import Any, Dict, Union, get_args, get_origin, get_type_hints

from copresence.errors import ConfigError
from copresence.types import BaseIntEnum

primitive_types = {int, str, float, bool, type(None)}


def get_all_subclasses(cls):
    subclasses = cls.__subclasses__()
    return subclasses + [g for s in subclasses for g in get_all_subclasses(s)]


def is_optional(field_type: type) -> bool:
    return get_origin(field_type) is Union and type(None) in get_args(field_type)


def is_list(field_type: type) -> bool:
    return get_origin(field_type) is list


def is_dict(field_type: type) -> bool:
    return get_origin(field_type) is dict


def get_inner_type(field_type: type) -> type:
    return next(t for t in get_args(field_type) if t is not type(None))


def dataclass_to_dict(obj):
    if isinstance(obj, BaseIntEnum):
        return str(obj)
    if isinstance(obj, (list, tuple)):
        return [dataclass_to_dict(item) for item in obj]
    if isinstance(obj, dict):
        return {str(key): dataclass_to_dict(value) for key, value in obj.items()}
    elif is_dataclass(obj):
        data = {}
        for field in fields(obj):
            value = getattr(obj, field.name)
            data[field.name] = dataclass_to_dict(value)
        # Include the name of the class
        if hasattr(obj, "get_type") and callable(getattr(obj, "get_type")):
            data["name"] = str(obj.get_type())
        return data
    else:
        return obj


def _coerce(value: Any, field_type: Any, path: str) -> Any:
    if is_optional(field_type):
        if value is None:
            return None
        field_type = get_inner_type(field_type)

    if is_dataclass(field_type):
        if not isinstance(value, dict):
            raise ConfigError(f"{path}: expected a mapping, got {value!r}")
        return dataclass_from_dict(field_type, value, path)

    if isinstance(field_type, type) and issubclass(field_type, BaseIntEnum):
        if isinstance(value, field_type):
            return value
        if isinstance(value, str):
            try:
                return field_type.from_str(value)
            except ValueError as e:
                raise ConfigError(f"{path}: {e}") from None
        raise ConfigError(f"{path}: expected one of {field_type.choices()}, got {value!r}")

    if field_type is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected a boolean, got {value!r}")
        return value

    if field_type is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value

    if field_type is float:
        # yaml reads exponent literals without a dot, such as 1e-5, as strings
        if isinstance(value, str):
            try:
                return float(value)
            except ValueError:
                raise ConfigError(f"{path}: expected a number, got {value!r}") from None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)

    if field_type is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value

    if is_list(field_type):
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{path}: expected a list, got {value!r}")
        (item_type,) = get_args(field_type) or (Any,)
        return [_coerce(item, item_type, f"{path}[{i}]") for i, item in enumerate(value)]

    if is_dict(field_type):
        if not isinstance(value, dict):
            raise ConfigError(f"{path}: expected a mapping, got {value!r}")
        return dict(value)

    return value


def dataclass_from_dict(cls, data: Dict[str, Any], path: str = ""):
    """Builds `cls` from a nested mapping, rejecting keys it does not declare."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path or cls.__name__}: expected a mapping, got {data!r}")

    type_hints = get_type_hints(cls)
    known = {field.name for field in fields(cls) if field.init}
    unknown = sorted(set(data) - known)
    if unknown:
        where = f" under {path}" if path else ""
        raise ConfigError(f"Unknown config key(s){where}: {', '.join(unknown)}")

    kwargs = {}
    for name, value in data.items():
        field_path = f"{path}.{name}" if path else name
        kwargs[name] = _coerce(value, type_hints[name], field_path)
    return cls(**kwargs)
