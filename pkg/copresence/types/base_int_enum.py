from enum import IntEnum


class BaseIntEnum(IntEnum):
    def __str__(self):
        return self.name.lower()

    @classmethod
    def from_str(cls, string):
        try:
            return cls[string.upper().replace("-", "_")]
        except KeyError:
            valid = ", ".join(str(member) for member in cls)
            raise ValueError(
                f"Invalid {cls.__name__}: {string}. Valid values: {valid}"
            ) from None

    @classmethod
    def choices(cls):
        return [str(member) for member in cls]
