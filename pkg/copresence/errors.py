class CopresenceError(Exception):
    exit_code = 1


class ConfigError(CopresenceError):
    exit_code = 2


class StorageError(CopresenceError):
    exit_code = 3


class TrainingError(CopresenceError):
    exit_code = 4


class CompatibilityError(CopresenceError):
    exit_code = 5


class ShapeMismatchError(CopresenceError, ValueError):
    pass


class NonFiniteError(CopresenceError, ValueError):
    pass


class TapeError(CopresenceError, RuntimeError):
    pass
