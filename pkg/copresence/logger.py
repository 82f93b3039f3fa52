# Handler setup adapted from
# https://github.com/skypilot-org/skypilot/blob/86dc0f6283a335e4aa37b3c10716f90999f48ab6/sky/sky_logging.py
"""Logging for copresence: one stdout handler under the ``copresence`` root, JSON event lines."""
import json
import logging
import sys
from typing import Any

_FORMAT = "%(levelname)s %(asctime)s %(filename)s:%(lineno)d] %(message)s"
_DATE_FORMAT = "%m-%d %H:%M:%S"


class NewLineFormatter(logging.Formatter):
    """Repeats the record prefix on every line of a multi-line message."""

    def format(self, record: logging.LogRecord) -> str:
        msg = super().format(record)
        if record.message:
            prefix = msg.split(record.message)[0]
            msg = msg.replace("\n", "\r\n" + prefix)
        return msg


def _build_handler() -> logging.Handler:
    handler = logging.StreamHandler(sys.stdout)
    handler.flush = sys.stdout.flush  # type: ignore
    handler.setLevel(logging.INFO)
    handler.setFormatter(NewLineFormatter(_FORMAT, datefmt=_DATE_FORMAT))
    return handler


_root_logger = logging.getLogger("copresence")
_root_logger.setLevel(logging.DEBUG)
_root_logger.propagate = False
_default_handler = _build_handler()
_root_logger.addHandler(_default_handler)


def init_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


def set_log_level(level: str) -> None:
    _default_handler.setLevel(getattr(logging, level.upper()))


def _to_jsonable(value: Any) -> Any:
    # numpy scalars and arrays show up in metric payloads
    if hasattr(value, "tolist"):
        return value.tolist()
    return value


def format_event(event: str, **fields: Any) -> str:
    payload = {"event": event}
    payload.update({key: _to_jsonable(value) for key, value in fields.items()})
    return json.dumps(payload, sort_keys=True)


def log_event(logger: logging.Logger, event: str, **fields: Any) -> str:
    """Logs one structured JSON line and returns it."""
    line = format_event(event, **fields)
    logger.info(line)
    return line
