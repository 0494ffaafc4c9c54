"""
Factory Method Pattern:
EmitterFactory.create() returns a TextEmitter or JsonEmitter based on the
RK_OUTPUT_FORMAT setting (or --format). Commands produce plain records; only
the emitter knows how they look on stdout.
"""

import json
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, Optional

import typer

from errors import ConfigError


def _text_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, (tuple, list)):
        if all(isinstance(x, int) and not isinstance(x, bool) for x in value):
            return "(" + ",".join(str(x) for x in value) + ")"
        return "[" + " ".join(_text_value(x) for x in value) + "]"
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, (tuple, list)):
        return [_json_value(x) for x in value]
    if isinstance(value, dict):
        return {str(k): _json_value(v) for k, v in value.items()}
    return value


class Emitter(ABC):
    def __init__(self, write: Optional[Callable[[str], None]] = None) -> None:
        self.write = write or typer.echo

    @abstractmethod
    def record(self, kind: str, value: Any = None, **fields: Any) -> None:
        ...

    @abstractmethod
    def block(self, kind: str, text: str) -> None:
        """Multi-line payload such as a PALP matrix."""


class TextEmitter(Emitter):
    def record(self, kind: str, value: Any = None, **fields: Any) -> None:
        if not fields:
            self.write(f"{kind}: {_text_value(value)}")
            return
        parts = [f"{k}={_text_value(v)}" for k, v in fields.items()]
        if value is not None:
            parts.insert(0, _text_value(value))
        self.write(f"{kind}: " + " ".join(parts))

    def block(self, kind: str, text: str) -> None:
        self.write(text.rstrip("\n"))


class JsonEmitter(Emitter):
    def record(self, kind: str, value: Any = None, **fields: Any) -> None:
        rec: Dict[str, Any] = {"kind": kind}
        if value is not None or not fields:
            rec["value"] = _json_value(value)
        rec.update({k: _json_value(v) for k, v in fields.items()})
        self.write(json.dumps(rec))

    def block(self, kind: str, text: str) -> None:
        self.write(json.dumps({"kind": kind, "text": text}))


class EmitterFactory:
    """
    RK_OUTPUT_FORMAT = 'text' | 'json'
    """

    @staticmethod
    def create(kind: str, write: Optional[Callable[[str], None]] = None) -> Emitter:
        if kind == "text":
            return TextEmitter(write)
        if kind == "json":
            return JsonEmitter(write)
        raise ConfigError("Unknown output format: %s" % kind)
