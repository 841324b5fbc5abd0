"""JSON input files (schema 1) for actions, matrix maps, metrics and operators."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .algebra import ExprSyntaxError, UnknownVariableError, parse_expr

SCHEMA = 1


class ConfigError(ValueError):
    pass


def load(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text, str(path))


def loads(text: str, source: str = "<string>") -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be an object")
    if data.get("schema") != SCHEMA:
        raise ConfigError(f"{source}: expected \"schema\": {SCHEMA}, got {data.get('schema')!r}")
    return data


def expr(text, variables, where: str):
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return parse_expr(str(Fraction(text)), variables)
    if not isinstance(text, str):
        raise ConfigError(f"{where}: expected an expression string, got {text!r}")
    try:
        return parse_expr(text, variables)
    except (ExprSyntaxError, UnknownVariableError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def names(value, where: str):
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ConfigError(f"{where}: expected a list of variable names")
    return tuple(value)


def matrix(value, variables, where: str):
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ConfigError(f"{where}: expected a list of rows")
    return [[expr(v, variables, f"{where}[{i}][{j}]") for j, v in enumerate(row)] for i, row in enumerate(value)]


def section(data: dict, key: str, required: bool = True):
    if key not in data:
        if required:
            raise ConfigError(f"missing section {key!r}")
        return None
    val = data[key]
    if not isinstance(val, dict):
        raise ConfigError(f"section {key!r} must be an object")
    return val


def fraction(value, where: str) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{where}: not a rational number: {value!r}") from None
