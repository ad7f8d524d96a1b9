"""Strict run-configuration parsing.

One `key = value` pair per line, scenario sections in square brackets,
and an explicit unit suffix on every physical quantity::

    seed = 42

    [breit-rabi-sweep]
    b_min = 0.01 T
    points = 61

Unknown keys, unknown scenarios, missing or misspelled unit suffixes,
and duplicate entries all abort with a line-numbered diagnostic before
any computation starts. Numbers mixing T, mT, G and unsuffixed values
have caused enough silent factor-of-10^4 errors that nothing here is
inferred.
"""

import math
from dataclasses import dataclass

__all__ = [
    "ConfigError",
    "ParamSpec",
    "RunConfig",
    "ScenarioRequest",
    "parse_config",
]


class ConfigError(ValueError):
    """Malformed configuration; message carries the offending line."""


@dataclass(frozen=True)
class ParamSpec:
    """Declared parameter: expected unit suffix (None = dimensionless),
    value kind ('float' or 'int') and the default used when omitted."""

    unit: object
    kind: str
    default: object

    def __post_init__(self):
        if self.kind not in ("float", "int"):
            raise ValueError("kind must be 'float' or 'int'")


@dataclass(frozen=True)
class ScenarioRequest:
    """A scenario name with its fully resolved parameter values."""

    name: str
    params: dict


@dataclass(frozen=True)
class RunConfig:
    seed: int
    requests: tuple


_TOP_LEVEL = {"seed": ParamSpec(None, "int", 0)}


def _parse_int(raw, key, where):
    try:
        return int(raw, 10)
    except ValueError:
        pass
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError("%s: cannot parse number '%s' for key '%s'"
                          % (where, raw, key)) from None
    if not value.is_integer() or abs(value) > 2.0 ** 53:
        raise ConfigError("%s: key '%s' needs an integer, got '%s'"
                          % (where, key, raw))
    return int(value)


def _parse_value(key, spec, tokens, where):
    if not tokens:
        raise ConfigError("%s: missing value for key '%s'" % (where, key))
    if spec.unit is None:
        if len(tokens) != 1:
            raise ConfigError(
                "%s: key '%s' is dimensionless but got suffix '%s'"
                % (where, key, tokens[1]))
        raw = tokens[0]
    else:
        if len(tokens) == 1:
            raise ConfigError("%s: key '%s' needs a unit suffix '%s'"
                              % (where, key, spec.unit))
        if len(tokens) > 2 or tokens[1] != spec.unit:
            raise ConfigError(
                "%s: key '%s' expects unit '%s', got '%s'"
                % (where, key, spec.unit, " ".join(tokens[1:])))
        raw = tokens[0]
    if spec.kind == "int":
        return _parse_int(raw, key, where)
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError("%s: cannot parse number '%s' for key '%s'"
                          % (where, raw, key)) from None
    if not math.isfinite(value):
        raise ConfigError("%s: key '%s' must be finite" % (where, key))
    return value


def parse_config(text, schemas):
    """Parse config text against ``{scenario: {key: ParamSpec}}``.

    Returns a RunConfig with defaults merged in; scenarios run in file
    order. Raises ConfigError on the first problem found.
    """
    top = {}
    sections = []
    current = None
    current_name = None
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        where = "line %d" % lineno
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("%s: unterminated section header" % where)
            name = line[1:-1].strip()
            if name not in schemas:
                raise ConfigError(
                    "%s: unknown scenario '%s' (known: %s)"
                    % (where, name, ", ".join(schemas)))
            if any(existing == name for existing, _ in sections):
                raise ConfigError("%s: scenario '%s' listed twice"
                                  % (where, name))
            current = {}
            current_name = name
            sections.append((name, current))
            continue
        if "=" not in line:
            raise ConfigError("%s: expected 'key = value'" % where)
        key, _, rest = line.partition("=")
        key = key.strip()
        tokens = rest.split()
        if current is None:
            if key not in _TOP_LEVEL:
                raise ConfigError(
                    "%s: unknown top-level key '%s' (known: %s)"
                    % (where, key, ", ".join(_TOP_LEVEL)))
            if key in top:
                raise ConfigError("%s: duplicate key '%s'" % (where, key))
            top[key] = _parse_value(key, _TOP_LEVEL[key], tokens, where)
        else:
            schema = schemas[current_name]
            if key not in schema:
                raise ConfigError(
                    "%s: unknown key '%s' for scenario '%s' (known: %s)"
                    % (where, key, current_name, ", ".join(schema) or "none"))
            if key in current:
                raise ConfigError("%s: duplicate key '%s' in scenario '%s'"
                                  % (where, key, current_name))
            current[key] = _parse_value(key, schema[key], tokens, where)
    if not sections:
        raise ConfigError("config lists no scenarios")
    seed = top.get("seed", 0)
    if not 0 <= seed < 2 ** 64:
        raise ConfigError("seed must fit in an unsigned 64-bit integer")
    requests = []
    for name, given in sections:
        params = {key: spec.default for key, spec in schemas[name].items()}
        params.update(given)
        requests.append(ScenarioRequest(name=name, params=params))
    return RunConfig(seed=seed, requests=tuple(requests))
