"""Scenario files: TOML with unit-suffixed quantities and strict key checking.

Quantities may be written as bare numbers (SI) or as strings carrying a
unit, e.g. ``"300 K"``, ``"10 eV"``, ``"0.1 mW"``, ``"20 ps"``.  Energies
accept kelvin (converted through k_B) and temperatures accept energy
units the same way.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

from .constants import BOLTZMANN, ELECTRONVOLT
from .errors import ThermoSteadyError, ValidationError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "ScenarioParseError",
    "Scenario",
    "Table",
    "KINDS",
    "parse_quantity",
    "load_scenario",
    "loads_scenario",
]

# kind -> name of the parameter block it requires
KINDS = {
    "spectral-report": "spectral",
    "kinetics-run": "kinetics",
    "gas-run": "gas",
    "hierarchy-run": "hierarchy",
    "entropy-demo": "entropy",
    "classify": "classify",
}

_PREFIX = {"p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "m": 1e-3, "": 1.0, "k": 1e3, "M": 1e6, "G": 1e9}

_BASE_UNITS = {
    "energy": {"J": 1.0, "eV": ELECTRONVOLT, "K": BOLTZMANN},
    "temperature": {"K": 1.0, "eV": ELECTRONVOLT / BOLTZMANN, "J": 1.0 / BOLTZMANN},
    "power": {"W": 1.0},
    "time": {"s": 1.0},
}
_EXTRA_UNITS = {"time": {"min": 60.0, "h": 3600.0, "d": 86400.0, "yr": 3.15576e7}}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-zµ]*)\s*$")


class ScenarioParseError(ThermoSteadyError):
    """Malformed scenario text; the message carries line/column when known."""


def _unit_factor(unit: str, kind: str) -> float:
    extra = _EXTRA_UNITS.get(kind, {})
    if unit in extra:
        return extra[unit]
    for base, factor in _BASE_UNITS[kind].items():
        if unit.endswith(base):
            prefix = unit[: -len(base)]
            if prefix in _PREFIX:
                return _PREFIX[prefix] * factor
    allowed = ", ".join(list(_BASE_UNITS[kind]) + list(extra))
    raise ValidationError(f"unit {unit!r} not valid for a {kind} (use {allowed}, optionally prefixed)")


def parse_quantity(value: Any, kind: Optional[str] = None, where: str = "value") -> float:
    """Convert a bare number or a unit-suffixed string to SI.

    ``kind`` is one of ``energy`` (J), ``temperature`` (K), ``power`` (W),
    ``time`` (s), or ``None`` for dimensionless/SI-only numbers.
    """
    if isinstance(value, bool):
        raise ValidationError(f"{where}: expected a number, got boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ValidationError(f"{where}: expected a number or quantity string, got {value!r}")
    m = _QUANTITY.match(value)
    if not m:
        raise ValidationError(f"{where}: cannot parse quantity {value!r}")
    number, unit = float(m.group(1)), m.group(2)
    if not unit:
        return number
    if kind is None:
        raise ValidationError(f"{where}: {value!r} takes no unit")
    try:
        return number * _unit_factor(unit, kind)
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


_REQUIRED = object()


class Table:
    """Read-once view of a TOML table that rejects unknown keys on :meth:`finish`."""

    def __init__(self, data: Dict[str, Any], where: str):
        if not isinstance(data, dict):
            raise ValidationError(f"{where}: expected a table, got {type(data).__name__}")
        self.data = data
        self.where = where
        self.used = set()

    def __contains__(self, key):
        return key in self.data

    def raw(self, key, default=_REQUIRED):
        self.used.add(key)
        if key not in self.data:
            if default is _REQUIRED:
                raise ValidationError(f"{self.where}: missing required key {key!r}")
            return default
        return self.data[key]

    def quantity(self, key, kind=None, default=_REQUIRED) -> float:
        val = self.raw(key, default)
        if val is default and default is not _REQUIRED:
            return default
        return parse_quantity(val, kind, f"{self.where}.{key}")

    def quantities(self, key, kind=None, default=_REQUIRED):
        val = self.raw(key, default)
        if not isinstance(val, list):
            raise ValidationError(f"{self.where}.{key}: expected an array")
        return [parse_quantity(v, kind, f"{self.where}.{key}[{i}]") for i, v in enumerate(val)]

    def integer(self, key, default=_REQUIRED) -> int:
        val = self.raw(key, default)
        if isinstance(val, float) and val.is_integer():
            val = int(val)
        if isinstance(val, bool) or not isinstance(val, int):
            raise ValidationError(f"{self.where}.{key}: expected an integer, got {val!r}")
        return val

    def string(self, key, default=_REQUIRED) -> str:
        val = self.raw(key, default)
        if not isinstance(val, str):
            raise ValidationError(f"{self.where}.{key}: expected a string, got {val!r}")
        return val

    def boolean(self, key, default=_REQUIRED) -> bool:
        val = self.raw(key, default)
        if not isinstance(val, bool):
            raise ValidationError(f"{self.where}.{key}: expected true/false, got {val!r}")
        return val

    def table(self, key, default=_REQUIRED) -> Optional["Table"]:
        val = self.raw(key, default)
        if val is None:
            return None
        return Table(val, f"{self.where}.{key}")

    def tables(self, key, default=_REQUIRED):
        val = self.raw(key, default)
        if not isinstance(val, list):
            raise ValidationError(f"{self.where}.{key}: expected an array of tables")
        return [Table(v, f"{self.where}.{key}[{i}]") for i, v in enumerate(val)]

    def finish(self):
        unknown = sorted(set(self.data) - self.used)
        if unknown:
            raise ValidationError(f"{self.where}: unknown key(s) {', '.join(map(repr, unknown))}")


@dataclass
class Scenario:
    name: str
    kind: str
    params: Table
    seed: int = 0
    description: str = ""
    topic: str = ""
    output: Optional[str] = None
    source: Optional[Path] = None
    extra: Dict[str, Any] = field(default_factory=dict)


def loads_scenario(text: str, source: Optional[Path] = None) -> Scenario:
    """Parse scenario text.  Only the top level is validated here; the
    parameter block is checked key by key when the scenario runs."""
    label = str(source) if source else "<scenario>"
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioParseError(f"{label}: {exc}") from None
    top = Table(data, "scenario")
    name = top.string("name")
    kind = top.string("kind")
    if kind not in KINDS:
        raise ValidationError(f"scenario.kind: unknown kind {kind!r} (expected one of {', '.join(KINDS)})")
    block = KINDS[kind]
    params = top.table(block)
    for other in KINDS.values():
        if other != block and other in data:
            raise ValidationError(f"scenario: block [{other}] does not belong to kind {kind!r}")
    sc = Scenario(
        name=name,
        kind=kind,
        params=params,
        seed=top.integer("seed", 0),
        description=top.string("description", ""),
        topic=top.string("topic", ""),
        output=top.raw("output", None),
        source=source,
    )
    top.finish()
    return sc


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioParseError(f"{path}: cannot read ({exc.strerror})") from None
    return loads_scenario(text, path)
