"""Declarative scenario files: parsing, validation, typed access.

Format: INI-like sections of ``key = value`` lines with ``#`` comments.
Numeric values may carry a unit suffix which, when present, must match the
key's unit (``bin_fwhm = 5 ps``, ``largest_gdd = 1000 ps2``,
``bandwidth = 1 rad/ps``).  Unknown sections or keys are rejected, and all
problems are reported together with their line numbers.

A scenario describes a simulation ([input] + [system] with optional [grid],
[analysis], [output]) and/or a design request ([design]); the subcommand
picks which part it needs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .design import DesignConfiguration
from .errors import ScenarioSemanticError, ScenarioSyntaxError
from .imaging import TopologyKind

_SECTION_RE = re.compile(r"^\[([A-Za-z0-9_-]+)\]$")
_KEY_RE = re.compile(r"^[A-Za-z0-9_]+$")

#: Accepted spellings per canonical unit.
_UNIT_ALIASES: dict[str, set[str]] = {
    "ps": {"ps"},
    "ps2": {"ps2", "ps^2"},
    "rad": {"rad"},
    "rad/ps": {"rad/ps"},
    "nm": {"nm"},
}


@dataclass(frozen=True)
class _KeySpec:
    kind: str  # "float" | "int" | "bool" | "enum" | "string"
    unit: str | None = None
    choices: tuple[str, ...] = ()


_SCHEMA: dict[str, dict[str, _KeySpec]] = {
    "input": {
        "kind": _KeySpec("enum", choices=("gaussian", "time-bin")),
        "fwhm": _KeySpec("float", unit="ps"),
        "center": _KeySpec("float", unit="ps"),
        "bin_fwhm": _KeySpec("float", unit="ps"),
        "bin_separation": _KeySpec("float", unit="ps"),
        "relative_phase": _KeySpec("float", unit="rad"),
    },
    "system": {
        "topology": _KeySpec(
            "enum", choices=("single-lens", "field-lens", "telescope")
        ),
        "magnification": _KeySpec("float"),
        "focal_gdd": _KeySpec("float", unit="ps2"),
        "input_gdd": _KeySpec("float", unit="ps2"),
        "largest_gdd": _KeySpec("float", unit="ps2"),
        "pump": _KeySpec("enum", choices=("ideal", "pumped")),
        "pump_seed_fwhm": _KeySpec("float", unit="ps"),
        "tod_ratio": _KeySpec("float", unit="ps"),
        "transmission": _KeySpec("float"),
        "input_carrier": _KeySpec("float", unit="nm"),
        "pump_carrier": _KeySpec("float", unit="nm"),
    },
    "grid": {
        "n_samples": _KeySpec("int"),
        "margin": _KeySpec("float"),
        "window": _KeySpec("float", unit="ps"),
    },
    "analysis": {
        "visibility": _KeySpec("bool"),
        "analyzer_delay": _KeySpec("float", unit="ps"),
        "analyzer_phase": _KeySpec("float", unit="rad"),
        "metric": _KeySpec("enum", choices=("energy", "peak")),
        "phase_fit_window": _KeySpec("float"),
    },
    "output": {
        "dir": _KeySpec("string"),
    },
    "design": {
        "configuration": _KeySpec(
            "enum", choices=("far-field", "telescope", "field-lens")
        ),
        "input_fwhm": _KeySpec("float", unit="ps"),
        "bandwidth": _KeySpec("float", unit="rad/ps"),
        "magnification": _KeySpec("float"),
        "far_field_multiplier": _KeySpec("float"),
    },
}


@dataclass(frozen=True)
class InputSpec:
    kind: str
    fwhm: float | None
    center: float
    bin_fwhm: float | None
    bin_separation: float | None
    relative_phase: float

    @property
    def extent(self) -> float:
        """Temporal support estimate for grid planning, ps."""
        if self.kind == "gaussian":
            return 4.0 * self.fwhm
        return self.bin_separation + 4.0 * self.bin_fwhm

    @property
    def feature_fwhm(self) -> float:
        return self.fwhm if self.kind == "gaussian" else self.bin_fwhm


@dataclass(frozen=True)
class SystemSpec:
    topology: TopologyKind
    magnification: float
    focal_gdd: float | None
    input_gdd: float | None
    largest_gdd: float | None
    pump_seed_fwhm: float | None  # None means ideal lenses
    tod_ratio: float
    transmission: float
    input_carrier_nm: float
    pump_carrier_nm: float


@dataclass(frozen=True)
class GridSpec:
    n_samples: int = 2**15
    margin: float = 4.0
    window: float | None = None


@dataclass(frozen=True)
class AnalysisSpec:
    visibility: bool | None = None  # None: enabled automatically for time-bin input
    analyzer_delay: float | None = None  # default |M| * bin_separation
    analyzer_phase: float | None = None
    metric: str = "energy"
    phase_fit_window: float = 1.0


@dataclass(frozen=True)
class DesignSpec:
    configuration: DesignConfiguration
    input_fwhm: float
    bandwidth: float
    magnification: float
    far_field_multiplier: float = 10.0


@dataclass(frozen=True)
class Scenario:
    input: InputSpec | None
    system: SystemSpec | None
    grid: GridSpec
    analysis: AnalysisSpec
    design: DesignSpec | None
    output_dir: str | None

    @property
    def simulatable(self) -> bool:
        return self.input is not None and self.system is not None


def key_spec(path: str) -> _KeySpec | None:
    """Schema entry for a ``section.key`` path, or None if unknown."""
    section, _, key = path.partition(".")
    return _SCHEMA.get(section.strip().lower(), {}).get(key.strip().lower())


@dataclass
class _Raw:
    line: int
    text: str


class _Diagnostics:
    def __init__(self) -> None:
        self.syntax: list[tuple[int, str]] = []
        self.semantic: list[tuple[int, str]] = []

    def raise_if_any(self) -> None:
        if self.syntax:
            raise ScenarioSyntaxError(sorted(self.syntax))
        if self.semantic:
            raise ScenarioSemanticError(sorted(self.semantic))


def _parse_raw(text: str, diag: _Diagnostics) -> dict[str, dict[str, _Raw]]:
    sections: dict[str, dict[str, _Raw]] = {}
    current: str | None = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        header = _SECTION_RE.match(line)
        if header:
            current = header.group(1).lower()
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            diag.syntax.append(
                (lineno, f"expected 'key = value' or '[section]', got {line!r}")
            )
            continue
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if not _KEY_RE.match(key):
            diag.syntax.append((lineno, f"malformed key {key!r}"))
            continue
        if current is None:
            diag.syntax.append(
                (lineno, f"key {key!r} appears before any [section] header")
            )
            continue
        if not value:
            diag.syntax.append((lineno, f"key {key!r} has no value"))
            continue
        if key in sections[current]:
            diag.semantic.append(
                (lineno, f"duplicate key {key!r} in section [{current}]")
            )
            continue
        sections[current][key] = _Raw(lineno, value)
    return sections


class _Section:
    """Typed, diagnostic-collecting access to one raw section."""

    def __init__(
        self, name: str, raw: dict[str, _Raw], diag: _Diagnostics
    ) -> None:
        self.name = name
        self.raw = raw
        self.diag = diag
        self.schema = _SCHEMA[name]
        for key, item in raw.items():
            if key not in self.schema:
                diag.semantic.append(
                    (item.line, f"unknown key {key!r} in section [{name}]")
                )

    def line(self, key: str) -> int:
        item = self.raw.get(key)
        return item.line if item is not None else 0

    def has(self, key: str) -> bool:
        return key in self.raw and key in self.schema

    def get(self, key: str, default=None):
        if key not in self.raw:
            return default
        item = self.raw[key]
        spec = self.schema[key]
        value = item.text
        if spec.kind == "string":
            return value
        if spec.kind == "bool":
            low = value.lower()
            if low in ("true", "false"):
                return low == "true"
            self.diag.semantic.append(
                (item.line, f"{key}: expected true or false, got {value!r}")
            )
            return default
        if spec.kind == "enum":
            low = value.lower()
            if low in spec.choices:
                return low
            self.diag.semantic.append(
                (
                    item.line,
                    f"{key}: expected one of {', '.join(spec.choices)}, got {value!r}",
                )
            )
            return default
        # numeric kinds, optionally followed by a unit
        tokens = value.split()
        number, unit = tokens[0], " ".join(tokens[1:])
        if unit:
            allowed = _UNIT_ALIASES.get(spec.unit or "", set())
            if spec.unit is None:
                self.diag.semantic.append(
                    (item.line, f"{key} is dimensionless but has unit {unit!r}")
                )
                return default
            if unit not in allowed:
                self.diag.semantic.append(
                    (
                        item.line,
                        f"{key}: unit mismatch, expected {spec.unit!r}, got {unit!r}",
                    )
                )
                return default
        try:
            numeric = float(number)
        except ValueError:
            self.diag.semantic.append(
                (item.line, f"{key}: expected a number, got {number!r}")
            )
            return default
        if spec.kind == "int":
            if numeric != int(numeric):
                self.diag.semantic.append(
                    (item.line, f"{key}: expected an integer, got {number!r}")
                )
                return default
            return int(numeric)
        return numeric

    def require(self, key: str):
        if key not in self.raw:
            self.diag.semantic.append(
                (0, f"section [{self.name}] is missing required key {key!r}")
            )
            return None
        return self.get(key)

    def forbid(self, key: str, why: str) -> None:
        if key in self.raw:
            self.diag.semantic.append((self.raw[key].line, f"{key}: {why}"))


def _validate_input(section: _Section, diag: _Diagnostics) -> InputSpec | None:
    kind = section.require("kind")
    if kind is None:
        return None
    if kind == "gaussian":
        fwhm = section.require("fwhm")
        for key in ("bin_fwhm", "bin_separation", "relative_phase"):
            section.forbid(key, "only valid for kind = time-bin")
        if fwhm is not None and fwhm <= 0.0:
            diag.semantic.append((section.line("fwhm"), "fwhm must be positive"))
            fwhm = None
        return (
            InputSpec(
                kind=kind,
                fwhm=fwhm,
                center=section.get("center", 0.0),
                bin_fwhm=None,
                bin_separation=None,
                relative_phase=0.0,
            )
            if fwhm is not None
            else None
        )
    bin_fwhm = section.require("bin_fwhm")
    bin_separation = section.require("bin_separation")
    section.forbid("fwhm", "only valid for kind = gaussian")
    section.forbid("center", "only valid for kind = gaussian")
    if bin_fwhm is not None and bin_fwhm <= 0.0:
        diag.semantic.append((section.line("bin_fwhm"), "bin_fwhm must be positive"))
        bin_fwhm = None
    if bin_separation is not None and bin_separation < 0.0:
        diag.semantic.append(
            (section.line("bin_separation"), "bin_separation must be nonnegative")
        )
        bin_separation = None
    if bin_fwhm is None or bin_separation is None:
        return None
    return InputSpec(
        kind=kind,
        fwhm=None,
        center=0.0,
        bin_fwhm=bin_fwhm,
        bin_separation=bin_separation,
        relative_phase=section.get("relative_phase", 0.0),
    )


def _validate_system(section: _Section, diag: _Diagnostics) -> SystemSpec | None:
    topology_name = section.require("topology")
    magnification = section.require("magnification")
    if topology_name is None or magnification is None:
        return None
    topology = TopologyKind(topology_name)
    if magnification == 0.0:
        diag.semantic.append(
            (
                section.line("magnification"),
                "magnification 0 is degenerate: no imaging system exists",
            )
        )
        return None
    if topology is not TopologyKind.TELESCOPE and magnification == 1.0:
        diag.semantic.append(
            (
                section.line("magnification"),
                "magnification 1 is degenerate for a single-lens/field-lens "
                "system (it forces D1 = 0)",
            )
        )
        return None

    sizing_keys = [
        k for k in ("focal_gdd", "input_gdd", "largest_gdd") if section.has(k)
    ]
    if topology is TopologyKind.TELESCOPE:
        section.forbid("focal_gdd", "telescope systems are sized by input_gdd")
        valid = ("input_gdd", "largest_gdd")
    else:
        section.forbid("input_gdd", f"{topology.value} systems are sized by focal_gdd")
        valid = ("focal_gdd", "largest_gdd")
    chosen = [k for k in sizing_keys if k in valid]
    if len(chosen) != 1:
        diag.semantic.append(
            (
                0,
                f"section [system] needs exactly one of {' / '.join(valid)} "
                f"(found {len(chosen)})",
            )
        )
        return None
    sizing_value = section.get(chosen[0])
    if sizing_value is None or sizing_value == 0.0:
        diag.semantic.append((section.line(chosen[0]), f"{chosen[0]} must be nonzero"))
        return None

    pump_mode = section.get("pump")
    pump_seed = section.get("pump_seed_fwhm")
    if pump_mode == "ideal" and pump_seed is not None:
        diag.semantic.append(
            (
                section.line("pump_seed_fwhm"),
                "pump_seed_fwhm conflicts with pump = ideal",
            )
        )
        return None
    if pump_mode == "pumped" and pump_seed is None:
        diag.semantic.append(
            (section.line("pump"), "pump = pumped requires pump_seed_fwhm")
        )
        return None
    if pump_seed is not None and pump_seed <= 0.0:
        diag.semantic.append(
            (section.line("pump_seed_fwhm"), "pump_seed_fwhm must be positive")
        )
        return None

    transmission = section.get("transmission", 1.0)
    if not (0.0 < transmission <= 1.0):
        diag.semantic.append(
            (section.line("transmission"), "transmission must be in (0, 1]")
        )
        return None
    input_carrier = section.get("input_carrier", 710.0)
    pump_carrier = section.get("pump_carrier", 1550.0)
    for key, value in (("input_carrier", input_carrier), ("pump_carrier", pump_carrier)):
        if value <= 0.0:
            diag.semantic.append((section.line(key), f"{key} must be positive"))
            return None
    if 1.0 / input_carrier <= 1.0 / pump_carrier:
        diag.semantic.append(
            (
                section.line("input_carrier"),
                "down-conversion requires the input carrier frequency to exceed "
                f"the pump's ({input_carrier} nm vs {pump_carrier} nm)",
            )
        )
        return None

    return SystemSpec(
        topology=topology,
        magnification=magnification,
        focal_gdd=sizing_value if chosen[0] == "focal_gdd" else None,
        input_gdd=sizing_value if chosen[0] == "input_gdd" else None,
        largest_gdd=sizing_value if chosen[0] == "largest_gdd" else None,
        pump_seed_fwhm=pump_seed,
        tod_ratio=section.get("tod_ratio", 0.0),
        transmission=transmission,
        input_carrier_nm=input_carrier,
        pump_carrier_nm=pump_carrier,
    )


def _validate_grid(section: _Section, diag: _Diagnostics) -> GridSpec:
    n_samples = section.get("n_samples", 2**15)
    if n_samples is not None and (n_samples < 16 or n_samples & (n_samples - 1)):
        diag.semantic.append(
            (section.line("n_samples"), "n_samples must be a power of two >= 16")
        )
        n_samples = 2**15
    margin = section.get("margin", 4.0)
    if margin <= 0.0:
        diag.semantic.append((section.line("margin"), "margin must be positive"))
        margin = 4.0
    window = section.get("window")
    if window is not None and window <= 0.0:
        diag.semantic.append((section.line("window"), "window must be positive"))
        window = None
    return GridSpec(n_samples=n_samples, margin=margin, window=window)


def _validate_analysis(
    section: _Section, diag: _Diagnostics, input_spec: InputSpec | None
) -> AnalysisSpec:
    visibility = section.get("visibility")
    if (
        visibility
        and input_spec is not None
        and input_spec.kind != "time-bin"
    ):
        diag.semantic.append(
            (
                section.line("visibility"),
                "visibility analysis requires a time-bin input",
            )
        )
        visibility = False
    analyzer_delay = section.get("analyzer_delay")
    if analyzer_delay is not None and analyzer_delay <= 0.0:
        diag.semantic.append(
            (section.line("analyzer_delay"), "analyzer_delay must be positive")
        )
        analyzer_delay = None
    phase_fit_window = section.get("phase_fit_window", 1.0)
    if phase_fit_window <= 0.0:
        diag.semantic.append(
            (section.line("phase_fit_window"), "phase_fit_window must be positive")
        )
        phase_fit_window = 1.0
    return AnalysisSpec(
        visibility=visibility,
        analyzer_delay=analyzer_delay,
        analyzer_phase=section.get("analyzer_phase"),
        metric=section.get("metric", "energy"),
        phase_fit_window=phase_fit_window,
    )


def _validate_design(section: _Section, diag: _Diagnostics) -> DesignSpec | None:
    configuration = section.require("configuration")
    input_fwhm = section.require("input_fwhm")
    bandwidth = section.require("bandwidth")
    magnification = section.require("magnification")
    multiplier = section.get("far_field_multiplier", 10.0)
    ok = True
    for key, value, cond, why in (
        ("input_fwhm", input_fwhm, lambda v: v > 0, "must be positive"),
        ("bandwidth", bandwidth, lambda v: v > 0, "must be positive"),
        ("magnification", magnification, lambda v: v > 0, "must be positive"),
        ("far_field_multiplier", multiplier, lambda v: v >= 1, "must be >= 1"),
    ):
        if value is None:
            ok = False
        elif not cond(value):
            diag.semantic.append((section.line(key), f"{key} {why}"))
            ok = False
    if not ok or configuration is None:
        return None
    return DesignSpec(
        configuration=DesignConfiguration(configuration),
        input_fwhm=input_fwhm,
        bandwidth=bandwidth,
        magnification=magnification,
        far_field_multiplier=multiplier,
    )


def parse_scenario(
    text: str, overrides: dict[str, float] | None = None
) -> Scenario:
    """Parse and validate scenario text.

    Args:
        text: UTF-8 scenario source.
        overrides: optional {"section.key": value} replacements applied
            before validation (used by parameter sweeps).

    Raises:
        ScenarioSyntaxError: structurally malformed text (all offending
            lines listed).
        ScenarioSemanticError: unknown keys, unit/type mismatches, missing
            or out-of-range values (all listed with line numbers).
    """
    diag = _Diagnostics()
    raw = _parse_raw(text, diag)
    if diag.syntax:
        diag.raise_if_any()

    for path, value in (overrides or {}).items():
        section_name, _, key = path.partition(".")
        section_name = section_name.strip().lower()
        key = key.strip().lower()
        if section_name not in _SCHEMA or not key:
            diag.semantic.append((0, f"override targets unknown section {path!r}"))
            continue
        if key not in _SCHEMA[section_name]:
            diag.semantic.append((0, f"override targets unknown key {path!r}"))
            continue
        if _SCHEMA[section_name][key].kind not in ("float", "int"):
            diag.semantic.append((0, f"override target {path!r} is not numeric"))
            continue
        raw.setdefault(section_name, {})[key] = _Raw(0, repr(float(value)))

    for name in raw:
        if name not in _SCHEMA:
            # collect one diagnostic per unknown section at its first key line
            first = min((item.line for item in raw[name].values()), default=0)
            diag.semantic.append((first, f"unknown section [{name}]"))
    sections = {
        name: _Section(name, raw.get(name, {}), diag)
        for name in _SCHEMA
        if name in raw
    }

    input_spec = (
        _validate_input(sections["input"], diag) if "input" in sections else None
    )
    system_spec = (
        _validate_system(sections["system"], diag) if "system" in sections else None
    )
    grid_spec = (
        _validate_grid(sections["grid"], diag) if "grid" in sections else GridSpec()
    )
    analysis_spec = (
        _validate_analysis(sections["analysis"], diag, input_spec)
        if "analysis" in sections
        else AnalysisSpec()
    )
    design_spec = (
        _validate_design(sections["design"], diag) if "design" in sections else None
    )
    output_dir = sections["output"].get("dir") if "output" in sections else None

    has_simulation = "input" in raw or "system" in raw
    if has_simulation:
        if "input" not in raw:
            diag.semantic.append((0, "simulation scenarios need an [input] section"))
        if "system" not in raw:
            diag.semantic.append((0, "simulation scenarios need a [system] section"))
    if not has_simulation and "design" not in raw:
        diag.semantic.append(
            (0, "scenario defines neither a simulation ([input]/[system]) nor a "
                "design request ([design])")
        )
    diag.raise_if_any()

    return Scenario(
        input=input_spec,
        system=system_spec,
        grid=grid_spec,
        analysis=analysis_spec,
        design=design_spec,
        output_dir=output_dir,
    )
