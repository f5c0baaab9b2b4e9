"""Configuration, eigenmode-report and sweep-result file formats."""

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import jsonschema
import numpy as np

from .epr import DEFAULT_TRUNCATION, EprModel, JunctionSpec, ModeSpec, Nonlinearity
from .exceptions import ConfigError, ContractError
from .lumped import (
    CapacitanceNetwork,
    derive_lumped_parameters,
    junction_capacitance_from_area,
)

_POS = {"type": "number", "exclusiveMinimum": 0}
_NUM = {"type": "number"}

LUMPED_KEYS = ("C1_fF", "C2_fF", "Cq_fF", "Cqr_fF", "Cr_fF", "L_r_nH", "L_q_nH", "Z0_ohm", "C_pad_fF")

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["junctions"],
    "properties": {
        "modes": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["label", "frequency_ghz", "participations"],
                "properties": {
                    "label": {"type": "string", "minLength": 1},
                    "frequency_ghz": _POS,
                    "participations": {
                        "type": "object",
                        "additionalProperties": {"type": "number", "minimum": 0, "maximum": 1},
                    },
                    "truncation": {"type": "integer", "minimum": 2},
                },
            },
        },
        "junctions": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["label", "E_J_ghz"],
                "properties": {
                    "label": {"type": "string", "minLength": 1},
                    "E_J_ghz": _POS,
                    "area_um2": _POS,
                },
            },
        },
        "flux": {
            "type": "object",
            "additionalProperties": False,
            "required": ["start", "stop", "points"],
            "properties": {"start": _NUM, "stop": _NUM, "points": {"type": "integer", "minimum": 1}},
        },
        "nonlinearity": {"type": "string", "pattern": r"^(exact|taylor:[0-9]+)$"},
        "lumped": {
            "type": "object",
            "additionalProperties": False,
            "required": [k for k in LUMPED_KEYS if k != "C_pad_fF"],
            "properties": {
                **{k: _POS for k in LUMPED_KEYS},
                "C_pad_fF": {"type": "number", "minimum": 0},
                "g_ghz": _NUM,
                "fluxonium_levels": {"type": "integer", "minimum": 4},
                "resonator_levels": {"type": "integer", "minimum": 2},
            },
        },
        "calibration": {
            "type": "object",
            "additionalProperties": False,
            "required": ["f01_zero_ghz", "f01_half_ghz"],
            "properties": {
                "f01_zero_ghz": _POS,
                "f01_half_ghz": _POS,
                "resonator_ghz": _POS,
                "E_C_ghz": _POS,
                "initial_E_J_ghz": _POS,
                "initial_E_L_ghz": _POS,
            },
        },
        "resonator_offset_ghz": _NUM,
    },
}


@dataclass(frozen=True)
class FluxGrid:
    start: float = 0.0
    stop: float = 0.5
    points: int = 51

    def __post_init__(self):
        if self.points < 1:
            raise ContractError("flux points must be >= 1")
        if self.start > self.stop:
            raise ContractError(f"flux start {self.start} exceeds stop {self.stop}")

    def values(self):
        return np.linspace(self.start, self.stop, self.points)

    @classmethod
    def parse(cls, text):
        """``"a:b:n"`` or a single value ``"x"``."""
        parts = str(text).split(":")
        try:
            if len(parts) == 1:
                x = float(parts[0])
                return cls(x, x, 1)
            if len(parts) == 3:
                return cls(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError:
            pass
        raise ConfigError(f"cannot parse flux grid {text!r}; use start:stop:points or a value")


@dataclass
class SimulationConfig:
    """Validated contents of a configuration file."""

    junctions: list
    modes: Optional[list] = None
    flux: FluxGrid = field(default_factory=FluxGrid)
    nonlinearity: Nonlinearity = field(default_factory=Nonlinearity)
    lumped: Optional[dict] = None
    calibration: Optional[dict] = None
    resonator_offset: float = 0.0

    def epr_model(self, modes=None):
        modes = self.modes if modes is None else modes
        if not modes:
            raise ConfigError("no modes: supply a 'modes' block or an eigenmode report")
        return EprModel(modes, self.junctions, resonator_offset=self.resonator_offset)

    def junction_capacitance(self):
        """Sum of junction capacitances (fF) from their areas."""
        return sum(
            junction_capacitance_from_area(j.area) for j in self.junctions if j.area is not None
        )

    def lumped_parameters(self):
        """Derived lumped parameters with the junction capacitance folded into ``Cq``."""
        if self.lumped is None:
            raise ConfigError("no 'lumped' block in the configuration", "/lumped")
        lp = self.lumped
        network = CapacitanceNetwork(
            lp["C1_fF"], lp["C2_fF"], lp["Cq_fF"], lp["Cqr_fF"], lp["Cr_fF"]
        ).with_junction_capacitance(self.junction_capacitance())
        derived = derive_lumped_parameters(
            network,
            lp["L_r_nH"],
            lp["L_q_nH"],
            lp["Z0_ohm"],
            lp.get("C_pad_fF", 0.0),
            self.junctions[0].josephson_energy,
        )
        if "g_ghz" in lp:
            derived = replace(derived, g=float(lp["g_ghz"]))
        return derived

    def lumped_levels(self):
        lp = self.lumped or {}
        return lp.get("fluxonium_levels", 30), lp.get("resonator_levels", 10)

    def to_dict(self):
        out = {}
        if self.modes is not None:
            out["modes"] = [
                {
                    "label": m.label,
                    "frequency_ghz": m.frequency,
                    "participations": dict(m.participations),
                    "truncation": m.truncation,
                }
                for m in self.modes
            ]
        out["junctions"] = []
        for j in self.junctions:
            entry = {"label": j.label, "E_J_ghz": j.josephson_energy}
            if j.area is not None:
                entry["area_um2"] = j.area
            out["junctions"].append(entry)
        out["flux"] = {"start": self.flux.start, "stop": self.flux.stop, "points": self.flux.points}
        out["nonlinearity"] = str(self.nonlinearity)
        if self.lumped is not None:
            out["lumped"] = dict(self.lumped)
        if self.calibration is not None:
            out["calibration"] = dict(self.calibration)
        out["resonator_offset_ghz"] = self.resonator_offset
        return out


def _pointer(path):
    return "/" + "/".join(str(p) for p in path) if path else "/"


def _schema_error(error):
    path = list(error.absolute_path)
    if error.validator == "additionalProperties" and isinstance(error.instance, dict):
        allowed = set(error.schema.get("properties", {}))
        extras = sorted(k for k in error.instance if k not in allowed)
        if extras:
            return ConfigError(f"unknown key {extras[0]!r}", _pointer(path + [extras[0]]))
    return ConfigError(error.message, _pointer(path))


def _load_json(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno} (offset {exc.pos})"
        ) from exc


def parse_config(text):
    """Parse and validate a JSON configuration.

    Raises :class:`ConfigError` with the line/offset of a JSON syntax error or
    the JSON pointer of the first schema violation.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    data = _load_json(text)
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        raise _schema_error(errors[0])

    try:
        nonlinearity = Nonlinearity.parse(data.get("nonlinearity", "exact"))
    except ContractError as exc:
        raise ConfigError(str(exc), "/nonlinearity") from exc

    junctions = []
    for k, j in enumerate(data["junctions"]):
        junctions.append(JunctionSpec(j["label"], j["E_J_ghz"], 0.0, j.get("area_um2")))
    labels = [j.label for j in junctions]
    if len(set(labels)) != len(labels):
        raise ConfigError("duplicate junction label", "/junctions")

    modes = None
    if "modes" in data:
        modes = []
        for k, m in enumerate(data["modes"]):
            try:
                modes.append(
                    ModeSpec(
                        m["label"],
                        m["frequency_ghz"],
                        m["participations"],
                        m.get("truncation", DEFAULT_TRUNCATION),
                    )
                )
            except ContractError as exc:
                raise ConfigError(str(exc), f"/modes/{k}") from exc
        for k, m in enumerate(modes):
            unknown = set(m.participations) - set(labels)
            if unknown:
                raise ConfigError(
                    f"participation for unknown junction {sorted(unknown)[0]!r}",
                    f"/modes/{k}/participations",
                )

    flux = data.get("flux", {"start": 0.0, "stop": 0.5, "points": 51})
    if flux["start"] > flux["stop"]:
        raise ConfigError("start must not exceed stop", "/flux")
    grid = FluxGrid(float(flux["start"]), float(flux["stop"]), int(flux["points"]))

    return SimulationConfig(
        junctions=junctions,
        modes=modes,
        flux=grid,
        nonlinearity=nonlinearity,
        lumped=dict(data["lumped"]) if "lumped" in data else None,
        calibration=dict(data["calibration"]) if "calibration" in data else None,
        resonator_offset=float(data.get("resonator_offset_ghz", 0.0)),
    )


def serialize_config(config):
    return json.dumps(config.to_dict(), indent=2) + "\n"


REPORT_HEADER = ("mode", "f_ghz", "junction", "p")


@dataclass
class EigenmodeReport:
    """Rows of ``(mode_label, frequency_ghz, junction_label, participation)``."""

    rows: list

    def to_modes(self, truncation=DEFAULT_TRUNCATION):
        """One :class:`ModeSpec` per mode label, in order of first appearance."""
        freqs, parts = {}, {}
        for mode, f, junction, p in self.rows:
            freqs.setdefault(mode, f)
            parts.setdefault(mode, {})[junction] = p
        return [ModeSpec(m, freqs[m], parts[m], truncation) for m in freqs]

    @classmethod
    def from_model(cls, model):
        rows = []
        for m in model.modes:
            for junction, p in m.participations.items():
                rows.append((m.label, m.frequency, junction, p))
        return cls(rows)


def parse_eigenmode_report(text):
    """Read a ``mode,f_ghz,junction,p`` CSV."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ConfigError("empty eigenmode report", "line 1") from None
    if tuple(h.strip() for h in header) != REPORT_HEADER:
        raise ConfigError(f"header must be {','.join(REPORT_HEADER)}", "line 1")
    rows, seen, freqs = [], set(), {}
    for line_no, raw in enumerate(reader, start=2):
        if not raw or all(not c.strip() for c in raw):
            continue
        where = f"line {line_no}"
        if len(raw) != 4:
            raise ConfigError(f"expected 4 fields, got {len(raw)}", where)
        mode, f_text, junction, p_text = (c.strip() for c in raw)
        if not mode or not junction:
            raise ConfigError("empty mode or junction label", where)
        try:
            f, p = float(f_text), float(p_text)
        except ValueError:
            raise ConfigError("frequency and participation must be numbers", where) from None
        if not math.isfinite(f) or f <= 0:
            raise ConfigError(f"frequency must be positive, got {f_text}", where)
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"participation {p_text} outside [0, 1]", where)
        if (mode, junction) in seen:
            raise ConfigError(f"duplicate entry for ({mode}, {junction})", where)
        if freqs.setdefault(mode, f) != f:
            raise ConfigError(f"mode {mode!r} listed with two frequencies", where)
        seen.add((mode, junction))
        rows.append((mode, f, junction, p))
    return EigenmodeReport(rows)


def format_eigenmode_report(report):
    lines = [",".join(REPORT_HEADER)]
    for mode, f, junction, p in report.rows:
        lines.append(f"{mode},{f!r},{junction},{p!r}")
    return "\n".join(lines) + "\n"


def _g12(x):
    # 12 significant digits; folds -0.0 into 0
    return f"{float(x) + 0.0:.12g}"


SWEEP_HEADER = ("phi_ext", "f_qubit_ghz", "f_resonator_ghz", "chi_mhz", "warn")


def format_sweep_csv(result):
    lines = [",".join(SWEEP_HEADER)]
    for phi, fq, fr, chi, warn in result.rows():
        lines.append(",".join([_g12(phi), _g12(fq), _g12(fr), _g12(chi * 1000.0), str(int(warn))]))
    return "\n".join(lines) + "\n"


COMPARE_HEADER = (
    "phi_ext",
    "f_qubit_epr_ghz",
    "f_qubit_lumped_ghz",
    "f_qubit_diff_ghz",
    "f_resonator_epr_ghz",
    "f_resonator_lumped_ghz",
    "f_resonator_diff_ghz",
    "chi_epr_mhz",
    "chi_lumped_mhz",
    "chi_diff_mhz",
    "warn_epr",
    "warn_lumped",
)


def format_compare_csv(epr, lumped):
    """Join two sweeps over the same flux points; differences are EPR minus lumped."""
    if not np.array_equal(epr.phi_ext, lumped.phi_ext):
        raise ContractError("compare needs both sweeps on the same flux points")
    lines = [",".join(COMPARE_HEADER)]
    for a, b in zip(epr.rows(), lumped.rows()):
        phi, fq_a, fr_a, chi_a, w_a = a
        _, fq_b, fr_b, chi_b, w_b = b
        chi_a, chi_b = chi_a * 1000.0, chi_b * 1000.0
        fields = [phi, fq_a, fq_b, fq_a - fq_b, fr_a, fr_b, fr_a - fr_b, chi_a, chi_b, chi_a - chi_b]
        lines.append(",".join([_g12(v) for v in fields] + [str(int(w_a)), str(int(w_b))]))
    return "\n".join(lines) + "\n"


def _emit(text, destination):
    if hasattr(destination, "write"):
        destination.write(text)
        return
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_sweep_csv(result, destination):
    """Write a sweep as ``phi_ext,f_qubit_ghz,f_resonator_ghz,chi_mhz,warn``.

    ``destination`` is a path or a text stream.  Output is byte-identical for
    identical input.
    """
    _emit(format_sweep_csv(result), destination)


def write_compare_csv(epr, lumped, destination):
    _emit(format_compare_csv(epr, lumped), destination)


def read_sweep_csv(text):
    """Parse a sweep CSV back into a :class:`~fluxepr.labeling.FluxSweepResult` (GHz)."""
    from .labeling import FluxSweepResult

    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != SWEEP_HEADER:
        raise ConfigError("not a sweep CSV", "line 1")
    cols = list(zip(*[[float(x) for x in row] for row in reader if row]))
    if not cols:
        cols = [()] * 5
    return FluxSweepResult(
        phi_ext=np.array(cols[0]),
        f_qubit=np.array(cols[1]),
        f_resonator=np.array(cols[2]),
        chi=np.array(cols[3]) / 1000.0,
        warn=np.array(cols[4], dtype=bool),
    )
