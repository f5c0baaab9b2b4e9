import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fluxepr.epr import EprModel, JunctionSpec, ModeSpec, Nonlinearity
from fluxepr.exceptions import ConfigError, ContractError
from fluxepr.io import (
    FluxGrid,
    EigenmodeReport,
    format_compare_csv,
    format_eigenmode_report,
    format_sweep_csv,
    parse_config,
    parse_eigenmode_report,
    read_sweep_csv,
    serialize_config,
    write_sweep_csv,
)
from fluxepr.labeling import FluxSweepResult
from fluxepr.reference_device import reference_config, reference_config_text

MINIMAL = {
    "modes": [
        {"label": "qubit", "frequency_ghz": 5.0, "participations": {"J1": 0.92}},
        {"label": "resonator", "frequency_ghz": 7.0, "participations": {"J1": 0.015}},
    ],
    "junctions": [{"label": "J1", "E_J_ghz": 4.0}],
}


def _result(chi, phi=None, warn=None):
    chi = np.atleast_1d(np.asarray(chi, dtype=float))
    n = chi.size
    return FluxSweepResult(
        phi_ext=np.linspace(0, 0.5, n) if phi is None else np.asarray(phi, dtype=float),
        f_qubit=np.full(n, 5.123456789012345),
        f_resonator=np.full(n, 7.000123),
        chi=chi,
        warn=np.zeros(n, dtype=bool) if warn is None else np.asarray(warn),
    )


# configuration


def test_minimal_config_round_trip():
    first = parse_config(json.dumps(MINIMAL))
    text = serialize_config(first)
    second = parse_config(text)
    assert serialize_config(second) == text
    assert second.to_dict() == first.to_dict()
    assert first.nonlinearity == Nonlinearity("exact")
    assert first.flux == FluxGrid(0.0, 0.5, 51)
    assert [m.truncation for m in first.modes] == [30, 30]


def test_device_config_round_trip(device_config):
    assert parse_config(serialize_config(device_config)).to_dict() == device_config.to_dict()


def test_shipped_config_is_reproducible(device_json):
    assert reference_config() == device_json
    assert reference_config_text().endswith("\n")


def test_device_config_contents(device_config):
    model = device_config.epr_model()
    assert model.mode_roles == (0, 1)
    assert device_config.junctions[0].josephson_energy == 4.028
    assert device_config.junction_capacitance() == pytest.approx(0.72, rel=1e-12)
    assert device_config.lumped_parameters().g == 0.08515
    assert device_config.lumped_levels() == (30, 10)


def test_taylor_order_two_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config(json.dumps({**MINIMAL, "nonlinearity": "taylor:2"}))
    assert info.value.path == "/nonlinearity"


def test_schema_error_pointer():
    bad = json.loads(json.dumps(MINIMAL))
    bad["modes"][1]["participations"]["J1"] = 1.2
    with pytest.raises(ConfigError) as info:
        parse_config(json.dumps(bad))
    assert info.value.path == "/modes/1/participations/J1"


def test_unknown_key_pointer():
    bad = json.loads(json.dumps(MINIMAL))
    bad["junctions"][0]["EJ"] = 3.0
    with pytest.raises(ConfigError) as info:
        parse_config(json.dumps(bad))
    assert info.value.path == "/junctions/0/EJ"


def test_missing_junctions():
    with pytest.raises(ConfigError):
        parse_config(json.dumps({"modes": MINIMAL["modes"]}))


def test_json_syntax_error_reports_position():
    with pytest.raises(ConfigError, match="line 2 column"):
        parse_config('{\n  "junctions": [,]\n}')


def test_participation_for_unknown_junction():
    bad = json.loads(json.dumps(MINIMAL))
    bad["modes"][0]["participations"] = {"J7": 0.5}
    with pytest.raises(ConfigError) as info:
        parse_config(json.dumps(bad))
    assert info.value.path == "/modes/0/participations"


def test_flux_order_and_grid_parse():
    with pytest.raises(ConfigError):
        parse_config(json.dumps({**MINIMAL, "flux": {"start": 0.5, "stop": 0.0, "points": 3}}))
    assert FluxGrid.parse("0:0.5:11").points == 11
    assert FluxGrid.parse("0.25") == FluxGrid(0.25, 0.25, 1)
    np.testing.assert_allclose(FluxGrid.parse("0:1:5").values(), [0, 0.25, 0.5, 0.75, 1])
    for bad in ("a:b:c", "0:1", ""):
        with pytest.raises(ConfigError):
            FluxGrid.parse(bad)


def test_config_without_modes_or_lumped():
    config = parse_config(json.dumps({"junctions": MINIMAL["junctions"]}))
    with pytest.raises(ConfigError):
        config.epr_model()
    with pytest.raises(ConfigError):
        config.lumped_parameters()


# eigenmode report


def test_report_two_rows():
    text = "mode,f_ghz,junction,p\nqubit,5.0,J1,0.92\nresonator,7.0,J1,0.015\n"
    report = parse_eigenmode_report(text)
    assert report.rows == [("qubit", 5.0, "J1", 0.92), ("resonator", 7.0, "J1", 0.015)]
    modes = report.to_modes(12)
    assert [m.label for m in modes] == ["qubit", "resonator"]
    assert modes[0].truncation == 12


@pytest.mark.parametrize(
    "body, where",
    [
        ("qubit,5.0,J1,0.92\nresonator,7.0,J1,1.2\n", "line 3"),
        ("qubit,5.0,J1\n", "line 2"),
        ("qubit,five,J1,0.9\n", "line 2"),
        ("qubit,5.0,J1,0.9\nqubit,5.0,J1,0.8\n", "line 3"),
        ("qubit,5.0,J1,0.9\nqubit,5.1,J2,0.1\n", "line 3"),
        ("qubit,-5.0,J1,0.9\n", "line 2"),
    ],
)
def test_report_errors_name_the_line(body, where):
    with pytest.raises(ConfigError) as info:
        parse_eigenmode_report("mode,f_ghz,junction,p\n" + body)
    assert info.value.path == where


def test_report_bad_header():
    with pytest.raises(ConfigError):
        parse_eigenmode_report("mode,freq,junction,p\n")
    with pytest.raises(ConfigError):
        parse_eigenmode_report("")


@given(
    f=st.lists(st.floats(0.1, 20.0), min_size=2, max_size=3),
    p=st.lists(st.floats(0.0, 1.0), min_size=3, max_size=3),
)
@settings(max_examples=30)
def test_report_round_trip_preserves_zpfs(f, p):
    modes = [ModeSpec(f"m{k}", fk, {"J": p[k]}, 4) for k, fk in enumerate(f)]
    model = EprModel(modes, [JunctionSpec("J", 3.3)])
    text = format_eigenmode_report(EigenmodeReport.from_model(model))
    again = EprModel(parse_eigenmode_report(text).to_modes(4), model.junctions)
    for key, value in model.zpfs.items():
        assert again.zpfs[key] == pytest.approx(value, rel=1e-12, abs=0)
    assert format_eigenmode_report(parse_eigenmode_report(text)) == text


# sweep CSV


def test_single_point_sweep_has_two_lines():
    text = format_sweep_csv(_result([0.001]))
    assert text.count("\n") == 2
    assert text.startswith("phi_ext,f_qubit_ghz,f_resonator_ghz,chi_mhz,warn\n")


def test_chi_printed_in_mhz():
    line = format_sweep_csv(_result([-0.0005])).splitlines()[1]
    assert line.split(",")[3] == "-0.5"


def test_csv_formatting_rules():
    text = format_sweep_csv(_result([-0.0, 1.23456789012345e-3], phi=[-0.0, 0.5], warn=[0, 1]))
    assert "\r" not in text
    rows = [line.split(",") for line in text.splitlines()[1:]]
    assert rows[0][0] == "0" and rows[0][3] == "0"
    assert rows[0][1] == "5.12345678901"
    assert rows[1][3] == "1.23456789012"
    assert [r[4] for r in rows] == ["0", "1"]


def test_csv_deterministic_and_readable(tmp_path):
    result = _result([0.001, -0.002, 0.0003], warn=[0, 1, 0])
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_sweep_csv(result, a)
    write_sweep_csv(result, b)
    assert a.read_bytes() == b.read_bytes()
    back = read_sweep_csv(a.read_text())
    np.testing.assert_allclose(back.chi, result.chi, rtol=1e-11)
    np.testing.assert_array_equal(back.warn, result.warn)


def test_compare_csv():
    epr = _result([0.001, 0.002])
    lumped = _result([0.0015, 0.002])
    text = format_compare_csv(epr, lumped)
    header, first, _ = text.splitlines()
    fields = dict(zip(header.split(","), first.split(",")))
    assert fields["chi_diff_mhz"] == "-0.5"
    assert fields["f_qubit_diff_ghz"] == "0"
    with pytest.raises(ContractError):
        format_compare_csv(epr, _result([0.1, 0.2], phi=[0.0, 0.3]))
