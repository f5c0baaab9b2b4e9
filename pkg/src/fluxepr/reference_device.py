"""Parameters of the reference fluxonium-resonator device and its configuration.

The fitted energies are E_C = 0.943 GHz, E_J = 4.028 GHz, E_L = 0.775 GHz,
g = 85.15 MHz and a (120 nm)^2 junction.  No finite-element eigenmode data
are available for it, so the eigenmode report is synthesized by linearizing
the coupled circuit (see :func:`fluxepr.lumped.linearized_epr_model`).  The
capacitance network is one choice that reproduces E_C before the junction
capacitance is added; the lumped track then adds C_J to ``Cq`` as the device
description prescribes.
"""

import json
import math
from importlib import resources

from .fluxonium import FluxoniumParams, fluxonium_f01
from .lumped import (
    capacitance_for_charging_energy,
    inductance_for_energy,
    linearized_epr_model,
)

E_C = 0.943
E_J = 4.028
E_L = 0.775
G = 0.08515
RESONATOR = 7.0
JUNCTION_AREA = 0.120**2
Z0 = 50.0

C1 = 30.0
C2 = 26.0
CQR = 4.0
TRUNCATION = 30


def _round(x, digits=8):
    return float(f"{x:.{digits}g}")


def reference_network():
    """Island and coupling capacitances (fF) giving ``C_star`` for E_C = 0.943 GHz."""
    C_star = capacitance_for_charging_energy(E_C)
    Cq = C_star - C1 * (C2 + CQR) / (C1 + C2 + CQR)
    omega = 2 * math.pi * RESONATOR * 1e9
    # half-wave line: C = pi / (2 omega Z0)
    C_res = math.pi / (2 * omega * Z0) / 1e-15
    L_r = 1.0 / (omega**2 * C_res * 1e-15) / 1e-9
    return {
        "C1_fF": C1,
        "C2_fF": C2,
        "Cq_fF": _round(Cq),
        "Cqr_fF": CQR,
        "Cr_fF": _round(C_res - CQR),
        "L_r_nH": _round(L_r),
        "L_q_nH": _round(inductance_for_energy(E_L)),
        "Z0_ohm": Z0,
        "C_pad_fF": 0.0,
    }


def reference_config():
    """The configuration dictionary shipped as ``data/reference_device.json``."""
    model = linearized_epr_model(E_C, E_L, E_J, RESONATOR, G, truncation=TRUNCATION)
    f0 = fluxonium_f01(FluxoniumParams(E_C, E_L, E_J, 0.0))
    f_half = fluxonium_f01(FluxoniumParams(E_C, E_L, E_J, 0.5))
    return {
        "modes": [
            {
                "label": m.label,
                "frequency_ghz": _round(m.frequency, 12),
                "participations": {k: _round(v, 12) for k, v in m.participations.items()},
                "truncation": m.truncation,
            }
            for m in model.modes
        ],
        "junctions": [{"label": "J1", "E_J_ghz": E_J, "area_um2": _round(JUNCTION_AREA)}],
        "flux": {"start": 0.0, "stop": 0.5, "points": 51},
        "nonlinearity": "exact",
        "lumped": {**reference_network(), "g_ghz": G, "fluxonium_levels": 30, "resonator_levels": 10},
        "calibration": {
            "f01_zero_ghz": round(f0, 4),
            "f01_half_ghz": round(f_half, 4),
            "resonator_ghz": RESONATOR,
            "E_C_ghz": E_C,
            "initial_E_J_ghz": 4.0,
            "initial_E_L_ghz": 0.8,
        },
        "resonator_offset_ghz": 0.0,
    }


def reference_config_text():
    return resources.files("fluxepr").joinpath("data/reference_device.json").read_text("utf-8")


def write_reference_config(path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(reference_config(), fh, indent=2)
        fh.write("\n")
