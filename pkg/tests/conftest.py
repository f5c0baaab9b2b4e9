import json

import numpy as np
import pytest

from fluxepr.epr import EprModel, JunctionSpec, ModeSpec
from fluxepr.io import parse_config
from fluxepr.reference_device import reference_config_text


@pytest.fixture(scope="session")
def device_config():
    return parse_config(reference_config_text())


@pytest.fixture(scope="session")
def device_model(device_config):
    return device_config.epr_model()


@pytest.fixture(scope="session")
def device_json():
    return json.loads(reference_config_text())


def two_mode_model(phi_q, phi_r, f_q=5.0, f_r=7.0, E_j=10.0, truncation=12, flux=0.0):
    """Two-mode model with the requested junction zero-point fluctuations."""
    p_q = 2 * E_j * phi_q**2 / f_q
    p_r = 2 * E_j * phi_r**2 / f_r
    modes = [
        ModeSpec("q", f_q, {"J": p_q}, truncation),
        ModeSpec("r", f_r, {"J": p_r}, truncation),
    ]
    return EprModel(modes, [JunctionSpec("J", E_j, flux)], resonator_mode=1)


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
