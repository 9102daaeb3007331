import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fkpp.cli import _eigen, _execute
from fkpp.config import load_preset


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def _artifacts(preset, keep_all=False, **overrides):
    cfg = load_preset(preset)
    for key, val in overrides.items():
        cfg.raw[key] = val
    eig = _eigen(cfg)
    keep = cfg.solver_config().snapshot_times + (0.0,) if keep_all else ()
    art = _execute(cfg, eig, keep_times=keep)
    art["cfg"] = cfg
    art["eig"] = eig
    return art


@pytest.fixture(scope="session")
def homog_run():
    """Criterion-1 scenario artifacts (guard-limited run, snapshots kept)."""
    return _artifacts("homog-1d-a025", keep_all=True)


@pytest.fixture(scope="session")
def periodic_run():
    """Criterion-2 scenario artifacts (also drives criteria 6 and 7)."""
    return _artifacts("periodic-1d-a025", keep_all=True)


@pytest.fixture(scope="session")
def attractor_run():
    """Criterion-8 scenario: no front monitoring, reaches t_end = 8."""
    cfg = load_preset("attractor-1d-a025")
    eig = _eigen(cfg)
    art = _execute(cfg, eig, keep_times=cfg[("attractor", "times")])
    art["cfg"] = cfg
    art["eig"] = eig
    return art
