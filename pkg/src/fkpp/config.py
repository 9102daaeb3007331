"""Run configuration: flat ``key = value`` text with sections, strictly checked.

Unknown sections or keys are rejected outright; a silent typo in alpha or L
invalidates a run, so nothing is ignored.  Scenario presets live as config
files under ``fkpp/presets`` and are addressed by name.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .fracop import FracOrder, frac_order
from .grid import PeriodicGrid, ScalarField, make_grid
from .solver import SolverConfig, make_initial

__all__ = ["RunConfig", "parse_config", "load_preset", "preset_names"]


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("true", "yes", "on", "1"):
        return True
    if v in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_list(s: str, conv):
    s = s.strip()
    if not s:
        return ()
    return tuple(conv(tok.strip()) for tok in s.split(","))


_SCHEMA = {
    "scenario": {"name": str, "seed": int},
    "operator": {"alpha": float, "d": int},
    "medium": {"kind": str, "base": float, "amplitude": float, "file": str,
               "cell_n": int, "cell_L": float},
    "box": {"n": lambda s: _parse_list(s, int), "L": lambda s: _parse_list(s, float)},
    "initial": {"kind": str, "radius": float, "sigma": float},
    "solver": {"dt": float, "t_end": float, "scheme": str, "snapshot_every": float,
               "front_guard": float},
    "fronts": {"levels": lambda s: _parse_list(s, float),
               "directions": lambda s: _parse_list(s, str),
               "fit_t_min": float, "fit_t_max": float, "isotropy_threshold": float},
    "bounds": {"enabled": _parse_bool, "estimate_b": lambda s: _parse_list(s, float),
               "estimate_n": int, "estimate_L": float, "check_every": float},
    "attractor": {"enabled": _parse_bool, "y_max": float, "y_n": int,
                  "times": lambda s: _parse_list(s, float)},
}

_DEFAULTS = {
    ("scenario", "name"): "unnamed",
    ("scenario", "seed"): 0,
    ("medium", "kind"): "constant",
    ("medium", "base"): 1.0,
    ("medium", "amplitude"): 0.5,
    ("medium", "file"): "",
    ("medium", "cell_n"): 256,
    ("medium", "cell_L"): 1.0,
    ("initial", "kind"): "indicator",
    ("initial", "radius"): 1.0,
    ("initial", "sigma"): 1.0,
    ("solver", "dt"): 0.02,
    ("solver", "scheme"): "IMEX2",
    ("solver", "snapshot_every"): 0.25,
    ("solver", "front_guard"): 0.8,
    ("fronts", "levels"): (),
    ("fronts", "directions"): ("x",),
    ("fronts", "fit_t_min"): 0.0,
    ("fronts", "fit_t_max"): float("inf"),
    ("fronts", "isotropy_threshold"): 0.1,
    ("bounds", "enabled"): False,
    ("bounds", "estimate_b"): (1.0, 0.125),
    ("bounds", "estimate_n"): 1024,
    ("bounds", "estimate_L"): 160.0,
    ("bounds", "check_every"): 1.0,
    ("attractor", "enabled"): False,
    ("attractor", "y_max"): 5.0,
    ("attractor", "y_n"): 256,
    ("attractor", "times"): (),
}

_REQUIRED = [("operator", "alpha"), ("operator", "d"), ("box", "n"), ("box", "L"),
             ("solver", "t_end")]


@dataclass
class RunConfig:
    raw: dict = field(repr=False)

    def __getitem__(self, key):
        return self.raw[key]

    # -- convenience accessors -------------------------------------------
    @property
    def name(self) -> str:
        return self.raw[("scenario", "name")]

    @property
    def seed(self) -> int:
        return self.raw[("scenario", "seed")]

    @property
    def alpha(self) -> float:
        return self.raw[("operator", "alpha")]

    @property
    def d(self) -> int:
        return self.raw[("operator", "d")]

    @property
    def levels(self) -> tuple[float, ...]:
        return self.raw[("fronts", "levels")]

    @property
    def directions(self) -> tuple[str, ...]:
        return self.raw[("fronts", "directions")]

    def order(self) -> FracOrder:
        return frac_order(self.alpha, self.d)

    def cell_grid(self) -> PeriodicGrid:
        return make_grid(self.d, self.raw[("medium", "cell_n")],
                         self.raw[("medium", "cell_L")], origin_centered=False)

    def box_grid(self) -> PeriodicGrid:
        n = self.raw[("box", "n")]
        L = self.raw[("box", "L")]
        n = n * self.d if len(n) == 1 else n
        L = L * self.d if len(L) == 1 else L
        return make_grid(self.d, n, L, origin_centered=True)

    def medium(self) -> ScalarField:
        kind = self.raw[("medium", "kind")]
        cell = self.cell_grid()
        if kind == "constant":
            vals = np.full(cell.shape, self.raw[("medium", "base")])
        elif kind == "cosine":
            base = self.raw[("medium", "base")]
            amp = self.raw[("medium", "amplitude")]
            prod = np.ones(cell.shape)
            for x in cell.coords():
                prod = prod * np.cos(2 * np.pi * x / self.raw[("medium", "cell_L")])
            vals = base + amp * prod
        elif kind == "file":
            from .io import read_kpf1

            f, _ = read_kpf1(self.raw[("medium", "file")])
            return f
        else:
            raise ConfigError(f"unknown medium kind {kind!r}")
        return ScalarField(cell, vals.reshape(-1))

    def mu_min(self) -> float:
        return float(self.medium().data.min())

    def initial(self, grid: PeriodicGrid) -> ScalarField:
        return make_initial(grid, self.raw[("initial", "kind")], ord=self.order(),
                            radius=self.raw[("initial", "radius")],
                            sigma=self.raw[("initial", "sigma")])

    def solver_config(self) -> SolverConfig:
        t_end = self.raw[("solver", "t_end")]
        every = self.raw[("solver", "snapshot_every")]
        n_snap = int(round(t_end / every)) if every > 0 else 0
        times = tuple(round(k * every, 9) for k in range(1, n_snap + 1) if k * every <= t_end + 1e-9)
        try:
            return SolverConfig(dt=self.raw[("solver", "dt")], t_end=t_end,
                                scheme=self.raw[("solver", "scheme")],
                                snapshot_times=times,
                                front_guard=self.raw[("solver", "front_guard")])
        except ValueError as e:
            raise ConfigError(str(e)) from e


def _validate(raw: dict) -> None:
    for key in _REQUIRED:
        if key not in raw:
            raise ConfigError(f"missing required key [{key[0]}] {key[1]}")
    alpha = raw[("operator", "alpha")]
    if not (0 < alpha < 1):
        raise ConfigError(f"alpha must lie in (0,1), got {alpha}")
    if raw[("operator", "d")] not in (1, 2, 3):
        raise ConfigError("d must be 1, 2 or 3")
    if alpha >= 0.5:
        print("WARNING: alpha >= 1/2 -- the bounds module uses the gamma-modified "
              "exponent (2*alpha - gamma)/(d + 2*alpha) in its D estimate",
              file=sys.stderr)
    cfg = RunConfig(raw)
    levels = raw[("fronts", "levels")]
    if levels:
        mu_min = cfg.mu_min()
        for lam in levels:
            if not (0 < lam < mu_min):
                raise ConfigError(
                    f"level {lam} outside the supported range (0, min mu) = (0, {mu_min})"
                )
    if raw[("medium", "kind")] == "file" and not raw[("medium", "file")]:
        raise ConfigError("medium kind 'file' needs a file path")


def parse_config(text: str) -> RunConfig:
    raw = dict(_DEFAULTS)
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("[") and body.endswith("]"):
            section = body[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {body!r}")
        if section is None:
            raise ConfigError(f"line {lineno}: key outside any section")
        key, val = (part.strip() for part in body.split("=", 1))
        if key not in _SCHEMA[section]:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in section [{section}]")
        conv = _SCHEMA[section][key]
        try:
            raw[(section, key)] = conv(val)
        except (ValueError, TypeError) as e:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {e}") from e
    _validate(raw)
    return RunConfig(raw)


def preset_names() -> list[str]:
    base = resources.files("fkpp").joinpath("presets")
    return sorted(p.name[:-4] for p in base.iterdir() if p.name.endswith(".cfg"))


def load_preset(name: str) -> RunConfig:
    path = resources.files("fkpp").joinpath("presets", f"{name}.cfg")
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return parse_config(text)


def load_config_file(path) -> RunConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    return parse_config(p.read_text())
