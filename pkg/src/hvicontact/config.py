"""Problem configuration files.

The format is INI-like: ``[section]`` headers, ``key = value`` lines, ``#``
comments, SI units.  Example::

    [run]
    preset = wall-left

    [material]
    youngs_modulus = 2.15e11
    poisson_ratio = 0.29

    [boundary]
    GammaC = bottom
    Gamma3 = left:0:1

Boundary values are comma-separated segments ``side[:start:stop]``.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .elasticity import LoadSpec, MaterialParams
from .errors import ConfigurationError
from .friction import FrictionLaw
from .mcp import SolverConfig
from .mesh import TAGS, BoundarySpec, Segment

PRESETS = {
    "wall-left": (BoundarySpec.wall_left, 1),
    "wall-right": (BoundarySpec.wall_right, -1),
}

_SCHEMA = {
    "run": {"preset": str, "out_dir": str},
    "material": {"youngs_modulus": float, "poisson_ratio": float},
    "loads": {"P": float, "Q": float, "p_sign": int},
    "friction": {"delta": float, "gamma1": float, "gamma2": float, "epsilon": float},
    "mesh": {"n": int, "n_list": "intlist"},
    "solver": {
        "max_iterations": int,
        "merit_tolerance": float,
        "step_tolerance": float,
        "initial_radius": float,
        "shrink": float,
        "grow": float,
        "n_starts": int,
        "start_perturbation": float,
        "seed": int,
    },
    "boundary": {tag: "segments" for tag in TAGS},
}

_REQUIRED = {
    "material": ("youngs_modulus", "poisson_ratio"),
    "loads": ("P", "Q"),
    "friction": ("delta", "gamma1", "gamma2", "epsilon"),
}


@dataclass
class ProblemConfig:
    material: MaterialParams
    loads: LoadSpec
    law: FrictionLaw
    eps: float
    boundary: BoundarySpec = field(default_factory=BoundarySpec.wall_left)
    n_list: tuple = (4, 8, 16, 32)
    solver: SolverConfig = field(default_factory=SolverConfig)
    out_dir: str = "out"
    preset: str | None = None

    def __post_init__(self):
        if not self.eps > 0:
            raise ConfigurationError("epsilon must be positive")
        if not self.n_list or any(int(n) != n or n < 1 for n in self.n_list):
            raise ConfigurationError(f"mesh sizes must be positive integers, got {self.n_list}")
        for seg in self.boundary.segments.get("GammaC", ()):
            if seg.side != "bottom":
                raise ConfigurationError("GammaC must lie on the bottom side (contact normal is -x2)")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def parse_segments(text, tag):
    segs = []
    for item in filter(None, (t.strip() for t in text.split(","))):
        parts = item.split(":")
        try:
            if len(parts) == 1:
                segs.append(Segment(parts[0]))
            elif len(parts) == 3:
                segs.append(Segment(parts[0], float(parts[1]), float(parts[2])))
            else:
                raise ValueError
        except ValueError:
            raise ConfigurationError(f"{tag}: cannot parse segment {item!r}, expected side[:start:stop]") from None
    return tuple(segs)


def _convert(section, key, raw):
    kind = _SCHEMA[section][key]
    try:
        if kind == "intlist":
            return tuple(int(v) for v in raw.replace(",", " ").split())
        if kind == "segments":
            return parse_segments(raw, key)
        return kind(raw)
    except ConfigurationError:
        raise
    except ValueError:
        raise ConfigurationError(f"{section}.{key}: invalid value {raw!r}") from None


def read_config_values(path) -> dict:
    """Raw typed values per section, checked against the known keys."""
    parser = configparser.ConfigParser(
        comment_prefixes=("#",), inline_comment_prefixes=("#",), interpolation=None, strict=True
    )
    parser.optionxform = str
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read configuration {path}: {exc}") from exc
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        if lineno is None and getattr(exc, "errors", None):
            lineno = exc.errors[0][0]
        where = f"line {lineno}: " if lineno else ""
        raise ConfigurationError(f"{path}: {where}{exc.message.splitlines()[0]}") from exc
    values = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigurationError(f"unknown section [{section}]")
        values[section] = {}
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigurationError(f"unknown key {key!r} in section [{section}]")
            values[section][key] = _convert(section, key, raw)
    return values


def build_config(values: dict, preset=None, mesh=None, epsilon=None, out_dir=None) -> ProblemConfig:
    """Combine file values with preset defaults and command-line overrides.

    Precedence: command-line flags, then file values, then preset defaults.
    A preset given on the command line also overrides the file's boundary
    layout and load sign.
    """
    for section, keys in _REQUIRED.items():
        for key in keys:
            if key not in values.get(section, {}):
                raise ConfigurationError(f"missing required key {key} in section [{section}]")
    run = values.get("run", {})
    cli_preset = preset is not None
    preset = preset if cli_preset else run.get("preset")
    if preset is not None and preset not in PRESETS:
        raise ConfigurationError(f"unknown preset {preset!r}, expected one of {sorted(PRESETS)}")
    make_spec, sign = PRESETS[preset or "wall-left"]
    spec = make_spec()
    file_boundary = values.get("boundary", {})
    if file_boundary and not cli_preset:
        spec = BoundarySpec({tag: segs for tag, segs in file_boundary.items() if segs})
    loads = values["loads"]
    if "p_sign" in loads and not cli_preset:
        sign = loads["p_sign"]

    m = values["material"]
    f = values["friction"]
    mesh_vals = values.get("mesh", {})
    n_list = (mesh,) if mesh is not None else mesh_vals.get("n_list") or (
        (mesh_vals["n"],) if "n" in mesh_vals else (4, 8, 16, 32)
    )
    try:
        solver = SolverConfig(**values.get("solver", {}))
    except ValueError as exc:
        raise ConfigurationError(f"[solver]: {exc}") from exc
    return ProblemConfig(
        material=MaterialParams(m["youngs_modulus"], m["poisson_ratio"]),
        loads=LoadSpec(loads["P"], loads["Q"], sign),
        law=FrictionLaw(f["delta"], f["gamma1"], f["gamma2"]),
        eps=f["epsilon"] if epsilon is None else epsilon,
        boundary=spec,
        n_list=tuple(n_list),
        solver=solver,
        out_dir=out_dir or run.get("out_dir", "out"),
        preset=preset,
    )


def parse_config(path, **overrides) -> ProblemConfig:
    return build_config(read_config_values(path), **overrides)


def shipped_config(name="wall_left.cfg") -> Path:
    """Path of a configuration file bundled with the package."""
    return Path(str(resources.files("hvicontact") / "data" / name))
