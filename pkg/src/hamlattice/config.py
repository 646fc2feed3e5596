"""Run configuration: flat key=value sections parsed into a validated RunConfig.

The format is INI-style (configparser).  Parsing collects *all* validation
errors before failing, so a bad config reports every problem at once.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .mesh import Boundary, LatticeField, Mesh
from .potentials import NLS_POTENTIALS, WAVE_POTENTIALS, Potential
from .systems import CanonicalState


class ConfigError(ValueError):
    """Invalid configuration; .errors lists every individual problem."""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  - " + "\n  - ".join(errors))


@dataclass
class RunConfig:
    system: str = "wave"
    potential: str = "zero"
    coefficient: float = 1.0
    h: float = 0.1
    n_points: int = 256
    x0: float = 0.0
    boundary: Boundary = Boundary.PERIODIC
    ic_family: str = "gaussian"
    ic_center: float = 12.8
    ic_width: float = 1.5
    ic_amplitude: float = 0.1
    ic_kappa: float = 0.0
    integrator: str = "midpoint"
    dt: float = 1e-3
    t_end: float = 10.0
    newton_tol: float = 1e-12
    max_iter: int = 50
    dtilde_p: int = 64
    dtilde_tol: float = 1e-12
    functionals: List[str] = field(default_factory=lambda: ["H"])
    hierarchy_ks: List[int] = field(default_factory=list)
    alphas: List[str] = field(default_factory=list)
    output_dir: str = "."
    stride: int = 10
    decay_threshold: float = 1e-10
    tol: float = 1e-8
    formulation: str = "canonical"


_KNOWN = {
    "system": {"kind", "potential", "coefficient"},
    "mesh": {"h", "n_points", "x0", "boundary"},
    "initial": {"family", "center", "width", "amplitude", "kappa"},
    "integrator": {"kind", "dt", "t_end", "newton_tol", "max_iter"},
    "operator": {"p", "tol"},
    "functionals": {"names"},
    "output": {"directory", "stride", "decay_threshold", "tolerance"},
}

_FUNCTIONAL_NAMES = {"H", "P2", "P3", "Pstar", "P4"}


def parse_config(text: str) -> RunConfig:
    """Parse and validate a config; raises ConfigError listing all problems."""
    parser = configparser.ConfigParser()
    errors: List[str] = []
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"malformed config: {exc}"]) from exc

    cfg = RunConfig()

    for section in parser.sections():
        if section not in _KNOWN:
            errors.append(f"unknown section [{section}]")
            continue
        for key in parser[section]:
            if key not in _KNOWN[section]:
                errors.append(f"unknown key {key!r} in [{section}]")

    def get(section, key, conv, default, check=None, describe=""):
        if not parser.has_option(section, key):
            return default
        raw = parser.get(section, key)
        try:
            val = conv(raw)
        except ValueError:
            errors.append(f"[{section}] {key}: cannot parse {raw!r}")
            return default
        if check is not None and not check(val):
            errors.append(f"[{section}] {key}: {raw!r} out of range ({describe})")
            return default
        return val

    cfg.system = get(
        "system", "kind", str, cfg.system,
        lambda s: s in ("wave", "nls"), "must be wave or nls",
    )
    cfg.potential = get("system", "potential", str, cfg.potential)
    cfg.coefficient = get("system", "coefficient", float, cfg.coefficient)

    cfg.h = get("mesh", "h", float, cfg.h, lambda x: x > 0, "must be > 0")
    cfg.n_points = get(
        "mesh", "n_points", int, cfg.n_points, lambda n: n >= 4, "must be >= 4"
    )
    cfg.x0 = get("mesh", "x0", float, cfg.x0)
    boundary_name = get(
        "mesh", "boundary", str, cfg.boundary.value,
        lambda s: s in ("periodic", "compact_support"),
        "must be periodic or compact_support",
    )
    cfg.boundary = Boundary(boundary_name)

    cfg.ic_family = get(
        "initial", "family", str, cfg.ic_family,
        lambda s: s in ("gaussian", "packet", "plane_wave"),
        "must be gaussian, packet, or plane_wave",
    )
    cfg.ic_center = get("initial", "center", float, cfg.ic_center)
    cfg.ic_width = get(
        "initial", "width", float, cfg.ic_width, lambda x: x > 0, "must be > 0"
    )
    cfg.ic_amplitude = get("initial", "amplitude", float, cfg.ic_amplitude)
    cfg.ic_kappa = get("initial", "kappa", float, cfg.ic_kappa)

    cfg.integrator = get(
        "integrator", "kind", str, cfg.integrator,
        lambda s: s in ("rk4", "midpoint"), "must be rk4 or midpoint",
    )
    cfg.dt = get("integrator", "dt", float, cfg.dt, lambda x: x > 0, "must be > 0")
    cfg.t_end = get(
        "integrator", "t_end", float, cfg.t_end, lambda x: x > 0, "must be > 0"
    )
    cfg.newton_tol = get(
        "integrator", "newton_tol", float, cfg.newton_tol,
        lambda x: x > 0, "must be > 0",
    )
    cfg.max_iter = get(
        "integrator", "max_iter", int, cfg.max_iter, lambda n: n > 0, "must be > 0"
    )

    cfg.dtilde_p = get(
        "operator", "p", int, cfg.dtilde_p, lambda n: n >= 0, "must be >= 0"
    )
    cfg.dtilde_tol = get(
        "operator", "tol", float, cfg.dtilde_tol, lambda x: x > 0, "must be > 0"
    )

    if parser.has_option("functionals", "names"):
        cfg.functionals = [
            name.strip()
            for name in parser.get("functionals", "names").split(",")
            if name.strip()
        ]

    cfg.output_dir = get("output", "directory", str, cfg.output_dir)
    cfg.stride = get(
        "output", "stride", int, cfg.stride, lambda n: n > 0, "must be > 0"
    )
    cfg.decay_threshold = get(
        "output", "decay_threshold", float, cfg.decay_threshold,
        lambda x: x > 0, "must be > 0",
    )
    cfg.tol = get(
        "output", "tolerance", float, cfg.tol, lambda x: x > 0, "must be > 0"
    )

    _validate_functionals(cfg, errors)

    if errors:
        raise ConfigError(errors)
    return cfg


def _validate_functionals(cfg: RunConfig, errors: List[str]):
    valid_potentials = WAVE_POTENTIALS if cfg.system == "wave" else NLS_POTENTIALS
    if cfg.potential not in valid_potentials:
        errors.append(
            f"[system] potential: {cfg.potential!r} not valid for {cfg.system} "
            f"(choose from {sorted(valid_potentials)})"
        )
    cfg.hierarchy_ks = []
    cfg.alphas = []
    for name in cfg.functionals:
        if name.startswith("R"):
            try:
                k = int(name[1:])
            except ValueError:
                errors.append(f"[functionals] names: cannot parse {name!r}")
                continue
            if cfg.system != "wave" or cfg.potential not in ("zero", "quadratic"):
                errors.append(
                    f"[functionals] names: {name} requires the wave system with a "
                    "quadratic potential"
                )
            if not 0 <= k <= 4:
                errors.append(f"[functionals] names: {name} index must be in 0..4")
            cfg.hierarchy_ks.append(k)
        elif name.startswith("T:"):
            alpha = name[2:]
            from .conservation import TABLE_ALPHAS

            if cfg.system != "wave" or cfg.potential not in ("zero", "quadratic"):
                errors.append(
                    f"[functionals] names: {name} requires the wave system with a "
                    "quadratic potential"
                )
            if alpha not in TABLE_ALPHAS:
                errors.append(
                    f"[functionals] names: unknown weight {alpha!r} "
                    f"(choose from {sorted(TABLE_ALPHAS)})"
                )
            cfg.alphas.append(alpha)
        elif name not in _FUNCTIONAL_NAMES:
            errors.append(f"[functionals] names: unknown functional {name!r}")
        if name in ("Pstar", "P4") and cfg.boundary is not Boundary.COMPACT_SUPPORT:
            errors.append(
                f"[functionals] names: {name} requires boundary = compact_support"
            )
        if name == "Pstar" and cfg.system != "wave":
            errors.append(f"[functionals] names: Pstar applies to the wave system")


def build_potential(cfg: RunConfig) -> Potential:
    table = WAVE_POTENTIALS if cfg.system == "wave" else NLS_POTENTIALS
    return table[cfg.potential](cfg.coefficient)


def build_mesh(cfg: RunConfig) -> Mesh:
    return Mesh(h=cfg.h, n_points=cfg.n_points, x0=cfg.x0, boundary=cfg.boundary)


def initial_state(cfg: RunConfig, mesh: Optional[Mesh] = None) -> CanonicalState:
    """Construct the configured initial (v, w) pair at t = 0."""
    mesh = mesh or build_mesh(cfg)
    x = mesh.x
    a, c, sigma, kappa = cfg.ic_amplitude, cfg.ic_center, cfg.ic_width, cfg.ic_kappa
    s = x - c
    if cfg.ic_family == "gaussian":
        v = a * np.exp(-((s / sigma) ** 2))
        w = np.zeros_like(x)
    elif cfg.ic_family == "plane_wave":
        v = a * np.cos(kappa * x)
        w = a * np.sin(kappa * x)
    elif cfg.ic_family == "packet":
        env = a * np.exp(-((s / sigma) ** 2))
        if cfg.system == "nls":
            # complex envelope: real part in v, imaginary part in w
            v = env * np.cos(kappa * s)
            w = env * np.sin(kappa * s)
        else:
            # right-moving packet: w approximates -d/dx of v analytically
            v = env * np.cos(kappa * s)
            w = env * (2.0 * s / sigma**2 * np.cos(kappa * s) + kappa * np.sin(kappa * s))
    else:
        raise ConfigError([f"unknown initial-condition family {cfg.ic_family!r}"])
    return CanonicalState(
        0.0, LatticeField(mesh, v), LatticeField(mesh, w)
    )
