"""Run-configuration parsing and lossless round-trip serialization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from .errors import ConfigError, ParameterError
from .gamma import GammaCurve, build_general_astigmatic, make_curve, stigmatic_curve
from .solutions import BeamParams, PacketParams

FAMILIES = ("wave_beam", "wave_packet", "kgf_beam", "kgf_packet")

DEFAULT_SLICES = ("x=0", "z=vgr*t")


def parse_complex(value) -> complex:
    """Accept numbers or 'a+bi' / 'a+bj' literals."""
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, str):
        text = value.strip().replace(" ", "")
        text = text.replace("i", "j")
        try:
            return complex(text)
        except ValueError as exc:
            raise ConfigError(f"cannot parse complex literal {value!r}") from exc
    raise ConfigError(f"cannot parse complex value {value!r}")


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real!r}{z.imag:+}j".replace("+-", "-")


def parse_gamma0(spec, d: int) -> GammaCurve:
    if spec is None:
        raise ConfigError("gamma0 section is required")
    if "stigmatic_eps" in spec:
        return stigmatic_curve(float(spec["stigmatic_eps"]), dim=d)
    if "builder" in spec:
        b = spec["builder"]
        try:
            return build_general_astigmatic(float(b["z1"]), float(b["eps1"]),
                                            float(b["z2"]), float(b["eps2"]),
                                            parse_complex(b["phi"]))
        except KeyError as exc:
            raise ConfigError(f"builder key missing: {exc}") from exc
    if "matrix" in spec:
        rows = spec["matrix"]
        mat = np.array([[parse_complex(v) for v in row] for row in rows])
        if mat.shape != (d, d):
            raise ConfigError(f"gamma0 matrix shape {mat.shape} != ({d}, {d})")
        return make_curve(mat)
    raise ConfigError("gamma0 must provide stigmatic_eps, builder or matrix")


def gamma0_to_dict(curve: GammaCurve) -> dict:
    return {"matrix": [[format_complex(v) for v in row] for row in curve.gamma0]}


@dataclass
class RunConfig:
    """Everything one command run needs, parsed and validated."""

    family: str
    d: int
    curve: GammaCurve
    m: float = 0.0
    mu: float = 0.5
    gamma: float | None = None
    kappa: float | None = None
    eps_m: float | None = None
    eta: float | None = None
    c_b: complex = 1.0
    times: tuple = (0.0,)
    slices: tuple = DEFAULT_SLICES
    grid_n: int = 81
    half_widths: float = 5.0
    ranges: dict = field(default_factory=dict)
    normalize: str = "center"
    margin: float = 10.0
    h: float | None = None
    oracle_p_max: float = 50.0
    seed: int = 0
    threads: int = 1
    raw: dict = field(default_factory=dict, repr=False)

    def params(self):
        """Materialize the family parameter object."""
        if self.family == "wave_beam":
            return BeamParams(eta=self.eta, curve=self.curve, c_b=self.c_b)
        if self.family == "kgf_beam":
            return BeamParams(eta=self.eta, curve=self.curve, c_b=self.c_b,
                              m=self.m, eps_m=self.eps_m)
        if self.family == "wave_packet":
            return PacketParams(mu=self.mu, gamma=self.gamma, kappa=self.kappa,
                                curve=self.curve, m=0.0, c_b=self.c_b)
        if self.family == "kgf_packet":
            return PacketParams(mu=self.mu, gamma=self.gamma, kappa=self.kappa,
                                curve=self.curve, m=self.m, eps_m=self.eps_m,
                                c_b=self.c_b)
        raise ConfigError(f"unknown family {self.family!r}")

    def to_dict(self) -> dict:
        out = {
            "family": self.family,
            "d": self.d,
            "gamma0": gamma0_to_dict(self.curve),
            "m": self.m,
            "mu": self.mu,
            "c_b": format_complex(self.c_b),
            "grid": {
                "times": list(self.times),
                "slices": list(self.slices),
                "n": self.grid_n,
                "half_widths": self.half_widths,
                "ranges": {k: list(v) for k, v in self.ranges.items()},
            },
            "normalize": self.normalize,
            "tolerances": {"margin": self.margin, "h": self.h},
            "oracle_scale": {"p_max": self.oracle_p_max},
            "seed": self.seed,
            "threads": self.threads,
        }
        for key in ("gamma", "kappa", "eps_m", "eta"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a mapping")
    try:
        family = data["family"]
    except KeyError:
        raise ConfigError("missing key 'family'")
    if family not in FAMILIES:
        raise ConfigError(f"family must be one of {FAMILIES}, got {family!r}")
    d = int(data.get("d", 2))
    curve = parse_gamma0(data.get("gamma0"), d)
    if curve.dim != d:
        raise ConfigError(f"gamma0 dimension {curve.dim} != d = {d}")

    m = float(data.get("m", 0.0))
    mu = float(data.get("mu", 0.5))
    gamma = data.get("gamma")
    kappa = data.get("kappa")
    tau = data.get("tau")
    eps_m = data.get("eps_m")
    eta = data.get("eta")
    if family.endswith("packet"):
        if gamma is None:
            raise ConfigError("packets need 'gamma'")
        gamma = float(gamma)
        if kappa is None:
            if tau is None:
                raise ConfigError("packets need 'kappa' or 'tau'")
            tau = float(tau)
            if family == "kgf_packet":
                if m <= 0:
                    raise ConfigError("kgf_packet needs m > 0")
                if eps_m is None:
                    eps_m = tau / 2.0
                eps_m = float(eps_m)
                if not 0 < eps_m < tau:
                    raise ConfigError("eps_m must lie in (0, tau)")
                kappa = float(np.sqrt((tau - eps_m) * m ** 2 / (4.0 * gamma)))
            else:
                raise ConfigError("wave_packet takes 'kappa', not 'tau'")
        else:
            kappa = float(kappa)
            if eps_m is not None:
                eps_m = float(eps_m)
            elif family == "kgf_packet":
                eps_m = 1.0
    if family.endswith("beam"):
        if eta is None:
            raise ConfigError("beams need 'eta'")
        eta = float(eta)
        if family == "kgf_beam":
            if m <= 0:
                raise ConfigError("kgf_beam needs m > 0")
            eps_m = float(eps_m) if eps_m is not None else 1.0

    grid = data.get("grid", {}) or {}
    tol = data.get("tolerances", {}) or {}
    osc = data.get("oracle_scale", {}) or {}
    cfg = RunConfig(
        family=family, d=d, curve=curve, m=m, mu=mu,
        gamma=gamma if gamma is None else float(gamma),
        kappa=kappa if kappa is None else float(kappa),
        eps_m=eps_m if eps_m is None else float(eps_m),
        eta=eta if eta is None else float(eta),
        c_b=parse_complex(data.get("c_b", 1.0)),
        times=tuple(float(t) for t in grid.get("times", [0.0])),
        slices=tuple(grid.get("slices", list(DEFAULT_SLICES))),
        grid_n=int(grid.get("n", 81)),
        half_widths=float(grid.get("half_widths", 5.0)),
        ranges={k: tuple(float(x) for x in v)
                for k, v in (grid.get("ranges") or {}).items()},
        normalize=str(data.get("normalize", "center")),
        margin=float(tol.get("margin", 10.0)),
        h=None if tol.get("h") is None else float(tol.get("h")),
        oracle_p_max=float(osc.get("p_max", 50.0)),
        seed=int(data.get("seed", 0)),
        threads=int(data.get("threads", 1)),
        raw=dict(data),
    )
    if cfg.grid_n < 2:
        raise ConfigError("grid.n must be at least 2 per axis")
    if cfg.normalize not in ("center", "origin", "none"):
        raise ConfigError("normalize must be center, origin or none")
    for t in cfg.times:
        if not np.isfinite(t):
            raise ConfigError("grid.times must be finite")
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from exc
    try:
        return config_from_dict(data)
    except (ParameterError, ConfigError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def dump_config(cfg: RunConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=True)
