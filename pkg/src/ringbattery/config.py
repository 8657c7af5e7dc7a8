"""Battery configuration files.

A configuration is a plain-text file of ``key = value`` pairs grouped into
the sections ``[ring]``, ``[energies]``, ``[reservoirs]``, ``[branching]``,
``[dynamics]`` and ``[sweep]``.  Dotted keys (``ring.j_d = 2.0``) may also
appear before the first section header.  Every effective value is tracked
together with where it came from: ``file``, ``paper-caption`` (published
figure parameters), ``paper-text`` (values stated with the rate list) or
``default-non-paper`` (a choice made here, not taken from the model's
publication).
"""

from __future__ import annotations

import configparser
import hashlib
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BatteryError, ConfigError
from .hybridization import DIAGONAL_CONVENTIONS, GAMMA0_RULES, RING_WIDTH_RULES, RingParams
from .levels import DEFAULT_GAMMA_BETA_G, DEFAULT_GAMMA_REF, STATES, Reservoirs

FILE = "file"
CAPTION = "paper-caption"
TEXT = "paper-text"
NON_PAPER = "default-non-paper"


def _int(text):
    v = float(text)
    if not v.is_integer():
        raise ValueError("expected an integer")
    return int(v)


def _float(text):
    v = float(text)
    if not math.isfinite(v):
        raise ValueError("expected a finite number")
    return v


def _optional_float(text):
    if text.strip().lower() in ("", "none", "auto"):
        return None
    return _float(text)


def _choice(options):
    def parse(text):
        text = text.strip()
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text
    return parse


def _int_list(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(_int(a), _int(b) + 1))
        elif part:
            out.append(_int(part))
    if not out:
        raise ValueError("expected a nonempty list")
    return tuple(out)


def _float_list(text):
    text = text.strip()
    if text.count(":") == 2:
        a, b, n = text.split(":")
        return tuple(float(v) for v in np.linspace(_float(a), _float(b), _int(n)))
    out = tuple(_float(v) for v in text.split(",") if v.strip())
    if not out:
        raise ValueError("expected a nonempty list")
    return out


def _optional_float_list(text):
    if text.strip().lower() in ("", "none"):
        return None
    return _float_list(text)


def _initial(text):
    text = text.strip()
    if text in STATES:
        return text
    vals = tuple(_float(v) for v in text.split(","))
    if len(vals) != 5:
        raise ValueError("expected a state label or five populations (+, -, alpha, beta, g)")
    return vals


DEFAULT_J_D_VALUES = tuple(float(v) for v in np.linspace(0.5, 10.0, 20))

# section -> key -> (parser, default, source of the default)
SCHEMA = {
    "ring": {
        "n_ring": (_int, 4, NON_PAPER),
        "omega_pair": (_float, 0.5, CAPTION),
        "gamma_pair": (_float, 0.8, CAPTION),
        "delta": (_float, 0.5, CAPTION),
        "j_d": (_float, 2.0, CAPTION),
        "gamma_d": (_float, 0.0002, CAPTION),
        "gamma0_rule": (_choice(GAMMA0_RULES), "half_collective_magnitude", NON_PAPER),
        "gamma0": (_optional_float, None, NON_PAPER),
        "diagonal_convention": (_choice(DIAGONAL_CONVENTIONS), "exclude_diagonal", NON_PAPER),
        "ring_width_rule": (_choice(RING_WIDTH_RULES), "magnitude", NON_PAPER),
    },
    "energies": {
        "eps_beta": (_float, 0.4, NON_PAPER),
        "eps_alpha": (_float, 0.8, NON_PAPER),
        "dark_gap": (_float, 0.1, NON_PAPER),
        "eps_offset": (_optional_float, None, NON_PAPER),
    },
    "reservoirs": {
        "t_c": (_float, 2.0, NON_PAPER),
        "t_w": (_float, 0.5, NON_PAPER),
        "omega_w": (_optional_float, None, NON_PAPER),
        "flux_unit_e": (_float, 1.0, NON_PAPER),
    },
    "branching": {
        "gamma_ref": (_float, DEFAULT_GAMMA_REF, TEXT),
        "gamma_beta_g": (_float, DEFAULT_GAMMA_BETA_G, TEXT),
    },
    "dynamics": {
        "t_max": (_float, 10.0, NON_PAPER),
        "n_points": (_int, 201, NON_PAPER),
        "times": (_optional_float_list, None, NON_PAPER),
        "initial": (_initial, "g", NON_PAPER),
    },
    "sweep": {
        "n_ring_values": (_int_list, tuple(range(3, 31)), NON_PAPER),
        "j_d_values": (_float_list, DEFAULT_J_D_VALUES, NON_PAPER),
        "baseline_n_ring": (_int, 3, CAPTION),
    },
}


@dataclass(frozen=True)
class EnergySettings:
    eps_beta: float = 0.4
    eps_alpha: float = 0.8
    dark_gap: float = 0.1
    eps_offset: float | None = None


@dataclass(frozen=True)
class BatteryConfig:
    ring: RingParams = field(default_factory=RingParams)
    energies: EnergySettings = field(default_factory=EnergySettings)
    reservoirs: Reservoirs = field(default_factory=Reservoirs)
    gamma_ref: float = DEFAULT_GAMMA_REF
    gamma_beta_g: float = DEFAULT_GAMMA_BETA_G
    t_max: float = 10.0
    n_points: int = 201
    times: tuple[float, ...] | None = None
    initial: str | tuple[float, ...] = "g"
    n_ring_values: tuple[int, ...] = tuple(range(3, 31))
    j_d_values: tuple[float, ...] = DEFAULT_J_D_VALUES
    baseline_n_ring: int = 3
    sources: dict = field(default_factory=dict, compare=False, hash=False)

    def time_grid(self) -> np.ndarray:
        if self.times is not None:
            return np.asarray(self.times, dtype=float)
        return np.linspace(0.0, self.t_max, self.n_points)

    def initial_state(self) -> np.ndarray:
        if isinstance(self.initial, str):
            p = np.zeros(5)
            p[STATES.index(self.initial)] = 1.0
            return p
        return np.asarray(self.initial, dtype=float)

    def with_ring(self, **changes) -> "BatteryConfig":
        return replace(self, ring=replace(self.ring, **changes))

    def resolved(self) -> dict:
        """Flat ``{"section.key": value}`` of every effective value."""
        r = self.ring
        e = self.energies
        res = self.reservoirs
        values = {
            "ring": {k: getattr(r, k) for k in SCHEMA["ring"]},
            "energies": {k: getattr(e, k) for k in SCHEMA["energies"]},
            "reservoirs": {k: getattr(res, k) for k in SCHEMA["reservoirs"]},
            "branching": {"gamma_ref": self.gamma_ref, "gamma_beta_g": self.gamma_beta_g},
            "dynamics": {"t_max": self.t_max, "n_points": self.n_points,
                         "times": self.times, "initial": self.initial},
            "sweep": {"n_ring_values": self.n_ring_values, "j_d_values": self.j_d_values,
                      "baseline_n_ring": self.baseline_n_ring},
        }
        return {f"{s}.{k}": v for s, d in values.items() for k, v in d.items()}

    def config_hash(self) -> str:
        blob = json.dumps({k: _canonical(v) for k, v in self.resolved().items()},
                          sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def source(self, key: str) -> str:
        return self.sources.get(key, NON_PAPER)

    def non_paper_keys(self) -> list[str]:
        return [k for k in self.resolved() if self.source(k) == NON_PAPER]

    def echo(self) -> list[str]:
        return [f"{k} = {_show(v)}  ({self.source(k)})" for k, v in self.resolved().items()]


def _canonical(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return [_canonical(x) for x in v]
    return v


def _show(v):
    if isinstance(v, tuple):
        if len(v) > 6:
            return f"{_show(v[0])}, {_show(v[1])}, ..., {_show(v[-1])} ({len(v)} values)"
        return ", ".join(_show(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _build(values: dict, sources: dict) -> BatteryConfig:
    def sect(name):
        return values[name]

    def guarded(section, key, fn):
        try:
            return fn()
        except BatteryError as exc:
            raise ConfigError(section, key, str(exc)) from exc

    ring = guarded("ring", None, lambda: RingParams(**sect("ring")))
    en = sect("energies")
    if not 0 < en["eps_beta"] < en["eps_alpha"]:
        raise ConfigError("energies", "eps_beta",
                          "ladder invariant requires 0 = eps_g < eps_beta < eps_alpha")
    if not en["dark_gap"] > 0:
        raise ConfigError("energies", "dark_gap", "must be > 0 so that eps_minus > eps_alpha")
    reservoirs = guarded("reservoirs", None, lambda: Reservoirs(**sect("reservoirs")))
    br = sect("branching")
    for key, v in br.items():
        if v < 0:
            raise ConfigError("branching", key, "rates must be >= 0")
    dyn = sect("dynamics")
    if dyn["times"] is None:
        if not dyn["t_max"] > 0:
            raise ConfigError("dynamics", "t_max", "must be > 0")
        if dyn["n_points"] < 2:
            raise ConfigError("dynamics", "n_points", "must be >= 2")
    else:
        t = np.asarray(dyn["times"])
        if t[0] < 0 or np.any(np.diff(t) <= 0):
            raise ConfigError("dynamics", "times", "must be strictly increasing and >= 0")
    if not isinstance(dyn["initial"], str):
        p = np.asarray(dyn["initial"])
        if p.min() < 0 or abs(p.sum() - 1) > 1e-9:
            raise ConfigError("dynamics", "initial", "populations must be >= 0 and sum to 1")
    sw = sect("sweep")
    if min(sw["n_ring_values"]) < 3:
        raise ConfigError("sweep", "n_ring_values", "ring sizes must be >= 3")
    return BatteryConfig(
        ring=ring,
        energies=EnergySettings(**en),
        reservoirs=reservoirs,
        gamma_ref=br["gamma_ref"],
        gamma_beta_g=br["gamma_beta_g"],
        t_max=dyn["t_max"],
        n_points=dyn["n_points"],
        times=dyn["times"],
        initial=dyn["initial"],
        n_ring_values=sw["n_ring_values"],
        j_d_values=sw["j_d_values"],
        baseline_n_ring=sw["baseline_n_ring"],
        sources=sources,
    )


def default_config() -> BatteryConfig:
    return parse_config_text("")


def parse_config_text(text: str) -> BatteryConfig:
    parser = configparser.ConfigParser(interpolation=None, strict=True,
                                       inline_comment_prefixes=(";", "#"),
                                       default_section="__defaults__")
    try:
        parser.read_string("[__top__]\n" + text)
    except configparser.Error as exc:
        raise ConfigError("file", None, f"malformed configuration: {exc}") from exc

    raw = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            if section == "__top__":
                if "." not in key:
                    raise ConfigError("file", key, "keys outside a section must be 'section.key'")
                sect, k = key.split(".", 1)
            else:
                sect, k = section, key
            if sect not in SCHEMA:
                raise ConfigError(sect, None, "unknown section")
            if k not in SCHEMA[sect]:
                raise ConfigError(sect, k, "unknown key")
            if (sect, k) in raw:
                raise ConfigError(sect, k, "set more than once")
            raw[(sect, k)] = value

    values = {s: {} for s in SCHEMA}
    sources = {}
    for sect, keys in SCHEMA.items():
        for k, (parse, default, origin) in keys.items():
            if (sect, k) in raw:
                try:
                    values[sect][k] = parse(raw[(sect, k)])
                except ValueError as exc:
                    raise ConfigError(sect, k, f"cannot parse {raw[(sect, k)]!r}: {exc}") from exc
                sources[f"{sect}.{k}"] = FILE
            else:
                values[sect][k] = default
                sources[f"{sect}.{k}"] = origin
    return _build(values, sources)


def parse_config(path) -> BatteryConfig:
    """Load and validate a configuration file; an empty file gives all defaults."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("file", None, f"cannot read {path}: {exc}") from exc
    return parse_config_text(text)
