"""Five-level ladder, decay branching and the population rate matrix.

Basis order throughout the package is ``(+, -, alpha, beta, g)``, matching
the column layout of the rate matrix.  ``k[i, j]`` denotes the rate from
state ``i`` to state ``j``: column ``i`` loses it, row ``j`` gains it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from types import MappingProxyType

import numpy as np

from .errors import (
    InvalidFrequencyError,
    InvalidLadderError,
    InvalidParameterError,
    InvalidRateError,
    InvalidTemperatureError,
)

STATES = ("+", "-", "alpha", "beta", "g")
INDEX = {s: i for i, s in enumerate(STATES)}

# (from, to, branching field, bath)
TRANSITIONS = (
    ("+", "-", "gam_plus_minus", "c"),
    ("-", "+", "gam_minus_plus", "c"),
    ("+", "g", "gam_plus_g", "c"),
    ("g", "+", "gam_plus_g", "c"),
    ("-", "g", "gam_minus_g", "c"),
    ("g", "-", "gam_minus_g", "c"),
    ("-", "alpha", "gam_minus_alpha", "w"),
    ("alpha", "-", "gam_alpha_minus", "w"),
    ("alpha", "beta", "gam_alpha_beta", "w"),
    ("alpha", "g", "gam_alpha_g", "w"),
    ("beta", "g", "gam_beta_g", "w"),
    ("g", "beta", "gam_g_beta", "w"),
)

DEFAULT_GAMMA_REF = 1.0e-6
DEFAULT_GAMMA_BETA_G = 0.5


@dataclass(frozen=True)
class LevelEnergies:
    eps_plus: float
    eps_minus: float
    eps_alpha: float
    eps_beta: float
    eps_g: float = 0.0

    def __post_init__(self):
        vals = self.as_tuple()
        if not all(math.isfinite(v) for v in vals):
            raise InvalidLadderError("level energies must be finite")
        if self.eps_g != 0.0:
            raise InvalidLadderError(f"eps_g is the reference and must be 0, got {self.eps_g}")
        if not (self.eps_g < self.eps_beta < self.eps_alpha < self.eps_minus < self.eps_plus):
            raise InvalidLadderError(
                "ladder must satisfy eps_g < eps_beta < eps_alpha < eps_minus < eps_plus, got "
                + ", ".join(f"{s}={v:.6g}" for s, v in zip(STATES, vals)))

    def as_tuple(self) -> tuple[float, ...]:
        return (self.eps_plus, self.eps_minus, self.eps_alpha, self.eps_beta, self.eps_g)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.as_tuple(), dtype=dtype)

    def gap(self, upper: str, lower: str) -> float:
        e = self.as_tuple()
        return e[INDEX[upper]] - e[INDEX[lower]]


def ladder_from_hybridization(e_plus, e_minus, eps_beta=0.4, eps_alpha=0.8,
                              dark_gap=0.1, eps_offset=None) -> LevelEnergies:
    """Place the hybridized pair above the auxiliary levels.

    Only the difference ``e_plus - e_minus`` is physical, so both are shifted
    by a common offset.  By default the offset puts the dark level exactly
    ``dark_gap`` above ``eps_alpha``.
    """
    if eps_offset is None:
        eps_offset = eps_alpha + dark_gap - e_minus
    return LevelEnergies(
        eps_plus=eps_offset + e_plus,
        eps_minus=eps_offset + e_minus,
        eps_alpha=eps_alpha,
        eps_beta=eps_beta,
    )


@dataclass(frozen=True)
class BranchingTable:
    gam_plus_minus: float
    gam_plus_g: float
    gam_minus_plus: float
    gam_minus_g: float
    gam_minus_alpha: float
    gam_alpha_minus: float
    gam_alpha_g: float
    gam_alpha_beta: float
    gam_beta_g: float
    gam_g_beta: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v) or v < 0:
                raise InvalidRateError(f"{f.name} must be finite and >= 0, got {v!r}")


def build_branching(gamma_plus, gamma_minus, gamma_ref=DEFAULT_GAMMA_REF,
                    gamma_beta_g=DEFAULT_GAMMA_BETA_G) -> BranchingTable:
    """Split the bright and dark widths into channel widths.

    The bright width is shared equally by ``+ -> -`` and ``+ -> g``; the dark
    width goes 0.35 / 0.35 / 0.3 to ``- -> +``, ``- -> g`` and ``- -> alpha``.
    Cavity-side widths are set by ``gamma_ref`` and ``gamma_beta_g``.
    """
    for name, v in (("gamma_plus", gamma_plus), ("gamma_minus", gamma_minus),
                    ("gamma_ref", gamma_ref), ("gamma_beta_g", gamma_beta_g)):
        if not math.isfinite(v) or v < 0:
            raise InvalidRateError(f"{name} must be finite and >= 0, got {v!r}")
    gam_minus_alpha = 0.3 * gamma_minus
    return BranchingTable(
        gam_plus_minus=0.5 * gamma_plus,
        gam_plus_g=0.5 * gamma_plus,
        gam_minus_plus=0.35 * gamma_minus,
        gam_minus_g=0.35 * gamma_minus,
        gam_minus_alpha=gam_minus_alpha,
        gam_alpha_minus=0.1 * gam_minus_alpha,
        gam_alpha_g=0.25 * gamma_ref,
        gam_alpha_beta=gamma_ref,
        gam_beta_g=gamma_beta_g,
        gam_g_beta=gamma_beta_g,
    )


@dataclass(frozen=True)
class Reservoirs:
    t_c: float = 2.0
    t_w: float = 0.5
    omega_w: float | None = None
    flux_unit_e: float = 1.0

    def __post_init__(self):
        for name in ("t_c", "t_w"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0:
                raise InvalidTemperatureError(f"{name} must be finite and > 0, got {v!r}")
        if not math.isfinite(self.flux_unit_e) or self.flux_unit_e <= 0:
            raise InvalidParameterError(f"flux_unit_e must be > 0, got {self.flux_unit_e!r}")

    def temperature(self, bath: str) -> float:
        return self.t_c if bath == "c" else self.t_w


def bose_occupation(omega: float, temperature: float) -> float:
    """Bose-Einstein occupation ``1 / (exp(omega / T) - 1)`` with ``k_B = 1``."""
    if not omega > 0:
        raise InvalidFrequencyError(f"omega must be > 0, got {omega!r}")
    if not temperature > 0:
        raise InvalidTemperatureError(f"temperature must be > 0, got {temperature!r}")
    x = omega / temperature
    if x > 700.0:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def transition_rate(gamma_ij: float, omega: float, temperature: float, direction: str) -> float:
    """Emission ``G (n + 1)`` for ``"downward"``, absorption ``G n`` for ``"upward"``."""
    n = bose_occupation(omega, temperature)
    if direction == "downward":
        return gamma_ij * (n + 1.0)
    if direction == "upward":
        return gamma_ij * n
    raise ValueError(f"direction must be 'downward' or 'upward', got {direction!r}")


@dataclass(frozen=True, eq=False)
class RateMatrix:
    entries: np.ndarray
    rates: MappingProxyType

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)

    @property
    def shape(self):
        return self.entries.shape

    def rate(self, src: str, dst: str) -> float:
        return self.rates[(src, dst)]


def build_liouvillian(energies: LevelEnergies, branching: BranchingTable,
                      reservoirs: Reservoirs) -> RateMatrix:
    """Assemble the 5x5 generator ``L`` with ``d p / dt = L p``.

    Every pair uses downward ``G (n + 1)`` and upward ``G n`` evaluated at the
    pair's gap; ``{+, -, g}`` pairs see the charging bath ``t_c`` and the
    remaining pairs the cavity ``t_w``.
    """
    eps = energies.as_tuple()
    rates = {}
    entries = np.zeros((5, 5))
    for src, dst, width_name, bath in TRANSITIONS:
        i, j = INDEX[src], INDEX[dst]
        omega = eps[i] - eps[j]
        if omega == 0:
            raise InvalidLadderError(f"degenerate levels {src} and {dst}")
        direction = "downward" if omega > 0 else "upward"
        k = transition_rate(getattr(branching, width_name), abs(omega),
                            reservoirs.temperature(bath), direction)
        if not math.isfinite(k) or k < 0:
            raise InvalidRateError(f"rate {src}->{dst} is {k!r}")
        rates[(src, dst)] = k
        entries[j, i] += k
    for i in range(5):
        entries[i, i] = -sum(entries[j, i] for j in range(5) if j != i)
    entries.setflags(write=False)
    return RateMatrix(entries=entries, rates=MappingProxyType(rates))
