"""Energetics of a diagonal battery state.

Populations and energies are vectors in the common basis order
``(+, -, alpha, beta, g)``; the passive/antipassive machinery also accepts
any number of levels.  Energy expectations are accumulated with
:func:`math.fsum`, so a value does not depend on the order in which the terms
were summed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory, evolve
from .errors import UndefinedImbalanceError
from .levels import INDEX, STATES

SECTORS = {
    "charging": ("+", "-", "g"),
    "storage": ("+", "-", "alpha"),
    "leakage": ("+", "-", "alpha", "g"),
    "full": STATES,
}

# labels used when printing an ordering as diag{...}
ORDERING_LABELS = {"+": "BB", "-": "DD", "alpha": "αα", "beta": "ββ", "g": "GG"}

IMBALANCE_FLOOR = 1e-300


@dataclass(frozen=True)
class OrderingPermutation:
    """State indices ranked by population, largest first.

    In the passive state the ``k``-th entry occupies the ``k``-th lowest level.
    """

    order: tuple[int, ...]

    def is_identity(self, energies) -> bool:
        return self.order == tuple(int(i) for i in np.argsort(np.asarray(energies), kind="stable"))

    def format(self, labels=None) -> str:
        if labels is None:
            labels = [ORDERING_LABELS[s] for s in STATES] if len(self.order) == 5 else None
        names = [f"ρ_{labels[i]}" if labels else f"ρ_{i}" for i in self.order]
        return "diag{" + ", ".join(names) + "}"


def _ranked(p, reverse, previous, energies):
    if previous is None:
        seed = list(np.argsort(np.asarray(energies, dtype=float), kind="stable"))
    else:
        seed = list(previous.order if isinstance(previous, OrderingPermutation) else previous)
    sign = -1.0 if reverse else 1.0
    # stable: equal populations keep the seed order
    return tuple(int(i) for i in sorted(seed, key=lambda i: sign * p[i]))


def passive_order(p, energies, previous=None) -> OrderingPermutation:
    p = np.asarray(p, dtype=float)
    return OrderingPermutation(_ranked(p, True, previous, energies))


def _rearranged(p, energies, order):
    levels = np.argsort(np.asarray(energies, dtype=float), kind="stable")
    out = np.empty_like(p)
    out[levels] = p[list(order)]
    return out


def passive_populations(state, energies, previous=None):
    """Populations sorted descending against ascending energies.

    Returns the rearranged vector (in the original basis order) and the
    ordering that produced it.
    """
    p = np.asarray(state, dtype=float)
    perm = passive_order(p, energies, previous)
    return _rearranged(p, energies, perm.order), perm


def antipassive_populations(state, energies, previous=None):
    """Populations sorted ascending against ascending energies."""
    p = np.asarray(state, dtype=float)
    perm = OrderingPermutation(_ranked(p, False, previous, energies))
    return _rearranged(p, energies, perm.order), perm


def mean_energy(state, energies) -> float:
    p = np.asarray(state, dtype=float)
    e = np.asarray(energies, dtype=float)
    return math.fsum(float(x) * float(y) for x, y in zip(e, p))


def sector_energy(state, energies, sector: str = "full") -> float:
    """Expectation of the charging, storage, leakage or full Hamiltonian."""
    p = np.asarray(state, dtype=float)
    e = np.asarray(energies, dtype=float)
    if sector == "full":
        return mean_energy(p, e)
    members = SECTORS[sector]
    return math.fsum(float(e[INDEX[s]]) * float(p[INDEX[s]]) for s in members)


def passive_energy(state, energies) -> float:
    return mean_energy(passive_populations(state, energies)[0], energies)


def antipassive_energy(state, energies) -> float:
    return mean_energy(antipassive_populations(state, energies)[0], energies)


def ergotropy(state, energies) -> float:
    return mean_energy(state, energies) - passive_energy(state, energies)


def capacity(state, energies) -> float:
    return antipassive_energy(state, energies) - passive_energy(state, energies)


def flux(state, branching, flux_unit_e: float = 1.0) -> float:
    """Output flux ``e * gamma_alpha_beta * p_alpha``."""
    p = np.asarray(state, dtype=float)
    return flux_unit_e * branching.gam_alpha_beta * float(p[INDEX["alpha"]])


def imbalance(state) -> float:
    p = np.asarray(state, dtype=float)
    pa, pb = float(p[INDEX["alpha"]]), float(p[INDEX["beta"]])
    if not (pa > IMBALANCE_FLOOR and pb > IMBALANCE_FLOOR):
        raise UndefinedImbalanceError(f"imbalance p_alpha/p_beta undefined for ({pa!r}, {pb!r})")
    return pa / pb


def work_per_transition(state, energies, t_w: float) -> float:
    """Work per ``alpha -> beta`` transition, ``(e_a - e_b) + T_w ln(p_a / p_b)``."""
    e = np.asarray(energies, dtype=float)
    gap = float(e[INDEX["alpha"]] - e[INDEX["beta"]])
    return gap + t_w * math.log(imbalance(state))


def power(state, energies, branching, reservoirs) -> float:
    return (flux(state, branching, reservoirs.flux_unit_e)
            * work_per_transition(state, energies, reservoirs.t_w))


@dataclass(frozen=True)
class ThermoSnapshot:
    time: float
    e_c: float
    e_s: float
    e_l: float
    e_c_passive: float
    e_s_passive: float
    e_l_passive: float
    ergotropy: float
    capacity: float
    flux: float
    imbalance: float
    work: float
    power: float
    ordering: OrderingPermutation

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "ordering"}


def snapshot(state, energies, branching, reservoirs, time=math.nan, previous=None) -> ThermoSnapshot:
    """All observables of one population vector.

    Work, power and the imbalance are NaN when ``p_alpha`` or ``p_beta``
    vanish.
    """
    p = np.asarray(state, dtype=float)
    passive, perm = passive_populations(p, energies, previous)
    anti, _ = antipassive_populations(p, energies)
    full = mean_energy(p, energies)
    low = mean_energy(passive, energies)
    j = flux(p, branching, reservoirs.flux_unit_e)
    try:
        zeta = imbalance(p)
        w = work_per_transition(p, energies, reservoirs.t_w)
    except UndefinedImbalanceError:
        zeta = w = math.nan
    return ThermoSnapshot(
        time=float(time),
        e_c=sector_energy(p, energies, "charging"),
        e_s=sector_energy(p, energies, "storage"),
        e_l=sector_energy(p, energies, "leakage"),
        e_c_passive=sector_energy(passive, energies, "charging"),
        e_s_passive=sector_energy(passive, energies, "storage"),
        e_l_passive=sector_energy(passive, energies, "leakage"),
        ergotropy=full - low,
        capacity=mean_energy(anti, energies) - low,
        flux=j,
        imbalance=zeta,
        work=w,
        power=j * w,
        ordering=perm,
    )


def trajectory_snapshots(traj: Trajectory, energies, branching, reservoirs) -> list[ThermoSnapshot]:
    out = []
    prev = None
    for t, p in zip(traj.times, traj.populations):
        snap = snapshot(p, energies, branching, reservoirs, time=t, previous=prev)
        prev = snap.ordering
        out.append(snap)
    return out


@dataclass(frozen=True)
class Epoch:
    start: float
    end: float
    ordering: OrderingPermutation


def ordering_epochs(traj: Trajectory, energies, resolution: float = 1e-4) -> list[Epoch]:
    """Split a trajectory into maximal intervals of constant passive ordering.

    Each change detected between two grid points is located by bisection,
    re-integrating from the earlier point, until the bracket is narrower than
    ``resolution`` (in units of ``t * gamma_plus``).
    """
    times = traj.times
    pops = traj.populations
    orders = []
    prev = None
    for p in pops:
        prev = passive_order(p, energies, prev)
        orders.append(prev)

    epochs = []
    start = float(times[0])
    first = 0
    for k in range(1, len(times)):
        if orders[k] == orders[k - 1]:
            continue
        if all(_sorted_by(pops[i], orders[k].order) for i in range(first, k)):
            # the new ranking only resolves a tie: relabel, no boundary
            for i in range(first, k):
                orders[i] = orders[k]
            continue
        lo, hi = float(times[k - 1]), float(times[k])
        p_lo = pops[k - 1]
        while hi - lo > resolution:
            mid = 0.5 * (lo + hi)
            p_mid = evolve(traj.generator, p_lo, [lo, mid], traj.gamma_plus).final
            if passive_order(p_mid, energies, orders[k - 1]) == orders[k - 1]:
                lo, p_lo = mid, p_mid
            else:
                hi = mid
        boundary = 0.5 * (lo + hi)
        epochs.append(Epoch(start, boundary, orders[k - 1]))
        start = boundary
        first = k
    epochs.append(Epoch(start, float(times[-1]), orders[-1]))
    return epochs


def _sorted_by(p, order) -> bool:
    vals = [p[i] for i in order]
    return all(a >= b for a, b in zip(vals, vals[1:]))


def epoch_index(times, epochs: list[Epoch]) -> np.ndarray:
    """Index of the epoch containing each time (boundaries belong to the later epoch)."""
    bounds = np.array([e.end for e in epochs[:-1]])
    return np.searchsorted(bounds, np.asarray(times, dtype=float), side="right")


def format_epochs(epochs: list[Epoch], labels=None) -> str:
    lines = []
    for e in epochs:
        lines.append(f"{e.start:.4f} <= tΓ+ < {e.end:.4f}: {e.ordering.format(labels)}")
    return "\n".join(lines)
