"""One battery configuration taken through the whole model chain."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import BatteryConfig
from .dynamics import Trajectory, evolve, steady_state
from .hybridization import HybridizedStates, hybridize_formula
from .levels import (
    BranchingTable,
    LevelEnergies,
    RateMatrix,
    build_branching,
    build_liouvillian,
    ladder_from_hybridization,
)
from .thermo import ThermoSnapshot, snapshot, trajectory_snapshots


@dataclass(frozen=True, eq=False)
class Battery:
    config: BatteryConfig
    hybridized: HybridizedStates
    energies: LevelEnergies
    branching: BranchingTable
    generator: RateMatrix

    @classmethod
    def from_config(cls, config: BatteryConfig) -> "Battery":
        hyb = hybridize_formula(config.ring)
        e = config.energies
        energies = ladder_from_hybridization(hyb.e_plus, hyb.e_minus, e.eps_beta, e.eps_alpha,
                                             e.dark_gap, e.eps_offset)
        branching = build_branching(hyb.gamma_plus, hyb.gamma_minus,
                                    config.gamma_ref, config.gamma_beta_g)
        generator = build_liouvillian(energies, branching, config.reservoirs)
        return cls(config, hyb, energies, branching, generator)

    @property
    def reservoirs(self):
        return self.config.reservoirs

    @property
    def gamma_plus(self) -> float:
        return self.hybridized.gamma_plus

    def steady_state(self) -> np.ndarray:
        return steady_state(self.generator)

    def evolve(self, times=None, initial=None) -> Trajectory:
        if times is None:
            times = self.config.time_grid()
        if initial is None:
            initial = self.config.initial_state()
        return evolve(self.generator, initial, times, self.gamma_plus)

    def snapshot(self, p, time=float("nan")) -> ThermoSnapshot:
        return snapshot(p, self.energies, self.branching, self.reservoirs, time=time)

    def steady_snapshot(self) -> ThermoSnapshot:
        return self.snapshot(self.steady_state(), time=float("inf"))

    def snapshots(self, traj: Trajectory) -> list[ThermoSnapshot]:
        return trajectory_snapshots(traj, self.energies, self.branching, self.reservoirs)
