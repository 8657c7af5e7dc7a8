"""Ring-plus-central-emitter quantum battery: hybridization, rate dynamics, energetics."""

__version__ = "0.1.0"

from .battery import Battery
from .config import BatteryConfig, default_config, parse_config, parse_config_text
from .dynamics import PopulationState, Trajectory, evolve, steady_state
from .hybridization import (
    CollectiveMode,
    HybridizedStates,
    RingParams,
    collective_eigenvalue,
    hybridize,
    hybridize_eigensolve,
    hybridize_formula,
    resolve_gamma0,
    subradiant_mode_index,
)
from .levels import (
    BranchingTable,
    LevelEnergies,
    RateMatrix,
    Reservoirs,
    bose_occupation,
    build_branching,
    build_liouvillian,
    ladder_from_hybridization,
    transition_rate,
)
from .sweep import SweepResult, SweepSpec, normalize_to_baseline, run_sweep
from .thermo import (
    OrderingPermutation,
    ThermoSnapshot,
    antipassive_populations,
    capacity,
    ergotropy,
    flux,
    ordering_epochs,
    passive_populations,
    power,
    sector_energy,
    snapshot,
    work_per_transition,
)
