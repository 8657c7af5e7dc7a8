import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_extremes, two_state_generator
from ringbattery.dynamics import evolve
from ringbattery.errors import UndefinedImbalanceError
from ringbattery.levels import Reservoirs, build_branching
from ringbattery.thermo import (
    OrderingPermutation,
    antipassive_energy,
    capacity,
    epoch_index,
    ergotropy,
    flux,
    format_epochs,
    imbalance,
    mean_energy,
    ordering_epochs,
    passive_energy,
    passive_populations,
    power,
    sector_energy,
    snapshot,
    work_per_transition,
)

E5 = [0.0, 0.2, 0.5, 1.0, 1.3]
P5 = [0.1, 0.15, 0.3, 0.25, 0.2]


def test_five_level_example():
    assert passive_energy(P5, E5) == pytest.approx(0.43, abs=1e-15)
    assert antipassive_energy(P5, E5) == pytest.approx(0.77, abs=1e-15)
    assert mean_energy(P5, E5) == pytest.approx(0.69, abs=1e-15)
    assert ergotropy(P5, E5) == pytest.approx(0.26, abs=1e-15)
    assert capacity(P5, E5) == pytest.approx(0.34, abs=1e-15)


def test_two_level_cases():
    assert ergotropy([0.3, 0.7], [0.0, 1.0]) == pytest.approx(0.4)
    assert capacity([0.3, 0.7], [0.0, 1.0]) == pytest.approx(0.4)
    assert ergotropy([0.7, 0.3], [0.0, 1.0]) == 0.0
    assert capacity([0.5, 0.5], [0.0, 1.0]) == 0.0


def test_passive_populations_sorted_against_energy():
    passive, perm = passive_populations(P5, E5)
    assert list(passive) == [0.3, 0.25, 0.2, 0.15, 0.1]
    assert perm.order == (2, 3, 4, 1, 0)
    assert not perm.is_identity(E5)
    passive2, perm2 = passive_populations(passive, E5)
    assert perm2.is_identity(E5)


def test_ordering_format_uses_state_labels():
    perm = OrderingPermutation((2, 4, 1, 3, 0))
    assert perm.format() == "diag{ρ_αα, ρ_GG, ρ_DD, ρ_ββ, ρ_BB}"


@settings(max_examples=300, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_passive_energies_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(5))
    e = rng.uniform(-2, 5, 5)
    lo, hi = brute_extremes(p, e)
    assert passive_energy(p, e) == lo
    assert antipassive_energy(p, e) == hi
    assert capacity(p, e) >= ergotropy(p, e) >= 0


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), shift=st.floats(-10, 10))
def test_invariances(seed, shift):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(5))
    e = rng.uniform(0, 3, 5)
    perm = rng.permutation(5)
    assert passive_energy(p[perm], e[perm]) == pytest.approx(passive_energy(p, e), abs=1e-14)
    assert ergotropy(p, e + shift) == pytest.approx(ergotropy(p, e), abs=1e-12)
    assert capacity(p, e + shift) == pytest.approx(capacity(p, e), abs=1e-12)


def test_sectors():
    e = [2.0, 1.0, 0.6, 0.3, 0.0]
    p = [0.1, 0.2, 0.3, 0.25, 0.15]
    assert sector_energy(p, e, "charging") == pytest.approx(0.2 + 0.2)
    assert sector_energy(p, e, "storage") == pytest.approx(0.2 + 0.2 + 0.18)
    assert sector_energy(p, e, "leakage") == sector_energy(p, e, "storage")
    assert sector_energy(p, e, "full") == pytest.approx(0.58 + 0.075)


def test_flux_work_power():
    b = build_branching(1.0, 0.5, gamma_ref=2e-6)
    r = Reservoirs(t_w=0.5)
    e = [2.0, 1.0, 0.8, 0.4, 0.0]
    pa = 0.2
    pb = pa / math.e
    p = [0.1, 0.1, pa, pb, 0.6 - pb]
    assert flux(p, b) == pytest.approx(4e-7)
    assert imbalance(p) == pytest.approx(math.e)
    assert work_per_transition(p, e, 0.5) == pytest.approx(0.9)
    assert power(p, e, b, r) == pytest.approx(3.6e-7)
    assert flux(p, b, flux_unit_e=2.0) == pytest.approx(8e-7)


def test_equal_cavity_populations_give_bare_gap():
    p = [0.1, 0.1, 0.3, 0.3, 0.2]
    assert work_per_transition(p, [2.0, 1.0, 0.8, 0.4, 0.0], 0.5) == pytest.approx(0.4)


def test_empty_cavity_level_makes_work_undefined():
    p = [0.5, 0.0, 0.0, 0.0, 0.5]
    with pytest.raises(UndefinedImbalanceError):
        imbalance(p)
    s = snapshot(p, [2.0, 1.0, 0.8, 0.4, 0.0], build_branching(1.0, 0.5), Reservoirs())
    assert math.isnan(s.work) and math.isnan(s.power)
    assert s.flux == 0.0


def test_epoch_boundary_at_population_crossing():
    traj = evolve(two_state_generator(), [1.0, 0.0], np.linspace(0, 2, 21))
    epochs = ordering_epochs(traj, [0.0, 1.0], resolution=1e-6)
    assert len(epochs) == 2
    assert epochs[0].end == pytest.approx(math.log(2), abs=1e-6)
    assert epochs[0].ordering.order == (0, 1)
    assert epochs[1].ordering.order == (1, 0)
    idx = epoch_index(traj.times, epochs)
    assert idx[0] == 0 and idx[-1] == 1
    assert "diag{" in format_epochs(epochs, labels=["a", "b"])


def test_constant_trajectory_has_single_epoch():
    traj = evolve(np.zeros((5, 5)), P5, [0, 1, 2])
    assert len(ordering_epochs(traj, E5)) == 1
