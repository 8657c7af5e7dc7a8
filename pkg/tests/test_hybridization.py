import cmath
import json
import math
import warnings
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ringbattery.errors import InvalidGeometryError, ModeIndexError, NonphysicalGainWarning
from ringbattery.hybridization import (
    CollectiveMode,
    RingParams,
    collective_eigenvalue,
    effective_matrix,
    hybridize,
    hybridize_eigensolve,
    hybridize_formula,
    resolve_gamma0,
    subradiant_mode_index,
)

GOLDEN = json.loads((Path(__file__).parent / "data" / "golden.json").read_text())


def pair_error(a, b):
    """Relative mismatch of two eigenvalue pairs under the better matching."""
    scale = max(1.0, *(abs(z) for z in b))
    straight = max(abs(a[0] - b[0]), abs(a[1] - b[1]))
    crossed = max(abs(a[0] - b[1]), abs(a[1] - b[0]))
    return min(straight, crossed) / scale


def brute_zeta(n, m, omega, gamma, convention):
    """Literal double sum over emitter pairs, normalized by N."""
    c = complex(omega, -0.5 * gamma)
    theta = 2 * math.pi * m / n
    total = 0j
    for j in range(n):
        for l in range(n):
            phase = cmath.exp(1j * theta * (l - j))
            if j != l:
                total += c * phase
            elif convention == "include_uniform_diagonal":
                total += c * phase
            elif convention == "self_decay_diagonal":
                total += complex(0.0, -0.5 * gamma) * phase
    return total / n


@pytest.mark.parametrize("convention", ["exclude_diagonal", "include_uniform_diagonal",
                                        "self_decay_diagonal"])
@pytest.mark.parametrize("n", range(3, 13))
def test_collective_eigenvalue_matches_double_sum(n, convention):
    p = RingParams(n_ring=n, omega_pair=0.37, gamma_pair=0.81, diagonal_convention=convention)
    for m in range(n):
        z = collective_eigenvalue(p, m).zeta
        ref = brute_zeta(n, m, 0.37, 0.81, convention)
        assert abs(z - ref) <= 1e-12 * max(1.0, abs(ref))


def test_subradiant_index():
    assert subradiant_mode_index(4) == 2
    assert subradiant_mode_index(7) == 3
    with pytest.raises(InvalidGeometryError):
        subradiant_mode_index(2)


def test_mode_index_out_of_range():
    with pytest.raises(ModeIndexError):
        collective_eigenvalue(RingParams(n_ring=5), 5)


def test_uniform_mode_is_superradiant_and_others_flat():
    p = RingParams(n_ring=6, omega_pair=0.5, gamma_pair=0.8)
    assert collective_eigenvalue(p, 0).zeta == pytest.approx(5 * complex(0.5, -0.4))
    for m in range(1, 6):
        assert collective_eigenvalue(p, m).zeta == pytest.approx(-complex(0.5, -0.4))


def test_invalid_params_rejected():
    with pytest.raises(InvalidGeometryError):
        RingParams(n_ring=2)
    with pytest.raises(ValueError):
        RingParams(gamma_pair=-1.0)


def test_decoupled_limit_is_exact():
    p = RingParams(n_ring=5, j_d=0.0, gamma_d=0.0, delta=0.3)
    mode = collective_eigenvalue(p)
    hyb = hybridize_formula(p)
    g0 = hyb.gamma0
    ring = complex(mode.j_tilde, -0.5 * abs(mode.gamma_tilde))
    centre = complex(-0.3, -0.5 * g0)
    assert pair_error(hyb.eigenvalues(), (ring, centre)) <= 1e-14


@settings(max_examples=200, deadline=None)
@given(
    n=st.integers(3, 40),
    omega=st.floats(-3, 3),
    gamma=st.floats(0, 3),
    delta=st.floats(-3, 3),
    j_d=st.floats(-5, 5),
    gamma_d=st.floats(0, 1),
    convention=st.sampled_from(["exclude_diagonal", "include_uniform_diagonal",
                                "self_decay_diagonal"]),
)
def test_formula_matches_matrix_with_negative_centre(n, omega, gamma, delta, j_d, gamma_d,
                                                      convention):
    p = RingParams(n_ring=n, omega_pair=omega, gamma_pair=gamma, delta=delta, j_d=j_d,
                   gamma_d=gamma_d, diagonal_convention=convention)
    a = hybridize_formula(p).eigenvalues()
    b = tuple(complex(z) for z in np.linalg.eigvals(effective_matrix(p, central_sign=-1.0)))
    assert pair_error(a, b) <= 1e-10


def test_bright_state_carries_larger_width():
    for n in range(3, 31):
        hyb = hybridize_formula(RingParams(n_ring=n))
        assert hyb.gamma_plus >= hyb.gamma_minus


def test_eigensolve_labels_independent_of_root_branch():
    p = RingParams(n_ring=9, j_d=3.0)
    a = hybridize_eigensolve(p, central_sign=-1.0)
    b = hybridize_formula(p)
    assert a.lambda_minus == pytest.approx(b.lambda_minus, rel=1e-12)
    assert a.lambda_plus == pytest.approx(b.lambda_plus, rel=1e-12)


def test_continuity_in_coupling():
    # no branch jumps of the square root along a fine j_d sweep
    prev = None
    for j in np.linspace(0.1, 10, 2000):
        hyb = hybridize_formula(RingParams(n_ring=6, j_d=float(j)))
        cur = np.array([hyb.e_plus, hyb.e_minus])
        if prev is not None:
            assert np.max(np.abs(cur - prev)) < 0.05
        prev = cur


def test_resolve_gamma0_rules():
    mode = CollectiveMode(m=2, zeta=complex(-0.5, 0.4))  # width -0.8
    assert resolve_gamma0("half_collective_magnitude", mode) == pytest.approx(0.4)
    assert resolve_gamma0("explicit", mode, 0.25) == 0.25
    with pytest.warns(NonphysicalGainWarning):
        assert resolve_gamma0("half_collective_signed", mode) == pytest.approx(-0.4)
    with pytest.raises(ValueError):
        resolve_gamma0("explicit", mode, None)


def test_default_pipeline_emits_no_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        hybridize(RingParams())


def test_golden_eigensolve():
    p = RingParams(**GOLDEN["ring"])
    hyb = hybridize_eigensolve(p)
    for name in ("lambda_plus", "lambda_minus"):
        re, im = GOLDEN["eigensolve"][name]
        assert getattr(hyb, name) == pytest.approx(complex(re, im), rel=1e-13)
    f = hybridize(p)
    for name in ("lambda_plus", "lambda_minus"):
        re, im = GOLDEN["formula"][name]
        assert getattr(f, name) == pytest.approx(complex(re, im), rel=1e-13)


def test_decay_ratios_bright_above_dark():
    for n in range(3, 21):
        hyb = hybridize(RingParams(n_ring=n))
        assert hyb.gamma_plus / 0.8 > hyb.gamma_minus / 0.8
