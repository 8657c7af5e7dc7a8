"""Time evolution ``dp/dt = L p`` and the stationary distribution.

Times handed to and returned by :func:`evolve` are dimensionless, ``t * gamma_plus``.
Populations are plain ``numpy`` vectors in the basis order of
:mod:`ringbattery.levels`; :class:`PopulationState` gives named access for the
five-level battery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    IntegrationError,
    InvalidParameterError,
    NonUniqueSteadyStateError,
    NumericError,
    PositivityError,
)

TRACE_TOL = 1e-9
STEP_DRIFT_TOL = 1e-12
POSITIVITY_TOL = 1e-9


@dataclass(frozen=True)
class PopulationState:
    p_plus: float
    p_minus: float
    p_alpha: float
    p_beta: float
    p_g: float

    def __post_init__(self):
        vals = self.as_tuple()
        if any(not (-POSITIVITY_TOL <= v <= 1 + POSITIVITY_TOL) for v in vals):
            raise InvalidParameterError(f"populations must lie in [0, 1], got {vals}")
        if abs(math.fsum(vals) - 1.0) > TRACE_TOL:
            raise InvalidParameterError(f"populations must sum to 1, got {math.fsum(vals)!r}")

    @classmethod
    def from_array(cls, p) -> "PopulationState":
        return cls(*(float(v) for v in p))

    @classmethod
    def ground(cls) -> "PopulationState":
        return cls(0.0, 0.0, 0.0, 0.0, 1.0)

    def as_tuple(self) -> tuple[float, ...]:
        return (self.p_plus, self.p_minus, self.p_alpha, self.p_beta, self.p_g)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.as_tuple(), dtype=dtype)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    populations: np.ndarray
    generator: np.ndarray
    gamma_plus: float

    def __len__(self):
        return len(self.times)

    @property
    def states(self) -> list[PopulationState]:
        return [PopulationState.from_array(p) for p in self.populations]

    @property
    def final(self) -> np.ndarray:
        return self.populations[-1]


def _rk4_propagator(L, h):
    """Matrix applying one classical RK4 step of size ``h`` to ``dy/dt = L y``.

    For a constant linear generator the four stages collapse to the degree-4
    Taylor polynomial of ``exp(h L)``.
    """
    n = L.shape[0]
    eye = np.eye(n)
    hl = h * L
    return eye + hl @ (eye + hl @ (eye + hl @ (eye + hl / 4.0) / 3.0) / 2.0)


def _as_generator(generator) -> np.ndarray:
    L = np.array(generator, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise InvalidParameterError(f"generator must be square, got shape {L.shape}")
    return L


def evolve(generator, initial=None, times=(0.0, 1.0), gamma_plus: float = 1.0,
           tol: float = 1e-12) -> Trajectory:
    """Integrate the populations over a grid of dimensionless times.

    Parameters
    ----------
    generator : array_like or RateMatrix
        Column-conserving rate matrix ``L``.
    initial : array_like, optional
        Population vector at ``times[0]``.  Defaults to the ground state
        (last basis entry).
    times : sequence of float
        Strictly increasing output times in units of ``t * gamma_plus``.
    gamma_plus : float
        Bright-state width converting the grid to physical time.
    tol : float
        Local error bound for the step-doubling estimate.

    The step is capped at ``0.05 / max|diag L|`` and halved until the
    difference between one full step and two half steps is below ``tol`` and
    the per-step change of the total probability is below ``1e-12``.
    """
    L = _as_generator(generator)
    n = L.shape[0]
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise InvalidParameterError("times must be a nonempty 1-d sequence")
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise InvalidParameterError("times must be strictly increasing and start at >= 0")
    if not gamma_plus > 0:
        raise InvalidParameterError(f"gamma_plus must be > 0, got {gamma_plus!r}")
    if initial is None:
        y = np.zeros(n)
        y[-1] = 1.0
    else:
        y = np.array(initial, dtype=float)
        if y.shape != (n,):
            raise InvalidParameterError(f"initial state must have shape ({n},)")
        if abs(y.sum() - 1.0) > TRACE_TOL or y.min() < -POSITIVITY_TOL:
            raise InvalidParameterError("initial state must be a probability vector")

    rate_max = float(np.max(np.abs(np.diag(L)))) if n else 0.0
    h_cap = 0.05 / rate_max if rate_max > 0 else math.inf
    cache = {}

    def pair(h):
        if h not in cache:
            half = _rk4_propagator(L, 0.5 * h)
            cache[h] = (_rk4_propagator(L, h), half @ half)
        return cache[h]

    out = np.empty((times.size, n))
    out[0] = y
    for k in range(1, times.size):
        span = (times[k] - times[k - 1]) / gamma_plus
        nsteps = max(1, math.ceil(span / h_cap))
        done = 0
        while done < nsteps:
            h = span / nsteps
            full, two_half = pair(h)
            coarse = full @ y
            fine = two_half @ y
            err = float(np.max(np.abs(fine - coarse))) / 15.0
            drift = abs(fine.sum() - y.sum())
            if err > tol or drift > STEP_DRIFT_TOL:
                if span / (2 * nsteps) < 1e-14 * max(1.0, span):
                    raise IntegrationError("step size underflow", time=float(times[k]))
                done *= 2
                nsteps *= 2
                continue
            y = fine
            done += 1
        total = y.sum()
        if abs(total - 1.0) > TRACE_TOL:
            raise IntegrationError(
                f"trace drifted to {total!r} at t*gamma_plus={times[k]!r}", time=float(times[k]))
        y = y / total
        if y.min() < -POSITIVITY_TOL:
            raise PositivityError(
                f"population {y.min()!r} < 0 at t*gamma_plus={times[k]!r}", time=float(times[k]))
        out[k] = y
    out.setflags(write=False)
    times = times.copy()
    times.setflags(write=False)
    return Trajectory(times=times, populations=out, generator=L, gamma_plus=float(gamma_plus))


def steady_state(generator) -> np.ndarray:
    """Unique stationary distribution of ``L``.

    One balance equation is replaced by the normalization ``sum(p) = 1`` and
    the square system solved by LU with partial pivoting.
    """
    L = _as_generator(generator)
    n = L.shape[0]
    sv = np.linalg.svd(L, compute_uv=False)
    if n > 1 and sv[-2] <= 1e-14 * max(sv[0], 1e-300):
        raise NonUniqueSteadyStateError(
            f"generator has more than one null direction (singular values {sv})")
    A = L.copy()
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        p = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise NonUniqueSteadyStateError(str(exc)) from exc
    # one round of iterative refinement
    p = p + np.linalg.solve(A, b - A @ p)
    norm = float(np.max(np.sum(np.abs(L), axis=1)))
    resid = float(np.max(np.abs(L @ p)))
    if resid > 1e-12 * norm:
        raise NumericError(f"steady-state residual {resid:.3e} exceeds 1e-12 * ||L||")
    if p.min() < -1e-10:
        raise NumericError(f"steady state has negative component {p.min()!r}")
    return p
