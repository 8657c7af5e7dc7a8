"""Collective ring modes and the bright/dark hybridized pair.

A ring of ``n_ring`` identical emitters with uniform pairwise couplings
``omega_pair - 1j * gamma_pair / 2`` is diagonalized by plane waves.  The
subradiant ring mode then hybridizes with a central emitter through a
``sqrt(n_ring)``-enhanced coupling, giving a 2x2 non-Hermitian problem whose
eigenvalues carry the energies (real part) and widths (``-2 * imag``) of the
bright ``|+>`` and dark ``|->`` states.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    InvalidGeometryError,
    InvalidParameterError,
    ModeIndexError,
    NonphysicalGainWarning,
    NumericError,
)

GAMMA0_RULES = ("explicit", "half_collective_magnitude", "half_collective_signed")
DIAGONAL_CONVENTIONS = ("exclude_diagonal", "include_uniform_diagonal", "self_decay_diagonal")
RING_WIDTH_RULES = ("magnitude", "signed")


@dataclass(frozen=True)
class RingParams:
    """Geometry and couplings of the ring plus central emitter.

    ``ring_width_rule`` controls the width entered on the ring diagonal of the
    effective Hamiltonian: ``"magnitude"`` uses ``|gamma_tilde|`` so that a
    collective mode never acts as a gain medium, ``"signed"`` uses the raw
    ``-2 * Im(zeta)``.
    """

    n_ring: int = 4
    omega_pair: float = 0.5
    gamma_pair: float = 0.8
    delta: float = 0.5
    j_d: float = 2.0
    gamma_d: float = 0.0002
    gamma0_rule: str = "half_collective_magnitude"
    gamma0: float | None = None
    diagonal_convention: str = "exclude_diagonal"
    ring_width_rule: str = "magnitude"

    def __post_init__(self):
        if isinstance(self.n_ring, bool) or int(self.n_ring) != self.n_ring:
            raise InvalidGeometryError(f"n_ring must be an integer, got {self.n_ring!r}")
        if self.n_ring < 3:
            raise InvalidGeometryError(f"n_ring must be >= 3, got {self.n_ring}")
        for name in ("omega_pair", "gamma_pair", "delta", "j_d", "gamma_d"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        if self.gamma_pair < 0:
            raise InvalidParameterError(f"gamma_pair must be >= 0, got {self.gamma_pair}")
        if self.gamma_d < 0:
            raise InvalidParameterError(f"gamma_d must be >= 0, got {self.gamma_d}")
        if self.gamma0_rule not in GAMMA0_RULES:
            raise InvalidParameterError(f"unknown gamma0_rule {self.gamma0_rule!r}")
        if self.gamma0_rule == "explicit":
            if self.gamma0 is None or not math.isfinite(self.gamma0) or self.gamma0 < 0:
                raise InvalidParameterError(
                    f"explicit gamma0 must be a finite value >= 0, got {self.gamma0!r}")
        if self.diagonal_convention not in DIAGONAL_CONVENTIONS:
            raise InvalidParameterError(
                f"unknown diagonal_convention {self.diagonal_convention!r}")
        if self.ring_width_rule not in RING_WIDTH_RULES:
            raise InvalidParameterError(f"unknown ring_width_rule {self.ring_width_rule!r}")

    def with_(self, **changes) -> "RingParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class CollectiveMode:
    m: int
    zeta: complex

    @property
    def j_tilde(self) -> float:
        return self.zeta.real

    @property
    def gamma_tilde(self) -> float:
        return -2.0 * self.zeta.imag


@dataclass(frozen=True)
class HybridizedStates:
    """The two eigenvalues, stored so that ``e_plus = Re(lambda_minus)``.

    The bright state is always the one with the larger width;
    :func:`_label_by_width` swaps the pair when the root ordering disagrees.
    """

    lambda_plus: complex
    lambda_minus: complex
    gamma0: float
    notes: tuple[str, ...] = field(default=())

    @property
    def e_plus(self) -> float:
        return self.lambda_minus.real

    @property
    def e_minus(self) -> float:
        return self.lambda_plus.real

    @property
    def gamma_plus(self) -> float:
        return -2.0 * self.lambda_minus.imag

    @property
    def gamma_minus(self) -> float:
        return -2.0 * self.lambda_plus.imag

    def eigenvalues(self) -> tuple[complex, complex]:
        return (self.lambda_plus, self.lambda_minus)


def subradiant_mode_index(n_ring: int) -> int:
    """Mode index of the subradiant ring mode: ``N/2`` (even) or ``(N-1)/2`` (odd)."""
    if n_ring < 3:
        raise InvalidGeometryError(f"n_ring must be >= 3, got {n_ring}")
    return n_ring // 2


def collective_eigenvalue(params: RingParams, m: int | None = None) -> CollectiveMode:
    """Plane-wave eigenvalue ``zeta_m`` of the isolated uniform ring.

    The double sum over emitter pairs is evaluated in closed form.  With
    ``theta = 2 pi m / N`` the full phase sum ``sum_{j,l} exp(i theta (l-j))``
    equals ``N**2`` when ``m = 0 (mod N)`` and zero otherwise, so the pair sum
    (``j != l``) is that value minus ``N``.
    """
    n = params.n_ring
    if m is None:
        m = subradiant_mode_index(n)
    if not 0 <= m < n:
        raise ModeIndexError(f"mode index {m} outside [0, {n})")
    coupling = complex(params.omega_pair, -0.5 * params.gamma_pair)
    full = float(n * n) if m % n == 0 else 0.0
    off_diagonal = full - n
    conv = params.diagonal_convention
    if conv == "exclude_diagonal":
        zeta = off_diagonal * coupling / n
    elif conv == "include_uniform_diagonal":
        zeta = full * coupling / n
    else:
        zeta = (off_diagonal * coupling + n * complex(0.0, -0.5 * params.gamma_pair)) / n
    return CollectiveMode(m=m, zeta=complex(zeta))


def resolve_gamma0(rule: str, mode: CollectiveMode, value: float | None = None) -> float:
    """Decay rate of the central emitter under ``rule``."""
    if rule == "explicit":
        if value is None or not math.isfinite(value) or value < 0:
            raise InvalidParameterError(f"explicit gamma0 must be finite and >= 0, got {value!r}")
        return float(value)
    if rule == "half_collective_magnitude":
        return 0.5 * abs(mode.gamma_tilde)
    if rule == "half_collective_signed":
        g0 = 0.5 * mode.gamma_tilde
        if g0 < 0:
            warnings.warn(NonphysicalGainWarning(
                f"gamma0 = {g0!r} < 0 from half_collective_signed (nonphysical gain)"),
                stacklevel=2)
        return g0
    raise InvalidParameterError(f"unknown gamma0_rule {rule!r}")


def _ring_width(params: RingParams, mode: CollectiveMode) -> float:
    if params.ring_width_rule == "magnitude":
        return abs(mode.gamma_tilde)
    return mode.gamma_tilde


def _resolve(params, mode):
    if mode is None:
        mode = collective_eigenvalue(params)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        g0 = resolve_gamma0(params.gamma0_rule, mode, params.gamma0)
    notes = tuple(str(w.message) for w in caught)
    for w in caught:
        warnings.warn(w.message, stacklevel=3)
    return mode, g0, notes


def _label_by_width(lam_plus, lam_minus, gamma0, notes):
    for lam in (lam_plus, lam_minus):
        if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
            raise NumericError("non-finite hybridized eigenvalue")
    # bright = lambda_minus carries the larger width -2*Im
    if -2.0 * lam_minus.imag < -2.0 * lam_plus.imag:
        lam_plus, lam_minus = lam_minus, lam_plus
    return HybridizedStates(lam_plus, lam_minus, gamma0, notes)


def hybridize_formula(params: RingParams, mode: CollectiveMode | None = None) -> HybridizedStates:
    """Bright/dark eigenvalues from the closed-form root expression.

    ``lambda_pm = 1/2 [ (J - D - i/2 (G + G0)) -/+ sqrt( (J + D - i/2 (G - G0))**2
    + 4 N (Jd - i/2 Gd)**2 ) ]`` with the principal complex square root,
    where ``J, G`` are the ring shift and width and ``D`` the detuning.  This
    matches the explicit 2x2 matrix with ``-D`` on the central diagonal.
    """
    mode, g0, notes = _resolve(params, mode)
    jt = mode.j_tilde
    gt = _ring_width(params, mode)
    d = params.delta
    n = params.n_ring
    centre = complex(jt - d, -0.5 * (gt + g0))
    split = complex(jt + d, -0.5 * (gt - g0))
    coupling = complex(params.j_d, -0.5 * params.gamma_d)
    root = cmath.sqrt(split * split + 4.0 * n * coupling * coupling)
    return _label_by_width(0.5 * (centre - root), 0.5 * (centre + root), g0, notes)


def effective_matrix(params: RingParams, mode: CollectiveMode | None = None,
                     central_sign: float = 1.0) -> np.ndarray:
    """Explicit 2x2 non-Hermitian matrix in the (central, ring-mode) basis.

    ``central_sign=-1`` puts ``-delta`` on the central diagonal, the form in
    which it coincides with :func:`hybridize_formula`.
    """
    mode, g0, _ = _resolve(params, mode)
    off = math.sqrt(params.n_ring) * complex(params.j_d, -0.5 * params.gamma_d)
    return np.array([
        [complex(central_sign * params.delta, -0.5 * g0), off],
        [off, complex(mode.j_tilde, -0.5 * _ring_width(params, mode))],
    ])


def eigvals_2x2(a: complex, b: complex, c: complex, d: complex) -> tuple[complex, complex]:
    """Eigenvalues of ``[[a, b], [c, d]]`` from the characteristic quadratic."""
    half_trace = 0.5 * (a + d)
    half_gap = 0.5 * (a - d)
    disc = cmath.sqrt(half_gap * half_gap + b * c)
    return half_trace - disc, half_trace + disc


def hybridize_eigensolve(params: RingParams, mode: CollectiveMode | None = None,
                         central_sign: float = 1.0) -> HybridizedStates:
    """Bright/dark eigenvalues by diagonalizing :func:`effective_matrix` directly."""
    mode, g0, notes = _resolve(params, mode)
    h = effective_matrix(params, mode, central_sign)
    lo, hi = eigvals_2x2(complex(h[0, 0]), complex(h[0, 1]), complex(h[1, 0]), complex(h[1, 1]))
    return _label_by_width(lo, hi, g0, notes)


def hybridize(params: RingParams, method: str = "formula") -> HybridizedStates:
    if method == "formula":
        return hybridize_formula(params)
    if method == "eigensolve":
        return hybridize_eigensolve(params)
    raise InvalidParameterError(f"unknown hybridization method {method!r}")
