"""Parameter sweeps behind the ring-size and coupling figures.

Each ``(n_ring, j_d)`` point runs the full chain independently: a failing
point becomes a row with an error code instead of aborting the sweep.  Rows
are always sorted by their axis values, so serial and parallel execution
produce identical results.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .battery import Battery
from .config import BatteryConfig
from .errors import BatteryError, InvalidParameterError, NormalizationError

FIGURES = ("fig2_decay", "fig3_ratios", "fig4_observables", "fig5_contours")
FIGURE_ALIASES = {"fig2": "fig2_decay", "fig3": "fig3_ratios",
                  "fig4": "fig4_observables", "fig5": "fig5_contours"}

AXES = {
    "fig2_decay": ("n_ring",),
    "fig3_ratios": ("n_ring", "j_d", "t_gamma_plus"),
    "fig4_observables": ("n_ring",),
    "fig5_contours": ("n_ring", "j_d"),
}

RATIOS = ("hs_hc", "hl_hs", "hs_hc_passive", "hl_hs_passive")
STEADY_OBSERVABLES = ("ergotropy", "work", "flux", "power", "capacity")

OBSERVABLES = {
    "fig2_decay": ("e_plus", "e_minus", "gamma_plus", "gamma_minus",
                   "gamma_plus_over_gamma", "gamma_minus_over_gamma"),
    "fig3_ratios": RATIOS + tuple(f"steady_{r}" for r in RATIOS),
    "fig4_observables": STEADY_OBSERVABLES,
    "fig5_contours": STEADY_OBSERVABLES + ("capacity_over_ergotropy",),
}

# reported for comparison only; not asserted anywhere
REFERENCE_PEAK_N_RING = {"ergotropy": 15, "work": 11, "flux": 7, "power": 9}


def resolve_figure(name: str) -> str:
    name = FIGURE_ALIASES.get(name, name)
    if name not in FIGURES:
        raise InvalidParameterError(f"unknown figure {name!r}")
    return name


@dataclass(frozen=True)
class SweepSpec:
    figure: str
    base_config: BatteryConfig
    n_ring_values: tuple[int, ...] | None = None
    j_d_values: tuple[float, ...] | None = None
    time_grid: tuple[float, ...] | None = None
    baseline_n_ring: int | None = None
    normalize: bool = True

    def __post_init__(self):
        object.__setattr__(self, "figure", resolve_figure(self.figure))
        cfg = self.base_config
        if self.n_ring_values is None:
            object.__setattr__(self, "n_ring_values", tuple(cfg.n_ring_values))
        if self.j_d_values is None:
            if self.figure in ("fig3_ratios", "fig5_contours"):
                object.__setattr__(self, "j_d_values", tuple(cfg.j_d_values))
            else:
                object.__setattr__(self, "j_d_values", (cfg.ring.j_d,))
        if self.time_grid is None:
            object.__setattr__(self, "time_grid", tuple(float(t) for t in cfg.time_grid()))
        if self.baseline_n_ring is None:
            object.__setattr__(self, "baseline_n_ring", cfg.baseline_n_ring)
        object.__setattr__(self, "n_ring_values", tuple(sorted(set(int(n) for n in self.n_ring_values))))
        object.__setattr__(self, "j_d_values", tuple(sorted(set(float(j) for j in self.j_d_values))))
        if not self.n_ring_values or not self.j_d_values or not self.time_grid:
            raise InvalidParameterError("sweep axes must be nonempty")
        if self.normalize and self.baseline_n_ring not in self.n_ring_values:
            raise InvalidParameterError(
                f"baseline n_ring={self.baseline_n_ring} is not among the swept ring sizes")

    @property
    def axes(self) -> tuple[str, ...]:
        return AXES[self.figure]

    def points(self) -> list[tuple[int, float]]:
        return [(n, j) for n in self.n_ring_values for j in self.j_d_values]


@dataclass(frozen=True)
class SweepResult:
    figure: str
    columns: tuple[str, ...]
    rows: tuple[dict, ...]
    provenance: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.rows], dtype=float)

    def where(self, **axes) -> "SweepResult":
        rows = tuple(r for r in self.rows if all(r[k] == v for k, v in axes.items()))
        return SweepResult(self.figure, self.columns, rows, self.provenance)


def _ratio(a, b):
    return a / b if b != 0 else math.nan


def _ratios(s):
    return {
        "hs_hc": _ratio(s.e_s, s.e_c),
        "hl_hs": _ratio(s.e_l, s.e_s),
        "hs_hc_passive": _ratio(s.e_s_passive, s.e_c_passive),
        "hl_hs_passive": _ratio(s.e_l_passive, s.e_s_passive),
    }


def evaluate_point(figure: str, config: BatteryConfig, times) -> list[dict]:
    """Observables of one sweep point; one dict per time for the ratio figure."""
    battery = Battery.from_config(config)
    hyb = battery.hybridized
    if figure == "fig2_decay":
        g = config.ring.gamma_pair
        return [{
            "e_plus": hyb.e_plus,
            "e_minus": hyb.e_minus,
            "gamma_plus": hyb.gamma_plus,
            "gamma_minus": hyb.gamma_minus,
            "gamma_plus_over_gamma": _ratio(hyb.gamma_plus, g),
            "gamma_minus_over_gamma": _ratio(hyb.gamma_minus, g),
        }]
    steady = battery.steady_snapshot()
    if figure == "fig3_ratios":
        traj = battery.evolve(times)
        steady_r = {f"steady_{k}": v for k, v in _ratios(steady).items()}
        return [dict(_ratios(s), **steady_r) for s in battery.snapshots(traj)]
    out = {k: getattr(steady, k) for k in STEADY_OBSERVABLES}
    if figure == "fig5_contours":
        out["capacity_over_ergotropy"] = _ratio(steady.capacity, steady.ergotropy)
    return [out]


def _run_point(args):
    figure, config, n_ring, j_d, times = args
    point = config.with_ring(n_ring=n_ring, j_d=j_d)
    try:
        return n_ring, j_d, evaluate_point(figure, point, times), ""
    except BatteryError as exc:
        return n_ring, j_d, None, exc.code


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Evaluate every sweep point and assemble sorted, baseline-normalized rows."""
    times = np.asarray(spec.time_grid, dtype=float)
    tasks = [(spec.figure, spec.base_config, n, j, times) for n, j in spec.points()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_point, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_run_point(t) for t in tasks]
    if all(r[2] is None for r in results):
        codes = sorted({r[3] for r in results})
        raise BatteryError(f"every sweep point failed ({', '.join(codes)})")

    cfg = spec.base_config
    chash = cfg.config_hash()
    non_paper = int(bool(cfg.non_paper_keys()))
    observables = OBSERVABLES[spec.figure]
    rows = []
    for n, j, values, code in sorted(results, key=lambda r: (r[0], r[1])):
        per_time = spec.figure == "fig3_ratios"
        count = len(times) if per_time else 1
        for k in range(count):
            row = {"n_ring": n, "j_d": j}
            if per_time:
                row["t_gamma_plus"] = float(times[k])
            obs = values[k] if values is not None else {}
            for name in observables:
                row[name] = float(obs.get(name, math.nan))
            row["error"] = code
            row["non_paper_defaults"] = non_paper
            row["config_hash"] = chash
            rows.append(row)
    columns = ("n_ring", "j_d") + (("t_gamma_plus",) if spec.figure == "fig3_ratios" else ()) \
        + observables + ("error", "non_paper_defaults", "config_hash")
    result = SweepResult(
        figure=spec.figure,
        columns=columns,
        rows=tuple(rows),
        provenance={"config_hash": chash, "resolved": cfg.resolved(),
                    "non_paper_keys": cfg.non_paper_keys(), "axes": spec.axes},
    )
    if spec.normalize:
        result = normalize_to_baseline(result, spec.baseline_n_ring)
    return result


def normalize_to_baseline(result: SweepResult, baseline_n_ring: int = 3) -> SweepResult:
    """Add ``<observable>_norm`` columns relative to the ``baseline_n_ring`` row.

    The baseline is taken with every other axis held fixed.  A zero or
    undefined baseline makes the normalized cell NaN and lists the column in
    ``norm_undefined``.
    """
    observables = OBSERVABLES[result.figure]
    others = [a for a in AXES[result.figure] if a != "n_ring"]
    if result.figure in ("fig2_decay", "fig4_observables"):
        others = ["j_d"]
    baseline = {}
    for r in result.rows:
        if r["n_ring"] == baseline_n_ring:
            baseline[tuple(r[a] for a in others)] = r
    rows = []
    for r in result.rows:
        key = tuple(r[a] for a in others)
        if key not in baseline:
            combo = ", ".join(f"{a}={v!r}" for a, v in zip(others, key))
            raise NormalizationError(f"no n_ring={baseline_n_ring} baseline row for {combo}")
        base = baseline[key]
        new = dict(r)
        undefined = []
        for name in observables:
            b = base[name]
            if b == 0 or not math.isfinite(b):
                new[f"{name}_norm"] = math.nan
                undefined.append(name)
            else:
                new[f"{name}_norm"] = r[name] / b
        new["norm_undefined"] = ";".join(undefined)
        rows.append(new)
    head = [c for c in result.columns if c not in ("error", "non_paper_defaults", "config_hash")]
    columns = tuple(head) + tuple(f"{o}_norm" for o in observables) \
        + ("norm_undefined", "error", "non_paper_defaults", "config_hash")
    return SweepResult(result.figure, columns, tuple(rows), result.provenance)
