"""Command-line entry point: ``ringbattery {hybridize,evolve,steady,sweep}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .battery import Battery
from .config import BatteryConfig, default_config, parse_config
from .errors import BatteryError, ConfigError
from .io import plot_script, render_csv
from .sweep import AXES, OBSERVABLES, SweepSpec, resolve_figure, run_sweep
from .thermo import epoch_index, format_epochs, ordering_epochs

HYBRIDIZE_COLUMNS = ("n_ring", "e_plus", "e_minus", "gamma_plus_over_gamma",
                     "gamma_minus_over_gamma")
TRAJECTORY_COLUMNS = ("t_gamma_plus", "p_plus", "p_minus", "p_alpha", "p_beta", "p_g",
                      "e_c", "e_s", "e_l", "e_c_passive", "e_s_passive", "e_l_passive",
                      "ergotropy", "capacity", "flux", "work", "power", "epoch_index")


def _metadata(config: BatteryConfig, command: str, extra=()):
    lines = [f"ringbattery {__version__} {command}",
             f"config_hash = {config.config_hash()}",
             "non_paper_defaults = " + (",".join(config.non_paper_keys()) or "none")]
    lines += [f"config {line}" for line in config.echo()]
    lines += list(extra)
    return lines


def _observable_row(p, snap):
    row = {"p_plus": p[0], "p_minus": p[1], "p_alpha": p[2], "p_beta": p[3], "p_g": p[4]}
    for key in ("e_c", "e_s", "e_l", "e_c_passive", "e_s_passive", "e_l_passive",
                "ergotropy", "capacity", "flux", "work", "power"):
        row[key] = getattr(snap, key)
    return {k: float(v) for k, v in row.items()}


def cmd_hybridize(config):
    hyb = Battery.from_config(config).hybridized
    g = config.ring.gamma_pair
    row = {
        "n_ring": config.ring.n_ring,
        "e_plus": hyb.e_plus,
        "e_minus": hyb.e_minus,
        "gamma_plus_over_gamma": hyb.gamma_plus / g if g else math.nan,
        "gamma_minus_over_gamma": hyb.gamma_minus / g if g else math.nan,
    }
    return HYBRIDIZE_COLUMNS, [row], [], ("n_ring", ["gamma_plus_over_gamma",
                                                     "gamma_minus_over_gamma"])


def cmd_evolve(config):
    battery = Battery.from_config(config)
    traj = battery.evolve()
    snaps = battery.snapshots(traj)
    epochs = ordering_epochs(traj, battery.energies)
    idx = epoch_index(traj.times, epochs)
    rows = []
    for t, p, s, e in zip(traj.times, traj.populations, snaps, idx):
        row = {"t_gamma_plus": float(t)}
        row.update(_observable_row(p, s))
        row["epoch_index"] = int(e)
        rows.append(row)
    extra = [f"epoch {k}: {line}" for k, line in enumerate(format_epochs(epochs).splitlines())]
    return TRAJECTORY_COLUMNS, rows, extra, ("t_gamma_plus", ["ergotropy", "capacity"])


def cmd_steady(config):
    battery = Battery.from_config(config)
    p = battery.steady_state()
    row = {"t_gamma_plus": math.inf}
    row.update(_observable_row(p, battery.snapshot(p)))
    row["epoch_index"] = -1
    extra = [f"steady passive ordering: {battery.snapshot(p).ordering.format()}"]
    return TRAJECTORY_COLUMNS, [row], extra, None


def cmd_sweep(config, figure, jobs):
    spec = SweepSpec(figure=figure, base_config=config)
    result = run_sweep(spec, jobs=jobs)
    x = "t_gamma_plus" if spec.figure == "fig3_ratios" else "n_ring"
    ys = [f"{o}_norm" for o in OBSERVABLES[spec.figure]][:5]
    extra = [f"figure = {spec.figure}", f"axes = {','.join(AXES[spec.figure])}",
             f"baseline_n_ring = {spec.baseline_n_ring}"]
    return result.columns, list(result.rows), extra, (x, ys)


def build_parser():
    parser = argparse.ArgumentParser(prog="ringbattery", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("hybridize", "bright/dark energies and widths"),
                        ("evolve", "population trajectory and observables"),
                        ("steady", "steady-state observables"),
                        ("sweep", "figure dataset over ring size and coupling")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", type=Path, help="configuration file (defaults if omitted)")
        p.add_argument("--out", default="-", help="output CSV path, '-' for stdout")
        p.add_argument("--plot", action="store_true",
                       help="also write a gnuplot script next to the CSV")
        p.add_argument("--seedless", action="store_true",
                       help="accepted for compatibility; every computation is deterministic")
        if name == "sweep":
            p.add_argument("--figure", required=True,
                           choices=["fig2", "fig3", "fig4", "fig5",
                                    "fig2_decay", "fig3_ratios", "fig4_observables",
                                    "fig5_contours"])
            p.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def _fail(code, message, status):
    print(json.dumps({"error": code, "message": message}), file=sys.stderr)
    return status


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = parse_config(args.config) if args.config else default_config()
        if args.command == "hybridize":
            out = cmd_hybridize(config)
        elif args.command == "evolve":
            out = cmd_evolve(config)
        elif args.command == "steady":
            out = cmd_steady(config)
        else:
            out = cmd_sweep(config, resolve_figure(args.figure), max(1, args.jobs))
    except ConfigError as exc:
        return _fail(exc.code, str(exc), 2)
    except BatteryError as exc:
        return _fail(exc.code, str(exc), 1)

    columns, rows, extra, plot = out
    text = render_csv(columns, rows, _metadata(config, args.command, extra))
    try:
        if args.out == "-":
            sys.stdout.write(text)
        else:
            path = Path(args.out)
            path.write_text(text, encoding="utf-8")
            if args.plot and plot is not None:
                x, ys = plot
                path.with_suffix(".gp").write_text(plot_script(path.name, x, ys),
                                                   encoding="utf-8")
    except OSError as exc:
        return _fail("io", str(exc), 1)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
