"""Command-line front end: ``terrainlink {sweep,run,fade}``.

Exit codes: 0 success, 1 usage error, 2 domain/range error, 3 I/O error.
Output files are written atomically; a failed command leaves none behind.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, read_config
from .errors import ConfigError, SimulationError, TerrainLinkError
from .fading import envelope_process, dump_envelope
from .linksim import Model, dump_records, dump_stats, path_loss, run_link_simulation
from .terrain import SPEED_OF_LIGHT

log = logging.getLogger("terrainlink")

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3
SWEEP_HEADER = ("distance_m", "loss_db", "mode")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(parser):
    parser.add_argument("--config", metavar="FILE", help="scenario config file")
    parser.add_argument("--model", choices=[m.value for m in Model])
    parser.add_argument("--profile", metavar="FILE", help="elevation CSV (distance_m,elevation_m)")
    parser.add_argument("--tx-height", type=float, metavar="M")
    parser.add_argument("--rx-height", type=float, metavar="M")
    parser.add_argument("--freq-mhz", type=float, metavar="F")
    parser.add_argument("--seed", type=int, metavar="N")
    parser.add_argument("--out", metavar="FILE", default="-", help="output CSV ('-' for stdout)")
    parser.add_argument("--plot", metavar="FILE", help="also render a figure to FILE")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="terrainlink", description="Terrain-aware radio link toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sweep = sub.add_parser("sweep", help="attenuation versus distance")
    _common(sweep)
    sweep.add_argument("--d-min", type=float, required=True, metavar="M")
    sweep.add_argument("--d-max", type=float, required=True, metavar="M")
    sweep.add_argument("--n-points", type=int, default=100, metavar="N")
    sweep.add_argument("--log", action="store_true", help="logarithmic distance spacing")

    run = sub.add_parser("run", help="packet-level link simulation")
    _common(run)
    run.add_argument("--distance", type=float, metavar="M")
    run.add_argument("--tx-power", type=float, metavar="W")
    run.add_argument("--stats", metavar="FILE", help="stats CSV (default: <out>_stats.csv)")

    fade = sub.add_parser("fade", help="Rician fading power envelope trace")
    _common(fade)
    fade.add_argument("--k-factor", type=float)
    fade.add_argument("--sigma", type=float)
    fade.add_argument("--max-velocity", type=float, metavar="M/S")
    fade.add_argument("--offset", type=int, help="envelope table offset (samples)")
    fade.add_argument("--wavelength", type=float, metavar="M", help="overrides --freq-mhz")
    fade.add_argument("--dt", type=float, default=1e-3, metavar="S")
    fade.add_argument("--n", type=int, default=10000)
    fade.add_argument("--oscillators", type=int)
    return parser


def _load_config(args) -> ScenarioConfig:
    cfg = read_config(args.config) if args.config else ScenarioConfig()
    cfg.set("model", args.model)
    if args.profile is not None:
        cfg.set("profile", str(Path(args.profile).resolve()))
    cfg.set("link.tx_height_m", args.tx_height)
    cfg.set("link.rx_height_m", args.rx_height)
    cfg.set("link.frequency_mhz", args.freq_mhz)
    cfg.set("seed", args.seed)
    return cfg


def _write_outputs(outputs: dict):
    """Write ``{path: text}`` atomically; ``'-'`` goes to stdout."""
    staged = []
    try:
        for path, text in outputs.items():
            if path == "-":
                continue
            target = Path(path)
            fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
            staged.append((tmp, target))
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        for tmp, target in staged:
            os.replace(tmp, target)
    except BaseException:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise
    for path, text in outputs.items():
        if path == "-":
            sys.stdout.write(text)


def _plot_then(outputs: dict, plot_path, render):
    """Render the figure to a temp file and publish it together with the CSVs."""
    if not plot_path:
        _write_outputs(outputs)
        return
    target = Path(plot_path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.stem}.", suffix=target.suffix)
    os.close(fd)
    try:
        render(tmp)
        _write_outputs(outputs)
        os.replace(tmp, target)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def cmd_sweep(args) -> int:
    if args.n_points < 2:
        raise UsageError("--n-points must be at least 2")
    if not 0 < args.d_min < args.d_max:
        raise UsageError("need 0 < --d-min < --d-max")
    cfg = _load_config(args)
    scenario = cfg.scenario(need_radio=False)
    if args.log:
        grid = np.geomspace(args.d_min, args.d_max, args.n_points)
    else:
        grid = np.linspace(args.d_min, args.d_max, args.n_points)

    profile = scenario.profile
    if scenario.model is Model.TIREM and args.d_max > profile.path_length_m:
        raise UsageError(
            f"--d-max {args.d_max} m exceeds profile length {profile.path_length_m} m"
        )

    rows = [",".join(SWEEP_HEADER)]
    losses = []
    for d in grid:
        d = float(d)
        geom = cfg.geometry(d)
        sub_profile = profile.truncated(d) if scenario.model is Model.TIREM else None
        breakdown = path_loss(scenario, geom, sub_profile)
        losses.append(breakdown.total_dB)
        rows.append(f"{d!r},{breakdown.total_dB!r},{breakdown.mode.value}")
    text = "\n".join(rows) + "\n"

    def render(path):
        from .plots import attenuation_figure
        attenuation_figure(grid, losses, scenario.model.value, path, log_x=args.log)

    _plot_then({args.out: text}, args.plot, render)
    return EXIT_OK


def cmd_run(args) -> int:
    if args.out == "-":
        raise UsageError("run needs --out FILE (it writes two CSVs)")
    cfg = _load_config(args)
    cfg.set("link.distance_m", args.distance)
    cfg.set("radio.tx_power_w", args.tx_power)
    scenario = cfg.scenario()
    stats = run_link_simulation(scenario, seed=cfg.seed)
    out = Path(args.out)
    stats_path = args.stats or str(out.with_name(out.stem + "_stats.csv"))
    log.info("sent %d, received %d, dropped %d", stats.packets_sent,
             stats.packets_received, stats.packets_dropped)

    def render(path):
        from .plots import link_figure
        link_figure(stats, path)

    _plot_then({args.out: dump_records(stats), stats_path: dump_stats(stats)}, args.plot, render)
    return EXIT_OK


def cmd_fade(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    if not args.dt > 0:
        raise UsageError("--dt must be positive")
    cfg = _load_config(args)
    cfg.set("fading.k_factor", args.k_factor)
    cfg.set("fading.sigma", args.sigma)
    cfg.set("fading.max_velocity_m_per_s", args.max_velocity)
    cfg.set("fading.table_offset", args.offset)
    cfg.set("fading.oscillators", args.oscillators)
    params = cfg.rician()
    wavelength = args.wavelength or SPEED_OF_LIGHT / (cfg.frequency_mhz() * 1e6)
    trace = envelope_process(params, wavelength, args.dt, args.n, seed=cfg.seed,
                             n_oscillators=cfg.get("fading.oscillators", 16))

    def render(path):
        from .plots import envelope_figure
        envelope_figure(trace, path)

    _plot_then({args.out: dump_envelope(trace)}, args.plot, render)
    return EXIT_OK


COMMANDS = {"sweep": cmd_sweep, "run": cmd_run, "fade": cmd_fade}


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, SimulationError):
        exc = exc.cause
    if isinstance(exc, (UsageError, ConfigError)):
        return EXIT_USAGE
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_DOMAIN


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, TerrainLinkError, OSError) as exc:
        if isinstance(exc, OSError) and exc.filename:
            message = f"{exc.strerror or exc}: {exc.filename}"
        else:
            message = str(exc)
        print(f"error: {message}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
