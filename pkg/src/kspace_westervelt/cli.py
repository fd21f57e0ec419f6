"""Command-line driver: ``run``, ``validate`` and ``converge``."""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .analysis import dtft_amplitude, spectrum, write_snapshot, write_spectrum_csv, write_trace_csv
from .config import ConfigError, RunConfig, load_config, preset_names
from .solver import SimulationDiverged, UnstableConfiguration, run

OUTPUT_ENV = "KSPACE_WESTERVELT_OUTPUT"


def output_root(cli_value: str | None, config: RunConfig | None = None) -> Path:
    if cli_value:
        return Path(cli_value)
    if config is not None and config.output.directory:
        return Path(config.output.directory)
    return Path(os.environ.get(OUTPUT_ENV, "runs"))


def write_outputs(outputs, config: RunConfig, root: Path) -> Path:
    """Lay out one run directory: config echo, report, traces, spectra, snapshots."""
    run_dir = root / f"{config.name}-{config.config_hash()}"
    for sub in ("traces", "spectra", "snapshots"):
        (run_dir / sub).mkdir(parents=True, exist_ok=True)
    (run_dir / "config.json").write_text(json.dumps(config.to_dict(), indent=2) + "\n")
    (run_dir / "report.json").write_text(json.dumps(outputs.report, indent=2) + "\n")
    for name, trace in outputs.traces.items():
        write_trace_csv(run_dir / "traces" / f"{name}.csv", trace)
        if len(trace) >= 2:
            write_spectrum_csv(run_dir / "spectra" / f"{name}.csv", spectrum(trace))
    for snap in outputs.snapshots:
        if config.output.snapshot_format == "npy":
            np.save(run_dir / "snapshots" / f"step{snap.step:06d}.npy", snap.pressure)
        else:
            write_snapshot(run_dir / "snapshots" / f"step{snap.step:06d}.bin", snap)
    return run_dir


def cmd_run(args) -> int:
    try:
        config = load_config(args.config)
    except (ConfigError, KeyError) as exc:
        print(exc, file=sys.stderr)
        return 2
    root = output_root(args.output_dir, config)
    try:
        outputs = run(config)
    except UnstableConfiguration as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimulationDiverged as exc:
        run_dir = write_outputs(exc.outputs, config, root)
        print(f"error: {exc}; partial outputs in {run_dir}", file=sys.stderr)
        return 3
    run_dir = write_outputs(outputs, config, root)
    r = outputs.report
    print(f"{config.name}: {r['steps']} steps, dt = {r['dt']:.4g} s, CFL = {r['stability']['cfl']:.3g}, "
          f"wall {r['wall_time_s']:.2f} s -> {run_dir}")
    return 0


def cmd_validate(args) -> int:
    from .validation import run_checks

    results = run_checks(args.filter, include_slow=args.slow)
    if not results:
        print("no checks matched", file=sys.stderr)
        return 2
    for res in results:
        print(res.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


# -- convergence sweeps ---------------------------------------------------------

def sweep_config(config: RunConfig, axis: str, value: float) -> RunConfig:
    cfg = copy.deepcopy(config)
    if axis == "cfl":
        cfg.solver.cfl, cfg.solver.dt = value, None
    elif axis == "dx":
        extent = [n * h for n, h in zip(cfg.grid.n, cfg.grid.dx)]
        cfg.grid.n = [int(round(e / value)) for e in extent]
        cfg.grid.dx = [float(value)] * len(extent)
        if cfg.absorber.enabled:
            # keep the layer's physical width
            cfg.absorber.thickness = int(round(cfg.absorber.thickness * config.grid.dx[0] / value))
    else:
        raise ValueError(f"unknown sweep axis {axis!r}")
    cfg.name = f"{config.name}-{axis}{value:g}"
    return cfg


def _run_point(cfg: RunConfig):
    out = run(cfg)
    return out.traces, out.report


def band_limit(config: RunConfig, axis: str, value: float) -> float:
    """Highest frequency the run can represent: c_min / (2 dx)."""
    cfg = sweep_config(config, axis, value) if axis == "dx" else config
    c_min = float(cfg.build_medium().c.min())
    return c_min / (2 * max(cfg.grid.dx))


def converge_table(config: RunConfig, axis: str, values, threads: int = 1, floor_db: float = -40.0) -> list[dict]:
    """Run a sweep and compare each point with the finest one.

    Finest means smallest dx (or CFL). Spectra are compared on a common
    frequency axis by the continuous-time Fourier amplitude, restricted to
    each run's band c_min / (2 dx) and to bins within ``floor_db`` of the
    finest spectrum's peak. Harmonic rows list n*f0 strictly inside the band.
    """
    values = sorted(float(v) for v in values)
    cfgs = [sweep_config(config, axis, v) for v in values]
    if threads > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_point, cfgs))
    else:
        results = [_run_point(c) for c in cfgs]
    finest_traces = results[0][0]
    f0 = config.source.f0 if config.source is not None else None
    fmax = band_limit(config, "dx", min(config.grid.dx) if axis == "cfl" else values[0])
    freqs = np.linspace(fmax / 400, fmax, 400)
    ref_spec = {n: dtft_amplitude(t.samples, t.dt, freqs) for n, t in finest_traces.items()}
    rows = []
    for v, cfg, (traces, report) in zip(values, cfgs, results):
        band = band_limit(config, axis, v) if axis == "dx" else fmax
        row = {axis: v, "dt": report["dt"], "steps": report["steps"], "wall_time_s": report["wall_time_s"],
               "band_hz": band, "probes": {}}
        for name, tr in traces.items():
            spec = dtft_amplitude(tr.samples, tr.dt, freqs)
            ref = ref_spec[name]
            keep = (freqs < band) & (ref > ref.max() * 10 ** (floor_db / 20))
            dev = np.abs(20 * np.log10(spec[keep] / ref[keep])) if keep.any() else np.array([0.0])
            entry = {"max_band_db": float(dev.max())}
            if f0 is not None:
                harm = [k * f0 for k in range(1, int(band // f0) + 2) if k * f0 < band]
                a = dtft_amplitude(tr.samples, tr.dt, harm)
                b = dtft_amplitude(finest_traces[name].samples, finest_traces[name].dt, harm)
                entry["harmonics_db"] = [float(x) for x in 20 * np.log10(a / b)]
            row["probes"][name] = entry
        rows.append(row)
    return rows


def cmd_converge(args) -> int:
    try:
        config = load_config(args.config)
    except (ConfigError, KeyError) as exc:
        print(exc, file=sys.stderr)
        return 2
    rows = converge_table(config, args.axis, args.values, threads=args.threads)
    root = output_root(args.output_dir, config)
    root.mkdir(parents=True, exist_ok=True)
    path = root / f"{config.name}-{config.config_hash()}-converge-{args.axis}.json"
    path.write_text(json.dumps(rows, indent=2) + "\n")
    print(f"{args.axis:>10} {'band MHz':>9} {'steps':>7} {'wall s':>7}  probe: max |dB| in band, harmonics dB")
    for row in rows:
        for name, e in row["probes"].items():
            harm = " ".join(f"{x:+.3f}" for x in e.get("harmonics_db", []))
            print(f"{row[args.axis]:>10.4g} {row['band_hz'] / 1e6:>9.3f} {row['steps']:>7d} "
                  f"{row['wall_time_s']:>7.2f}  {name}: {e['max_band_db']:.3f} | {harm}")
    print(f"table written to {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kspace-westervelt", description=__doc__)
    parser.add_argument("--output-dir", help=f"output root (default: ${OUTPUT_ENV} or ./runs)")
    parser.add_argument("--threads", type=int, default=1, help="parallel sweep points (converge only)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one configuration")
    p.add_argument("config", help="JSON config path or bundled preset name")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="run the oracle-backed acceptance checks")
    p.add_argument("--filter", help="only checks whose name contains this text")
    p.add_argument("--slow", action="store_true", help="include the 2D FDTD comparison (tens of minutes)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("converge", help="dx or CFL sweep against the finest run")
    p.add_argument("config")
    p.add_argument("--axis", choices=("dx", "cfl"), required=True)
    p.add_argument("--values", type=float, nargs="+", required=True)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("presets", help="list bundled presets")
    p.set_defaults(func=lambda a: print("\n".join(preset_names())) or 0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    # accept global options after the subcommand too
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_hoist_globals(argv))
    return args.func(args)


def _hoist_globals(argv: list[str]) -> list[str]:
    front, rest, i = [], [], 0
    while i < len(argv):
        a = argv[i]
        if a in ("--output-dir", "--threads") and i + 1 < len(argv):
            front += [a, argv[i + 1]]
            i += 2
        elif a.startswith(("--output-dir=", "--threads=")):
            front.append(a)
            i += 1
        else:
            rest.append(a)
            i += 1
    return front + rest


if __name__ == "__main__":
    sys.exit(main())
