"""Command-line front end.

Usage::

    ptssh <command> --config experiment.ini [--out DIR] [--emit csv,json]
                    [--threads N]

Commands: spectrum, edge-states, band-sweep, quench, scatter-sweep, and
full-suite (a preset that runs the other experiments into one tree).

Exit codes: 0 on success, 1 when the configuration is invalid (nothing
is written), 2 when the computation fails partway (whatever was already
emitted stays on disk and ``report.json`` records the failure).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict, replace

from . import emit
from .config import (
    COMMANDS,
    ConfigError,
    EMIT_FORMATS,
    ExperimentConfig,
    PRESET_COMMAND,
    parse_config,
)
from . import dynamics
from .dynamics import QuenchProtocol
from .lattice import build_hamiltonian
from .scatter import default_energy_grid, reflection_sweep
from .spectral import (
    band_sweep,
    decompose,
    edge_overlap,
    find_edge_states,
)


def _chain_params(spec) -> dict:
    return asdict(spec)


def _emit_set(config: ExperimentConfig) -> set:
    return set(config.emit)


def _quench_protocols(config: ExperimentConfig) -> list[QuenchProtocol]:
    """Build the protocol for each requested initial side."""
    pre = config.chain
    post = pre.with_v(config.quench.v_post)
    sides = (["left", "right"] if config.quench.initial_side == "both"
             else [config.quench.initial_side])
    return [QuenchProtocol(pre_spec=pre, post_spec=post, initial_side=s,
                           t_max=config.quench.t_max,
                           n_time_steps=config.quench.n_time_steps)
            for s in sides]


def validate_inputs(config: ExperimentConfig) -> None:
    """Construct every domain object the command will need.

    Raises ValueError (or a subclass) on anything invalid, before any
    output file exists.
    """
    cmd = config.command
    if cmd in ("spectrum", "edge-states", "band-sweep", "quench", PRESET_COMMAND):
        build_hamiltonian(config.chain)
    if cmd in ("band-sweep", PRESET_COMMAND):
        config.band_grid.values()
    if cmd in ("quench", PRESET_COMMAND):
        _quench_protocols(config)
    if cmd in ("scatter-sweep", PRESET_COMMAND):
        config.scatter.stack()
        g = config.energy_grid
        default_energy_grid(g.e_min, g.e_max, g.e_count)


def run_spectrum(config: ExperimentConfig, out_dir: str) -> tuple[dict, dict]:
    spec = config.chain
    params = {"command": "spectrum", "chain": _chain_params(spec)}
    dec = decompose(build_hamiltonian(spec))
    fmt = _emit_set(config)
    files = []
    if "csv" in fmt:
        files.append(emit.write_spectrum_csv(
            os.path.join(out_dir, "spectrum.csv"), dec, params))
    if "json" in fmt:
        files.append(emit.write_spectrum_json(
            os.path.join(out_dir, "spectrum.json"), dec, params))
    summary = {
        "n_sites": spec.n_sites,
        "max_abs_imag": float(max(abs(e.imag) for e in dec.eigenvalues)),
        "max_residual": dec.max_residual,
        "any_defective": dec.any_defective,
    }
    return {f: emit.sha256_digest(f) for f in files}, summary


def run_edge_states(config: ExperimentConfig, out_dir: str) -> tuple[dict, dict]:
    spec = config.chain
    params = {"command": "edge-states", "chain": _chain_params(spec),
              "energy_tol": config.edge.energy_tol, "n_edge": config.edge.n_edge}
    dec = decompose(build_hamiltonian(spec))
    reports = find_edge_states(dec, energy_tol=config.edge.energy_tol,
                               n_edge=config.edge.n_edge)
    plain = decompose(build_hamiltonian(spec.hermitian_counterpart()))
    plain_reports = find_edge_states(plain, energy_tol=config.edge.energy_tol,
                                     n_edge=config.edge.n_edge)

    fmt = _emit_set(config)
    files = []
    if "csv" in fmt:
        files.append(emit.write_edge_reports_csv(
            os.path.join(out_dir, "edge_states.csv"), reports, params))
        for r in reports:
            name = f"edge_profile_{r.side}_{r.index}.csv"
            files.append(emit.write_edge_profile_csv(
                os.path.join(out_dir, name), r, params))
    if "json" in fmt:
        files.append(emit.write_edge_reports_json(
            os.path.join(out_dir, "edge_states.json"), reports, params))

    overlaps = {}
    for side in ("left", "right"):
        here = [r for r in reports if r.side == side]
        there = [r for r in plain_reports if r.side == side]
        if len(here) == 1 and len(there) == 1:
            overlaps[side] = edge_overlap(dec, plain, side)
    summary = {
        "n_edge_states": len(reports),
        "sides": [r.side for r in reports],
        "edge_weights": [r.edge_weight for r in reports],
        "overlap_with_plain_chain": overlaps,
    }
    return {f: emit.sha256_digest(f) for f in files}, summary


def run_band_sweep(config: ExperimentConfig, out_dir: str) -> tuple[dict, dict]:
    spec = config.chain
    v_values = config.band_grid.values()
    params = {"command": "band-sweep", "chain": _chain_params(spec),
              "v_values": [float(v) for v in v_values]}
    table = band_sweep(spec, v_values, threads=config.threads)

    fmt = _emit_set(config)
    files = []
    if "csv" in fmt:
        files.append(emit.write_band_sweep_csv(
            os.path.join(out_dir, "band_sweep.csv"), table, params))
    if "json" in fmt:
        files.append(emit.write_band_sweep_json(
            os.path.join(out_dir, "band_sweep.json"), table, params))
    if "svg" in fmt:
        files.append(emit.write_band_sweep_svg(
            os.path.join(out_dir, "band_sweep_real.svg"), table, "re", params))
        files.append(emit.write_band_sweep_svg(
            os.path.join(out_dir, "band_sweep_imag.svg"), table, "im", params))

    max_imag = table.max_abs_imag
    i_peak = int(max_imag.argmax())
    summary = {
        "n_points": len(v_values),
        "peak_abs_imag": float(max_imag[i_peak]),
        "peak_abs_imag_at_v": float(table.v_values[i_peak]),
        "min_abs_real_by_v": {repr(float(v)): float(m) for v, m in
                              zip(table.v_values, table.min_abs_real)},
    }
    return {f: emit.sha256_digest(f) for f in files}, summary


def run_quench(config: ExperimentConfig, out_dir: str) -> tuple[dict, dict]:
    protocols = _quench_protocols(config)
    fmt = _emit_set(config)
    files = []
    summary = {"sides": {}}
    peaks = {}
    for protocol in protocols:
        side = protocol.initial_side
        params = {"command": "quench",
                  "pre_chain": _chain_params(protocol.pre_spec),
                  "post_chain": _chain_params(protocol.post_spec),
                  "initial_side": side,
                  "t_max": protocol.t_max,
                  "n_time_steps": protocol.n_time_steps}
        cone = dynamics.run_quench(protocol)
        return_site = 1 if side == "left" else protocol.pre_spec.n_sites
        signal = dynamics.reflection_signal(cone, return_site)
        if "csv" in fmt:
            files.append(emit.write_cone_csv(
                os.path.join(out_dir, f"light_cone_{side}.csv"), cone, params))
            files.append(emit.write_signal_csv(
                os.path.join(out_dir, f"reflection_{side}.csv"), signal, params))
        if "svg" in fmt:
            files.append(emit.write_cone_svg(
                os.path.join(out_dir, f"light_cone_{side}.svg"), cone, params))
            files.append(emit.write_signal_svg(
                os.path.join(out_dir, f"reflection_{side}.svg"), signal, params))
        peaks[side] = signal.reemergence_peak
        summary["sides"][side] = {
            "return_site": return_site,
            "dip_interval": list(signal.dip_interval),
            "reemergence_peak": signal.reemergence_peak,
            "norm_growth": float(cone.norm_series[-1] / cone.norm_series[0]),
            "front_speed": dynamics.front_speed(cone),
        }
    if len(peaks) == 2 and peaks["left"] > 0:
        summary["asymmetry_ratio_right_over_left"] = peaks["right"] / peaks["left"]
    return {f: emit.sha256_digest(f) for f in files}, summary


def run_scatter_sweep(config: ExperimentConfig, out_dir: str) -> tuple[dict, dict]:
    stack = config.scatter.stack()
    g = config.energy_grid
    energies = default_energy_grid(g.e_min, g.e_max, g.e_count)
    params = {"command": "scatter-sweep", "scatter": asdict(config.scatter),
              "energy_grid": asdict(g)}
    sweep = reflection_sweep(stack, energies)

    fmt = _emit_set(config)
    files = []
    if "csv" in fmt:
        files.append(emit.write_scatter_csv(
            os.path.join(out_dir, "reflection_sweep.csv"), sweep, params))
    if "json" in fmt:
        files.append(emit.write_scatter_json(
            os.path.join(out_dir, "reflection_sweep.json"), sweep, params))
    if "svg" in fmt and sweep.results:
        files.append(emit.write_scatter_svg(
            os.path.join(out_dir, "reflection_sweep.svg"), sweep, params))

    diffs = [abs(r.r_left - r.r_right) for r in sweep.results]
    i_max = max(range(len(diffs)), key=diffs.__getitem__) if diffs else None
    summary = {
        "n_energies": len(energies),
        "n_failures": len(sweep.failures),
        "max_abs_reflection_diff": diffs[i_max] if diffs else None,
        "max_diff_at_energy": sweep.results[i_max].energy if diffs else None,
        "max_transmission": max((r.transmission for r in sweep.results),
                                default=None),
        "high_energy_reflection_diff": diffs[-1] if diffs else None,
    }
    return {f: emit.sha256_digest(f) for f in files}, summary


def run_full_suite(config: ExperimentConfig, out_dir: str) -> tuple[dict, dict]:
    """Preset: every experiment into its own subdirectory.

    The scattering sweep runs twice, once as configured and once with
    the gain and loss switched off as a reference.
    """
    files = {}
    summary = {}
    plan = [
        ("edge_states", run_edge_states, config),
        ("band_sweep", run_band_sweep, config),
        ("quench", run_quench, config),
        ("scatter_pt", run_scatter_sweep, config),
        ("scatter_hermitian", run_scatter_sweep,
         replace(config, scatter=replace(config.scatter, u_im=0.0))),
    ]
    for name, runner, sub_config in plan:
        sub_dir = os.path.join(out_dir, name)
        sub_files, sub_summary = runner(sub_config, sub_dir)
        files.update(sub_files)
        summary[name] = sub_summary
    return files, summary


_RUNNERS = {
    "spectrum": run_spectrum,
    "edge-states": run_edge_states,
    "band-sweep": run_band_sweep,
    "quench": run_quench,
    "scatter-sweep": run_scatter_sweep,
    PRESET_COMMAND: run_full_suite,
}


def run_experiment(config: ExperimentConfig, out_dir: str) -> int:
    """Execute the configured command and write ``report.json``.

    Assumes ``validate_inputs`` already passed.  Returns the process
    exit code.
    """
    runner = _RUNNERS[config.command]
    report_path = os.path.join(out_dir, "report.json")
    try:
        files, summary = runner(config, out_dir)
    except Exception as exc:
        emit.write_json(report_path, {
            "command": config.command,
            "status": "failed",
            "error": f"{type(exc).__name__}: {exc}",
            "files": {},
        })
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rel_files = {os.path.relpath(f, out_dir).replace(os.sep, "/"): digest
                 for f, digest in files.items()}
    emit.write_json(report_path, {
        "command": config.command,
        "status": "ok",
        "files": rel_files,
        "summary": summary,
    })
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptssh",
        description="Spectra, quench dynamics, and scattering for "
                    "gain-loss hybrid chains.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS + (PRESET_COMMAND,):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="INI experiment file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--emit", default=None,
                       help="comma list from: " + ",".join(EMIT_FORMATS))
        p.add_argument("--threads", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = parse_config(args.config, command=args.command)
        if args.emit is not None:
            formats = tuple(s.strip() for s in args.emit.split(",") if s.strip())
            config = replace(config, emit=formats)
        if args.threads is not None:
            config = replace(config, threads=args.threads)
        out_dir = config.resolve_output_dir(args.out)
        validate_inputs(config)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run_experiment(config, out_dir)


if __name__ == "__main__":
    sys.exit(main())
