"""Experiment runner: one subcommand per module, deterministic CSV/JSON export.

Every experiment is described by an ExperimentConfig that round-trips through
JSON.  Rerunning a config byte-reproduces the series files: seeds default to 0,
floats are written with 17 significant digits, and the numeric kernels are
pinned to one BLAS thread while a config runs so the bytes do not depend on
the machine's thread count.  With --plot a rendered figure is written next to
the delimited output.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from threadpoolctl import threadpool_limits

from . import __version__, grover, lattice, spatial, wavemech

_EXPERIMENTS = ("grover", "wave", "lattice", "spatial", "solve-n", "table")


@dataclass
class ExperimentConfig:
    """All knobs of one experiment; unknown fields are rejected on load."""

    experiment: str
    n: int | None = None
    targets: list[int] | None = None
    oracle_phase: float | None = None
    diffusion_phase: float | None = None
    steps: int | None = None
    threshold: float | None = None
    energy: float | None = None
    length: int | None = None
    hopping: float | None = None
    impurity: float | None = None
    disorder: float | None = None
    trials: int | None = None
    gamma: float | None = None
    time: float | None = None
    dims: str | None = None
    queries: int | None = None
    seed: int = 0
    out: str | None = None
    format: str = "csv"
    plot: bool = False

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config fields: {', '.join(unknown)}")
        if "experiment" not in data:
            raise ValueError("config is missing the 'experiment' field")
        return cls(**data)

    def __post_init__(self) -> None:
        if self.experiment not in _EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; choose from {', '.join(_EXPERIMENTS)}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be 'csv' or 'json', got {self.format!r}")


@dataclass
class ExperimentRecord:
    """Computed series and summary for one config, plus provenance."""

    config: ExperimentConfig
    columns: tuple[str, ...]
    rows: list[tuple]
    summary: dict
    version: str
    wall_clock_s: float
    axis_labels: tuple[str, str, str]  # xlabel, ylabel, title for the figure


def _format_value(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def series_csv_text(columns, rows) -> str:
    lines = [",".join(columns)]
    lines.extend(",".join(_format_value(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def series_json_text(columns, rows) -> str:
    payload = {"columns": list(columns), "rows": [list(row) for row in rows]}
    return json.dumps(payload, indent=2) + "\n"


def round_to_sig(value: float, digits: int = 3) -> float:
    """Round to a number of significant digits (the table-style rounding)."""
    if value == 0.0:
        return 0.0
    return round(value, -int(math.floor(math.log10(abs(value)))) + digits - 1)


def _require(config: ExperimentConfig, *fields: str) -> None:
    missing = [f for f in fields if getattr(config, f) is None]
    if missing:
        raise ValueError(f"experiment {config.experiment!r} needs: {', '.join('--' + f.replace('_', '-') for f in missing)}")


def _steps_or_threshold(config: ExperimentConfig) -> None:
    if (config.steps is None) == (config.threshold is None):
        raise ValueError("give exactly one of --steps or --threshold")


def _run_grover(config: ExperimentConfig):
    _require(config, "n", "targets")
    _steps_or_threshold(config)
    spec = grover.SearchSpec(
        config.n,
        frozenset(config.targets),
        config.oracle_phase if config.oracle_phase is not None else math.pi,
        config.diffusion_phase if config.diffusion_phase is not None else math.pi,
    )
    if config.steps is not None:
        trajectory = grover.run(spec, config.steps)
    else:
        trajectory = grover.run_until_threshold(spec, config.threshold)
    peak_step, peak_value = trajectory.peak()
    rows = [(k, p) for k, p in trajectory.records()]
    summary = {
        "peak_step": peak_step,
        "peak_probability": peak_value,
        "stop_reason": trajectory.stop_reason,
        "optimal_queries": grover.optimal_queries(spec.n, spec.m),
        "oracle_phase": spec.oracle_phase,
        "diffusion_phase": spec.diffusion_phase,
    }
    labels = ("iteration", "success probability", f"search: N={spec.n}, M={spec.m}")
    return ("step", "success_probability"), rows, summary, labels


def _run_wave(config: ExperimentConfig):
    _require(config, "n", "targets")
    _steps_or_threshold(config)
    if len(config.targets) != 1:
        raise ValueError("the oscillator-bank experiment focuses on exactly one target mode")
    target = config.targets[0]
    energy = config.energy if config.energy is not None else 1.0
    trajectory = wavemech.run_focus(
        config.n, target, steps=config.steps, threshold=config.threshold, total_energy=energy
    )
    report = wavemech.resource_report(config.n)
    peak_step = max(range(len(trajectory.fractions)), key=trajectory.fractions.__getitem__)
    rows = [(k, f) for k, f in trajectory.records()]
    summary = {
        "peak_step": peak_step,
        "peak_energy_fraction": trajectory.fractions[peak_step],
        "stop_reason": trajectory.stop_reason,
        "total_energy": energy,
        "wave_modes": report.wave_modes,
        "qubits": report.qubits,
        "queries": report.queries,
        "boolean_search_queries": report.boolean_search_queries,
        "membership_queries": report.membership_queries,
    }
    labels = ("iteration", "energy fraction at target", f"energy focusing: N={config.n}")
    return ("step", "energy_fraction"), rows, summary, labels


def _run_lattice(config: ExperimentConfig):
    _require(config, "length")
    hopping = config.hopping if config.hopping is not None else 1.0
    if config.disorder is not None:
        trials = config.trials if config.trials is not None else 10
        stats = lattice.disorder_ensemble(config.length, hopping, config.disorder, trials, config.seed)
        rows = [(k, v) for k, v in enumerate(stats.iprs)]
        summary = {
            "mean_ipr": stats.mean_ipr,
            "std_ipr": stats.std_ipr,
            "disorder_width": stats.width,
            "trials": stats.trials,
            "seed": stats.seed,
            "length": config.length,
            "hopping": hopping,
        }
        labels = ("trial", "band-center IPR", f"disorder ensemble: L={config.length}, W={config.disorder}")
        return ("trial", "band_center_ipr"), rows, summary, labels
    if config.impurity is not None:
        bound = lattice.bound_state(config.length, hopping, config.impurity)
        site_energies = [0.0] * config.length
        site_energies[config.length // 2] = -config.impurity
        result = lattice.spectrum(lattice.build_chain(config.length, hopping, site_energies))
        rows = [(k, float(v)) for k, v in enumerate(result.eigenvalues)]
        summary = {
            "bound_energy": bound.energy,
            "gap_below_band": bound.gap_below_band,
            "bound_ipr": bound.ipr,
            "impurity": config.impurity,
            "length": config.length,
            "hopping": hopping,
        }
        labels = ("level index", "energy", f"impurity chain: L={config.length}, V={config.impurity}")
        return ("index", "eigenvalue"), rows, summary, labels
    result = lattice.spectrum(lattice.build_chain(config.length, hopping))
    rows = [(k, float(v)) for k, v in enumerate(result.eigenvalues)]
    summary = {
        "band_min": result.band_edges[0],
        "band_max": result.band_edges[1],
        "length": config.length,
        "hopping": hopping,
    }
    labels = ("level index", "energy", f"clean chain: L={config.length}")
    return ("index", "eigenvalue"), rows, summary, labels


def _parse_dims(dims: str) -> spatial.Graph:
    parts = dims.lower().split("x")
    try:
        sides = [int(p) for p in parts]
    except ValueError:
        raise ValueError(f"cannot parse --dims {dims!r}; expected e.g. '64' or '16x16'") from None
    if len(sides) == 1:
        return spatial.torus_1d(sides[0])
    if len(sides) == 2:
        return spatial.torus_2d(sides[0], sides[1])
    raise ValueError(f"--dims supports 1 or 2 sides, got {len(sides)}")


def _run_spatial(config: ExperimentConfig):
    _require(config, "targets")
    if config.dims is not None:
        _require(config, "steps")
        graph = _parse_dims(config.dims)
        trajectory = spatial.dtqw_search(graph, config.targets, config.steps)
        peak_step, peak_value = trajectory.peak()
        rows = [(k, p) for k, p in trajectory.records()]
        summary = {
            "walk": "coined-discrete",
            "vertices": graph.vertex_count,
            "peak_step": peak_step,
            "peak_probability": peak_value,
            "uniform_baseline": 1.0 / graph.vertex_count,
            "max_norm_drift": trajectory.max_norm_drift,
        }
        labels = ("step", "marked probability", f"coined walk on {config.dims} torus")
        return ("step", "marked_probability"), rows, summary, labels
    if config.gamma is not None:
        _require(config, "n", "time")
        graph = spatial.complete_graph(config.n)
        trajectory = spatial.ctqw_search(graph, config.gamma, config.targets, config.time)
        peak_time, peak_value = trajectory.peak()
        rows = list(zip(trajectory.times, trajectory.probabilities))
        summary = {
            "walk": "continuous",
            "vertices": config.n,
            "gamma": config.gamma,
            "dt": trajectory.dt,
            "peak_time": peak_time,
            "peak_probability": peak_value,
            "renormalizations": trajectory.renormalizations,
            "max_norm_drift": trajectory.max_norm_drift,
        }
        labels = ("time", "marked probability", f"continuous walk: N={config.n}")
        return ("time", "marked_probability"), rows, summary, labels
    _require(config, "n", "steps")
    graph = spatial.complete_graph(config.n)
    result = spatial.multi_target_revival(graph, config.targets, config.steps)
    rows = [(k, p) for k, p in result.trajectory.records()]
    summary = {
        "walk": "multi-target-revival",
        "vertices": config.n,
        "marked": len(config.targets),
        "period_estimate": result.period_estimate,
        "first_peak_step": result.first_peak[0],
        "first_peak_probability": result.first_peak[1],
        "second_peak_step": result.second_peak[0],
        "second_peak_probability": result.second_peak[1],
        "revival_ratio": result.revival_ratio,
    }
    labels = ("iteration", "success probability", f"revival: V={config.n}, M={len(config.targets)}")
    return ("step", "success_probability"), rows, summary, labels


def _run_solve_n(config: ExperimentConfig):
    _require(config, "queries")
    exact = grover.database_size_for_queries(config.queries)
    rounded = round_to_sig(exact)
    rows = [(config.queries, exact, rounded, grover.boolean_search_size(config.queries))]
    summary = {
        "queries": config.queries,
        "database_size_exact": exact,
        "database_size_3sig": rounded,
        "boolean_database_size": grover.boolean_search_size(config.queries),
    }
    labels = ("queries", "database size", "database size solving the query equation")
    return ("queries", "database_size_exact", "database_size_3sig", "boolean_database_size"), rows, summary, labels


def _run_table(config: ExperimentConfig):
    rows = []
    for q in (1, 2, 3):
        exact = grover.database_size_for_queries(q)
        rows.append((q, exact, round_to_sig(exact), grover.boolean_search_size(q)))
    summary = {"rows": len(rows)}
    labels = ("queries", "database size", "smallest exact-search database sizes")
    return ("queries", "database_size_exact", "database_size_3sig", "boolean_database_size"), rows, summary, labels


_RUNNERS = {
    "grover": _run_grover,
    "wave": _run_wave,
    "lattice": _run_lattice,
    "spatial": _run_spatial,
    "solve-n": _run_solve_n,
    "table": _run_table,
}


def format_table(columns, rows) -> str:
    """Fixed-width text table for terminal display."""
    display = [[_format_value(v) if not isinstance(v, float) else f"{v:.6g}" for v in row] for row in rows]
    widths = [max(len(c), *(len(r[i]) for r in display)) for i, c in enumerate(columns)]
    header = "  ".join(c.ljust(widths[i]) for i, c in enumerate(columns))
    lines = [header, "  ".join("-" * w for w in widths)]
    lines.extend("  ".join(r[i].ljust(widths[i]) for i in range(len(columns))) for r in display)
    return "\n".join(lines) + "\n"


def run_experiment(config: ExperimentConfig) -> ExperimentRecord:
    """Dispatch the config, write any requested files, and return the record.

    The numeric work runs with BLAS pinned to a single thread so that series
    bytes are identical regardless of the host's thread configuration.
    """
    started = time.perf_counter()
    with threadpool_limits(limits=1):
        columns, rows, summary, labels = _RUNNERS[config.experiment](config)
    record = ExperimentRecord(
        config=config,
        columns=columns,
        rows=rows,
        summary=summary,
        version=__version__,
        wall_clock_s=time.perf_counter() - started,
        axis_labels=labels,
    )
    if config.out is not None:
        _write_outputs(record)
    return record


def _series_path(config: ExperimentConfig) -> Path:
    return Path(config.out).with_suffix(".csv" if config.format == "csv" else ".json")


def _write_outputs(record: ExperimentRecord) -> None:
    config = record.config
    series_path = _series_path(config)
    series_path.parent.mkdir(parents=True, exist_ok=True)
    if config.format == "csv":
        text = series_csv_text(record.columns, record.rows)
    else:
        text = series_json_text(record.columns, record.rows)
    series_path.write_text(text, encoding="utf-8", newline="\n")
    summary_payload = {
        "config": config.to_dict(),
        "summary": record.summary,
        "version": record.version,
        "wall_clock_s": record.wall_clock_s,
        "series_file": series_path.name,
    }
    summary_path = series_path.with_name(series_path.stem + ".summary.json")
    summary_path.write_text(json.dumps(summary_payload, indent=2) + "\n", encoding="utf-8")
    if config.plot:
        from . import plotting  # imported lazily; pulls in matplotlib

        xs = [row[0] for row in record.rows]
        ys = [row[1] for row in record.rows]
        xlabel, ylabel, title = record.axis_labels
        plotting.render_series(xs, ys, xlabel, ylabel, title, str(series_path.with_suffix(".png")))


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (default 0; never time-based)")
    parser.add_argument("--out", type=str, default=None, help="output path stem for series + summary files")
    parser.add_argument("--format", choices=("csv", "json"), default="csv", help="series file format")
    parser.add_argument("--plot", action="store_true", help="also render a figure next to the series file")
    parser.add_argument("--config", type=str, default=None, help="JSON config file; its values override flags")


def _parse_targets(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse target list {text!r}; expected e.g. '0' or '0,3,7'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavesearch",
        description="Reproducible search-by-wave-dynamics experiments with CSV/JSON export.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)

    p = sub.add_parser("grover", help="state-vector search iteration")
    p.add_argument("--n", type=int, help="database size")
    p.add_argument("--targets", type=_parse_targets, help="comma-separated marked indices")
    p.add_argument("--oracle-phase", type=float, default=None, help="oracle phase in radians (default pi)")
    p.add_argument("--diffusion-phase", type=float, default=None, help="diffusion phase in radians (default pi)")
    p.add_argument("--steps", type=int, default=None, help="fixed iteration count")
    p.add_argument("--threshold", type=float, default=None, help="stop once success probability reaches this")
    _add_common_flags(p)

    p = sub.add_parser("wave", help="classical oscillator-bank energy focusing")
    p.add_argument("--n", type=int, help="number of wave modes")
    p.add_argument("--targets", type=_parse_targets, help="single target mode index")
    p.add_argument("--steps", type=int, default=None, help="fixed iteration count")
    p.add_argument("--threshold", type=float, default=None, help="stop once the energy fraction reaches this")
    p.add_argument("--energy", type=float, default=None, help="total bank energy (default 1.0)")
    _add_common_flags(p)

    p = sub.add_parser("lattice", help="chain spectra, impurity bound states, disorder IPR")
    p.add_argument("--length", type=int, help="number of chain sites")
    p.add_argument("--hopping", type=float, default=None, help="hopping amplitude t (default 1.0)")
    p.add_argument("--impurity", type=float, default=None, help="impurity strength (positive = attractive well)")
    p.add_argument("--disorder", type=float, default=None, help="disorder width W for the ensemble")
    p.add_argument("--trials", type=int, default=None, help="ensemble size (default 10)")
    _add_common_flags(p)

    p = sub.add_parser("spatial", help="walk-based search on graphs")
    p.add_argument("--n", type=int, help="vertex count for complete-graph experiments")
    p.add_argument("--targets", type=_parse_targets, help="comma-separated marked vertices")
    p.add_argument("--gamma", type=float, default=None, help="hopping rate; selects the continuous-time walk")
    p.add_argument("--time", type=float, default=None, help="total evolution time for the continuous walk")
    p.add_argument("--dims", type=str, default=None, help="torus sides, e.g. 64 or 16x16; selects the coined walk")
    p.add_argument("--steps", type=int, default=None, help="walk steps (coined walk / revival)")
    _add_common_flags(p)

    p = sub.add_parser("solve-n", help="database size solved exactly by a given query count")
    p.add_argument("--queries", type=int, help="oracle query count Q >= 1")
    _add_common_flags(p)

    p = sub.add_parser("table", help="smallest exact-search database sizes for Q = 1, 2, 3")
    _add_common_flags(p)

    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    """Assemble the config from parsed flags, letting a --config file override."""
    values = {k: v for k, v in vars(args).items() if k != "config"}
    if getattr(args, "config", None):
        file_values = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(file_values, dict):
            raise ValueError("config file must hold a JSON object")
        if "experiment" in file_values and file_values["experiment"] != values["experiment"]:
            raise ValueError(
                f"config file is for experiment {file_values['experiment']!r}, "
                f"but the {values['experiment']!r} subcommand was invoked"
            )
        values.update(file_values)
    return ExperimentConfig.from_dict(values)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        record = run_experiment(config)
    except (ValueError, RuntimeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if config.experiment == "table":
        sys.stdout.write(format_table(record.columns, record.rows))
    elif config.out is None:
        if config.experiment == "solve-n":
            sys.stdout.write(json.dumps(record.summary, indent=2) + "\n")
        elif config.format == "csv":
            sys.stdout.write(series_csv_text(record.columns, record.rows))
        else:
            sys.stdout.write(series_json_text(record.columns, record.rows))
    return 0


def entry() -> None:
    sys.exit(main())
