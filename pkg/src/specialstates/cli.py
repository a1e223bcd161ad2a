"""Command-line front end.

    specialstates [options] {spectrum,special,survival,converge,figure} [options]

Options may appear before or after the command.  Values are resolved as
flags > ``--config`` file > built-in defaults, and the resolved configuration
is echoed to stderr as one JSON line.  Every data file gets a
``<file>.meta.json`` sidecar that can be passed back through ``--config`` to
replay the run.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import convergence_study, figure_data, spectrum_vs_time
from .errors import ContractViolation, ConvergenceError, InvalidParameterError
from .evolve import hermitian_eigendecomposition, survival_probability
from .model import ModelParams, build_hamiltonian
from .special import DECAY, NON_DECAY, build_b_effective, extract_special_states

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_COMPUTE = 3
EXIT_IO = 4

COMMANDS = ("spectrum", "special", "survival", "converge", "figure")
FORMATS = ("csv", "json")
META_SCHEMA = "specialstates-meta/1"

DEFAULTS = {
    "epsilon": 0.5,
    "omega": 0.1,
    "beta": 0.6,
    "time": 0.15,
    "cutoff": 250,
    "theta-hi": 0.99,
    "theta-lo": 0.01,
    "bath": "vacuum",
    "time-grid": None,
    "cutoffs": "50,100,150,200,250",
    "output": None,
    "format": "csv",
}
FLOAT_KEYS = ("epsilon", "omega", "beta", "time", "theta-hi", "theta-lo")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: ModelParams
    output_format: str
    output_path: Path
    bath: str = "vacuum"
    time_grid: str | None = None
    cutoffs: list[int] = field(default_factory=list)

    def as_flat(self) -> dict:
        """Config-file form (kebab-case keys) of this run."""
        p = self.params
        return {
            "epsilon": p.epsilon,
            "omega": p.omega,
            "beta": p.beta,
            "time": p.time,
            "cutoff": p.cutoff,
            "theta-hi": p.theta_hi,
            "theta-lo": p.theta_lo,
            "bath": self.bath,
            "time-grid": self.time_grid,
            "cutoffs": ",".join(str(c) for c in self.cutoffs),
            "output": str(self.output_path),
            "format": self.output_format,
        }


def _option_parser() -> argparse.ArgumentParser:
    opts = argparse.ArgumentParser(add_help=False)
    s = argparse.SUPPRESS
    opts.add_argument("--config", default=s, metavar="PATH",
                      help="JSON config file or a previous run's .meta.json sidecar")
    opts.add_argument("--epsilon", default=s, help="spin splitting (default 0.5)")
    opts.add_argument("--omega", default=s, help="boson frequency (default 0.1)")
    opts.add_argument("--beta", default=s, help="spin-boson coupling (default 0.6)")
    opts.add_argument("--time", default=s, help="evolution time (default 0.15)")
    opts.add_argument("--cutoff", default=s, help="number of Fock levels (default 250)")
    opts.add_argument("--theta-hi", dest="theta-hi", default=s,
                      help="non-decay threshold (default 0.99)")
    opts.add_argument("--theta-lo", dest="theta-lo", default=s,
                      help="decay threshold (default 0.01)")
    opts.add_argument("--bath", default=s,
                      help="initial bath for survival: vacuum, fock:<n> or file:<path>")
    opts.add_argument("--time-grid", dest="time-grid", default=s, metavar="START:STOP:STEP",
                      help="time grid for survival and spectrum")
    opts.add_argument("--cutoffs", default=s, help="comma-separated cutoffs for converge")
    opts.add_argument("--output", "-o", default=s, help="output file (default <command>.<format>)")
    opts.add_argument("--format", default=s, choices=FORMATS)
    return opts


def build_parser() -> argparse.ArgumentParser:
    opts = _option_parser()
    parser = argparse.ArgumentParser(
        prog="specialstates",
        parents=[opts],
        description="Special bath states of the spin-boson measurement model.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    helps = {
        "spectrum": "classified eigenvalues of B_eff",
        "special": "non-decay and decay states with their Fock amplitudes",
        "survival": "spin-up survival probability over a time grid",
        "converge": "residual and class counts versus Fock cutoff",
        "figure": "Fock-level probabilities/phases of the extreme states",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[opts], help=helps[name])
    return parser


def _load_config_file(path: str) -> tuple[dict, str | None]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    command = None
    if data.get("schema") == META_SCHEMA:
        command = data.get("command")
        data = data.get("config", {})
    unknown = sorted(set(data) - set(DEFAULTS))
    if unknown:
        raise UsageError(f"unknown keys in {path}: {', '.join(unknown)}")
    return data, command


def _to_float(key, value) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise UsageError(f"--{key}: malformed number {value!r}") from None
    if not math.isfinite(out):
        raise UsageError(f"--{key}: must be finite, got {value!r}")
    return out


def _to_int(key, value) -> int:
    if isinstance(value, bool):
        raise UsageError(f"--{key}: malformed integer {value!r}")
    if isinstance(value, int):
        return value
    try:
        return int(str(value).strip())
    except ValueError:
        raise UsageError(f"--{key}: malformed integer {value!r}") from None


def _parse_cutoffs(value) -> list[int]:
    items = value if isinstance(value, list) else str(value).split(",")
    out = [_to_int("cutoffs", v) for v in items if str(v).strip()]
    if not out:
        raise UsageError("--cutoffs: at least one cutoff is required")
    return out


def parse_time_grid(spec: str) -> np.ndarray:
    """``"start:stop:step"`` to an inclusive grid ``start, start+step, ...``."""
    parts = str(spec).split(":")
    if len(parts) != 3:
        raise UsageError(f"--time-grid: expected START:STOP:STEP, got {spec!r}")
    start, stop, step = (_to_float("time-grid", p) for p in parts)
    if step <= 0 or stop < start:
        raise UsageError(f"--time-grid: need step > 0 and stop >= start, got {spec!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def parse_config(argv=None) -> RunConfig:
    """Resolve argv (and an optional config file) into a :class:`RunConfig`."""
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command", None)
    values = dict(DEFAULTS)
    if "config" in args:
        file_values, file_command = _load_config_file(args.pop("config"))
        values.update(file_values)
        command = command or file_command
    values.update(args)
    if command not in COMMANDS:
        raise UsageError(f"a command is required: one of {', '.join(COMMANDS)}")

    floats = {k: _to_float(k, values[k]) for k in FLOAT_KEYS}
    try:
        params = ModelParams(
            epsilon=floats["epsilon"],
            omega=floats["omega"],
            beta=floats["beta"],
            time=floats["time"],
            cutoff=_to_int("cutoff", values["cutoff"]),
            theta_hi=floats["theta-hi"],
            theta_lo=floats["theta-lo"],
        )
    except InvalidParameterError as exc:
        raise UsageError(str(exc)) from exc

    fmt = values["format"]
    if fmt not in FORMATS:
        raise UsageError(f"--format must be one of {FORMATS}, got {fmt!r}")
    cutoffs = _parse_cutoffs(values["cutoffs"])
    if any(c < 2 for c in cutoffs) or any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise UsageError(f"--cutoffs must be strictly ascending and >= 2, got {cutoffs}")
    time_grid = values["time-grid"]
    if time_grid is not None:
        parse_time_grid(time_grid)
    bath = str(values["bath"])
    if not (bath == "vacuum" or bath.startswith("fock:") or bath.startswith("file:")):
        raise UsageError(f"--bath must be vacuum, fock:<n> or file:<path>, got {bath!r}")
    output = values["output"] or f"{command}.{fmt}"
    return RunConfig(
        command=command,
        params=params,
        output_format=fmt,
        output_path=Path(output),
        bath=bath,
        time_grid=time_grid,
        cutoffs=cutoffs,
    )


def load_bath(spec: str, cutoff: int) -> np.ndarray:
    """Bath amplitudes from ``vacuum``, ``fock:<n>`` or ``file:<path>``.

    Files are JSON (a list of reals or ``[re, im]`` pairs) or text with one
    or two columns (re[, im]), comma- or whitespace-separated.
    """
    if spec == "vacuum":
        spec = "fock:0"
    if spec.startswith("fock:"):
        n = _to_int("bath", spec[5:])
        if not 0 <= n < cutoff:
            raise UsageError(f"--bath: Fock level {n} outside [0, {cutoff})")
        psi = np.zeros(cutoff, dtype=complex)
        psi[n] = 1.0
        return psi

    path = spec[5:]
    try:
        if path.endswith(".json"):
            with open(path, encoding="utf-8") as fh:
                raw = np.asarray(json.load(fh), dtype=float)
        else:
            text = Path(path).read_text(encoding="utf-8").replace(",", " ")
            raw = np.loadtxt(io.StringIO(text), dtype=float, ndmin=1)
    except OSError as exc:
        raise UsageError(f"--bath: cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"--bath: cannot parse {path}: {exc}") from exc
    if raw.ndim == 2 and raw.shape[1] == 2:
        psi = raw[:, 0] + 1j * raw[:, 1]
    elif raw.ndim == 1:
        psi = raw.astype(complex)
    else:
        raise UsageError(f"--bath: {path} must hold 1 or 2 columns, got shape {raw.shape}")
    if psi.shape != (cutoff,):
        raise UsageError(f"--bath: {path} has {psi.size} amplitudes, cutoff is {cutoff}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > 1e-10:
        raise UsageError(f"--bath: {path} is not normalized (norm {norm!r})")
    return psi


# --- serialization ---------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _jsonable(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def render(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        clean = [{k: _jsonable(v) for k, v in row.items()} for row in rows]
        return json.dumps(clean, indent=1) + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf)
        header = list(rows[0])
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in header])
    return buf.getvalue()


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    try:
        directory.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


# --- commands --------------------------------------------------------------


def _times(config: RunConfig) -> np.ndarray:
    if config.time_grid is not None:
        return parse_time_grid(config.time_grid)
    return np.array([config.params.time])


def _run_spectrum(config):
    rows, summaries = [], []
    for report in spectrum_vs_time(config.params, _times(config)):
        summaries.append(report.summary())
        for i, (lam, parity, cls) in enumerate(
            zip(report.eigenvalues, report.parities, report.classes)
        ):
            rows.append({"time": report.time, "index": i, "eigenvalue": lam,
                         "parity": parity, "class": cls})
    return {config.output_path: rows}, {"reports": summaries}


def _run_special(config):
    params = config.params
    dec = hermitian_eigendecomposition(build_hamiltonian(params))
    b = build_b_effective(params, decomposition=dec)
    states = extract_special_states(b, (NON_DECAY, DECAY), decomposition=dec)
    rows, summary = [], []
    for s_idx, st in enumerate(states):
        summary.append({"state": s_idx, "class": st.state_class, "eigenvalue": st.eigenvalue,
                        "parity": st.parity, "final_phase": st.final_phase})
        for n, (amp, prob) in enumerate(zip(st.bath_amplitudes, st.fock_probabilities)):
            rows.append({
                "state": s_idx, "class": st.state_class, "eigenvalue": st.eigenvalue,
                "parity": st.parity, "final_phase": st.final_phase,
                "final_up_probability": st.final_up_probability,
                "fock_level": n, "probability": prob,
                "re": amp.real, "im": amp.imag,
            })
    return {config.output_path: rows}, {"states": summary}


def _run_survival(config):
    params = config.params
    psi = load_bath(config.bath, params.cutoff)
    times = _times(config) if config.time_grid else np.linspace(0.0, params.time, 151)
    curve = survival_probability(params, psi, times)
    rows = [{"time": t, "pr_up": p} for t, p in zip(curve.times, curve.clamped())]
    return {config.output_path: rows}, {"points": len(rows)}


def _run_converge(config):
    table = convergence_study(config.params, config.cutoffs)
    rows = [asdict(r) for r in table]
    return {config.output_path: rows}, {"headline": rows[-1]}


def _run_figure(config):
    nondecay, decay = figure_data(config.params)
    out = config.output_path
    paths = {}
    summary = {}
    for series, tag in ((nondecay, "nondecay"), (decay, "decay")):
        path = out.with_name(f"{out.stem}.{tag}{out.suffix}")
        paths[path] = list(series.rows())
        summary[tag] = {"eigenvalue": series.eigenvalue, "parity": series.parity,
                        "odd_probability": float(series.probabilities[series.fock_levels % 2 == 1].sum())}
    return paths, summary


RUNNERS = {
    "spectrum": _run_spectrum,
    "special": _run_special,
    "survival": _run_survival,
    "converge": _run_converge,
    "figure": _run_figure,
}


def run(config: RunConfig) -> list[Path]:
    """Execute one command and write its data files plus ``.meta.json`` sidecars."""
    outputs, summary = RUNNERS[config.command](config)
    meta = {
        "schema": META_SCHEMA,
        "artifact": "specialstates",
        "version": __version__,
        "command": config.command,
        "config": config.as_flat(),
        "hbar": ModelParams.hbar,
        "outputs": [str(p) for p in outputs],
        "summary": summary,
    }
    written = []
    for path, rows in outputs.items():
        write_atomic(path, render(rows, config.output_format))
        write_atomic(Path(f"{path}.meta.json"), json.dumps(meta, indent=1, default=_jsonable) + "\n")
        written.append(path)
    return written


def main(argv=None) -> int:
    parser = build_parser()
    try:
        config = parse_config(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"specialstates: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps({"command": config.command, **config.as_flat()}), file=sys.stderr)
    try:
        written = run(config)
    except UsageError as exc:
        print(f"specialstates: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ContractViolation, ConvergenceError, InvalidParameterError) as exc:
        print(f"specialstates: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"specialstates: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
