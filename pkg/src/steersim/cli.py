"""Command-line front end: ``steersim {bounds,mub-check,simulate,sweep,report,replay}``.

Exit codes: 0 success, 1 MUB check failed, 2 validation/config error,
3 unsupported dimension, 4 I/O error.

Every file output is accompanied by a run manifest (``manifest.json`` in an
output directory, ``<file>.manifest.json`` next to a single file).
``steersim replay MANIFEST --out DIR`` re-executes the recorded command and
reproduces the data files byte for byte.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, SteerSimError, UnsupportedDimension
from .expsim import ExperimentConfig, fit_line, parse_p_range, run_experiment, sweep_and_fit, threshold_crossing
from .mub import SUPPORTED_DIMS, build_mubs, verify_mub
from .steering import (lhs_bound, p_min_theory, p_min_two_setting, quantum_bound,
                       two_setting_violation_max, violation)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DIM, EXIT_IO = 0, 1, 2, 3, 4

BOUNDS_HEADER = ["d", "quantum_bound", "lhs_bound", "V_theory", "two_setting_Vmax",
                 "p_min", "p_min_two_setting"]
SWEEP_HEADER = ["p", "S", "S_sigma"]
REPORT_HEADER = ["d", "p_min_empirical", "p_min_sigma", "p_min_theory", "p_min_two_setting"]
TABLE_HEADER = ["a", "b", "count"]

SEED_ENV = "STEERSIM_SEED"

# config-file key -> (ExperimentConfig field, parser)
_CONFIG_KEYS = {
    "d": ("d", int),
    "dim": ("d", int),
    "p": ("p", float),
    "counts": ("counts", int),
    "seed": ("seed", int),
    "crosstalk": ("eps_crosstalk", float),
    "eps_crosstalk": ("eps_crosstalk", float),
    "spiral_sigma": ("spiral_sigma", lambda s: None if s.lower() == "flat" else float(s)),
    "concentrate": ("concentrate", lambda s: _parse_bool(s)),
    "error_method": ("error_method", str),
    "repeats": ("repeats", int),
    "noise_model": ("noise_model", str),
    "exact": ("exact", lambda s: _parse_bool(s)),
    "spectrum_file": ("spectrum_file", str),
    "p_range": ("p_range", str),
}


def load_schema(name: str) -> dict:
    """Published JSON schema shipped in ``steersim/schemas`` (e.g. ``"sweep_summary"``)."""
    ref = resources.files("steersim") / "schemas" / f"{name}.schema.json"
    return json.loads(ref.read_text())


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file (``#`` starts a comment)."""
    values, errors = {}, {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":"
        if sep not in line:
            errors[f"line {lineno}"] = f"expected key = value, got {raw!r}"
            continue
        key, val = (s.strip() for s in line.split(sep, 1))
        key = key.lower().replace("-", "_")
        if key not in _CONFIG_KEYS:
            errors[key] = "unknown key"
            continue
        name, conv = _CONFIG_KEYS[key]
        try:
            values[name] = conv(val)
        except ValueError as exc:
            errors[key] = f"bad value {val!r}: {exc}"
    if errors:
        raise ConfigError(f"{path}: " + "; ".join(f"{k}: {v}" for k, v in errors.items()), errors)
    return values


# -- pure command implementations -----------------------------------------------------

def cmd_bounds(dims) -> list[dict]:
    rows = []
    for d in dims:
        if d not in SUPPORTED_DIMS:
            raise UnsupportedDimension(f"d={d} is not a supported prime power {SUPPORTED_DIMS}")
        rows.append({
            "d": d,
            "quantum_bound": quantum_bound(d),
            "lhs_bound": lhs_bound(d),
            "V_theory": violation(d),
            "two_setting_Vmax": two_setting_violation_max(d),
            "p_min": p_min_theory(d),
            "p_min_two_setting": p_min_two_setting(d),
        })
    return rows


def cmd_mub_check(d: int, tol: float) -> dict:
    return verify_mub(build_mubs(d), tol).to_dict()


def read_sweep_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SWEEP_HEADER:
            raise ConfigError(f"{path}: expected header {SWEEP_HEADER}", {"input": str(path)})
        rows = [(float(r["p"]), float(r["S"]), float(r["S_sigma"])) for r in reader]
    arr = np.array(rows, dtype=float).reshape(-1, 3)
    return arr[:, 0], arr[:, 1], arr[:, 2]


def cmd_report(inputs) -> list[dict]:
    """Refit each sweep CSV (dimension read from its ``.json`` sibling) and tabulate p_min."""
    rows = []
    for path in inputs:
        path = Path(path)
        summary_path = path.with_suffix(".json")
        if not path.exists():
            raise FileNotFoundError(f"sweep file not found: {path}")
        if not summary_path.exists():
            raise FileNotFoundError(f"sweep summary not found: {summary_path}")
        d = int(json.loads(summary_path.read_text())["d"])
        p, S, sig = read_sweep_csv(path)
        slope, intercept, cov = fit_line(p, S, sig)
        pm, pm_sig = threshold_crossing(slope, intercept, cov, lhs_bound(d))
        rows.append({"d": d, "p_min_empirical": pm, "p_min_sigma": pm_sig,
                     "p_min_theory": p_min_theory(d), "p_min_two_setting": p_min_two_setting(d)})
    return sorted(rows, key=lambda r: r["d"])


# -- output helpers ------------------------------------------------------------------

def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([r[h] for h in header] if isinstance(r, dict) else list(r))
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _manifest(command: str, params: dict, seed, outputs, started: float) -> dict:
    return {
        "command": command,
        "params": params,
        "tool_version": __version__,
        "seed": seed,
        "outputs": sorted(outputs),
        "duration_s": round(time.perf_counter() - started, 6),
    }


def _emit_table(header, rows, fmt: str, out, command: str, params: dict, started: float, extra=None):
    text = _csv_text(header, rows) if fmt == "csv" else _json_text({"rows": rows, **(extra or {})})
    if out is None:
        sys.stdout.write(text)
        return
    out = Path(out)
    _write(out, text)
    _write(out.with_name(out.name + ".manifest.json"),
           _json_text(_manifest(command, params, None, [out.name], started)))


# -- command runners (shared by argparse and replay) ------------------------------------

def run_bounds(params: dict, out) -> int:
    started = time.perf_counter()
    rows = cmd_bounds(params["dims"])
    _emit_table(BOUNDS_HEADER, rows, params["format"], out, "bounds", params, started)
    return EXIT_OK


def run_mub_check(params: dict, out) -> int:
    started = time.perf_counter()
    rep = cmd_mub_check(params["d"], params["tol"])
    text = _json_text(rep)
    if out is None:
        sys.stdout.write(text)
    else:
        out = Path(out)
        _write(out, text)
        _write(out.with_name(out.name + ".manifest.json"),
               _json_text(_manifest("mub-check", params, None, [out.name], started)))
    return EXIT_OK if rep["pass"] else EXIT_FAIL


def run_simulate(params: dict, out) -> int:
    started = time.perf_counter()
    cfg = ExperimentConfig(**params["config"]).validate()
    report, tables = run_experiment(cfg)
    out = Path(out)
    outputs = ["report.json"]
    doc = {"config": cfg.to_dict(), "report": report.to_dict()}
    _write(out / "report.json", _json_text(doc))
    for t in tables:
        name = f"tables/setting_{t.x:02d}.csv"
        rows = [(a, b, t.counts[a, b].item()) for a in range(cfg.d) for b in range(cfg.d)]
        _write(out / name, _csv_text(TABLE_HEADER, rows))
        outputs.append(name)
    _write(out / "manifest.json", _json_text(_manifest("simulate", params, cfg.seed, outputs, started)))
    sys.stdout.write(_json_text(report.to_dict()))
    return EXIT_OK


def run_sweep(params: dict, out) -> int:
    started = time.perf_counter()
    cfg = ExperimentConfig(**params["config"]).validate()
    p_list = parse_p_range(params["p_range"])
    res = sweep_and_fit(cfg, p_list, workers=params.get("workers", 1))
    out = Path(out)
    _write(out / "sweep.csv", _csv_text(SWEEP_HEADER, res.rows()))
    summary = res.summary()
    summary["p_min_theory"] = p_min_theory(cfg.d)
    summary["config"] = cfg.to_dict()
    _write(out / "sweep.json", _json_text(summary))
    _write(out / "manifest.json",
           _json_text(_manifest("sweep", params, cfg.seed, ["sweep.csv", "sweep.json"], started)))
    sys.stdout.write(_json_text(res.summary()))
    return EXIT_OK


def run_report(params: dict, out) -> int:
    started = time.perf_counter()
    rows = cmd_report(params["inputs"])
    if out is None:
        sys.stdout.write(_csv_text(REPORT_HEADER, rows) if params["format"] == "csv"
                         else _json_text({"rows": rows, "two_setting_limit": 0.5}))
        return EXIT_OK
    out = Path(out)
    _write(out / "pmin.csv", _csv_text(REPORT_HEADER, rows))
    _write(out / "pmin.json", _json_text({"rows": rows, "two_setting_limit": 0.5}))
    _write(out / "manifest.json",
           _json_text(_manifest("report", params, None, ["pmin.csv", "pmin.json"], started)))
    return EXIT_OK


RUNNERS = {
    "bounds": run_bounds,
    "mub-check": run_mub_check,
    "simulate": run_simulate,
    "sweep": run_sweep,
    "report": run_report,
}


# -- argument parsing -----------------------------------------------------------------

def _int_list(s: str) -> list[int]:
    try:
        return [int(v) for v in s.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _spiral(s: str):
    return None if s.lower() == "flat" else float(s)


def _add_experiment_flags(sp):
    sp.add_argument("--config", help="flat key = value config file")
    sp.add_argument("--dim", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--counts", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--crosstalk", type=float)
    sp.add_argument("--spiral-sigma", type=_spiral, default=argparse.SUPPRESS,
                    help="Gaussian spiral bandwidth width, or 'flat'")
    sp.add_argument("--error-method", choices=["poisson", "repeat"])
    sp.add_argument("--repeats", type=int)
    sp.add_argument("--noise-model", choices=["pool", "direct"])
    sp.add_argument("--exact", action="store_true", default=None,
                    help="analytic probabilities, no sampling")
    sp.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="steersim", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"steersim {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("bounds", help="closed-form bounds and thresholds")
    sp.add_argument("--dims", type=_int_list, default=[2, 3, 4, 5, 7, 11])
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--out")

    sp = sub.add_parser("mub-check", help="verify the MUB family for one dimension")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--out")

    sp = sub.add_parser("simulate", help="simulate one run and estimate the functional")
    _add_experiment_flags(sp)

    sp = sub.add_parser("sweep", help="sweep p, fit S(p) and extract p_min")
    _add_experiment_flags(sp)
    sp.add_argument("--p-range", help="start:stop:step (stop inclusive)")
    sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("report", help="aggregate p_min over several sweeps")
    sp.add_argument("inputs", nargs="+", help="sweep.csv files (sweep.json must sit beside each)")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--out")

    sp = sub.add_parser("replay", help="re-run a command from its manifest")
    sp.add_argument("manifest")
    sp.add_argument("--out", required=True, help="output path (file or directory, as recorded)")
    return ap


def resolve_experiment(args, environ=None) -> tuple[dict, str | None]:
    """Merge config file, ``STEERSIM_SEED`` and flags (later wins)."""
    environ = os.environ if environ is None else environ
    values = read_config(args.config) if args.config else {}
    p_range = values.pop("p_range", None)
    if environ.get(SEED_ENV):
        try:
            values["seed"] = int(environ[SEED_ENV])
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer", {"seed": environ[SEED_ENV]}) from None
    flags = {"d": args.dim, "p": args.p, "counts": args.counts, "seed": args.seed,
             "eps_crosstalk": args.crosstalk, "error_method": args.error_method,
             "repeats": args.repeats, "noise_model": args.noise_model, "exact": args.exact}
    values.update({k: v for k, v in flags.items() if v is not None})
    if hasattr(args, "spiral_sigma"):
        values["spiral_sigma"] = args.spiral_sigma
    if getattr(args, "p_range", None):
        p_range = args.p_range
    if "d" not in values:
        raise ConfigError("dimension not given (--dim or 'd' in config)", {"d": "missing"})
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    cfg = ExperimentConfig(**{k: v for k, v in values.items() if k in names})
    cfg.validate()
    return dataclasses.asdict(cfg), p_range


def _params_from_args(args) -> dict:
    if args.command == "bounds":
        return {"dims": args.dims, "format": args.format}
    if args.command == "mub-check":
        return {"d": args.dim, "tol": args.tol}
    if args.command == "simulate":
        config, _ = resolve_experiment(args)
        return {"config": config}
    if args.command == "sweep":
        config, p_range = resolve_experiment(args)
        if not p_range:
            raise ConfigError("sweep needs --p-range or p_range in config", {"p_range": "missing"})
        parse_p_range(p_range)
        return {"config": config, "p_range": p_range, "workers": args.workers}
    if args.command == "report":
        return {"inputs": [str(p) for p in args.inputs], "format": args.format}
    raise AssertionError(args.command)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "replay":
            manifest = json.loads(Path(args.manifest).read_text())
            return RUNNERS[manifest["command"]](manifest["params"], args.out)
        return RUNNERS[args.command](_params_from_args(args), getattr(args, "out", None))
    except UnsupportedDimension as exc:
        print(f"steersim: unsupported dimension: {exc}", file=sys.stderr)
        return EXIT_DIM
    except ConfigError as exc:
        print(f"steersim: config error: {exc}", file=sys.stderr)
        for field, msg in exc.errors.items():
            print(f"  {field}: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except SteerSimError as exc:
        print(f"steersim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"steersim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
