"""``neckforge run``: suite runner and report writer.

Reports go to ``--out``: one ``<suite>.json`` (or ``<suite>_checks.csv`` and
``<suite>_config.csv`` with ``--format csv``) per suite plus
``<suite>_<table>.csv`` for every table.  Exit status is 0 when every check
passes, 1 on a failed check or suite error and 2 on a configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import ConfigError

DEFAULTS = {
    "suite": "all",
    "n": 2,
    "sigma_exp": -150.0,
    "alpha": 0.05,
    "a_bold": 0.15,
    "delta": 0.01,
    "delta0": 4.0,
    "tau": -10.0,
    "b": -1e-6,
    "grid_nodes": 801,
    "tol": 1e-10,
    "seed": 0,
    "out": "neckforge_out",
    "format": "json",
    "figures": False,
}
INT_KEYS = {"n", "grid_nodes", "seed"}
FLOAT_KEYS = {"sigma_exp", "alpha", "a_bold", "delta", "delta0", "tau", "b", "tol"}
FORMATS = ("json", "csv")


def _suites():
    from .suites import SUITES
    return SUITES


def parse_config_file(path):
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{i}: expected 'key = value'")
        key, val = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{i}: unknown key {key!r}")
        out[key] = val
    return out


def _coerce(key, val):
    if key in INT_KEYS:
        try:
            return int(val)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key} must be an integer") from exc
    if key in FLOAT_KEYS:
        try:
            return float(val)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key} must be a number") from exc
    if key == "figures":
        if isinstance(val, bool):
            return val
        if str(val).lower() in ("1", "true", "yes", "on"):
            return True
        if str(val).lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError("figures must be a boolean")
    return str(val)


def resolve_config(file_values, overrides):
    cfg = dict(DEFAULTS)
    for src in (file_values, overrides):
        for k, v in src.items():
            if k not in DEFAULTS:
                raise ConfigError(f"unknown key {k!r}")
            cfg[k] = _coerce(k, v)
    if cfg["suite"] != "all" and cfg["suite"] not in _suites():
        raise ConfigError(f"unknown suite {cfg['suite']!r}")
    if cfg["format"] not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}")
    if cfg["n"] < 2:
        raise ConfigError("n must be >= 2")
    if cfg["sigma_exp"] > -30:
        raise ConfigError("sigma_exp must be <= -30")
    if not 0 < cfg["alpha"] < 0.2:
        raise ConfigError("alpha must lie in (0, 1/5)")
    if not cfg["delta0"] > 0:
        raise ConfigError("delta0 must be positive")
    if not (cfg["tau"] < 0 and cfg["b"] < 0):
        raise ConfigError("tau and b must be negative")
    if cfg["grid_nodes"] < 21:
        raise ConfigError("grid_nodes must be >= 21")
    if not cfg["tol"] > 0:
        raise ConfigError("tol must be positive")
    return cfg


def build_parser():
    p = argparse.ArgumentParser(prog="neckforge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command")
    r = sub.add_parser("run", help="run check suites and write reports")
    r.add_argument("--suite", help="suite name or 'all'")
    r.add_argument("--n", type=int, help="complex dimension parameter")
    r.add_argument("--sigma-exp", type=float, help="log|sigma|")
    r.add_argument("--alpha", type=float)
    r.add_argument("--a-bold", type=float)
    r.add_argument("--delta", type=float)
    r.add_argument("--delta0", type=float)
    r.add_argument("--tau", type=float, help="matching point of the template horn")
    r.add_argument("--b", type=float, help="b of the template horn")
    r.add_argument("--grid-nodes", type=int, help="toy solver grid size")
    r.add_argument("--tol", type=float, help="shift sweep tolerance on lambda")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="report directory")
    r.add_argument("--format", help="json or csv")
    r.add_argument("--config", help="'key = value' file; flags override it")
    r.add_argument("--figures", action="store_true", default=None,
                   help="also render PNG figures from the CSV tables")
    return p


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_report(result, cfg, out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    checks = [c.row() for c in result.checks]
    if cfg["format"] == "json":
        doc = {"suite": result.suite, "resolved_config": cfg, "checks": checks}
        if result.error is not None:
            doc["error"] = result.error
        with open(out_dir / f"{result.suite}.json", "w", newline="\n") as fh:
            json.dump(doc, fh, indent=2, allow_nan=False)
            fh.write("\n")
    else:
        keys = ["name", "value", "bound", "ratio", "pass", "paper_anchor"]
        _write_csv(out_dir / f"{result.suite}_checks.csv", keys,
                   [[c[k] for k in keys] for c in checks])
        cfg_rows = [[k, cfg[k]] for k in DEFAULTS]
        if result.error is not None:
            cfg_rows.append(["error", result.error])
        _write_csv(out_dir / f"{result.suite}_config.csv", ["key", "value"], cfg_rows)
    for name, (header, rows) in result.tables.items():
        _write_csv(out_dir / f"{result.suite}_{name}.csv", header, rows)


def _threads(n_jobs):
    raw = os.environ.get("NECKFORGE_THREADS")
    if raw is None:
        return max(1, min(n_jobs, os.cpu_count() or 1))
    try:
        k = int(raw)
    except ValueError as exc:
        raise ConfigError("NECKFORGE_THREADS must be an integer") from exc
    if k < 1:
        raise ConfigError("NECKFORGE_THREADS must be >= 1")
    return min(k, n_jobs)


def run(cfg):
    """Run the configured suites; returns the list of results in suite order."""
    from .suites import run_suite
    names = list(_suites()) if cfg["suite"] == "all" else [cfg["suite"]]
    workers = _threads(len(names))
    if workers == 1:
        results = [run_suite(nm, cfg) for nm in names]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_suite, names, [cfg] * len(names)))
    out = Path(cfg["out"])
    for res in results:
        write_report(res, cfg, out)
    if cfg["figures"]:
        from .figures import render
        render(results, out / "figures")
    return results


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "run":
        parser.print_help()
        return 2
    try:
        file_values = parse_config_file(args.config) if args.config else {}
        overrides = {k: v for k, v in vars(args).items()
                     if k not in ("command", "config") and v is not None}
        cfg = resolve_config(file_values, overrides)
        results = run(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    ok = True
    for res in results:
        for c in res.checks:
            print(f"{'PASS' if c.passed else 'FAIL'}  {res.suite}.{c.name}")
        if res.error is not None:
            print(f"ERROR {res.suite}: {res.error}")
        ok &= res.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
