"""Command line entry point: ``hyperlab <command> [flags]``.

Vertices are labelled ``0..n-1`` everywhere in input and output.

Exit codes: 0 success, 2 usage or parameter error, 3 resource cap hit,
4 internal check failed (e.g. oracle mismatch).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import asdict
from typing import Any, Callable

import numpy as np

from . import __version__
from .errors import ResourceLimitError
from .experiments import (
    enumerate_well_constructed,
    hitting_trials,
    model_transfer_check,
    oracle_check,
    sample_degree_counts,
    summarize_coincidence,
    supercritical_component,
    threshold_sweep,
)
from .model import GENERATOR, Params
from .statistics import CnParameterization

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE, EXIT_INTERNAL = 0, 2, 3, 4


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    """An internal consistency check failed; ``detail`` goes to stderr."""

    def __init__(self, message: str, detail: str = ""):
        super().__init__(message)
        self.detail = detail


# (flag, type, default); default REQUIRED means the flag must come from argv or --config
REQUIRED = object()
COMMON = [("seed", int, REQUIRED), ("format", str, "csv"), ("out", str, None),
          ("threads", int, None), ("memcap", int, None)]
PARAMS = [("n", int, REQUIRED), ("k", int, REQUIRED), ("j", int, REQUIRED)]

COMMANDS: dict[str, tuple[str, list]] = {
    "hitting": ("hitting times of isolation and j-connectivity in the process",
                PARAMS + [("trials", int, REQUIRED)]),
    "degree-dist": ("number D_s of j-sets of degree s in H(n,p) versus Poisson",
                    PARAMS + [("s", int, REQUIRED), ("c", float, REQUIRED), ("trials", int, REQUIRED)]),
    "sweep": ("fractions with no isolated j-set / j-connected over a grid of c",
              PARAMS + [("c-from", float, REQUIRED), ("c-to", float, REQUIRED),
                        ("c-step", float, REQUIRED), ("trials", int, REQUIRED),
                        ("model", str, "binomial")]),
    "transfer": ("binomial versus uniform model at matched density",
                 PARAMS + [("c", float, REQUIRED), ("trials", int, REQUIRED)]),
    "oracle-check": ("tracker versus definitional BFS on random small instances",
                     [("instances", int, 1000), ("max-n", int, 12)]),
    "enumerate-wc": ("count well-constructed hypergraphs up to isomorphism",
                     [("k", int, REQUIRED), ("j", int, REQUIRED), ("max-jsize", int, REQUIRED),
                      ("vertex-budget", int, 10)]),
    "component": ("largest j-component of H(n,p*) just above the component threshold",
                  PARAMS + [("epsilon", float, REQUIRED)]),
}
_SEED_OPTIONAL = {"oracle-check": 0, "enumerate-wc": 0}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hyperlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (help_text, flags) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        for flag, typ, default in flags + COMMON:
            kw: dict[str, Any] = {"type": typ, "default": None}
            if flag == "format":
                kw["choices"] = ["csv", "json"]
            if flag == "model":
                kw["choices"] = ["binomial", "uniform"]
            shown = "required" if default is REQUIRED else f"default {default}"
            p.add_argument(f"--{flag}", help=shown, **kw)
        p.add_argument("--config", help="file of key=value lines supplying any flag")
    return parser


def read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (x.strip() for x in line.split("=", 1))
            values[key.lstrip("-").replace("_", "-")] = value
    return values


def resolve(args: argparse.Namespace) -> dict[str, Any]:
    """Merge argv, config file and defaults; argv wins over the file."""
    flags = COMMANDS[args.command][1] + COMMON
    config = read_config(args.config) if args.config else {}
    known = {f for f, _, _ in flags}
    unknown = set(config) - known
    if unknown:
        raise UsageError(f"unknown config keys for {args.command}: {', '.join(sorted(unknown))}")
    out = {}
    for flag, typ, default in flags:
        value = getattr(args, flag.replace("-", "_"))
        if value is None and flag in config:
            try:
                value = typ(config[flag])
            except ValueError:
                raise UsageError(f"config value {flag}={config[flag]!r} is not a valid {typ.__name__}")
        if value is None:
            if flag == "seed" and args.command in _SEED_OPTIONAL:
                value = _SEED_OPTIONAL[args.command]
            elif default is REQUIRED:
                raise UsageError(f"{args.command}: --{flag} is required")
            else:
                value = default
        out[flag.replace("-", "_")] = value
    if out["format"] not in ("csv", "json"):
        raise UsageError(f"--format must be csv or json, got {out['format']!r}")
    if out["threads"] is None:
        out["threads"] = os.cpu_count() or 1
    if out["threads"] < 1:
        raise UsageError("--threads must be >= 1")
    if "trials" in out and out["trials"] < 1:
        raise UsageError("--trials must be >= 1")
    return out


def _params(o: dict) -> Params:
    return Params(o["n"], o["k"], o["j"])


def c_grid(c_from: float, c_to: float, c_step: float) -> list[float]:
    if c_step <= 0:
        raise UsageError("--c-step must be positive")
    count = int(np.floor((c_to - c_from) / c_step + 1e-9)) + 1
    if count < 1:
        raise UsageError(f"empty c grid: --c-from {c_from} is above --c-to {c_to}")
    return [round(c_from + i * c_step, 10) for i in range(count)]


# Each command returns (csv header, rows, summary dict or None).
Table = tuple[list[str], list[list[Any]], "dict[str, Any] | None"]


def cmd_hitting(o: dict) -> Table:
    records = hitting_trials(_params(o), o["trials"], o["seed"], o["threads"], o["memcap"])
    rows = [[t, r.seed, r.tau_i, r.tau_c, int(r.equal)] for t, r in enumerate(records)]
    return ["trial", "seed", "tau_i", "tau_c", "equal"], rows, asdict(summarize_coincidence(records))


def cmd_degree_dist(o: dict) -> Table:
    cp = CnParameterization(o["s"], o["c"])
    res = sample_degree_counts(_params(o), cp, o["trials"], o["seed"], o["threads"], memcap=o["memcap"])
    rows = [[t, d] for t, d in enumerate(res.observations)]
    summary = {"mean": res.mean, "exact_expectation": res.exact_expectation,
               "limit_lambda": res.limit_lambda, "tv_to_poisson": res.tv_to_poisson}
    return ["trial", "D_s"], rows, summary


def cmd_sweep(o: dict) -> Table:
    grid = c_grid(o["c_from"], o["c_to"], o["c_step"])
    res = threshold_sweep(_params(o), grid, o["trials"], o["seed"], o["model"], o["threads"], o["memcap"])
    rows = [[r.c, r.trials, r.frac_no_isolated, r.frac_connected] for r in res]
    return ["c", "trials", "frac_no_isolated", "frac_connected"], rows, None


def cmd_transfer(o: dict) -> Table:
    r = model_transfer_check(_params(o), o["c"], o["trials"], o["seed"], o["threads"], o["memcap"])
    rows = [["binomial", r.trials, r.binomial_no_isolated, r.binomial_connected],
            ["uniform", r.trials, r.uniform_no_isolated, r.uniform_connected]]
    summary = {"c": r.c, "p": r.p, "M": r.M,
               "diff_no_isolated": r.diff_no_isolated, "diff_connected": r.diff_connected}
    return ["model", "trials", "frac_no_isolated", "frac_connected"], rows, summary


def cmd_oracle_check(o: dict) -> Table:
    res = oracle_check(o["instances"], o["max_n"], o["seed"])
    if res.mismatch is not None:
        raise CheckFailed(f"partition mismatch on instance {res.checked - 1}", res.mismatch)
    return ["instances", "max_n", "mismatches"], [[res.checked, o["max_n"], 0]], None


def cmd_enumerate_wc(o: dict) -> Table:
    counts = enumerate_well_constructed(o["k"], o["j"], o["max_jsize"], o["vertex_budget"])
    for c in counts:
        if c.count > c.bound:
            raise CheckFailed(f"j-size {c.jsize}: {c.count} classes exceeds bound {c.bound}")
    return ["jsize", "count", "bound"], [[c.jsize, c.count, c.bound] for c in counts], None


def cmd_component(o: dict) -> Table:
    r = supercritical_component(_params(o), o["epsilon"], o["seed"], o["memcap"])
    report = asdict(r)
    report["params"] = asdict(r.params)
    return [], [], report


HANDLERS: dict[str, Callable[[dict], Table]] = {
    "hitting": cmd_hitting,
    "degree-dist": cmd_degree_dist,
    "sweep": cmd_sweep,
    "transfer": cmd_transfer,
    "oracle-check": cmd_oracle_check,
    "enumerate-wc": cmd_enumerate_wc,
    "component": cmd_component,
}


def _cell(x: Any) -> str:
    return repr(x) if isinstance(x, float) else str(x)


def render(command: str, fmt: str, table: Table) -> str:
    header, rows, summary = table
    if command == "component" or fmt == "json":
        if command == "component":
            payload: Any = summary
        else:
            payload = {"rows": [dict(zip(header, r)) for r in rows]}
            if summary is not None:
                payload["summary"] = summary
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([_cell(x) for x in r] for r in rows)
    if summary is not None:
        buf.write("# " + ",".join(summary) + "\n")
        buf.write("# " + ",".join(_cell(v) for v in summary.values()) + "\n")
    return buf.getvalue()


def manifest(command: str, argv: list[str], opts: dict, wall: float) -> dict:
    return {
        "command": command,
        "argv": argv,
        "options": opts,
        "seed": opts.get("seed"),
        "trial_seeds": "seed + trial_index",
        "generator": GENERATOR,
        "numpy_version": np.__version__,
        "artifact_version": __version__,
        "wall_time_s": wall,
    }


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on malformed flags
    try:
        opts = resolve(args)
        start = time.perf_counter()
        table = HANDLERS[args.command](opts)
        wall = time.perf_counter() - start
    except (UsageError, ValueError) as exc:
        print(f"hyperlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceLimitError, MemoryError) as exc:
        print(f"hyperlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except AssertionError as exc:
        print(f"hyperlab {args.command}: internal check failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except CheckFailed as exc:
        print(f"hyperlab {args.command}: {exc}", file=sys.stderr)
        if exc.detail:
            sys.stderr.write(exc.detail)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"hyperlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(args.command, opts["format"], table)
    if opts["out"]:
        with open(opts["out"], "w") as fh:
            fh.write(text)
        with open(opts["out"] + ".manifest.json", "w") as fh:
            json.dump(manifest(args.command, argv, opts, wall), fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
