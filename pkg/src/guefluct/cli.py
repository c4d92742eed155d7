"""``guefluct`` command line.

Subcommands
-----------
verify-identities   Airy tail-integral identities against quadrature.
kernel-stats        Expected count and number variance of ``[sqrt(2n) t, inf)``.
clt                 Monte Carlo eigenvalue CLT experiments.
zeros               Hermite zeros against their semicircle location estimates.

Every subcommand reads an optional flat ``key = value`` file (``--config``);
command-line flags override file values, which override defaults.  Primary
output goes to ``<out>/<subcommand>.<format>`` or to stdout when ``--out`` is
not given.  Wall time and other run-dependent facts go to a
``<subcommand>.meta.json`` sidecar so the primary file is byte-identical
across runs.

Exit codes: 0 success and all checks pass, 1 a check failed, 2 usage or
configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .airy_identities import AiryIntegralKind, airy_integral_closed, airy_integral_oracle
from .errors import ConfigError, EigensolverFailure, GuefluctError, QuadratureFailure
from .fluctuation_lab import SCHEMA_VERSION, ExperimentConfig, run
from .kernel import (
    Interval,
    KernelContext,
    bulk_count_prediction,
    edge_expected_count,
    expected_count,
    number_variance,
    variance_prediction,
)
from .semicircle import fit_zero_constant, hermite_zero_estimate, hermite_zero_simple
from .sampler import HERMITE_ZEROS_MAX_N, hermite_zeros

IDENTITY_TOL = 1e-8

# key -> (default, parser, help)
_KEYS = {
    "verify-identities": {
        "x_min": (-5.0, float, "left end of the x grid"),
        "x_max": (3.0, float, "right end of the x grid"),
        "grid_step": (0.25, float, "grid spacing"),
    },
    "kernel-stats": {
        "n": (2048, int, "matrix dimension (<= 4096)"),
        "t": (0.0, float, "scaled left endpoint: interval [sqrt(2n) t, inf)"),
        "lo": (None, float, "raw left endpoint (overrides t)"),
        "hi": (None, float, "raw right endpoint (default +inf)"),
    },
    "clt": {
        "mode": ("bulk_single", str, "bulk_single|edge_single|bulk_joint|edge_joint|mosteller"),
        "n": (1024, int, "matrix dimension"),
        "k": (None, int, "single modes: eigenvalue index"),
        "ks": (None, "ints", "joint modes: explicit ascending indices"),
        "thetas": ("", "floats", "joint modes: gap exponents"),
        "gamma": (None, float, "edge joint mode: k_1 = ceil(n^gamma)"),
        "lambdas": ("", "floats", "mosteller mode: quantile levels"),
        "replicates": (5000, int, "number of sampled spectra"),
        "sampler": ("tridiagonal", str, "tridiagonal|dense"),
    },
    "zeros": {
        "n": (50, int, "degree (1..2000)"),
        "k0": (10, int, "estimates use k0 <= k <= n - k0"),
    },
}
_COMMON = {
    "seed": (0, int, "master seed (unsigned 64-bit)"),
    "format": ("json", str, "json|csv"),
    "threads": (None, int, "worker threads (default: available CPUs)"),
    "out": (None, str, "output directory (default: stdout)"),
}


def _parse_value(kind, text):
    if text is None:
        return None
    if kind == "ints":
        return tuple(int(v) for v in str(text).replace(",", " ").split()) or None
    if kind == "floats":
        return tuple(float(v) for v in str(text).replace(",", " ").split())
    return kind(text)


def read_config_file(path):
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for number, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{number}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _keys_help(command):
    rows = [f"  {k} = {d!r}  ({h})" for k, (d, _, h) in {**_KEYS[command], **_COMMON}.items()]
    return "config keys (defaults):\n" + "\n".join(rows)


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value parameter file")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    common.add_argument("--out", help="output directory (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format (default json)")
    common.add_argument("--threads", type=int, help="worker thread cap")
    common.add_argument("--print-config", action="store_true", help="print the effective configuration and exit")

    parser = argparse.ArgumentParser(
        prog="guefluct",
        description="GUE eigenvalue fluctuation laboratory.",
        epilog="\n\n".join(f"[{c}]\n{_keys_help(c)}" for c in _KEYS),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"guefluct {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{verify-identities,kernel-stats,clt,zeros}")

    p = sub.add_parser("verify-identities", parents=[common], help="check the Airy integral identities",
                       epilog=_keys_help("verify-identities"), formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--grid-step", type=float, dest="grid_step")
    p.add_argument("--x-min", type=float, dest="x_min")
    p.add_argument("--x-max", type=float, dest="x_max")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    p = sub.add_parser("kernel-stats", parents=[common], help="expected count and number variance",
                       epilog=_keys_help("kernel-stats"), formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)

    p = sub.add_parser("clt", parents=[common], help="Monte Carlo CLT experiment",
                       epilog=_keys_help("clt"), formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--mode")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--ks")
    p.add_argument("--thetas")
    p.add_argument("--gamma", type=float)
    p.add_argument("--lambdas")
    p.add_argument("--replicates", type=int)
    p.add_argument("--sampler")

    p = sub.add_parser("zeros", parents=[common], help="Hermite zeros vs location estimates",
                       epilog=_keys_help("zeros"), formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--n", type=int)
    p.add_argument("--k0", type=int)
    return parser


def _resolve(args):
    """Merge defaults, config file and flags; reject unknown file keys."""
    spec = {**_KEYS[args.command], **_COMMON}
    values = {k: (_parse_value(kind, d) if isinstance(d, str) and kind in ("ints", "floats") else d)
              for k, (d, kind, _) in spec.items()}
    if args.config:
        raw = read_config_file(args.config)
        unknown = sorted(set(raw) - set(spec))
        if unknown:
            raise ConfigError(f"unknown config keys for {args.command}: {', '.join(unknown)}")
        for key, text in raw.items():
            try:
                values[key] = _parse_value(spec[key][1], text)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {text!r}") from exc
    for key, (_, kind, _) in spec.items():
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = _parse_value(kind, flag) if kind in ("ints", "floats") else flag
    if values["threads"] is None:
        values["threads"] = os.cpu_count() or 1
    if values["format"] not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    if not 0 <= values["seed"] < 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return values


def _emit(values, command, text, meta):
    if values["out"] is None:
        sys.stdout.write(text)
        return
    os.makedirs(values["out"], exist_ok=True)
    path = os.path.join(values["out"], f"{command}.{values['format']}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    with open(os.path.join(values["out"], f"{command}.meta.json"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _finite(obj):
    # JSON has no infinities; write them as strings
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _json_record(command, values, body):
    config = {k: v for k, v in values.items() if k not in ("out", "threads")}
    record = {"schema": SCHEMA_VERSION, "tool": "guefluct", "version": __version__, "command": command, "config": config}
    record.update(body)
    return json.dumps(_finite(record), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv(header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _log(message):
    print(message, file=sys.stderr, flush=True)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_verify_identities(values, inject_fault=False):
    step = values["grid_step"]
    if not step > 0:
        raise ConfigError("grid_step must be positive")
    count = int(round((values["x_max"] - values["x_min"]) / step))
    xs = [values["x_min"] + i * step for i in range(count + 1)]
    rows = []
    for kind in AiryIntegralKind:
        for x in xs:
            closed = airy_integral_closed(kind, x)
            if inject_fault:
                closed *= 1.0 + 1e-6
            oracle = airy_integral_oracle(kind, x)
            residual = abs(closed - oracle)
            rows.append((kind.value, x, closed, oracle, residual, residual <= IDENTITY_TOL))
    failing = [r for r in rows if not r[5]]
    for r in failing:
        _log(f"FAIL {r[0]} x={r[1]:g} residual={r[4]:.3e}")
    if values["format"] == "csv":
        text = _csv(["kind", "x", "closed_form", "oracle", "residual", "pass"], rows)
    else:
        body = {
            "tolerance": IDENTITY_TOL,
            "rows": [dict(zip(("kind", "x", "closed_form", "oracle", "residual", "pass"), r)) for r in rows],
            "max_residual": max(r[4] for r in rows),
            "passed": not failing,
        }
        text = _json_record("verify-identities", values, body)
    return text, 0 if not failing else 1


def cmd_kernel_stats(values):
    n = values["n"]
    if not 1 <= n <= 4096:
        raise ConfigError("kernel-stats needs 1 <= n <= 4096")
    ctx = KernelContext(n)
    lo = values["lo"] if values["lo"] is not None else math.sqrt(2.0 * n) * values["t"]
    hi = values["hi"] if values["hi"] is not None else math.inf
    interval = Interval(lo, hi)
    _log(f"kernel-stats: n={n} interval=[{lo}, {hi}]")
    body = {
        "interval": [lo, hi],
        "expected_count": expected_count(ctx, interval),
        "number_variance": number_variance(ctx, interval),
    }
    t = values["t"]
    if values["lo"] is None and values["hi"] is None and -1.0 < t < 1.0:
        pred_count = bulk_count_prediction(n, t, 0.0)
        pred_var = variance_prediction(n, t)
        body["count_prediction"] = pred_count
        body["count_difference"] = body["expected_count"] - pred_count
        body["variance_prediction"] = pred_var
        body["variance_ratio"] = body["number_variance"] / pred_var if pred_var > 0 else None
        if 0.5 <= t < 1.0:
            edge = edge_expected_count(ctx, t)
            body["edge_leading"] = edge.leading
            body["edge_airy_closed_form"] = edge.airy_closed_form
            body["edge_difference"] = edge.difference
            body["edge_check_passed"] = abs(edge.difference) <= 2.0
    if values["format"] == "csv":
        text = _csv(["key", "value"], [(k, v) for k, v in body.items()])
    else:
        text = _json_record("kernel-stats", values, body)
    return text, 0


def cmd_clt(values):
    thetas = values["thetas"] or ()
    lambdas = values["lambdas"] or ()
    config = ExperimentConfig(
        mode=values["mode"],
        n=values["n"],
        replicates=values["replicates"],
        master_seed=values["seed"],
        sampler=values["sampler"],
        k=values["k"],
        ks=values["ks"],
        thetas=thetas,
        gamma=values["gamma"],
        lambdas=lambdas,
        threads=values["threads"],
    )
    _log(f"clt: mode={config.mode.value} n={config.n} replicates={config.replicates}")
    report = run(config, progress=lambda done, total: _log(f"  {done}/{total} replicates"))
    for v in report.verdicts:
        _log(f"{'PASS' if v.passed else 'FAIL'} {v.name}: {v.value:.4f} target {v.target:g} +- {v.threshold:g}")
    text = report.to_csv() if values["format"] == "csv" else report.to_json()
    return text, 0 if report.passed else 1


def cmd_zeros(values):
    n = values["n"]
    if not 1 <= n <= HERMITE_ZEROS_MAX_N:
        raise ConfigError(f"zeros needs 1 <= n <= {HERMITE_ZEROS_MAX_N}")
    z = hermite_zeros(n)
    rows = []
    for k in range(1, n + 1):
        est = bound = None
        if values["k0"] <= k <= n - values["k0"]:
            est, bound = hermite_zero_estimate(n, k, values["k0"])
        simple = hermite_zero_simple(n, k) if k < n else None
        rows.append({
            "k": k,
            "zero": float(z[k - 1]),
            "estimate": est,
            "estimate_error": None if est is None else float(z[k - 1] - est),
            "bound_unit_constant": bound,
            "simple_scaled_error": None if simple is None else float((z[k - 1] - simple) * math.sqrt(n)),
        })
    fitted = fit_zero_constant(n, z) if n >= 5 else None
    if values["format"] == "csv":
        keys = list(rows[0])
        text = _csv(keys, [["" if r[k] is None else r[k] for k in keys] for r in rows])
    else:
        text = _json_record("zeros", values, {"n": n, "rows": rows, "fitted_constant": fitted})
    return text, 0


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        values = _resolve(args)
        if args.print_config:
            shown = {k: v for k, v in values.items()}
            sys.stdout.write(json.dumps({"command": args.command, "config": shown}, indent=2, sort_keys=True, default=list) + "\n")
            return 0
        if args.command == "zeros" and values["n"] < 1:
            parser.error("zeros: n must be at least 1")
        start = time.perf_counter()
        if args.command == "verify-identities":
            text, code = cmd_verify_identities(values, inject_fault=args.inject_fault)
        elif args.command == "kernel-stats":
            text, code = cmd_kernel_stats(values)
        elif args.command == "clt":
            text, code = cmd_clt(values)
        else:
            text, code = cmd_zeros(values)
        meta = {
            "command": args.command,
            "version": __version__,
            "seed": values["seed"],
            "threads": values["threads"],
            "wall_time_seconds": time.perf_counter() - start,
            "exit_code": code,
            "numpy": np.__version__,
        }
        _emit(values, args.command, text, meta)
        return code
    except ConfigError as exc:
        _log(f"configuration error: {exc}")
        return 2
    except (QuadratureFailure, EigensolverFailure) as exc:
        extra = ""
        if isinstance(exc, QuadratureFailure):
            extra = f" (panels={exc.panels}, error_estimate={exc.error_estimate})"
        _log(f"numerical failure: {exc}{extra}")
        return 3
    except GuefluctError as exc:
        _log(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
