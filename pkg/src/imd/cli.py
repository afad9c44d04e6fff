"""Command-line front end: phase diagrams, curve traces, distribution dumps,
Laplace-asymptote tables and the acceptance suite, as plot-ready CSV/JSON.

Every run is fully deterministic (the library has no random state and output
files carry no timestamps), so identical invocations produce byte-identical
artifacts.  Exit codes: 0 success, 1 domain error, 2 verification failure,
64 usage error, 74 unwritable output.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import exact, laplace, limits, phase, verification
from .thermo import ModelParams

__all__ = ["RunConfig", "run", "main"]

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_VERIFY = 2
EXIT_USAGE = 64
EXIT_IO = 74


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


@dataclass(frozen=True)
class RunConfig:
    """One fully-specified CLI invocation."""

    command: str
    h: float = 0.0
    J: float = 0.0
    N: Optional[int] = None
    N_list: Optional[tuple[int, ...]] = None
    eta: Optional[float] = None
    u: Optional[float] = None
    jmin: float = 0.0
    jmax: float = 0.0
    steps: int = 0
    suite: str = "all"
    output: Optional[str] = None
    fmt: str = "csv"


def _float17(x: float) -> str:
    return format(float(x), ".17g")


def _write_text(config: RunConfig, text: str) -> None:
    if config.output is None:
        sys.stdout.write(text)
        return
    try:
        with open(config.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as err:
        raise _OutputError(str(err)) from err


class _OutputError(Exception):
    pass


class _UsageError(Exception):
    pass


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _cmd_phase(config: RunConfig) -> int:
    report = phase.classify(ModelParams(config.h, config.J))
    payload = {"h": config.h, "J": config.J} | report.to_json_dict()
    _write_text(config, _json_text(payload))
    return EXIT_OK


def _cmd_critical(config: RunConfig) -> int:
    cp = phase.find_critical_point()
    _write_text(config, _json_text(cp.to_json_dict()))
    return EXIT_OK


def _cmd_gamma(config: RunConfig) -> int:
    if config.steps < 1:
        raise ValueError(f"--steps must be >= 1, got {config.steps}")
    J_values = np.linspace(config.jmin, config.jmax, config.steps)
    points = phase.trace_gamma([float(j) for j in J_values])
    if config.fmt == "json":
        _write_text(config, _json_text(phase.gamma_points_to_json(points)))
    else:
        buf = io.StringIO()
        phase.gamma_points_to_csv(points, buf)
        _write_text(config, buf.getvalue())
    return EXIT_OK


def _cmd_dist(config: RunConfig) -> int:
    if config.N is None:
        raise ValueError("dist requires --N")
    params = ModelParams(config.h, config.J)
    if config.eta is not None or config.u is not None:
        eta = config.eta if config.eta is not None else 0.0
        u = config.u if config.u is not None else 0.0
        law = limits.scaled_law(config.N, params, eta, u)
        if config.fmt == "json":
            payload = {
                "N": law.N, "h": params.h, "J": params.J, "eta": law.eta, "u": law.u,
                "position": list(map(float, law.positions)),
                "probability": list(map(float, law.probabilities)),
            }
            _write_text(config, _json_text(payload))
        else:
            buf = io.StringIO()
            law.write_csv(buf)
            _write_text(config, buf.getvalue())
    else:
        law = exact.monomer_law(config.N, params)
        if config.fmt == "json":
            _write_text(config, _json_text(law.to_json_dict()))
        else:
            buf = io.StringIO()
            law.write_csv(buf)
            _write_text(config, buf.getvalue())
    return EXIT_OK


def _cmd_laplace(config: RunConfig) -> int:
    if not config.N_list:
        raise ValueError("laplace requires --N")
    lines = ["N,log_quadrature,log_asymptote,ratio"]
    for n in config.N_list:
        result = laplace.laplace_approx(laplace.psi_family(config.h), n)
        lines.append(
            ",".join(
                [
                    str(n),
                    _float17(result.log_integral_quadrature),
                    _float17(result.log_asymptote),
                    _float17(np.exp(result.log_ratio)),
                ]
            )
        )
    _write_text(config, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_verify(config: RunConfig) -> int:
    results = verification.run_suite(config.suite)
    lines = []
    for res in results:
        lines.append(res.summary_line())
        lines.extend(res.detail_lines())
    n_fail = sum(not r.passed for r in results)
    lines.append(
        f"suite {config.suite!r}: {len(results) - n_fail}/{len(results)} criteria passed"
    )
    _write_text(config, "\n".join(lines) + "\n")
    return EXIT_OK if n_fail == 0 else EXIT_VERIFY


_COMMANDS = {
    "phase": _cmd_phase,
    "critical": _cmd_critical,
    "gamma": _cmd_gamma,
    "dist": _cmd_dist,
    "laplace": _cmd_laplace,
    "verify": _cmd_verify,
}


def run(config: RunConfig) -> int:
    """Execute one configuration; maps exceptions onto the exit-code contract."""
    try:
        return _COMMANDS[config.command](config)
    except _OutputError as err:
        print(f"imd: cannot write output: {err}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, OverflowError) as err:
        print(f"imd: {err}", file=sys.stderr)
        return EXIT_DOMAIN


def _build_parser() -> _Parser:
    parser = _Parser(prog="imd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output(p):
        p.add_argument("--output", help="write to this path instead of stdout")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")

    p = sub.add_parser("phase", help="classify (h, J): unique / coexistence / critical")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--J", type=float, required=True)
    add_output(p)

    p = sub.add_parser("critical", help="locate the critical point")
    add_output(p)

    p = sub.add_parser("gamma", help="trace the coexistence curve h = gamma(J)")
    p.add_argument("--jmin", type=float, required=True)
    p.add_argument("--jmax", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    add_output(p)

    p = sub.add_parser("dist", help="exact monomer-count law (optionally rescaled)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--J", type=float, required=True)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--u", type=float, default=None)
    add_output(p)

    p = sub.add_parser("laplace", help="quadrature vs Laplace asymptote rows")
    p.add_argument("--N", type=str, required=True,
                   help="comma-separated list of system sizes, e.g. 10,100,1000")
    p.add_argument("--h", type=float, default=0.0)
    add_output(p)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--suite", choices=sorted(verification.SUITES), default="all")
    add_output(p)

    return parser


def _config_from_args(args) -> RunConfig:
    fields = {
        "command": args.command,
        "output": getattr(args, "output", None),
        "fmt": getattr(args, "fmt", "csv"),
    }
    for name in ("h", "J", "eta", "u", "jmin", "jmax", "steps", "suite"):
        if hasattr(args, name) and getattr(args, name) is not None:
            fields[name] = getattr(args, name)
    if args.command == "dist":
        fields["N"] = args.N
        fields["eta"] = getattr(args, "eta", None)
        fields["u"] = getattr(args, "u", None)
    if args.command == "laplace":
        try:
            fields["N_list"] = tuple(int(tok) for tok in args.N.split(",") if tok)
        except ValueError:
            raise SystemExit(EXIT_USAGE)
    config = RunConfig(**fields)
    for name in ("h", "J", "eta", "u", "jmin", "jmax"):
        value = getattr(config, name)
        if value is not None and not math.isfinite(value):
            raise _UsageError(f"--{name} must be finite, got {value}")
    return config


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
    except SystemExit:
        print("imd: --N expects a comma-separated list of integers", file=sys.stderr)
        return EXIT_USAGE
    except _UsageError as err:
        print(f"imd: {err}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
