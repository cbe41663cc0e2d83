"""Command-line frontend: ``idfield {cf,simulate,verify} --config PATH [--out PATH]``.

Exit codes: 0 success or verification pass, 1 verification fail, 2 configuration
error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import replace

import numpy as np

from .charfn import CumulantRequest, cf_pow
from .config import ModelConfig, load_config
from .errors import ConfigurationError, DivergenceError, DomainError, QuadratureError
from .simulate import simulate_field, write_samples_csv
from .verify import verify_infinite_divisibility

log = logging.getLogger("idfield")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
_NUMERIC_ERRORS = ("QuadratureError", "DivergenceError")


def atomic_write(path, text):
    """Write ``text`` to ``path`` via a temporary file in the same directory and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write(out, text)


def _clean(obj):
    """Plain-JSON copy: numpy scalars unwrapped, non-finite floats mapped to null."""
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _apply_overrides(cfg: ModelConfig, args) -> ModelConfig:
    sim = cfg.simulation
    ver = cfg.verification
    if args.seed is not None:
        sim = replace(sim, seed=args.seed)
    if args.replicates is not None:
        if args.replicates < 1:
            raise ConfigurationError("--replicates", "must be >= 1")
        sim = replace(sim, replicates=args.replicates)
        ver = replace(ver, replicates=args.replicates)
    return replace(cfg, simulation=sim, verification=ver)


def cmd_cf(cfg: ModelConfig, out):
    req = CumulantRequest.build(cfg.triplet, cfg.kernel, cfg.points, quadrature=cfg.quadrature)
    report = cf_pow(req, cfg.gamma, cfg.cf_arguments)
    if out is not None and out.endswith(".csv"):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = len(cfg.points)
        w.writerow(["index"] + [f"x_{j}" for j in range(n)] + ["re", "im", "error_estimate"])
        for i, (x, v, e) in enumerate(zip(report.arguments, report.cf_values, report.error_estimates)):
            w.writerow([i] + [f"{c:.17g}" for c in x] + [f"{v.real:.17g}", f"{v.imag:.17g}", f"{e:.17g}"])
        _emit(buf.getvalue(), out)
    else:
        _emit(json.dumps(_clean(report.to_dict()), indent=2) + "\n", out)
    log.info("evaluated the CF at %d arguments", len(report.arguments))
    return EXIT_OK


def cmd_simulate(cfg: ModelConfig, out):
    samples = simulate_field(cfg.triplet, cfg.kernel, cfg.points, cfg.simulation)
    buf = io.StringIO()
    write_samples_csv(samples, buf)
    _emit(buf.getvalue(), out)
    log.info("wrote %d replicates of %d field points", len(samples), len(cfg.points))
    return EXIT_OK


def cmd_verify(cfg: ModelConfig, out):
    report = verify_infinite_divisibility(
        cfg.triplet, cfg.kernel, cfg.points,
        config=cfg.simulation, settings=cfg.verification, quadrature=cfg.quadrature,
    )
    _emit(json.dumps(_clean(report.to_dict()), indent=2) + "\n", out)
    log.info("%s", report.summary)
    if report.error is not None:
        return EXIT_NUMERIC if report.error_kind in _NUMERIC_ERRORS else EXIT_CONFIG
    return EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {"cf": cmd_cf, "simulate": cmd_simulate, "verify": cmd_verify}


def build_parser():
    parser = argparse.ArgumentParser(prog="idfield", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__name__.replace("cmd_", "") + " subcommand")
        p.add_argument("--config", required=True, metavar="PATH", help="JSON model configuration")
        p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
        p.add_argument("--seed", type=int, help="override simulation.seed")
        p.add_argument("--replicates", type=int, help="override the replicate count")
        p.add_argument("--quiet", action="store_true", help="only log warnings and errors")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        return COMMANDS[args.command](cfg, args.out)
    except (ConfigurationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, DivergenceError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
