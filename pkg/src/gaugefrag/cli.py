"""Command-line entry point.

Subcommands: u1-spectrum, quench, sectors, sw-check. Each takes
``--config <path>`` (flat key-value file) and ``--out <dir>``. Exit codes:
0 success, 2 configuration error, 3 numerical failure.

Set GAUGEFRAG_MAX_THREADS to cap BLAS/OpenMP thread counts; it must take
effect before numpy loads, so the cap is applied here prior to importing the
numerical modules.
"""

from __future__ import annotations

import argparse
import os
import sys

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "BLIS_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


def _apply_thread_cap():
    cap = os.environ.get("GAUGEFRAG_MAX_THREADS")
    if not cap:
        return
    if not cap.isdigit() or int(cap) < 1:
        raise SystemExit(f"GAUGEFRAG_MAX_THREADS must be a positive integer, got {cap!r}")
    for var in _THREAD_VARS:
        os.environ.setdefault(var, cap)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaugefrag",
        description="Exact-diagonalization experiments on truncated gauge ladders",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("u1-spectrum", "k=0 eigenstate statistics, entropies and overlaps"),
        ("quench", "quench vs microcanonical observable time series"),
        ("sectors", "Krylov sector counts of the cutoff Hamiltonian"),
        ("sw-check", "second-order correction norms and fitted powers"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="flat key=value config file")
        cmd.add_argument("--out", help="output directory (default: out_dir from config)")
    return parser


def main(argv=None) -> int:
    _apply_thread_cap()
    args = _build_parser().parse_args(argv)

    from .errors import ConfigError, NumericalError
    from . import experiments

    runners = {
        "u1-spectrum": experiments.run_u1_spectrum,
        "quench": experiments.run_quench,
        "sectors": experiments.run_fragmentation,
        "sw-check": experiments.run_sw_check,
    }
    try:
        raw = experiments.parse_config_file(args.config)
        out_dir = args.out or raw.get("out_dir")
        if not out_dir:
            raise ConfigError("no output directory: pass --out or set out_dir")
        result = runners[args.command](raw, out_dir)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in result.files:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
