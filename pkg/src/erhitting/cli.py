"""Command-line entry point: ``erhitting <command> [flags]``.

Settings resolve as command-line flag > ``--config`` file > built-in default.
The config file is flat UTF-8 ``key = value`` text with ``#`` comments; keys
are the long flag names (``k-max`` and ``k_max`` both work) and repeatable
values such as ``seed`` or ``grid`` take comma-separated lists.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields

from .errors import ErHittingError
from .experiments import COMMANDS, ExperimentConfig


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# dest -> parser for config-file values
_CONFIG_TYPES = {
    "n": int, "p": float, "seeds": _int_list, "target": int, "source": int, "graph": str,
    "mode": str, "grid": _int_list, "m": int, "k_max": int, "trials": int, "cap": int,
    "out": str, "format": str, "threads": int, "check": _bool, "calibrate": _bool,
    "envelope_constant": float, "empirical_p": _bool,
}
_ALIASES = {"seed": "seeds"}


def read_config(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            key = _ALIASES.get(key, key)
            if key not in _CONFIG_TYPES:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _CONFIG_TYPES[key](value)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return values


def _add(sub, common, name: str, **kwargs) -> argparse.ArgumentParser:
    # unset flags must stay absent so the config file and defaults can fill them
    return sub.add_parser(name, parents=[common], argument_default=argparse.SUPPRESS, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--n", type=int, help="vertex count")
    common.add_argument("--p", type=float, help="edge probability")
    common.add_argument("--seed", dest="seeds", type=int, action="append", help="RNG seed (repeatable)")
    common.add_argument("--target", type=int, help="target vertex v")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--threads", type=int, help="worker threads for independent solves")
    common.add_argument("--graph", help="read the graph from an edge-list file instead of sampling")
    common.add_argument("--check", action="store_const", const=True,
                        help="evaluate the command's pass/fail criteria and set the exit code")

    parser = argparse.ArgumentParser(prog="erhitting", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _add(sub, common, "gen", help="sample G(n,p) and write an edge list")

    hist = _add(sub, common, "hist", help="hitting times vs. predicted clusters")
    hist.add_argument("--mode", choices=["single", "all"])
    hist.add_argument("--calibrate", action="store_const", const=True,
                      help="fit the envelope constant on the reference ensemble first")
    hist.add_argument("--envelope-constant", dest="envelope_constant", type=float)
    hist.add_argument("--empirical-p", dest="empirical_p", action="store_const", const=True)

    scan = _add(sub, common, "scan", help="prediction error across an n-grid")
    scan.add_argument("--grid", type=_int_list, help="comma-separated vertex counts")
    scan.add_argument("--empirical-p", dest="empirical_p", action="store_const", const=True)

    clt = _add(sub, common, "clt", help="standardized H_12 over m realizations")
    clt.add_argument("--m", type=int, help="number of realizations")

    _add(sub, common, "verify", help="exact identities and calibrated checks")

    mix = _add(sub, common, "mix", help="distance to stationarity after k steps")
    mix.add_argument("--k-max", dest="k_max", type=int)

    _add(sub, common, "spectral", help="spectrum of D^-1/2 A D^-1/2")

    mc = _add(sub, common, "mc", help="simulated vs. exact hitting time")
    mc.add_argument("--source", type=int, help="start vertex w")
    mc.add_argument("--trials", type=int)
    mc.add_argument("--cap", type=int, help="step cap per walk")
    return parser


def resolve_config(argv=None) -> ExperimentConfig:
    args = vars(build_parser().parse_args(argv))
    values = {}
    config_path = args.pop("config", None)
    if config_path:
        values.update(read_config(config_path))
    values.update(args)
    known = {f.name for f in fields(ExperimentConfig)}
    return ExperimentConfig(**{k: v for k, v in values.items() if k in known}).validate()


def main(argv=None) -> int:
    try:
        cfg = resolve_config(argv)
    except (ValueError, OSError) as exc:
        print(f"erhitting: {exc}", file=sys.stderr)
        return 2
    try:
        result = COMMANDS[cfg.command](cfg)
    except (ErHittingError, OSError) as exc:
        print(f"erhitting {cfg.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if cfg.command == "gen":
        print(json.dumps(result.rows), file=sys.stderr)
    else:
        result.write(cfg.out, cfg.format)
    if not result.ok:
        failed = result.metadata.get("failures") or result.metadata.get("check")
        print(f"erhitting {cfg.command}: checks failed: {failed}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
