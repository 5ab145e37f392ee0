"""``qst`` command-line entry point.

Exit codes: 0 success, 2 configuration/usage error, 3 runtime or
calibration error. ``QST_LOG`` sets the log level and nothing else.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, harness
from .config import load_config, with_overrides
from .exceptions import ConfigError, QSTError, UsageError

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

logger = logging.getLogger("nvqst")


def payload_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def bundle(command: str, payload) -> str:
    header = {"command": command, "created_utc": datetime.now(timezone.utc).isoformat(),
              "version": __version__}
    return json.dumps({"header": header, "payload": payload}, indent=2, sort_keys=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qst", description="Time-independent NV-register state tomography")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [("calibrate", "estimate r_max / r_min"),
                        ("tomo", "simulate and reconstruct a test state"),
                        ("compare", "time-independent vs Ramsey budget and cross-check"),
                        ("plan", "print the conversion schedule")]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="experiment config JSON")
        p.add_argument("--state", help="test state label (zero, one, plus, minus, s1..s4)")
        p.add_argument("--seed", type=int, help="top-level seed (unsigned 64-bit)")
        p.add_argument("--out", default="qst_out", help="output directory (default: qst_out)")
        if name == "plan":
            p.add_argument("--n", type=int, help="qubit count (default: device.n from config)")
    return parser


def _outputs(args, cfg):
    if args.command == "calibrate":
        payload = harness.cmd_calibrate(cfg)
        return payload, {"calibration.json": bundle("calibrate", payload)}
    if args.command == "tomo":
        payload, files = harness.cmd_tomo(cfg)
        files = dict(files, **{"result.json": bundle("tomo", payload)})
        return payload, files
    if args.command == "compare":
        payload, files = harness.cmd_compare(cfg)
        files = dict(files, **{"compare.json": bundle("compare", payload)})
        return payload, files
    n = args.n if args.n is not None else cfg.device.n
    payload = harness.cmd_plan(n)
    return payload, {f"schedule_n{n}.json": payload_json(payload)}


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("QST_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = with_overrides(load_config(args.config), state=args.state, seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        payload, files = _outputs(args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QSTError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    # only write once everything succeeded, so partial results never land on disk
    out = Path(args.out)
    for name, text in files.items():
        write_atomic(out / name, text)
    sys.stdout.write(payload_json(payload) if args.command != "tomo" else payload_json(
        {k: payload[k] for k in ("state", "seed", "fidelity", "fidelity_raw", "fidelity_physical", "imag_rms")}))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
