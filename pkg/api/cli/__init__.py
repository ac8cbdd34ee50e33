# api/cli/__init__.py
# -----------------------------------------------------------------------------
# `python -m api.cli <command> ...`: scene synthesis, edge fields, training,
# evaluation, single-image upsampling, fusion, and the HTTP server.
# -----------------------------------------------------------------------------

from __future__ import annotations

import argparse
import logging
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from api.cli.commands import COMMANDS, Outputs, cmd_serve
from api.cli.run_config import read_key_values, resolve_run_config
from common.config import settings
from common.errors import EgcnnError
from common.log_setup import configure_logging

logger = logging.getLogger("api.cli")

# flag dest -> RunConfig key, for flags whose names differ
_RENAMES = {"branch": "branches", "lr": "learning_rate"}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file; explicit flags override it")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)


def _add_edge(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", help="canny-k3, canny-k5 or file:PATH")
    p.add_argument("--tau", type=float)


def _add_training(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--keep-best", action="store_const", const=True)
    p.add_argument("--loss-csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="egcnn", description="Edge-guided sparse depth upsampling")
    parser.add_argument("--log-level", default=None, help=f"default {settings.log_level}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic box-world dataset")
    _add_common(p)
    p.add_argument("--out")
    p.add_argument("--count", type=int)
    p.add_argument("--size", help="HxW, e.g. 128x128")
    p.add_argument("--rectangles", type=int)

    p = sub.add_parser("edge-field", help="edge-dist field of one image")
    _add_common(p)
    _add_edge(p)
    p.add_argument("--image")
    p.add_argument("--out")
    p.add_argument("--e-edge", type=float)
    p.add_argument("--e-max", type=float)

    p = sub.add_parser("train", help="train an upsampler")
    _add_common(p)
    _add_edge(p)
    _add_training(p)
    p.add_argument("--data")
    p.add_argument("--kind", choices=["edge", "normal", "sparse"])
    p.add_argument("--rate", type=float)
    p.add_argument("--gamma", choices=["softplus", "relu_shift"])
    p.add_argument("--resample-each-epoch", action="store_const", const=True)
    p.add_argument("--out")

    p = sub.add_parser("eval", help="metrics of an upsampler on a dataset")
    _add_common(p)
    _add_edge(p)
    p.add_argument("--ckpt")
    p.add_argument("--data")
    p.add_argument("--rate", type=float)
    p.add_argument("--report")

    p = sub.add_parser("upsample", help="densify one sparse depth map")
    _add_common(p)
    p.add_argument("--ckpt")
    p.add_argument("--depth")
    p.add_argument("--conf", help="confidence in [0, 1]: PFM, or PNG/PGM scaled by its full range")
    p.add_argument("--edge-field")
    p.add_argument("--out")

    p = sub.add_parser("fuse-train", help="train the fusion network over frozen branches")
    _add_common(p)
    _add_training(p)
    p.add_argument("--branch", nargs="+")
    p.add_argument("--data")
    p.add_argument("--rate", type=float)
    p.add_argument("--hidden", type=int)
    p.add_argument("--out")

    p = sub.add_parser("fuse-eval", help="metrics of a fusion network and its branches")
    _add_common(p)
    p.add_argument("--ckpt")
    p.add_argument("--branch", nargs="+")
    p.add_argument("--data")
    p.add_argument("--rate", type=float)
    p.add_argument("--report")

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _flags(ns: argparse.Namespace) -> Dict[str, Any]:
    skip = {"command", "config", "log_level"}
    return {_RENAMES.get(k, k): v for k, v in vars(ns).items() if k not in skip}


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the process exit status."""
    ns = build_parser().parse_args(argv)
    configure_logging(ns.log_level)
    if ns.command == "serve":
        cmd_serve(ns.host, ns.port)
        return 0

    outputs = Outputs()
    try:
        file_values = read_key_values(ns.config) if ns.config else {}
        cfg = resolve_run_config(ns.command, file_values, _flags(ns))
        COMMANDS[ns.command](cfg, outputs)
    except (EgcnnError, ValidationError, OSError) as e:
        logger.error("%s failed: %s", ns.command, e)
        outputs.discard()
        return 1
    return 0


__all__ = ["build_parser", "main"]
