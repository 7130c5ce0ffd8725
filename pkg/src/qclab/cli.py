#!/usr/bin/env python3
"""
qclab command line.

Reads algebra, graph and cloud documents, runs one experiment and writes a
deterministic YAML report (tool version, resolved config, result) to stdout
or ``--out``. Exit status 0 on success, 2 on validation errors, 3 when a
solver does not converge.
"""

import argparse
import logging
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, model_validator

from src.qclab.classifier import (
    DeclaredGroup,
    classify_batch,
    exp_line_defect_bound,
    exp_line_metric,
    exp_line_sequence,
    load_group,
    qc_implies_qi_verdict,
)
from src.qclab.config import TOOL_NAME, TOOL_VERSION, get_settings
from src.qclab.errors import ConfigError, QclabError, Unsupported
from src.qclab.format import render_report
from src.qclab.graph_lab.capacity import p_capacity, p_energy
from src.qclab.graph_lab.ferrand import ferrand_hyperbolic, ferrand_parabolic
from src.qclab.graph_lab.graph import (
    AT_INFINITY,
    Capacitor,
    graph_from_document,
    graph_to_document,
    load_graph,
    load_graph_document,
)
from src.qclab.graph_lab.monotone import compare_orders, is_monotone
from src.qclab.graph_lab.net import build_net, load_cloud, net_order_bound
from src.qclab.graph_lab.perimeter import isoperimetric_profile
from src.qclab.graph_lab.sequences import quasi_straight_defect
from src.qclab.graph_lab.sobolev import sobolev_constant_probe
from src.qclab.linalg import parse_rational
from src.qclab.logging_config import configure_logger_without_timestamp

logger = logging.getLogger("qclab.cli")


class Command(str, Enum):
    CLASSIFY = "classify"
    VERDICT = "verdict"
    CAPACITY = "capacity"
    PROFILE = "profile"
    STRAIGHTEN = "straighten"
    QSTRAIGHT = "qstraight"
    NET = "net"
    PROBE = "probe"
    FERRAND = "ferrand"


# command -> (number of inputs, or None for one or more; required options)
REQUIREMENTS: Dict[Command, Tuple[Optional[int], Tuple[str, ...]]] = {
    Command.CLASSIFY: (None, ()),
    Command.VERDICT: (2, ()),
    Command.CAPACITY: (1, ("E", "F", "exponent_p")),
    Command.PROFILE: (1, ("volume",)),
    Command.STRAIGHTEN: (1, ()),
    Command.QSTRAIGHT: (1, ("vector", "k_min", "k_max")),
    Command.NET: (1, ("epsilon",)),
    Command.PROBE: (1, ("N", "q")),
    Command.FERRAND: (1, ("x", "y", "exponent_Q")),
}


class RunConfig(BaseModel):
    command: Command
    input_paths: List[str]
    output_path: Optional[str] = None
    exponent_p: Optional[float] = None
    exponent_Q: Optional[float] = None
    mode: Optional[str] = None
    seed: int = 0
    tolerance: Optional[float] = Field(None, gt=0)
    E: Optional[List[int]] = None
    F: Optional[Union[List[int], str]] = None
    volume: Optional[float] = None
    epsilon: Optional[float] = None
    N: Optional[float] = None
    q: Optional[float] = None
    samples: int = 100
    vector: Optional[List[str]] = None
    k_min: Optional[int] = None
    k_max: Optional[int] = None
    x: Optional[int] = None
    y: Optional[int] = None
    kind: str = "hyperbolic"
    jobs: int = Field(1, gt=0)

    @model_validator(mode="after")
    def check_required(self):
        count, required = REQUIREMENTS[self.command]
        if count is None and not self.input_paths:
            raise ConfigError(f"{self.command.value} needs at least one input file")
        if count is not None and len(self.input_paths) != count:
            raise ConfigError(
                f"{self.command.value} needs {count} input file(s), got {len(self.input_paths)}"
            )
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ConfigError(f"{self.command.value} requires {', '.join('--' + m for m in missing)}")
        if isinstance(self.F, str) and self.F != "inf":
            raise ConfigError(f"--F takes vertex indices or 'inf', got {self.F!r}")
        if self.kind not in ("hyperbolic", "parabolic"):
            raise ConfigError(f"--kind must be hyperbolic or parabolic, got {self.kind!r}")
        return self


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"Cannot read {path}: {e}") from e


def _classify(config: RunConfig) -> Any:
    groups = [load_group(_read(p), name=Path(p).stem) for p in config.input_paths]
    reports = classify_batch(groups, config.jobs)
    if len(reports) == 1:
        return reports[0]
    return [{"input": p, "report": r} for p, r in zip(config.input_paths, reports)]


def _verdict(config: RunConfig) -> Any:
    a, b = (load_group(_read(p), name=Path(p).stem) for p in config.input_paths)
    return qc_implies_qi_verdict(a, b)


def _capacity(config: RunConfig) -> Any:
    g = load_graph(_read(config.input_paths[0]))
    F = AT_INFINITY if config.F == "inf" else frozenset(config.F)
    return p_capacity(g, Capacitor(frozenset(config.E), F), config.exponent_p, tolerance=config.tolerance)


def _profile(config: RunConfig) -> Any:
    g = load_graph(_read(config.input_paths[0]))
    mode = config.mode or "exact"
    return {"volume": config.volume, "mode": mode, "value": isoperimetric_profile(g, config.volume, mode)}


def _straighten(config: RunConfig) -> Any:
    doc = load_graph_document(_read(config.input_paths[0]))
    if doc.function is None or doc.domain is None:
        raise ConfigError("straighten needs 'function' and 'domain' in the graph document")
    g = graph_from_document(doc)
    p = config.exponent_p or 2.0
    comparison = compare_orders(g, doc.function, doc.domain)
    result = comparison.increasing
    return {
        "function": list(result),
        "order_discrepancy": comparison.discrepancy,
        "decreasing_order_function": list(comparison.decreasing),
        "monotone_before": is_monotone(g, doc.function, doc.domain),
        "monotone_after": is_monotone(g, result, doc.domain),
        "p": p,
        "energy_before": p_energy(g, doc.function, p),
        "energy_after": p_energy(g, result, p),
    }


def _qstraight(config: RunConfig) -> Any:
    spec = load_group(_read(config.input_paths[0]), name=Path(config.input_paths[0]).stem)
    if isinstance(spec, DeclaredGroup):
        raise Unsupported("Exp-line sequences need a computed group, not a declared fixture")
    try:
        v = tuple(parse_rational(c) for c in config.vector)
    except ValueError as e:
        raise ConfigError(f"--vector: {e}") from e
    seq = exp_line_sequence(spec, v, config.k_min, config.k_max)
    return {
        "defect": quasi_straight_defect(seq, exp_line_metric(spec)),
        "bound": exp_line_defect_bound(spec, v),
    }


def _net(config: RunConfig) -> Any:
    cloud = load_cloud(_read(config.input_paths[0]), seed=config.seed)
    g = build_net(cloud, config.epsilon)
    degrees = [d for _, d in g.nx_graph.degree()]
    return {
        "graph": graph_to_document(g),
        "max_degree": max(degrees) if degrees else 0,
        "order_bound": net_order_bound(cloud, config.epsilon),
    }


def _probe(config: RunConfig) -> Any:
    g = load_graph(_read(config.input_paths[0]))
    return sobolev_constant_probe(g, config.N, config.q, samples=config.samples, seed=config.seed)


def _ferrand(config: RunConfig) -> Any:
    g = load_graph(_read(config.input_paths[0]))
    mode = config.mode or "exact"
    distance = ferrand_hyperbolic if config.kind == "hyperbolic" else ferrand_parabolic
    value = distance(g, config.x, config.y, config.exponent_Q, mode)
    return {"kind": config.kind, "mode": mode, "value": value}


COMMANDS: Dict[Command, Callable[[RunConfig], Any]] = {
    Command.CLASSIFY: _classify,
    Command.VERDICT: _verdict,
    Command.CAPACITY: _capacity,
    Command.PROFILE: _profile,
    Command.STRAIGHTEN: _straighten,
    Command.QSTRAIGHT: _qstraight,
    Command.NET: _net,
    Command.PROBE: _probe,
    Command.FERRAND: _ferrand,
}


def _envelope(command: str, config: Optional[RunConfig]) -> Dict[str, Any]:
    return {
        "tool": {"name": TOOL_NAME, "version": TOOL_VERSION},
        "command": command,
        "config": config.model_dump(mode="json") if config is not None else None,
    }


def error_document(error: QclabError, command: str, config: Optional[RunConfig] = None) -> str:
    document = _envelope(command, config)
    document["error"] = error.to_dict()
    return render_report(document)


def run(config: RunConfig) -> Tuple[int, str]:
    """Run one command; returns (exit status, report document)."""
    logger.info(f"Running {config.command.value} on {', '.join(config.input_paths)}")
    try:
        result = COMMANDS[config.command](config)
    except QclabError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        return e.exit_status, error_document(e, config.command.value, config)
    document = _envelope(config.command.value, config)
    document["result"] = result
    return 0, render_report(document)


def _index_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated vertex indices, got {text!r}")


def _target(text: str) -> Union[List[int], str]:
    return "inf" if text.strip() == "inf" else _index_list(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qclab",
        description="Conformal-type classification and discrete capacity experiments",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        allow_abbrev=False,
        epilog="""
Examples:
  # Classify the sub-Riemannian Heisenberg group
  python -m src.qclab.cli classify fixtures/algebras/heisenberg_sr.yaml

  # Verdict for a pair of groups
  python -m src.qclab.cli verdict fixtures/algebras/heisenberg_sr.yaml fixtures/algebras/rototranslation_sr.yaml

  # 2-capacity between the ends of a path
  python -m src.qclab.cli capacity fixtures/graphs/path10.yaml --E 0 --F 10 --p 2

  # Straighten the function stored in a graph document
  python -m src.qclab.cli straighten fixtures/graphs/bump6.yaml
        """,
    )
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--out", dest="output_path", help="Write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="Seed for randomized procedures")
    common.add_argument("--tolerance", type=float, help="Solver residual tolerance")
    common.add_argument("--mode", help="exact | heuristic (path_upper for hyperbolic ferrand)")
    common.add_argument("--log-level", default=None, help="Logging level (default from QCLAB_LOG_LEVEL)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="Classify groups by Q, N and conformal type")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--jobs", type=int, default=None, help="Parallel workers")

    p = sub.add_parser("verdict", parents=[common], help="QC => QI verdict for two groups")
    p.add_argument("inputs", nargs=2)

    p = sub.add_parser("capacity", parents=[common], help="p-capacity of a capacitor (E; F)")
    p.add_argument("inputs", nargs=1)
    p.add_argument("--E", type=_index_list)
    p.add_argument("--F", type=_target, help="Vertex indices or 'inf'")
    p.add_argument("--p", dest="exponent_p", type=float)

    p = sub.add_parser("profile", parents=[common], help="Isoperimetric profile")
    p.add_argument("inputs", nargs=1)
    p.add_argument("--volume", type=float)

    p = sub.add_parser("straighten", parents=[common], help="Straighten the document's function")
    p.add_argument("inputs", nargs=1)
    p.add_argument("--p", dest="exponent_p", type=float)

    p = sub.add_parser("qstraight", parents=[common], help="Quasi-straightness of an exp-line")
    p.add_argument("inputs", nargs=1)
    p.add_argument("--vector", type=lambda s: [c.strip() for c in s.split(",")])
    p.add_argument("--k-min", dest="k_min", type=int)
    p.add_argument("--k-max", dest="k_max", type=int)

    p = sub.add_parser("net", parents=[common], help="Kanai net of a point cloud")
    p.add_argument("inputs", nargs=1)
    p.add_argument("--epsilon", type=float)

    p = sub.add_parser("probe", parents=[common], help="Empirical Sobolev constants")
    p.add_argument("inputs", nargs=1)
    p.add_argument("--N", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--samples", type=int, default=100)

    p = sub.add_parser("ferrand", parents=[common], help="Ferrand distance between two vertices")
    p.add_argument("inputs", nargs=1)
    p.add_argument("--x", type=int)
    p.add_argument("--y", type=int)
    p.add_argument("--Q", dest="exponent_Q", type=float)
    p.add_argument("--kind", default="hyperbolic")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {k: v for k, v in vars(args).items() if v is not None and k not in ("inputs", "log_level")}
    values["input_paths"] = list(args.inputs)
    if "jobs" not in values:
        values["jobs"] = get_settings().jobs
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid options: {e}") from e


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logger_without_timestamp("qclab", (args.log_level or get_settings().log_level).upper())

    try:
        config = config_from_args(args)
    except ConfigError as e:
        logger.error(e.message)
        sys.stdout.write(error_document(e, args.command))
        return e.exit_status

    status, document = run(config)
    if config.output_path:
        Path(config.output_path).write_text(document)
        logger.info(f"Report written to {config.output_path}")
    else:
        sys.stdout.write(document)
    return status


if __name__ == "__main__":
    sys.exit(main())
