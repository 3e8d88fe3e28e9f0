"""Weighted flow graphs: nodes carry transfer formulas, edges carry
normalized contribution weights.

A node's transfer is a map from property name to formula, evaluated
componentwise.  When the transfer for property ``p`` is evaluated against a
predecessor's valuation, the reserved variable ``In`` denotes that
predecessor's value of ``p``; any other variable names a predecessor
property directly.

Nodes with no incoming edges (the start node, and any other source) are
pinned: they hold the valuation given for them in ``seeds`` and are never
recomputed.  Every source must therefore have a seed entry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Union

from . import _jsonio
from ._jsonio import FileFormatError
from .formula import Formula, format_formula, free_vars, parse_formula
from .truth import LogicFamily, TruthInterval, truth_value

__all__ = [
    "Edge",
    "FlowGraph",
    "ValidationReport",
    "InvalidStartError",
    "validate",
    "reverse",
    "graph_from_json_dict",
    "graph_to_json_dict",
    "load_graph_file",
    "GraphSettings",
]

Value = Union[float, TruthInterval]
Valuation = dict[str, Value]

WEIGHT_SUM_TOL = 1e-9

# Reserved: inside a transfer formula, "In" names the predecessor's value of
# the property being computed, so it cannot itself be a property.
INPUT_NAME = "In"


class InvalidStartError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    alpha: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", truth_value(self.alpha))


@dataclass
class FlowGraph:
    transfers: dict[str, dict[str, Formula]]  # node id -> property -> formula
    edges: list[Edge]
    start: str
    seeds: dict[str, Valuation] = field(default_factory=dict)

    def node_ids(self) -> list[str]:
        return list(self.transfers)

    def in_edges(self, node: str) -> list[Edge]:
        return [e for e in self.edges if e.dst == node]

    def pinned(self) -> set[str]:
        """The start node plus every node with no incoming edges."""
        with_preds = {e.dst for e in self.edges}
        return {self.start} | (set(self.transfers) - with_preds)

    def properties(self, node: str) -> list[str]:
        """State properties of ``node``: seed keys for pinned nodes, transfer
        keys otherwise."""
        if node in self.pinned():
            seed = self.seeds.get(node, {})
            return list(seed) if seed else list(self.transfers[node])
        return list(self.transfers[node])


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def validate(graph: FlowGraph) -> ValidationReport:
    """Check structural invariants; violations are data, not exceptions."""
    report = ValidationReport()
    nodes = set(graph.transfers)

    if graph.start not in nodes:
        report.errors.append(f"start node {graph.start!r} does not exist")
        return report

    for edge in graph.edges:
        for endpoint in (edge.src, edge.dst):
            if endpoint not in nodes:
                report.errors.append(f"dangling edge {edge.src}->{edge.dst}: no node {endpoint!r}")

    pinned = graph.pinned()

    # Incoming weights of every collected node must form a convex combination.
    for node in graph.transfers:
        if node in pinned:
            continue
        total = sum(e.alpha for e in graph.edges if e.dst == node and e.src in nodes)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            report.errors.append(f"incoming weights of {node!r} sum to {total!r}, expected 1")

    # Pinned nodes are held at their seed, so the seed must cover every
    # property their transfer declares.
    for node in sorted(pinned & nodes):
        seed = graph.seeds.get(node)
        if seed is None:
            report.errors.append(f"source node {node!r} has no seed entry")
            continue
        missing = set(graph.transfers[node]) - set(seed)
        if missing:
            report.errors.append(f"seed for {node!r} is missing properties {sorted(missing)}")
    for node in graph.seeds:
        if node not in nodes:
            report.errors.append(f"seed entry for unknown node {node!r}")
        elif node not in pinned:
            report.warnings.append(f"seed for {node!r} is ignored (node has incoming edges)")

    # Transfer formulas must be resolvable against every predecessor.
    for edge in graph.edges:
        if edge.src not in nodes or edge.dst not in nodes or edge.dst in pinned:
            continue
        src_props = set(graph.properties(edge.src))
        for prop, f in graph.transfers[edge.dst].items():
            for name in sorted(free_vars(f)):
                if name == INPUT_NAME:
                    if prop not in src_props:
                        report.errors.append(
                            f"{edge.dst}.{prop}: 'In' unresolvable, predecessor "
                            f"{edge.src!r} has no property {prop!r}"
                        )
                elif name not in src_props:
                    report.errors.append(
                        f"{edge.dst}.{prop}: variable {name!r} not defined by "
                        f"predecessor {edge.src!r}"
                    )

    # Reachability is advisory only: unreachable parts still solve.
    reachable = {graph.start}
    frontier = [graph.start]
    while frontier:
        node = frontier.pop()
        for edge in graph.edges:
            if edge.src == node and edge.dst in nodes and edge.dst not in reachable:
                reachable.add(edge.dst)
                frontier.append(edge.dst)
    for node in graph.transfers:
        if node not in reachable and node not in pinned:
            report.warnings.append(f"node {node!r} is unreachable from start")

    return report


def reverse(
    graph: FlowGraph,
    new_start: str,
    new_seeds: Mapping[str, Valuation],
    alpha_overrides: Mapping[tuple[str, str], float] | None = None,
) -> FlowGraph:
    """Flip every edge, keeping weights unless overridden.

    ``alpha_overrides`` is keyed by (src, dst) in the reversed orientation;
    backward analyses usually need their own weights, since the backward
    contributions are read off branch probabilities rather than join
    frequencies.  The result must validate; a ValueError lists violations
    otherwise.
    """
    if new_start not in graph.transfers:
        raise InvalidStartError(f"no node {new_start!r} in graph")
    overrides = dict(alpha_overrides or {})
    flipped = []
    for edge in graph.edges:
        key = (edge.dst, edge.src)
        flipped.append(Edge(edge.dst, edge.src, overrides.get(key, edge.alpha)))
    out = FlowGraph(
        transfers={k: dict(v) for k, v in graph.transfers.items()},
        edges=flipped,
        start=new_start,
        seeds={k: dict(v) for k, v in new_seeds.items()},
    )
    report = validate(out)
    if not report.ok:
        raise ValueError("reversed graph is invalid: " + "; ".join(report.errors))
    return out


# -- JSON problem format ------------------------------------------------------


@dataclass
class GraphSettings:
    """Solver-facing settings carried by a graph problem file."""

    logic: LogicFamily | None = None
    mode: str = "scalar"  # "scalar" | "interval"
    epsilon: float | None = None
    max_iters: int | None = None


def graph_from_json_dict(data: Any) -> tuple[FlowGraph, GraphSettings]:
    _jsonio.check_keys(
        data, "problem", ["start", "nodes", "edges"],
        ["logic", "mode", "seed", "epsilon", "max_iters"],
    )
    settings = GraphSettings()
    if "logic" in data:
        try:
            settings.logic = LogicFamily.parse(str(data["logic"]))
        except ValueError as exc:
            raise FileFormatError(f"logic: {exc}") from None
    if "mode" in data:
        if data["mode"] not in ("scalar", "interval"):
            raise FileFormatError(f"mode: expected 'scalar' or 'interval', got {data['mode']!r}")
        settings.mode = data["mode"]
    if "epsilon" in data:
        settings.epsilon = float(data["epsilon"])
    if "max_iters" in data:
        settings.max_iters = int(data["max_iters"])
    interval = settings.mode == "interval"

    transfers: dict[str, dict[str, Formula]] = {}
    for i, node in enumerate(data["nodes"]):
        _jsonio.check_keys(node, f"nodes[{i}]", ["id", "transfer"])
        node_id = str(node["id"])
        if node_id in transfers:
            raise FileFormatError(f"nodes[{i}]: duplicate node id {node_id!r}")
        if not isinstance(node["transfer"], dict) or not node["transfer"]:
            raise FileFormatError(f"nodes[{i}].transfer: expected a nonempty object")
        transfer = {}
        for prop, text in node["transfer"].items():
            if prop == INPUT_NAME:
                raise FileFormatError(
                    f"nodes[{i}].transfer: property name {INPUT_NAME!r} is reserved"
                )
            try:
                transfer[str(prop)] = parse_formula(str(text))
            except ValueError as exc:
                raise FileFormatError(f"nodes[{i}].transfer[{prop!r}]: {exc}") from None
        transfers[node_id] = transfer

    edges = []
    for i, raw in enumerate(data["edges"]):
        _jsonio.check_keys(raw, f"edges[{i}]", ["from", "to", "alpha"])
        try:
            edges.append(Edge(str(raw["from"]), str(raw["to"]), float(raw["alpha"])))
        except ValueError as exc:
            raise FileFormatError(f"edges[{i}]: {exc}") from None

    seeds: dict[str, Valuation] = {}
    for node_id, valuation in (data.get("seed") or {}).items():
        if not isinstance(valuation, dict):
            raise FileFormatError(f"seed[{node_id!r}]: expected an object")
        seeds[str(node_id)] = {
            str(prop): _jsonio.load_value(v, f"seed[{node_id!r}][{prop!r}]", interval=interval)
            for prop, v in valuation.items()
        }

    return FlowGraph(transfers, edges, str(data["start"]), seeds), settings


def graph_to_json_dict(graph: FlowGraph, settings: GraphSettings | None = None) -> dict:
    out: dict[str, Any] = {}
    if settings is not None and settings.logic is not None:
        out["logic"] = str(settings.logic)
    if settings is not None and settings.mode != "scalar":
        out["mode"] = settings.mode
    out["start"] = graph.start
    out["seed"] = {
        node: {prop: _jsonio.dump_value(v) for prop, v in valuation.items()}
        for node, valuation in graph.seeds.items()
    }
    out["nodes"] = [
        {"id": node, "transfer": {prop: format_formula(f) for prop, f in transfer.items()}}
        for node, transfer in graph.transfers.items()
    ]
    out["edges"] = [{"from": e.src, "to": e.dst, "alpha": e.alpha} for e in graph.edges]
    return out


def load_graph_file(path: str) -> tuple[FlowGraph, GraphSettings]:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return graph_from_json_dict(data)
