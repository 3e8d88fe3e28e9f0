"""Knoop-Ruthing-Steffen lazy code motion as four staged analyses, runnable
in crisp (bit-vector), fuzzy (type-1) and interval (type-2) modes.

Inputs are per-block predicate rows over an ordered expression list:

* ``dee``  - expression is downward exposed in the block,
* ``uee``  - expression is upward exposed in the block,
* ``kill`` - the block updates one of the expression's operands.

The four stages: (1) availability (forward) and anticipatability (backward)
fixed points, (2) the pointwise Earliest predicate per edge, (3) the Later
fixed point over edges, (4) the pointwise Insert (edge gains an evaluation)
and Delete (block loses one) predicates.

Crisp mode is the classical bit-vector algorithm (greatest fixed points,
meet = intersection).  Fuzzy and interval modes replace the meet with the
alpha-weighted average of the flow-graph framework and iterate to epsilon;
each expression is an independent single-property flow graph.

Boundary conventions (identical in all modes): the entry block's available
set is just its downward-exposed set, the exit block's anticipated set is
just its upward-exposed set, and nothing is "later" than the entry
(LaterIn(entry) = 0).
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Sequence, Union

import numpy as np

from . import _jsonio
from ._jsonio import FileFormatError
from .flowgraph import Edge, FlowGraph
from .formula import And, Const, Formula, Not, Or, Var
from .solver import SolverConfig, solve, solve_interval
from .truth import LogicFamily, TruthInterval, truth_value

__all__ = [
    "LcmEdge",
    "LcmProblem",
    "LcmResult",
    "StageMatrices",
    "LaterMatrices",
    "WidthMismatchError",
    "validate_problem",
    "availability",
    "anticipatability",
    "earliest",
    "later",
    "insert_delete",
    "lcm_pipeline",
    "join_targets",
    "load_problem_file",
    "problem_from_json_dict",
    "problem_to_json_dict",
    "LcmSettings",
]

Value = Union[float, TruthInterval]
BlockMatrix = dict[str, list[Value]]
EdgeMatrix = dict[tuple[str, str], list[Value]]

MODES = ("crisp", "fuzzy", "interval")

_IN = Var("In")


class WidthMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class LcmEdge:
    src: str
    dst: str
    alpha: float         # forward contribution, normalized over dst's in-edges
    alpha_back: float    # backward contribution, normalized over src's out-edges

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", truth_value(self.alpha))
        object.__setattr__(self, "alpha_back", truth_value(self.alpha_back))


@dataclass
class LcmProblem:
    blocks: list[str]
    edges: list[LcmEdge]
    exprs: list[str]
    dee: BlockMatrix
    uee: BlockMatrix
    kill: BlockMatrix
    entry: str
    exit: str

    def preds(self, block: str) -> list[LcmEdge]:
        return [e for e in self.edges if e.dst == block]

    def succs(self, block: str) -> list[LcmEdge]:
        return [e for e in self.edges if e.src == block]


def validate_problem(problem: LcmProblem, mode: str) -> list[str]:
    """Structural and per-mode value-domain checks; returns error strings."""
    errors: list[str] = []
    if mode not in MODES:
        return [f"unknown mode {mode!r}; expected one of {MODES}"]
    blocks = set(problem.blocks)
    if len(blocks) != len(problem.blocks):
        errors.append("duplicate block ids")
    if len(set(problem.exprs)) != len(problem.exprs):
        errors.append("duplicate expression names")
    for endpoint in (problem.entry, problem.exit):
        if endpoint not in blocks:
            errors.append(f"no block {endpoint!r}")
    seen_edges = set()
    for e in problem.edges:
        if e.src not in blocks or e.dst not in blocks:
            errors.append(f"dangling edge {e.src}->{e.dst}")
        if (e.src, e.dst) in seen_edges:
            errors.append(f"duplicate edge {e.src}->{e.dst}")
        seen_edges.add((e.src, e.dst))
        if e.src == e.dst:
            errors.append(f"self loop on {e.src!r}")
        if e.dst == problem.entry:
            errors.append(f"edge into entry block: {e.src}->{e.dst}")
        if e.src == problem.exit:
            errors.append(f"edge out of exit block: {e.src}->{e.dst}")

    for b in problem.blocks:
        if b != problem.entry and not problem.preds(b):
            errors.append(f"block {b!r} has no predecessors and is not the entry")
        if b != problem.exit and not problem.succs(b):
            errors.append(f"block {b!r} has no successors and is not the exit")
        incoming = problem.preds(b)
        if incoming:
            total = sum(e.alpha for e in incoming)
            if abs(total - 1.0) > 1e-9:
                errors.append(f"forward weights into {b!r} sum to {total!r}")
        outgoing = problem.succs(b)
        if outgoing:
            total = sum(e.alpha_back for e in outgoing)
            if abs(total - 1.0) > 1e-9:
                errors.append(f"backward weights out of {b!r} sum to {total!r}")

    width = len(problem.exprs)
    for name, matrix in (("dee", problem.dee), ("uee", problem.uee), ("kill", problem.kill)):
        for b in problem.blocks:
            row = matrix.get(b)
            if row is None:
                errors.append(f"{name}: missing row for block {b!r}")
                continue
            if len(row) != width:
                errors.append(f"{name}[{b!r}]: expected {width} entries, got {len(row)}")
                continue
            for k, v in enumerate(row):
                if isinstance(v, TruthInterval):
                    if mode != "interval":
                        errors.append(f"{name}[{b!r}][{k}]: interval value in {mode} mode")
                elif mode == "crisp" and v not in (0.0, 1.0):
                    errors.append(f"{name}[{b!r}][{k}]: crisp mode needs 0or1, got {v!r}")
        for b in matrix:
            if b not in blocks:
                errors.append(f"{name}: row for unknown block {b!r}")
    return errors


def _require_valid(problem: LcmProblem, mode: str) -> None:
    errors = validate_problem(problem, mode)
    if errors:
        raise ValueError("invalid LCM problem: " + "; ".join(errors))


# -- pointwise connectives per mode -------------------------------------------


class _Pointwise:
    def __init__(self, mode: str, family: LogicFamily):
        self.mode = mode
        if mode == "interval":
            self.conj = family.interval_tnorm
            self.disj = family.interval_snorm
            self.neg = family.interval_cnorm
            self.lift = lambda v: v if isinstance(v, TruthInterval) else TruthInterval.degenerate(v)
        else:
            self.conj = family.tnorm
            self.disj = family.snorm
            self.neg = family.cnorm
            self.lift = float


# -- stage results -------------------------------------------------------------


@dataclass
class StageMatrices:
    """A step-(1) analysis: per-block solved values plus the merged
    (pre-transfer) values the pointwise stages consume."""

    out: BlockMatrix      # availability: AvOut(b);   anticipatability: AnOut(b)
    merged: BlockMatrix   # availability: AvIn(b);    anticipatability: AnIn(b)
    converged: bool = True


@dataclass
class LaterMatrices:
    later_in: BlockMatrix
    later_out: EdgeMatrix
    converged: bool = True


@dataclass
class LcmResult:
    mode: str
    exprs: list[str]
    av_out: BlockMatrix
    an_in: BlockMatrix
    an_out: BlockMatrix
    earliest: EdgeMatrix
    later_in: BlockMatrix
    later_out: EdgeMatrix
    insert: EdgeMatrix
    delete: BlockMatrix
    converged: bool

    def to_json_dict(self) -> dict:
        def blocks(matrix: BlockMatrix) -> dict:
            return {b: [_jsonio.dump_value(v) for v in row] for b, row in matrix.items()}

        def edges(matrix: EdgeMatrix) -> list:
            return [
                {"from": src, "to": dst, "values": [_jsonio.dump_value(v) for v in row]}
                for (src, dst), row in matrix.items()
            ]

        return {
            "mode": self.mode,
            "exprs": list(self.exprs),
            "av_out": blocks(self.av_out),
            "an_in": blocks(self.an_in),
            "an_out": blocks(self.an_out),
            "earliest": edges(self.earliest),
            "later_in": blocks(self.later_in),
            "later_out": edges(self.later_out),
            "insert": edges(self.insert),
            "delete": blocks(self.delete),
            "converged": self.converged,
        }


# -- soft (fuzzy / interval) engine --------------------------------------------
#
# Each fixed point is encoded as a two-layer flow graph: per block a merge
# node computes the weighted average of its inputs (identity transfer), and
# the block node applies the transfer formula to the merge value.  This
# places the average inside the formula, the shape the per-block equation
# systems take when written out.


def _to_const(value: Value, mode: str) -> Const:
    if mode == "interval":
        return Const(value if isinstance(value, TruthInterval) else TruthInterval.degenerate(value))
    return Const(float(value))


def _run(graph: FlowGraph, mode: str, family: LogicFamily, cfg: SolverConfig | None):
    if cfg is None or cfg.family != family:
        cfg = SolverConfig(
            family=family,
            epsilon=cfg.epsilon if cfg else 1e-6,
            max_iters=cfg.max_iters if cfg else 100_000,
            quantize_bits=cfg.quantize_bits if cfg else None,
        )
    runner = solve_interval if mode == "interval" else solve
    return runner(graph, cfg)


def _zero(mode: str) -> Value:
    return TruthInterval(0.0, 0.0) if mode == "interval" else 0.0


def _flow_fixpoint(
    problem: LcmProblem,
    expr_index: int,
    mode: str,
    family: LogicFamily,
    cfg: SolverConfig | None,
    *,
    backward: bool,
    local: BlockMatrix,
) -> tuple[dict[str, Value], bool]:
    """Per-block fixed point of ``local(b) | (merge(b) & !kill(b))``.

    Forward: merge over predecessors with the forward weights, boundary at
    the entry.  Backward: merge over successors with the backward weights,
    boundary at the exit.
    """
    boundary = problem.exit if backward else problem.entry
    transfers: dict[str, dict[str, Formula]] = {}
    edges: list[Edge] = []
    for b in problem.blocks:
        gen = _to_const(local[b][expr_index], mode)
        keep = Not(_to_const(problem.kill[b][expr_index], mode))
        transfers[b] = {"Out": Or(gen, And(_IN, keep))}
        transfers[f"merge:{b}"] = {"Out": _IN}
        edges.append(Edge(f"merge:{b}", b, 1.0))
    for e in problem.edges:
        if backward:
            edges.append(Edge(e.dst, f"merge:{e.src}", e.alpha_back))
        else:
            edges.append(Edge(e.src, f"merge:{e.dst}", e.alpha))
    graph = FlowGraph(
        transfers=transfers,
        edges=edges,
        start=f"merge:{boundary}",
        seeds={f"merge:{boundary}": {"Out": _zero(mode)}},
    )
    report = _run(graph, mode, family, cfg)
    return {b: report.final[b]["Out"] for b in problem.blocks}, report.converged


def _merge_forward(problem: LcmProblem, out: dict[str, Value], mode: str) -> dict[str, Value]:
    merged = {}
    for b in problem.blocks:
        incoming = problem.preds(b)
        merged[b] = _weighted(((e.alpha, out[e.src]) for e in incoming), mode) if incoming else _zero(mode)
    return merged


def _merge_backward(problem: LcmProblem, out: dict[str, Value], mode: str) -> dict[str, Value]:
    merged = {}
    for b in problem.blocks:
        outgoing = problem.succs(b)
        merged[b] = _weighted(((e.alpha_back, out[e.dst]) for e in outgoing), mode) if outgoing else _zero(mode)
    return merged


def _weighted(pairs, mode: str) -> Value:
    pairs = list(pairs)
    if mode == "interval":
        pairs = [(a, v if isinstance(v, TruthInterval) else TruthInterval.degenerate(v)) for a, v in pairs]
        lo = min(1.0, max(0.0, sum(a * v.lo for a, v in pairs)))
        hi = min(1.0, max(0.0, sum(a * v.hi for a, v in pairs)))
        return TruthInterval(lo, hi)
    return min(1.0, max(0.0, sum(a * v for a, v in pairs)))


def _soft_stage1(problem, mode, family, cfg, backward: bool, jobs: int) -> StageMatrices:
    local = problem.uee if backward else problem.dee
    n = len(problem.exprs)

    def run(k: int):
        return _flow_fixpoint(problem, k, mode, family, cfg, backward=backward, local=local)

    if jobs > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            columns = list(pool.map(run, range(n)))
    else:
        columns = [run(k) for k in range(n)]

    out: BlockMatrix = {b: [columns[k][0][b] for k in range(n)] for b in problem.blocks}
    converged = all(ok for _, ok in columns)
    merge = _merge_backward if backward else _merge_forward
    merged_cols = [merge(problem, columns[k][0], mode) for k in range(n)]
    merged: BlockMatrix = {b: [merged_cols[k][b] for k in range(n)] for b in problem.blocks}
    return StageMatrices(out=out, merged=merged, converged=converged)


def _soft_later_fixpoint(
    problem: LcmProblem,
    expr_index: int,
    earliest_m: EdgeMatrix,
    mode: str,
    family: LogicFamily,
    cfg: SolverConfig | None,
) -> tuple[dict[tuple[str, str], Value], bool]:
    """LaterOut(i,j) = Earliest(i,j) | (LaterIn(i) & !UEE(i)) with LaterIn the
    forward-weighted merge of LaterOut over incoming edges; LaterIn(entry)=0."""
    transfers: dict[str, dict[str, Formula]] = {}
    edges: list[Edge] = []
    for b in problem.blocks:
        transfers[f"laterin:{b}"] = {"Out": _IN}
    for e in problem.edges:
        node = f"edge:{e.src}->{e.dst}"
        ear = _to_const(earliest_m[(e.src, e.dst)][expr_index], mode)
        hold = Not(_to_const(problem.uee[e.src][expr_index], mode))
        transfers[node] = {"Out": Or(ear, And(_IN, hold))}
        edges.append(Edge(f"laterin:{e.src}", node, 1.0))
        edges.append(Edge(node, f"laterin:{e.dst}", e.alpha))
    # Blocks with no successors contribute no edge nodes; their laterin node
    # may also be the boundary.  Exit laterin nodes with no incoming edges are
    # pinned to zero along with the entry.
    seeds = {f"laterin:{problem.entry}": {"Out": _zero(mode)}}
    for b in problem.blocks:
        if b != problem.entry and not problem.preds(b):
            seeds[f"laterin:{b}"] = {"Out": _zero(mode)}
    graph = FlowGraph(
        transfers=transfers,
        edges=edges,
        start=f"laterin:{problem.entry}",
        seeds=seeds,
    )
    report = _run(graph, mode, family, cfg)
    out = {(e.src, e.dst): report.final[f"edge:{e.src}->{e.dst}"]["Out"] for e in problem.edges}
    return out, report.converged


# -- crisp (bit-vector) engine ---------------------------------------------------


def _crisp_arrays(problem: LcmProblem) -> tuple[dict[str, int], np.ndarray, np.ndarray, np.ndarray]:
    index = {b: i for i, b in enumerate(problem.blocks)}
    n, w = len(problem.blocks), len(problem.exprs)

    def matrix(m: BlockMatrix) -> np.ndarray:
        out = np.zeros((n, w), dtype=bool)
        for b, row in m.items():
            out[index[b]] = [bool(v) for v in row]
        return out

    return index, matrix(problem.dee), matrix(problem.uee), matrix(problem.kill)


def _crisp_meet(rows: list[np.ndarray], width: int) -> np.ndarray:
    if not rows:
        return np.zeros(width, dtype=bool)
    out = rows[0].copy()
    for row in rows[1:]:
        out &= row
    return out


def _crisp_availability(problem: LcmProblem) -> StageMatrices:
    index, dee, _, kill = _crisp_arrays(problem)
    n, w = dee.shape
    avout = np.ones((n, w), dtype=bool)
    avout[index[problem.entry]] = dee[index[problem.entry]]
    pred_ix = {b: [index[e.src] for e in problem.preds(b)] for b in problem.blocks}
    changed = True
    while changed:
        changed = False
        for b in problem.blocks:
            if b == problem.entry:
                continue
            i = index[b]
            avin = _crisp_meet([avout[j] for j in pred_ix[b]], w)
            new = dee[i] | (avin & ~kill[i])
            if not np.array_equal(new, avout[i]):
                avout[i] = new
                changed = True
    out = {b: avout[index[b]].astype(float).tolist() for b in problem.blocks}
    merged = {
        b: _crisp_meet([avout[j] for j in pred_ix[b]], w).astype(float).tolist()
        for b in problem.blocks
    }
    return StageMatrices(out=out, merged=merged, converged=True)


def _crisp_anticipatability(problem: LcmProblem) -> StageMatrices:
    index, _, uee, kill = _crisp_arrays(problem)
    n, w = uee.shape
    antin = np.ones((n, w), dtype=bool)
    antin[index[problem.exit]] = uee[index[problem.exit]]
    succ_ix = {b: [index[e.dst] for e in problem.succs(b)] for b in problem.blocks}
    changed = True
    while changed:
        changed = False
        for b in problem.blocks:
            if b == problem.exit:
                continue
            i = index[b]
            antout = _crisp_meet([antin[j] for j in succ_ix[b]], w)
            new = uee[i] | (antout & ~kill[i])
            if not np.array_equal(new, antin[i]):
                antin[i] = new
                changed = True
    out = {b: antin[index[b]].astype(float).tolist() for b in problem.blocks}
    merged = {
        b: _crisp_meet([antin[j] for j in succ_ix[b]], w).astype(float).tolist()
        for b in problem.blocks
    }
    return StageMatrices(out=out, merged=merged, converged=True)


def _crisp_later(problem: LcmProblem, earliest_m: EdgeMatrix) -> LaterMatrices:
    index, _, uee, _ = _crisp_arrays(problem)
    n, w = uee.shape
    ear = {
        (e.src, e.dst): np.array([bool(v) for v in earliest_m[(e.src, e.dst)]], dtype=bool)
        for e in problem.edges
    }
    laterin = np.ones((n, w), dtype=bool)
    laterin[index[problem.entry]] = False
    for b in problem.blocks:
        if b != problem.entry and not problem.preds(b):
            laterin[index[b]] = False
    laterout = {key: np.ones(w, dtype=bool) for key in ear}
    changed = True
    while changed:
        changed = False
        for e in problem.edges:
            key = (e.src, e.dst)
            new = ear[key] | (laterin[index[e.src]] & ~uee[index[e.src]])
            if not np.array_equal(new, laterout[key]):
                laterout[key] = new
                changed = True
        for b in problem.blocks:
            if b == problem.entry or not problem.preds(b):
                continue
            new = _crisp_meet([laterout[(e.src, e.dst)] for e in problem.preds(b)], w)
            if not np.array_equal(new, laterin[index[b]]):
                laterin[index[b]] = new
                changed = True
    return LaterMatrices(
        later_in={b: laterin[index[b]].astype(float).tolist() for b in problem.blocks},
        later_out={key: arr.astype(float).tolist() for key, arr in laterout.items()},
        converged=True,
    )


# -- public staged operations ---------------------------------------------------


def availability(
    problem: LcmProblem,
    mode: str,
    family: LogicFamily,
    cfg: SolverConfig | None = None,
    jobs: int = 1,
) -> StageMatrices:
    """Forward must-analysis: AvOut(b) = DEE(b) | (AvIn(b) & !Kill(b))."""
    _require_valid(problem, mode)
    if mode == "crisp":
        return _crisp_availability(problem)
    return _soft_stage1(problem, mode, family, cfg, backward=False, jobs=jobs)


def anticipatability(
    problem: LcmProblem,
    mode: str,
    family: LogicFamily,
    cfg: SolverConfig | None = None,
    jobs: int = 1,
) -> StageMatrices:
    """Backward must-analysis: AnOut(b) = UEE(b) | (AnIn(b) & !Kill(b)),
    with AnIn the merge of AnOut over the block's successors."""
    _require_valid(problem, mode)
    if mode == "crisp":
        return _crisp_anticipatability(problem)
    return _soft_stage1(problem, mode, family, cfg, backward=True, jobs=jobs)


def earliest(
    problem: LcmProblem,
    av_out: BlockMatrix,
    an_in: BlockMatrix,
    an_out: BlockMatrix,
    mode: str,
    family: LogicFamily,
) -> EdgeMatrix:
    """Pointwise per edge (i,j): the expression is anticipated at j, not
    available after i, and cannot move above i (killed there, or not
    anticipated on leaving i):

        Earliest(i,j) = AnOut(j) & !AvOut(i) & (Kill(i) | !AnIn(i))
        Earliest(entry,j) = AnOut(j) & !AvOut(entry)
    """
    ops = _Pointwise(mode, family)
    width = len(problem.exprs)
    out: EdgeMatrix = {}
    for e in problem.edges:
        row = []
        for k in range(width):
            anticipated = ops.lift(an_out[e.dst][k])
            fresh = ops.neg(ops.lift(av_out[e.src][k]))
            if e.src == problem.entry:
                row.append(ops.conj(anticipated, fresh))
            else:
                blocked = ops.disj(
                    ops.lift(problem.kill[e.src][k]),
                    ops.neg(ops.lift(an_in[e.src][k])),
                )
                row.append(ops.conj(ops.conj(anticipated, fresh), blocked))
        out[(e.src, e.dst)] = row
    return out


def later(
    problem: LcmProblem,
    earliest_m: EdgeMatrix,
    mode: str,
    family: LogicFamily,
    cfg: SolverConfig | None = None,
) -> LaterMatrices:
    """Step (3): the fixed point placing evaluations as late as possible."""
    _require_valid(problem, mode)
    if mode == "crisp":
        return _crisp_later(problem, earliest_m)
    n = len(problem.exprs)
    columns = [
        _soft_later_fixpoint(problem, k, earliest_m, mode, family, cfg) for k in range(n)
    ]
    later_out: EdgeMatrix = {
        (e.src, e.dst): [columns[k][0][(e.src, e.dst)] for k in range(n)] for e in problem.edges
    }
    later_in: BlockMatrix = {}
    for b in problem.blocks:
        incoming = problem.preds(b)
        if b == problem.entry or not incoming:
            later_in[b] = [_zero(mode) for _ in range(n)]
        else:
            later_in[b] = [
                _weighted(((e.alpha, later_out[(e.src, e.dst)][k]) for e in incoming), mode)
                for k in range(n)
            ]
    return LaterMatrices(later_in=later_in, later_out=later_out,
                         converged=all(ok for _, ok in columns))


def insert_delete(
    problem: LcmProblem,
    later_in: BlockMatrix,
    later_out: EdgeMatrix,
    mode: str,
    family: LogicFamily,
) -> tuple[EdgeMatrix, BlockMatrix]:
    """Step (4): Insert(i,j) = LaterOut(i,j) & !LaterIn(j);
    Delete(k) = UEE(k) & !LaterIn(k) for k != entry, else 0."""
    ops = _Pointwise(mode, family)
    width = len(problem.exprs)
    insert: EdgeMatrix = {}
    for e in problem.edges:
        insert[(e.src, e.dst)] = [
            ops.conj(ops.lift(later_out[(e.src, e.dst)][k]), ops.neg(ops.lift(later_in[e.dst][k])))
            for k in range(width)
        ]
    delete: BlockMatrix = {}
    for b in problem.blocks:
        if b == problem.entry:
            delete[b] = [ops.lift(0.0) for _ in range(width)]
        else:
            delete[b] = [
                ops.conj(ops.lift(problem.uee[b][k]), ops.neg(ops.lift(later_in[b][k])))
                for k in range(width)
            ]
    return insert, delete


def lcm_pipeline(
    problem: LcmProblem,
    mode: str,
    family: LogicFamily | None = None,
    cfg: SolverConfig | None = None,
    jobs: int = 1,
) -> LcmResult:
    """Run the four stages in order and collect every matrix."""
    family = family or LogicFamily.minmax()
    _require_valid(problem, mode)
    av = availability(problem, mode, family, cfg, jobs=jobs)
    an = anticipatability(problem, mode, family, cfg, jobs=jobs)
    earliest_m = earliest(problem, av.out, an.merged, an.out, mode, family)
    lat = later(problem, earliest_m, mode, family, cfg)
    insert, delete = insert_delete(problem, lat.later_in, lat.later_out, mode, family)
    return LcmResult(
        mode=mode,
        exprs=list(problem.exprs),
        av_out=av.out,
        an_in=an.merged,
        an_out=an.out,
        earliest=earliest_m,
        later_in=lat.later_in,
        later_out=lat.later_out,
        insert=insert,
        delete=delete,
        converged=av.converged and an.converged and lat.converged,
    )


def join_targets(rows: Sequence[Sequence[Value]]) -> list[TruthInterval]:
    """Envelope of per-target predicate rows, elementwise.

    Call targets whose rows agree keep their (degenerate) value; entries
    that disagree widen to cover every target, the non-deterministic
    reading of inlining several candidates.
    """
    if not rows:
        raise ValueError("need at least one predicate row")
    width = len(rows[0])
    for row in rows:
        if len(row) != width:
            raise WidthMismatchError(f"row widths differ: {len(row)} vs {width}")
    out = []
    for k in range(width):
        entries = [
            v if isinstance(v, TruthInterval) else TruthInterval.degenerate(v)
            for v in (row[k] for row in rows)
        ]
        out.append(TruthInterval(min(e.lo for e in entries), max(e.hi for e in entries)))
    return out


# -- JSON problem format ----------------------------------------------------------


@dataclass
class LcmSettings:
    mode: str = "fuzzy"
    logic: LogicFamily | None = None
    epsilon: float | None = None
    max_iters: int | None = None


def problem_from_json_dict(data: Any) -> tuple[LcmProblem, LcmSettings]:
    _jsonio.check_keys(
        data, "problem",
        ["entry", "exit", "blocks", "edges", "exprs", "dee", "uee", "kill"],
        ["logic", "mode", "epsilon", "max_iters"],
    )
    settings = LcmSettings()
    if "mode" in data:
        if data["mode"] not in MODES:
            raise FileFormatError(f"mode: expected one of {MODES}, got {data['mode']!r}")
        settings.mode = data["mode"]
    if "logic" in data:
        try:
            settings.logic = LogicFamily.parse(str(data["logic"]))
        except ValueError as exc:
            raise FileFormatError(f"logic: {exc}") from None
    if "epsilon" in data:
        settings.epsilon = float(data["epsilon"])
    if "max_iters" in data:
        settings.max_iters = int(data["max_iters"])
    interval = settings.mode == "interval"

    blocks = [str(b) for b in data["blocks"]]
    edges = []
    for i, raw in enumerate(data["edges"]):
        _jsonio.check_keys(raw, f"edges[{i}]", ["from", "to", "alpha", "alpha_back"])
        try:
            edges.append(
                LcmEdge(str(raw["from"]), str(raw["to"]), float(raw["alpha"]), float(raw["alpha_back"]))
            )
        except ValueError as exc:
            raise FileFormatError(f"edges[{i}]: {exc}") from None
    exprs = [str(name) for name in data["exprs"]]

    def matrix(name: str) -> BlockMatrix:
        raw = data[name]
        if not isinstance(raw, dict):
            raise FileFormatError(f"{name}: expected an object of block rows")
        out: BlockMatrix = {}
        for b, row in raw.items():
            if not isinstance(row, list):
                raise FileFormatError(f"{name}[{b!r}]: expected a list")
            out[str(b)] = [
                _jsonio.load_value(v, f"{name}[{b!r}][{k}]", interval=interval)
                for k, v in enumerate(row)
            ]
        return out

    problem = LcmProblem(
        blocks=blocks,
        edges=edges,
        exprs=exprs,
        dee=matrix("dee"),
        uee=matrix("uee"),
        kill=matrix("kill"),
        entry=str(data["entry"]),
        exit=str(data["exit"]),
    )
    return problem, settings


def problem_to_json_dict(problem: LcmProblem, settings: LcmSettings | None = None) -> dict:
    out: dict[str, Any] = {}
    if settings is not None:
        out["mode"] = settings.mode
        if settings.logic is not None:
            out["logic"] = str(settings.logic)
    out.update(
        {
            "entry": problem.entry,
            "exit": problem.exit,
            "blocks": list(problem.blocks),
            "edges": [
                {"from": e.src, "to": e.dst, "alpha": e.alpha, "alpha_back": e.alpha_back}
                for e in problem.edges
            ],
            "exprs": list(problem.exprs),
            "dee": {b: [_jsonio.dump_value(v) for v in row] for b, row in problem.dee.items()},
            "uee": {b: [_jsonio.dump_value(v) for v in row] for b, row in problem.uee.items()},
            "kill": {b: [_jsonio.dump_value(v) for v in row] for b, row in problem.kill.items()},
        }
    )
    return out


def load_problem_file(path: str) -> tuple[LcmProblem, LcmSettings]:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return problem_from_json_dict(data)
