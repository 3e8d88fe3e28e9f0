"""First-order Takagi-Sugeno ANFIS: five-layer evaluation, LMS online and
least-squares offline fitting of the consequent coefficients, plus the
periodic decision harness that refines an update/leave verdict as samples
stream in.

Only the affine consequents adapt; the antecedent membership functions are
fixed (supplied by the caller or a uniform triangular partition of [0,1]).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import _jsonio
from ._jsonio import FileFormatError

__all__ = [
    "TriangularMf",
    "Rule",
    "AnfisModel",
    "Prediction",
    "TrainConfig",
    "HarnessResult",
    "NoRuleFiresError",
    "DimensionMismatchError",
    "predict",
    "lms_update",
    "ls_fit",
    "uniform_model",
    "run_harness",
    "model_to_json_dict",
    "model_from_json_dict",
    "load_model_file",
    "read_samples_csv",
    "split_periods",
]


class NoRuleFiresError(ValueError):
    """The input lies outside the support of every rule."""


class DimensionMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class TriangularMf:
    """Triangular membership: 0 outside [a, c], peak 1 at b, linear ramps."""

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        if not self.a <= self.b <= self.c:
            raise ValueError(f"breakpoints out of order: {(self.a, self.b, self.c)}")

    def membership(self, x: float) -> float:
        if x == self.b:
            return 1.0
        if x <= self.a or x >= self.c:
            return 0.0
        if x < self.b:
            return (x - self.a) / (self.b - self.a)
        return (self.c - x) / (self.c - self.b)


@dataclass(frozen=True)
class Rule:
    antecedents: tuple[TriangularMf, ...]
    consequent: tuple[float, ...]  # c0 + c1*x1 + ... + cn*xn

    def __post_init__(self) -> None:
        object.__setattr__(self, "antecedents", tuple(self.antecedents))
        object.__setattr__(self, "consequent", tuple(float(c) for c in self.consequent))
        if len(self.consequent) != len(self.antecedents) + 1:
            raise DimensionMismatchError(
                f"rule with {len(self.antecedents)} antecedents needs "
                f"{len(self.antecedents) + 1} consequent coefficients"
            )

    def output(self, x: Sequence[float]) -> float:
        return self.consequent[0] + sum(c * v for c, v in zip(self.consequent[1:], x))


@dataclass(frozen=True)
class AnfisModel:
    rules: tuple[Rule, ...]
    dim: int
    and_op: str = "min"  # "min" | "product"

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.rules:
            raise ValueError("model needs at least one rule")
        if self.dim < 1:
            raise ValueError(f"input dimension must be >= 1, got {self.dim}")
        if self.and_op not in ("min", "product"):
            raise ValueError(f"and_op must be 'min' or 'product', got {self.and_op!r}")
        for rule in self.rules:
            if len(rule.antecedents) != self.dim:
                raise DimensionMismatchError(
                    f"rule has {len(rule.antecedents)} antecedents, model dim is {self.dim}"
                )


@dataclass
class Prediction:
    output: float
    firing: list[float]       # layer 2: w_i
    normalized: list[float]   # layer 3: w_i / sum_j w_j
    rule_outputs: list[float]  # f_i(x)


def predict(model: AnfisModel, x: Sequence[float]) -> Prediction:
    """Layers 1-5: memberships, firing strengths, normalization, weighted
    consequents, sum.  Raises NoRuleFiresError when no rule covers ``x``."""
    x = [float(v) for v in x]
    if len(x) != model.dim:
        raise DimensionMismatchError(f"expected {model.dim} inputs, got {len(x)}")
    firing = []
    for rule in model.rules:
        degrees = [mf.membership(v) for mf, v in zip(rule.antecedents, x)]
        if model.and_op == "min":
            firing.append(min(degrees))
        else:
            w = 1.0
            for d in degrees:
                w *= d
            firing.append(w)
    total = sum(firing)
    if total <= 0.0:
        raise NoRuleFiresError(f"input {x!r} fires no rule")
    normalized = [w / total for w in firing]
    rule_outputs = [rule.output(x) for rule in model.rules]
    output = sum(nw * f for nw, f in zip(normalized, rule_outputs))
    return Prediction(output=output, firing=firing, normalized=normalized, rule_outputs=rule_outputs)


def lms_update(model: AnfisModel, x: Sequence[float], target: float, mu: float) -> AnfisModel:
    """One stochastic-gradient step on this sample's squared error.

    c(i,0) += mu*e*wbar_i and c(i,k) += mu*e*wbar_i*x_k with e the signed
    prediction error; memberships are left untouched.
    """
    pred = predict(model, x)
    e = float(target) - pred.output
    x = [float(v) for v in x]
    rules = []
    for rule, nw in zip(model.rules, pred.normalized):
        coeffs = list(rule.consequent)
        coeffs[0] += mu * e * nw
        for k, v in enumerate(x):
            coeffs[k + 1] += mu * e * nw * v
        rules.append(Rule(rule.antecedents, tuple(coeffs)))
    return AnfisModel(tuple(rules), model.dim, model.and_op)


def ls_fit(model: AnfisModel, X: Sequence[Sequence[float]], Y: Sequence[float]) -> AnfisModel:
    """Global linear least squares over every consequent coefficient jointly.

    Each sample contributes the row [wbar_1*(1,x), ..., wbar_R*(1,x)]; the
    system is solved with a rank-revealing method, so rank-deficient (e.g.
    underdetermined) problems get the minimum-norm solution.
    """
    if len(X) != len(Y):
        raise DimensionMismatchError(f"{len(X)} samples but {len(Y)} targets")
    if not X:
        raise ValueError("need at least one sample")
    n_rules = len(model.rules)
    width = n_rules * (model.dim + 1)
    rows = np.zeros((len(X), width))
    for i, sample in enumerate(X):
        pred = predict(model, sample)  # raises if the sample fires no rule
        basis = [1.0, *map(float, sample)]
        for r, nw in enumerate(pred.normalized):
            for k, v in enumerate(basis):
                rows[i, r * (model.dim + 1) + k] = nw * v
    coeffs, *_ = np.linalg.lstsq(rows, np.asarray(Y, dtype=float), rcond=None)
    rules = []
    for r, rule in enumerate(model.rules):
        chunk = coeffs[r * (model.dim + 1): (r + 1) * (model.dim + 1)]
        rules.append(Rule(rule.antecedents, tuple(float(c) for c in chunk)))
    return AnfisModel(tuple(rules), model.dim, model.and_op)


def uniform_model(dim: int, mfs_per_dim: int = 3, and_op: str = "min") -> AnfisModel:
    """Grid model over [0,1]^dim: a uniform triangular partition per input,
    one rule per combination, all consequents zero."""
    if dim < 1 or mfs_per_dim < 2:
        raise ValueError("need dim >= 1 and at least 2 membership functions per input")
    peaks = [i / (mfs_per_dim - 1) for i in range(mfs_per_dim)]
    partition = []
    for i, b in enumerate(peaks):
        a = peaks[i - 1] if i > 0 else b
        c = peaks[i + 1] if i + 1 < len(peaks) else b
        partition.append(TriangularMf(a, b, c))
    combos: list[tuple[TriangularMf, ...]] = [()]
    for _ in range(dim):
        combos = [combo + (mf,) for combo in combos for mf in partition]
    zero = tuple(0.0 for _ in range(dim + 1))
    return AnfisModel(tuple(Rule(combo, zero) for combo in combos), dim, and_op)


# -- decision harness ---------------------------------------------------------


@dataclass(frozen=True)
class TrainConfig:
    mu: float
    retrain_error_threshold: float = 0.8

    def __post_init__(self) -> None:
        if not self.mu > 0.0:
            raise ValueError(f"mu must be > 0, got {self.mu}")
        if not 0.0 <= self.retrain_error_threshold <= 1.0:
            raise ValueError(
                f"retrain_error_threshold must be in [0,1], got {self.retrain_error_threshold}"
            )


@dataclass
class HarnessResult:
    error_rates: list[float]
    update_model: AnfisModel
    leave_model: AnfisModel


def run_harness(
    update_model: AnfisModel,
    leave_model: AnfisModel,
    periods: Sequence[Sequence[Sequence[float]]],
    labels: Sequence[Sequence[bool]],
    tc: TrainConfig,
) -> HarnessResult:
    """Stream periods of samples through the two-score decision rule.

    A sample is classified "update" when the update model outscores the
    leave model; ties count as errors.  Each misclassification triggers one
    LMS step per model (target 1 for the correct class, 0 for the other).
    When a period closes with an error rate at or above the threshold, both
    models are refit by least squares on that period's samples.
    """
    if len(periods) != len(labels):
        raise DimensionMismatchError(f"{len(periods)} periods but {len(labels)} label groups")
    rates: list[float] = []
    for xs, ys in zip(periods, labels):
        if len(xs) != len(ys):
            raise DimensionMismatchError("period and label lengths differ")
        errors = 0
        for x, should_update in zip(xs, ys):
            u = predict(update_model, x).output
            v = predict(leave_model, x).output
            correct = (u > v) if should_update else (v > u)
            if not correct:
                errors += 1
                tgt_u, tgt_v = (1.0, 0.0) if should_update else (0.0, 1.0)
                update_model = lms_update(update_model, x, tgt_u, tc.mu)
                leave_model = lms_update(leave_model, x, tgt_v, tc.mu)
        rate = errors / len(xs) if xs else 0.0
        rates.append(rate)
        if xs and rate >= tc.retrain_error_threshold:
            update_model = ls_fit(update_model, xs, [1.0 if y else 0.0 for y in ys])
            leave_model = ls_fit(leave_model, xs, [0.0 if y else 1.0 for y in ys])
    return HarnessResult(error_rates=rates, update_model=update_model, leave_model=leave_model)


def split_periods(
    X: Sequence[Sequence[float]], labels: Sequence[bool], period_length: int
) -> tuple[list[list[Sequence[float]]], list[list[bool]]]:
    """Chop a sample stream into consecutive periods of the given length;
    a shorter trailing period is kept."""
    if period_length < 1:
        raise ValueError("period_length must be >= 1")
    periods, period_labels = [], []
    for start in range(0, len(X), period_length):
        periods.append(list(X[start : start + period_length]))
        period_labels.append(list(labels[start : start + period_length]))
    return periods, period_labels


# -- serialization -------------------------------------------------------------


def model_to_json_dict(model: AnfisModel) -> dict:
    return {
        "dim": model.dim,
        "and_op": model.and_op,
        "rules": [
            {
                "antecedents": [[mf.a, mf.b, mf.c] for mf in rule.antecedents],
                "consequent": list(rule.consequent),
            }
            for rule in model.rules
        ],
    }


def model_from_json_dict(data: Any) -> AnfisModel:
    _jsonio.check_keys(data, "model", ["dim", "and_op", "rules"])
    try:
        rules = []
        for i, raw in enumerate(data["rules"]):
            _jsonio.check_keys(raw, f"rules[{i}]", ["antecedents", "consequent"])
            antecedents = tuple(TriangularMf(*map(float, abc)) for abc in raw["antecedents"])
            rules.append(Rule(antecedents, tuple(float(c) for c in raw["consequent"])))
        return AnfisModel(tuple(rules), int(data["dim"]), str(data["and_op"]))
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"model: {exc}") from None


def load_model_file(path: str) -> AnfisModel:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return model_from_json_dict(data)


def read_samples_csv(path: str) -> tuple[list[list[float]], list[bool]]:
    """Read harness samples: columns x1..xn plus a final 0/1 label column.

    A header row is detected (and skipped) when its first cell is not
    numeric.
    """
    X: list[list[float]] = []
    labels: list[bool] = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        for row_no, row in enumerate(csv.reader(handle), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                if row_no == 1:
                    continue
                raise FileFormatError(f"{path}: row {row_no}: non-numeric value") from None
            if len(values) < 2:
                raise FileFormatError(f"{path}: row {row_no}: need at least one input and a label")
            X.append(values[:-1])
            labels.append(values[-1] != 0.0)
    if not X:
        raise FileFormatError(f"{path}: no samples")
    widths = {len(row) for row in X}
    if len(widths) != 1:
        raise FileFormatError(f"{path}: inconsistent column counts {sorted(widths)}")
    return X, labels
