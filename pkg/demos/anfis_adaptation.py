"""Refining a static verdict online with a Takagi-Sugeno ANFIS.

The fuzzy analysis graded "hoist Transform(b) out of the loop" at 0.998.
That degree is an average over all runs; for a specific input stream we
can do better.  Two ANFIS classifiers score "update b" vs "leave b" per
sample; wrong calls trigger an LMS step, and a period that goes badly
(error rate >= 80%) triggers a least-squares refit on that period.
"""

import math
import random

from fuzzydfa import TrainConfig, predict, run_harness, uniform_model
from fuzzydfa.anfis import AnfisModel, Rule, TriangularMf

# -- the five layers on a two-rule example -----------------------------------

model = AnfisModel(
    rules=(
        Rule((TriangularMf(0.35, 0.5, 0.75), TriangularMf(0.05, 0.15, 0.25)), (0.0, 0.2, -0.43)),
        Rule((TriangularMf(0.5, 0.85, 0.9), TriangularMf(0.15, 0.65, 0.8)), (0.5, 0.0, 0.1)),
    ),
    dim=2,
    and_op="min",
)
pred = predict(model, [0.6, 0.2])
print("two-rule classification of <0.6, 0.2>:")
for i, (w, nw, f) in enumerate(zip(pred.firing, pred.normalized, pred.rule_outputs), 1):
    print(f"  rule {i}: firing {w:.3f}, normalized {nw:.3f}, consequent {f:.3f}")
print(f"  output: {pred.output:.3f}")

# -- streaming adaptation ------------------------------------------------------

# A periodic input signal, 10 periods of 25 samples; "update b" is correct
# exactly when the signal clears a threshold.  Periods resemble each other
# but are not identical, so the error need not fall monotonically.
rng = random.Random(20250811)
periods, labels = [], []
for _ in range(10):
    xs, ys = [], []
    for k in range(25):
        signal = 0.5 + 0.4 * math.sin(2 * math.pi * k / 25) + rng.uniform(-0.05, 0.05)
        signal = min(1.0, max(0.0, signal))
        xs.append([k / 25, signal])
        ys.append(signal > 0.55)
    periods.append(xs)
    labels.append(ys)

print("\nper-period error rates (update/leave harness):")
for mu in (0.001, 0.05, 0.15, 0.1):
    outcome = run_harness(
        uniform_model(2, 3),
        uniform_model(2, 3),
        periods,
        labels,
        TrainConfig(mu=mu, retrain_error_threshold=0.8),
    )
    rates = " ".join(f"{r:.2f}" for r in outcome.error_rates)
    print(f"  mu={mu:<6} {rates}")
print("""
The very first sample ties (both models start at zero) and its LMS step
orients the score gap; from there the decision only depends on the *sign*
of that gap, which scales linearly with mu - hence identical decisions for
every step size until a >= 80% period triggers a least-squares refit.  The
residual error comes from the jitter between periods.""")
