"""Interval (type-2) analysis: separating uncertainty from pessimism.

Suppose control-flow analysis found two possible IncRate implementations
to inline into B4.  One returns 2*i (killed by the i update, not downward
exposed), the other returns a constant (downward exposed).  Joining the
two targets per predicate entry widens only where they disagree; running
the whole pipeline on interval values then tells us which verdicts are
*certainly* pessimistic and which are merely unknown.
"""

from pathlib import Path

from fuzzydfa import LogicFamily, join_targets, lcm_pipeline
from fuzzydfa.lcm import load_problem_file

HERE = Path(__file__).resolve().parent


def bits(s):
    return [float(c) for c in reversed(s)]


# DEE rows of block B4 for the two inlined candidates (expression order:
# i<N, in[i]!=b, i+1, A*B, IncRate(i), Transform(b), abs(a[i]-b)).
dee_target_1 = bits("0101000")   # IncRate_1(i) = 2*i: result depends on i
dee_target_2 = bits("0111000")   # IncRate_2(i) = 1: result survives the block
joined = join_targets([dee_target_1, dee_target_2])
print("joined DEE(B4):", [f"[{v.lo:g}, {v.hi:g}]" if v.width else f"{v.lo:g}" for v in joined])

problem, settings = load_problem_file(str(HERE / "data" / "diffpcm_t2.json"))
family = settings.logic or LogicFamily.minmax()
assert problem.dee["B4"][4] == joined[4]

result = lcm_pipeline(problem, "interval", family)
increate = problem.exprs.index("IncRate(i)")

print("\nIncRate(i) motion as intervals:")
for (src, dst), row in result.insert.items():
    v = row[increate]
    print(f"  insert {src}->{dst}: [{v.lo:.3f}, {v.hi:.3f}]")
for block, row in result.delete.items():
    v = row[increate]
    print(f"  delete {block}:     [{v.lo:.3f}, {v.hi:.3f}]")

v = result.delete["B4"][increate]
print(f"""
The type-1 analysis graded this deletion at 0.001 - indistinguishable from
"impossible".  The interval [{v.lo:.3f}, {v.hi:.3f}] shows the truth: it
depends entirely on which IncRate gets called, so the 0.001 was a
pessimistic over-generalization, not a fact.""")
