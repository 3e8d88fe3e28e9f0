"""Lazy code motion on the diffPCM loop: crisp verdict vs fuzzy degrees.

The loop body (B4) calls Transform(b) and IncRate(i) on every iteration.
Classically, neither call can move: b *might* change in B3, i *does*
change in B4.  But B3 runs on only 0.1% of iterations (p = 0.999), so the
fuzzy analysis - using branch probabilities as collection weights - grades
the motion of Transform(b) at 0.998 instead of rejecting it outright.
"""

from pathlib import Path

from fuzzydfa import LogicFamily, lcm_pipeline
from fuzzydfa.lcm import load_problem_file

HERE = Path(__file__).resolve().parent

problem, settings = load_problem_file(str(HERE / "data" / "diffpcm_t1.json"))
family = settings.logic or LogicFamily.minmax()


def show(result, matrix, title):
    print(f"  {title}  " + " ".join(f"{name:>12}" for name in problem.exprs))
    for key, row in matrix.items():
        label = f"{key[0]}->{key[1]}" if isinstance(key, tuple) else key
        cells = " ".join(f"{v:12.3f}" for v in row)
        print(f"    {label:8} {cells}")


for mode in ("crisp", "fuzzy"):
    result = lcm_pipeline(problem, mode, family)
    print(f"== {mode} mode ==")
    show(result, result.insert, "Insert")
    show(result, result.delete, "Delete")
    print()

fuzzy = lcm_pipeline(problem, "fuzzy", family)
transform = problem.exprs.index("Transform(b)")
print("Transform(b) motion, fuzzy grades:")
print(f"  delete from B4:      {fuzzy.delete['B4'][transform]:.3f}")
print(f"  insert on B0->B1:    {fuzzy.insert[('B0', 'B1')][transform]:.3f}")
print(f"  insert on B3->B4:    {fuzzy.insert[('B3', 'B4')][transform]:.3f}")
increate = problem.exprs.index("IncRate(i)")
print(f"IncRate(i) stays put (i is written every iteration): "
      f"delete grade {fuzzy.delete['B4'][increate]:.3f}")
