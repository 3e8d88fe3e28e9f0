import random

import pytest

from fuzzydfa import LcmEdge, LcmProblem, LogicFamily, TruthInterval, WidthMismatchError
from fuzzydfa import lcm as L
from krs_oracle import krs_bitvector, random_crisp_problem

MINMAX = LogicFamily.minmax()


def bits(s: str) -> list[float]:
    """Bit-string indexed high-to-low -> row list indexed 0..width-1."""
    return [float(c) for c in reversed(s)]


def diffpcm_problem(p: float = 0.999, n: float = 1000.0) -> LcmProblem:
    """The differential-PCM loop: entry B0, loop header B1, branch B2,
    update block B3, body B4, exit B5.  Forward weights come from join
    frequencies, backward weights from branch probabilities."""
    return LcmProblem(
        blocks=["B0", "B1", "B2", "B3", "B4", "B5"],
        edges=[
            LcmEdge("B0", "B1", 1.0 / n, 1.0),
            LcmEdge("B4", "B1", (n - 1.0) / n, 1.0),
            LcmEdge("B1", "B2", 1.0, (n - 1.0) / n),
            LcmEdge("B1", "B5", 1.0, 1.0 / n),
            LcmEdge("B2", "B3", 1.0, 1.0 - p),
            LcmEdge("B2", "B4", p, p),
            LcmEdge("B3", "B4", 1.0 - p, 1.0),
        ],
        exprs=["i<N", "in[i]!=b", "i+1", "A*B", "IncRate(i)", "Transform(b)", "abs(a[i]-b)"],
        dee={"B0": bits("0000000"), "B1": bits("0000001"), "B2": bits("0000010"),
             "B3": bits("0000000"), "B4": bits("0101000"), "B5": bits("0000000")},
        uee={"B0": bits("0000000"), "B1": bits("0000001"), "B2": bits("0000010"),
             "B3": bits("1000000"), "B4": bits("0110100"), "B5": bits("0000000")},
        kill={"B0": bits("1111111"), "B1": bits("0000000"), "B2": bits("0000000"),
              "B3": bits("1100010"), "B4": bits("1011111"), "B5": bits("0000000")},
        entry="B0",
        exit="B5",
    )


def fuzzy_reference(problem: LcmProblem, expr: int, eps: float = 1e-12):
    """Literal per-expression equation systems, iterated with plain loops:
    an implementation-independent cross-check of the staged pipeline."""
    AND, OR, NOT = min, max, lambda x: 1.0 - x
    blocks = problem.blocks
    preds = {b: [(e.src, e.alpha) for e in problem.preds(b)] for b in blocks}
    succs = {b: [(e.dst, e.alpha_back) for e in problem.succs(b)] for b in blocks}
    dee = {b: problem.dee[b][expr] for b in blocks}
    uee = {b: problem.uee[b][expr] for b in blocks}
    kill = {b: problem.kill[b][expr] for b in blocks}

    av = {b: 0.0 for b in blocks}
    for _ in range(1_000_000):
        drift = 0.0
        for b in blocks:
            avin = sum(a * av[w] for w, a in preds[b])
            new = OR(dee[b], AND(avin, NOT(kill[b])))
            drift += abs(new - av[b])
            av[b] = new
        if drift < eps:
            break

    an = {b: 0.0 for b in blocks}
    for _ in range(1_000_000):
        drift = 0.0
        for b in blocks:
            anin = sum(a * an[s] for s, a in succs[b])
            new = OR(uee[b], AND(anin, NOT(kill[b])))
            drift += abs(new - an[b])
            an[b] = new
        if drift < eps:
            break
    anout = {b: sum(a * an[s] for s, a in succs[b]) for b in blocks}

    ear = {}
    for e in problem.edges:
        if e.src == problem.entry:
            ear[(e.src, e.dst)] = AND(an[e.dst], NOT(av[e.src]))
        else:
            ear[(e.src, e.dst)] = AND(
                AND(an[e.dst], NOT(av[e.src])), OR(kill[e.src], NOT(anout[e.src]))
            )

    lin = {b: 0.0 for b in blocks}
    lout = {(e.src, e.dst): 0.0 for e in problem.edges}
    for _ in range(1_000_000):
        drift = 0.0
        for e in problem.edges:
            new = OR(ear[(e.src, e.dst)], AND(lin[e.src], NOT(uee[e.src])))
            drift += abs(new - lout[(e.src, e.dst)])
            lout[(e.src, e.dst)] = new
        for b in blocks:
            if b == problem.entry:
                continue
            new = sum(a * lout[(w, b)] for w, a in preds[b])
            drift += abs(new - lin[b])
            lin[b] = new
        if drift < eps:
            break

    insert = {k: AND(lout[k], NOT(lin[k[1]])) for k in lout}
    delete = {b: (0.0 if b == problem.entry else AND(uee[b], NOT(lin[b]))) for b in blocks}
    return {"av": av, "an": an, "anout": anout, "earliest": ear,
            "later_in": lin, "later_out": lout, "insert": insert, "delete": delete}


# -- fuzzy pipeline ----------------------------------------------------------------


@pytest.fixture(scope="module")
def fuzzy_result():
    return L.lcm_pipeline(diffpcm_problem(), "fuzzy", MINMAX)


def test_fuzzy_pipeline_matches_equation_reference(fuzzy_result):
    problem = diffpcm_problem()
    for k in range(len(problem.exprs)):
        ref = fuzzy_reference(problem, k)
        for b in problem.blocks:
            assert fuzzy_result.av_out[b][k] == pytest.approx(ref["av"][b], abs=2e-5)
            assert fuzzy_result.an_out[b][k] == pytest.approx(ref["an"][b], abs=2e-5)
            assert fuzzy_result.an_in[b][k] == pytest.approx(ref["anout"][b], abs=2e-5)
            assert fuzzy_result.later_in[b][k] == pytest.approx(ref["later_in"][b], abs=2e-5)
            assert fuzzy_result.delete[b][k] == pytest.approx(ref["delete"][b], abs=2e-5)
        for key in ref["insert"]:
            assert fuzzy_result.earliest[key][k] == pytest.approx(ref["earliest"][key], abs=2e-5)
            assert fuzzy_result.insert[key][k] == pytest.approx(ref["insert"][key], abs=2e-5)


def test_fuzzy_headline_numbers(fuzzy_result):
    transform = 5  # Transform(b)
    increate = 4   # IncRate(i)
    assert fuzzy_result.delete["B4"][transform] == pytest.approx(0.998, abs=0.005)
    assert fuzzy_result.insert[("B0", "B1")][transform] == pytest.approx(0.998, abs=0.005)
    assert fuzzy_result.insert[("B3", "B4")][transform] == pytest.approx(0.998, abs=0.005)
    assert fuzzy_result.delete["B4"][increate] <= 0.01
    named = {("B0", "B1"), ("B3", "B4")}
    for key, row in fuzzy_result.insert.items():
        for k, v in enumerate(row):
            if k == transform and key in named:
                continue
            assert v <= 0.01, (key, k, v)
    for b, row in fuzzy_result.delete.items():
        for k, v in enumerate(row):
            if (b, k) == ("B4", transform):
                continue
            assert v <= 0.01, (b, k, v)
    assert fuzzy_result.converged


def test_anticipatability_diffpcm_values():
    problem = diffpcm_problem()
    stage = L.anticipatability(problem, "fuzzy", MINMAX)
    transform = 5
    # The loop header anticipates the transform on nearly every path.
    assert stage.out["B1"][transform] == pytest.approx(0.998001, abs=1e-4)
    assert stage.merged["B1"][transform] == pytest.approx(0.998001, abs=1e-4)
    assert stage.out["B5"][transform] == 0.0
    assert stage.out["B4"][transform] == pytest.approx(1.0, abs=1e-9)


def test_earliest_entry_edge_case(fuzzy_result):
    problem = diffpcm_problem()
    stage_av = L.availability(problem, "fuzzy", MINMAX)
    stage_an = L.anticipatability(problem, "fuzzy", MINMAX)
    ear = L.earliest(problem, stage_av.out, stage_an.merged, stage_an.out, "fuzzy", MINMAX)
    for k in range(len(problem.exprs)):
        expected = min(stage_an.out["B1"][k], 1.0 - stage_av.out["B0"][k])
        assert ear[("B0", "B1")][k] == pytest.approx(expected, abs=1e-12)


def test_delete_of_entry_block_is_zero(fuzzy_result):
    assert all(v == 0.0 for v in fuzzy_result.delete["B0"])


def test_monotone_in_branch_probability():
    transform = 5
    last = -1.0
    for p in (0.9, 0.99, 0.999):
        result = L.lcm_pipeline(diffpcm_problem(p=p), "fuzzy", MINMAX)
        value = result.delete["B4"][transform]
        assert value >= last - 1e-9
        last = value


# -- crisp pipeline -------------------------------------------------------------------


def test_crisp_diffpcm_moves_nothing():
    result = L.lcm_pipeline(diffpcm_problem(), "crisp", MINMAX)
    assert all(v == 0.0 for row in result.insert.values() for v in row)
    assert all(v == 0.0 for row in result.delete.values() for v in row)


def test_crisp_random_cfgs_match_bitvector_oracle():
    rng = random.Random(61)
    for _ in range(100):
        problem = random_crisp_problem(rng)
        assert L.validate_problem(problem, "crisp") == []
        result = L.lcm_pipeline(problem, "crisp", MINMAX)
        insert_ref, delete_ref = krs_bitvector(problem)
        for key, row in result.insert.items():
            assert {k for k, v in enumerate(row) if v} == insert_ref[key], (key, problem)
        for b, row in result.delete.items():
            assert {k for k, v in enumerate(row) if v} == delete_ref[b], (b, problem)


def test_fuzzy_on_chains_with_unit_weights_matches_crisp():
    rng = random.Random(67)
    for _ in range(40):
        n = rng.randint(2, 6)
        blocks = [f"c{i}" for i in range(n)]
        edges = [LcmEdge(blocks[i], blocks[i + 1], 1.0, 1.0) for i in range(n - 1)]
        width = rng.randint(1, 4)

        def rows():
            return {b: [float(rng.random() < 0.5) for _ in range(width)] for b in blocks}

        problem = LcmProblem(blocks, edges, [f"e{k}" for k in range(width)],
                             rows(), rows(), rows(), blocks[0], blocks[-1])
        crisp = L.lcm_pipeline(problem, "crisp", MINMAX)
        fuzzy = L.lcm_pipeline(problem, "fuzzy", MINMAX)
        for key in crisp.insert:
            for a, b in zip(crisp.insert[key], fuzzy.insert[key]):
                assert b == pytest.approx(a, abs=1e-6)
        for blk in crisp.delete:
            for a, b in zip(crisp.delete[blk], fuzzy.delete[blk]):
                assert b == pytest.approx(a, abs=1e-6)


# -- stage corner cases ------------------------------------------------------------------


def single_block_problem(dee: float, uee: float = 0.0, kill: float = 0.0) -> LcmProblem:
    return LcmProblem(
        blocks=["only"],
        edges=[],
        exprs=["e"],
        dee={"only": [dee]},
        uee={"only": [uee]},
        kill={"only": [kill]},
        entry="only",
        exit="only",
    )


def test_single_block_availability_is_its_dee():
    stage = L.availability(single_block_problem(dee=1.0), "fuzzy", MINMAX)
    assert stage.out["only"] == [1.0]
    crisp = L.availability(single_block_problem(dee=1.0), "crisp", MINMAX)
    assert crisp.out["only"] == [1.0]


def test_all_kill_availability_equals_dee():
    rng = random.Random(71)
    blocks = ["x0", "x1", "x2"]
    edges = [LcmEdge("x0", "x1", 1.0, 1.0), LcmEdge("x1", "x2", 1.0, 1.0)]
    dee = {b: [rng.random() for _ in range(3)] for b in blocks}
    uee = {b: [0.0] * 3 for b in blocks}
    kill = {b: [1.0] * 3 for b in blocks}
    problem = LcmProblem(blocks, edges, ["a", "b", "c"], dee, uee, kill, "x0", "x2")
    stage = L.availability(problem, "fuzzy", MINMAX)
    for b in blocks:
        for got, want in zip(stage.out[b], dee[b]):
            assert got == pytest.approx(want, abs=1e-9)


def test_saturated_uee_saturates_anticipatability():
    blocks = ["x0", "x1", "x2"]
    edges = [LcmEdge("x0", "x1", 1.0, 1.0), LcmEdge("x1", "x2", 1.0, 1.0)]
    ones = {b: [1.0] for b in blocks}
    zeros = {b: [0.0] for b in blocks}
    problem = LcmProblem(blocks, edges, ["e"], zeros, ones, zeros, "x0", "x2")
    stage = L.anticipatability(problem, "fuzzy", MINMAX)
    assert all(stage.out[b] == [1.0] for b in blocks)


def test_crisp_earliest_edge_saturates_later_out():
    problem = diffpcm_problem()
    result = L.lcm_pipeline(problem, "crisp", MINMAX)
    idle = 0  # loop-condition expression: earliest on the entry edge
    assert result.earliest[("B0", "B1")][idle] == 1.0
    assert result.later_out[("B0", "B1")][idle] == 1.0


def test_chain_with_no_earliest_keeps_later_at_zero():
    blocks = ["x0", "x1", "x2"]
    edges = [LcmEdge("x0", "x1", 1.0, 1.0), LcmEdge("x1", "x2", 1.0, 1.0)]
    zeros = {b: [0.0] for b in blocks}
    problem = LcmProblem(blocks, edges, ["e"], zeros, zeros, zeros, "x0", "x2")
    ear = {(e.src, e.dst): [0.0] for e in problem.edges}
    lat = L.later(problem, ear, "fuzzy", MINMAX)
    assert all(v == 0.0 for row in lat.later_out.values() for v in row)
    assert all(v == 0.0 for row in lat.later_in.values() for v in row)


def test_saturated_later_in_blocks_deletion():
    problem = single_block_problem(dee=0.0, uee=1.0)
    problem2 = LcmProblem(
        blocks=["a", "b"],
        edges=[LcmEdge("a", "b", 1.0, 1.0)],
        exprs=["e"],
        dee={"a": [0.0], "b": [0.0]},
        uee={"a": [0.0], "b": [1.0]},
        kill={"a": [0.0], "b": [0.0]},
        entry="a",
        exit="b",
    )
    insert, delete = L.insert_delete(
        problem2, {"a": [0.0], "b": [1.0]}, {("a", "b"): [1.0]}, "crisp", MINMAX
    )
    assert delete["b"] == [0.0]
    assert insert[("a", "b")] == [0.0]


def test_empty_expression_list_gives_empty_matrices():
    problem = LcmProblem(
        blocks=["a", "b"],
        edges=[LcmEdge("a", "b", 1.0, 1.0)],
        exprs=[],
        dee={"a": [], "b": []},
        uee={"a": [], "b": []},
        kill={"a": [], "b": []},
        entry="a",
        exit="b",
    )
    for mode in ("crisp", "fuzzy", "interval"):
        result = L.lcm_pipeline(problem, mode, MINMAX)
        assert result.insert[("a", "b")] == []
        assert result.delete["a"] == []
        assert result.converged


# -- interval mode --------------------------------------------------------------------


def interval_problem() -> LcmProblem:
    problem = diffpcm_problem()
    problem.dee["B4"] = [0.0, 0.0, 0.0, 1.0, TruthInterval(0.0, 1.0), 1.0, 0.0]
    return problem


def test_join_targets_widens_only_disagreements():
    target_1 = bits("0101000")
    target_2 = bits("0111000")
    joined = L.join_targets([target_1, target_2])
    assert joined[4] == TruthInterval(0.0, 1.0)   # IncRate(i): targets disagree
    for k in (0, 1, 2, 3, 5, 6):
        assert joined[k].width == 0.0
        assert joined[k].lo == target_1[k]


def test_join_targets_identity_cases():
    row = bits("0101000")
    joined = L.join_targets([row, row])
    assert [j.lo for j in joined] == row
    assert all(j.width == 0.0 for j in joined)
    single = L.join_targets([row])
    assert [j.lo for j in single] == row
    with pytest.raises(WidthMismatchError):
        L.join_targets([[0.0, 1.0], [0.0]])


def test_interval_pipeline_reproduces_widened_delete():
    result = L.lcm_pipeline(interval_problem(), "interval", MINMAX)
    increate = 4
    box = result.delete["B4"][increate]
    assert box.lo == pytest.approx(0.002, abs=0.005)
    assert box.hi == pytest.approx(0.999, abs=0.005)
    for key, row in result.insert.items():
        entry = row[increate]
        lo = 0.000 if key == ("B4", "B1") else 0.001
        assert entry.lo == pytest.approx(lo, abs=0.005), key
        assert entry.hi == pytest.approx(0.999, abs=0.005), key
    for b, row in result.delete.items():
        if b != "B4":
            assert row[increate].hi <= 0.005


def test_interval_pipeline_with_degenerate_inputs_matches_fuzzy():
    problem = diffpcm_problem()
    fuzzy = L.lcm_pipeline(problem, "fuzzy", MINMAX)
    boxed = L.lcm_pipeline(problem, "interval", MINMAX)
    for key in fuzzy.insert:
        for a, b in zip(fuzzy.insert[key], boxed.insert[key]):
            assert b.lo == pytest.approx(a, abs=1e-5)
            assert b.hi == pytest.approx(a, abs=1e-5)
    for blk in fuzzy.delete:
        for a, b in zip(fuzzy.delete[blk], boxed.delete[blk]):
            assert b.lo == pytest.approx(a, abs=1e-5)
            assert b.hi == pytest.approx(a, abs=1e-5)


# -- validation and serialization -------------------------------------------------------


def test_validate_rejects_structural_problems():
    problem = diffpcm_problem()
    problem.edges[0] = LcmEdge("B0", "B1", 0.5, 1.0)
    assert any("forward weights" in e for e in L.validate_problem(problem, "fuzzy"))

    problem = diffpcm_problem()
    problem.edges.append(LcmEdge("B5", "B0", 1.0, 1.0))
    errors = L.validate_problem(problem, "fuzzy")
    assert any("entry" in e for e in errors) and any("exit" in e for e in errors)

    problem = diffpcm_problem()
    del problem.dee["B4"]
    assert any("missing row" in e for e in L.validate_problem(problem, "fuzzy"))

    problem = diffpcm_problem()
    problem.dee["B4"][3] = 0.25
    assert any("crisp" in e for e in L.validate_problem(problem, "crisp"))
    assert L.validate_problem(problem, "fuzzy") == []

    problem = interval_problem()
    assert any("interval" in e for e in L.validate_problem(problem, "fuzzy"))
    assert L.validate_problem(problem, "interval") == []


def test_pipeline_mode_must_match_values():
    with pytest.raises(ValueError):
        L.lcm_pipeline(interval_problem(), "fuzzy", MINMAX)


def test_problem_json_round_trip(data_dir):
    problem, settings = L.load_problem_file(str(data_dir / "diffpcm_t1.json"))
    assert settings.mode == "fuzzy"
    assert settings.logic == MINMAX
    data = L.problem_to_json_dict(problem, settings)
    problem2, settings2 = L.problem_from_json_dict(data)
    assert problem2 == problem
    assert settings2.mode == settings.mode

    boxed, boxed_settings = L.load_problem_file(str(data_dir / "diffpcm_t2.json"))
    assert boxed_settings.mode == "interval"
    assert boxed.dee["B4"][4] == TruthInterval(0.0, 1.0)


def test_bundled_t1_matches_in_memory_problem(data_dir):
    problem, _ = L.load_problem_file(str(data_dir / "diffpcm_t1.json"))
    assert problem == diffpcm_problem()


def test_jobs_parallelism_is_deterministic():
    problem = diffpcm_problem()
    seq = L.lcm_pipeline(problem, "fuzzy", MINMAX, jobs=1)
    par = L.lcm_pipeline(problem, "fuzzy", MINMAX, jobs=4)
    assert seq.insert == par.insert
    assert seq.delete == par.delete
