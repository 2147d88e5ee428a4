"""Acceptance suite: one PASS/FAIL line per criterion, printed at the end of the run.

Sizes, seeds and time limits are fixed here and must not be relaxed.
"""

import functools
import operator
import random
import time

from pbmc import count, parse_formula, validate_graded_trace
from pbmc.compiler import compile_constraint
from pbmc.dd import ADD, MAX, MUL, AddManager
from pbmc.formula import PBFormula, parse_constraint
from pbmc.incremental import Session, run_script
from pbmc.oracle import brute_projected_count, brute_satisfiable, gen_instance, gen_session

from conftest import THRESHOLD, assignments

GOLDEN_SECONDS = 1.0
ORACLE_INSTANCES = 500
ORACLE_SECONDS = 300.0
EARLY_TRIPLES = 200
SESSIONS = 200
RECOUNT_RATE = 0.95
POLLUTED_INSTANCES = 50
POLLUTION_ENTRIES = 100
ADD_CASES = 1000


def oracle_instance(seed):
    rng = random.Random(f"acceptance:{seed}")
    return gen_instance(seed, nvars=rng.randint(1, 12), nconstraints=rng.randint(0, 8),
                        max_coeff=rng.randint(1, 5), density=rng.choice([0.2, 0.3, 0.5, 0.8, 1.0]),
                        x_fraction=rng.random())


def test_golden_example(report):
    t0 = time.perf_counter()
    f = parse_formula(THRESHOLD)
    plain = count(f).count
    projected = count(f.with_projection([1])).count
    dt = time.perf_counter() - t0
    ok = plain == 5 and projected == 2 and dt < GOLDEN_SECONDS
    report("golden example: 5 models, 2 projected on x1, under 1 s", ok,
           f"got {plain} and {projected} in {dt:.3f}s")
    assert ok


def test_threshold_structure(report):
    m = AddManager.for_nvars(3)
    kinds = m.count_kinds(compile_constraint(m, parse_constraint("+2 x1 +1 x2 +1 x3 >= 2")))
    ok = kinds == (3, 2)
    report("threshold ADD shape: 3 internal nodes and 2 terminals", ok, f"got {kinds}")
    assert ok


@functools.cache
def oracle_run():
    """Counts and traces for the oracle corpus, shared by two criteria."""
    t0 = time.perf_counter()
    bad, traces = [], []
    for seed in range(ORACLE_INSTANCES):
        f = oracle_instance(seed)
        res = count(f)
        traces.append((res.trace, f.xset, f.yset))
        if res.count != brute_projected_count(f):
            bad.append(seed)
    return bad, traces, time.perf_counter() - t0


def test_oracle_equivalence(report):
    bad, _, dt = oracle_run()
    ok = not bad and dt <= ORACLE_SECONDS
    report(f"oracle equivalence on {ORACLE_INSTANCES} random instances", ok,
           f"{len(bad)} mismatches, {dt:.1f}s")
    assert ok, bad[:10]


def test_gradedness(report):
    traces = oracle_run()[1]
    bad = [i for i, (t, xs, ys) in enumerate(traces) if validate_graded_trace(t, xs, ys)]
    ok = not bad and len(traces) >= ORACLE_INSTANCES
    report(f"graded project-join trees on {len(traces)} traces", ok, f"{len(bad)} invalid")
    assert ok, bad[:10]


def test_early_projection(report):
    # f over 1..4, g over 3..6; x in {1, 2} occurs in f only. Values are
    # nonnegative, as in counting, so the existential identity applies.
    rng = random.Random(2024)
    bad = 0
    for _ in range(EARLY_TRIPLES):
        m = AddManager(rng.sample(range(1, 7), 6))
        f = m.from_truth_table([1, 2, 3, 4], [rng.randint(0, 4) for _ in range(16)])
        g = m.from_truth_table([3, 4, 5, 6], [rng.randint(0, 4) for _ in range(16)])
        x = rng.choice([1, 2])
        fg = m.apply(MUL, f, g)
        bad += m.sum_project(fg, x) is not m.apply(MUL, m.sum_project(f, x), g)
        bad += m.exists_project(fg, x) is not m.apply(MUL, m.exists_project(f, x), g)
    ok = bad == 0
    report(f"early projection identities on {EARLY_TRIPLES} triples", ok, f"{bad} failures")
    assert ok


def test_incremental_equivalence(report):
    mismatches = 0
    reduced = 0
    for seed in range(SESSIONS):
        rng = random.Random(f"session-shape:{seed}")
        params = dict(nvars=rng.randint(3, 12), nconstraints=rng.randint(1, 8),
                      max_coeff=rng.randint(1, 5), x_fraction=rng.random())
        script = gen_session(seed, 5, **params)

        def check(formula, value):
            nonlocal mismatches
            fresh = count(formula, preprocess=False).count
            mismatches += value != fresh or fresh != brute_projected_count(formula)

        out = list(run_script(script.splitlines(), check=check))
        assert sum(1 for ln in out if not ln.startswith("cid=")) == 5
        s = Session.from_formula(gen_instance(seed, **params))
        first = s.count()
        again = s.count()
        mismatches += first.count != again.count
        reduced += again.stats["apply_calls"] < first.stats["apply_calls"]
    rate = reduced / SESSIONS
    ok = mismatches == 0 and rate >= RECOUNT_RATE
    report(f"incremental counts equal fresh counts over {SESSIONS} five-step sessions", ok,
           f"{mismatches} mismatches, recount cheaper on {rate:.1%}")
    assert ok


def test_cache_pollution(report):
    changed = 0
    hits = 0
    for seed in range(POLLUTED_INSTANCES):
        f = oracle_instance(10_000 + seed)
        m = AddManager.for_nvars(f.nvars)
        # polluter: unrelated formulas over the same variables, cids far away
        polluter = Session(f.nvars, f.xset, manager=m, first_cid=10_000)
        k = 0
        while len(polluter.cache) < POLLUTION_ENTRIES:
            other = gen_instance(f"{seed}:{k}", nvars=f.nvars, nconstraints=4, x_fraction=0.5)
            for cid in list(polluter.constraints):
                polluter.remove(cid)
            for c in other.constraints.values():
                polluter.add(c)
            polluter.count()
            k += 1
        s = Session.from_formula(f, manager=m)
        s.inject(polluter.cache.entries[:POLLUTION_ENTRIES])
        res = s.count()
        hits += res.stats["cache_hits"]
        changed += res.count != brute_projected_count(f)
    ok = changed == 0
    report(f"{POLLUTION_ENTRIES} injected cache entries change no count on {POLLUTED_INSTANCES} instances",
           ok, f"{changed} changed, {hits} foreign entries admitted")
    assert ok


def test_add_canonicity_and_semantics(report):
    rng = random.Random(7)
    ops = {ADD: operator.add, MUL: operator.mul, MAX: max}
    bad = 0
    for _ in range(ADD_CASES):
        n = rng.randint(0, 6)
        order = list(range(1, 7))
        rng.shuffle(order)
        m = AddManager(order)
        vs = list(range(1, n + 1))
        ta = [rng.randint(-3, 3) for _ in range(1 << n)]
        tb = [rng.randint(-3, 3) for _ in range(1 << n)]
        a = m.from_truth_table(vs, ta)
        bad += a is not m.from_truth_table(vs, ta, top_down=False)
        b = m.from_truth_table(vs, tb)
        op = rng.choice(list(ops))
        r = m.apply(op, a, b)
        bad += any(m.evaluate(r, asg) != ops[op](m.evaluate(a, asg), m.evaluate(b, asg))
                   for asg in assignments(range(1, 7)))
    ok = bad == 0
    report(f"ADD canonicity and pointwise Apply on {ADD_CASES} random functions", ok, f"{bad} failures")
    assert ok


def test_degenerate_contracts(report):
    problems = []
    sat_seen = {True: 0, False: 0}
    for seed in range(100):
        f = oracle_instance(20_000 + seed).with_projection([])
        sat = brute_satisfiable(f)
        sat_seen[sat] += 1
        if count(f).count != int(sat):
            problems.append(f"X empty, seed {seed}")
    for n in range(1, 9):
        for xs in ([], list(range(1, n + 1)), list(range(1, n + 1, 2))):
            if count(PBFormula(n, {}).with_projection(xs)).count != 2 ** len(xs):
                problems.append(f"empty formula n={n} |X|={len(xs)}")
    for seed in range(50):
        f = oracle_instance(30_000 + seed)
        dead = PBFormula.from_constraints(f.nvars, [*f.constraints.values(), parse_constraint("x1 + x1 >= 3")],
                                          f.xset)
        if count(dead).count != 0:
            problems.append(f"always-false, seed {seed}")
    ok = not problems and all(sat_seen.values())
    report("degenerate inputs: X empty, empty formula, always-false constraint", ok,
           f"{len(problems)} failures, sat/unsat cases {sat_seen[True]}/{sat_seen[False]}")
    assert ok, problems[:10]
