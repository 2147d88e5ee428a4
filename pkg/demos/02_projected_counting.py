"""
Projected counting on random instances
======================================

Generate a few instances, split the variables into projection (X) and
existential (Y) sets, and compare against exhaustive enumeration. The
computation tree of each run is checked to be X,Y-graded.
"""

from pbmc import brute_projected_count, count, gen_instance, validate_graded_trace

for seed in range(5):
    f = gen_instance(seed, nvars=10, nconstraints=6, x_fraction=0.4)
    res = count(f)
    expected = brute_projected_count(f)
    problems = validate_graded_trace(res.trace, f.xset, f.yset)
    print(f"seed {seed}: X={sorted(f.xset)} count={res.count} brute={expected} "
          f"trace ok={not problems}")

# the tree can be exported as JSON for inspection
f = gen_instance(0, nvars=6, nconstraints=3, x_fraction=0.5)
print(count(f).trace.to_json(indent=1)[:400], "...")
