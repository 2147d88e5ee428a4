import random

import pytest
from hypothesis import given, strategies as st

from pbmc.formula import PBFormula, parse_constraint, parse_formula
from pbmc.oracle import (brute_count, brute_projected_count, gen_instance, gen_session, instance_text,
                         perturb)


def test_brute_count_examples(threshold):
    assert brute_count(threshold) == 5
    assert brute_count(PBFormula(3, {})) == 8
    f = PBFormula.from_constraints(1, [parse_constraint("x1 >= 1"), parse_constraint("-1 x1 >= 0")])
    assert brute_count(f) == 0


def test_brute_projected_examples(threshold):
    assert brute_projected_count(threshold, {1}, {2, 3}) == 2
    assert brute_projected_count(threshold, set(), {1, 2, 3}) == 1
    assert brute_projected_count(threshold.with_projection([1])) == 2


def test_size_guard():
    with pytest.raises(ValueError):
        brute_count(PBFormula(25, {}))


def test_generator_is_deterministic():
    assert gen_instance(7) == gen_instance(7)
    assert instance_text(1, nvars=10, nconstraints=5) == instance_text(1, nvars=10, nconstraints=5)
    assert gen_session(4, 5) == gen_session(4, 5)


def test_generator_params():
    f = gen_instance(2, nvars=6, nconstraints=4, density=1.0)
    written = [{t.var for t in c.terms} for c in f.constraints.values()]
    assert all(len(c.terms) > 0 for c in f.constraints.values())
    assert gen_instance(2, x_fraction=1.0).yset == frozenset()
    assert gen_instance(2, x_fraction=0.0).xset == frozenset()
    assert all(w == set(range(1, 7)) for w in written)
    with pytest.raises(ValueError):
        gen_instance(0, density=0)


@pytest.mark.parametrize("steps", [1, 3, 5])
def test_session_count_lines(steps):
    lines = gen_session(11, steps).splitlines()
    assert sum(1 for ln in lines if ln == "count") == steps
    assert lines[0].startswith("* #variable=")


def test_generated_text_parses():
    f = parse_formula(instance_text(5, nvars=8, x_fraction=0.5))
    assert f == gen_instance(5, nvars=8, x_fraction=0.5)


def test_perturb_changes_the_constraint():
    c = gen_instance(1).constraints[1]
    rng = random.Random(0)
    assert all(perturb(rng, c, 5) != c for _ in range(20))


@given(st.integers(0, 10**6), st.integers(1, 10), st.integers(0, 6))
def test_projected_on_everything_is_plain(seed, n, k):
    f = gen_instance(seed, nvars=n, nconstraints=k)
    assert brute_projected_count(f, range(1, n + 1), ()) == brute_count(f)
