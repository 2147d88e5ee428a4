from hypothesis import given, strategies as st

from pbmc.compiler import compile_constraint
from pbmc.dd import AddManager
from pbmc.formula import Comparator, PBConstraint, PBFormula, Term, normalize, parse_constraint
from pbmc.oracle import brute_count

from conftest import assignments


def test_threshold_shape():
    m = AddManager.for_nvars(3)
    f = compile_constraint(m, parse_constraint("+2 x1 +1 x2 +1 x3 >= 2"))
    assert m.count_kinds(f) == (3, 2)
    assert m.top_var(f) == 1 and m.high(f) is m.one
    x2 = m.low(f)
    assert m.top_var(x2) == 2 and m.low(x2) is m.zero
    x3 = m.high(x2)
    assert m.top_var(x3) == 3 and (m.low(x3), m.high(x3)) == (m.zero, m.one)


def test_trivially_true():
    m = AddManager.for_nvars(2)
    assert compile_constraint(m, parse_constraint("x1 + x2 >= 0")) is m.one


def test_always_false_is_zero():
    m = AddManager.for_nvars(2)
    assert compile_constraint(m, parse_constraint("x1 + x2 >= 3")) is m.zero


def test_equality():
    m = AddManager.for_nvars(2)
    f = compile_constraint(m, parse_constraint("x1 + x2 = 1"))
    models = {(a[1], a[2]) for a in assignments((1, 2)) if m.evaluate(f, a)}
    assert models == {(1, 0), (0, 1)}
    assert m.value(m.sum_project(m.sum_project(f, 1), 2)) == 2


def test_reverse_order():
    m = AddManager([3, 2, 1])
    c = parse_constraint("+2 x1 +1 x2 +1 x3 >= 2")
    f = compile_constraint(m, c)
    assert m.top_var(f) == 3
    for a in assignments((1, 2, 3)):
        assert m.evaluate(f, a) == int(c.satisfied_by(a))


constraints = st.builds(
    PBConstraint,
    st.lists(st.builds(Term, st.integers(-7, 7).filter(bool), st.integers(1, 10), st.booleans()),
             min_size=1, max_size=10).map(tuple),
    st.sampled_from(list(Comparator)),
    st.integers(-25, 25))


@given(constraints, st.permutations(list(range(1, 11))))
def test_compiled_count_matches_brute_force(c, order):
    m = AddManager(order)
    n = normalize(c)
    f = compile_constraint(m, n)
    assert m.support(f) <= n.vars
    # count over every variable written in c, some of which may cancel out
    written = sorted({t.var for t in c.terms})
    for v in written:
        f = m.sum_project(f, v)
    ren = {v: i for i, v in enumerate(written, start=1)}
    local = PBConstraint(tuple(Term(t.coeff, ren[t.var], t.negated) for t in c.terms), c.cmp, c.bound)
    assert m.value(f) == brute_count(PBFormula.from_constraints(len(ren), [local]))


@given(constraints)
def test_clamping_keeps_the_same_diagram(c):
    m = AddManager.for_nvars(10)
    assert compile_constraint(m, c) is compile_constraint(m, c, clamp=False)
