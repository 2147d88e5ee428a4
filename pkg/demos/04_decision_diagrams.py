"""
The decision-diagram engine
===========================

Build small ADDs by hand, combine them with Apply, project variables
away and export Graphviz source.
"""

from pbmc import AddManager, compile_constraint, parse_constraint
from pbmc.dd import ADD, MAX, MUL

m = AddManager.for_nvars(3)

# 2*x1 + x2 + x3 as a sum of scaled indicators
two = m.mk_terminal(2)
f = m.apply(ADD, m.apply(MUL, two, m.var(1)), m.apply(ADD, m.var(2), m.var(3)))
print("internal/terminal nodes:", m.count_kinds(f))
print("value at x1=1, x2=0, x3=1:", m.evaluate(f, {1: 1, 2: 0, 3: 1}))

# the threshold version is a 0/1 ADD
g = compile_constraint(m, parse_constraint("+2 x1 +1 x2 +1 x3 >= 2"))
print("threshold ADD nodes:", m.count_kinds(g))

# equal functions share one handle
h = m.apply(MUL, g, g)
print("g * g is g:", h is g)

# sum projection counts models, max projection asks "is there one"
total = g
for v in (3, 2, 1):
    total = m.sum_project(total, v)
print("models:", m.value(total))
print("exists x2, x3:", m.exists_project(m.exists_project(g, 2), 3))
print("max of f and g at all-zero:", m.evaluate(m.apply(MAX, f, g), {1: 0, 2: 0, 3: 0}))

print(m.to_dot(g, "threshold"))
