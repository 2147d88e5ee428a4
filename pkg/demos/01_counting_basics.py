"""
Counting the models of a PB constraint
======================================

A single constraint over three variables, counted exactly and then
projected onto one variable.
"""

from pbmc import brute_count, count, parse_formula

text = """* #variable= 3 #constraint= 1
+2 x1 +1 x2 +1 x3 >= 2 ;
"""
f = parse_formula(text)

# every variable is a projection variable by default
res = count(f)
print("models:", res.count)
print("brute force agrees:", brute_count(f) == res.count)

# keep only x1: count the values of x1 that extend to some model
proj = count(f.with_projection([1]))
print("projected onto x1:", proj.count)
print("stats:", proj.stats)
