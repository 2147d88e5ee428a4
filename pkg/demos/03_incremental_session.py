"""
Incremental counting
====================

A session keeps the ADDs produced during earlier counts. After a small
change most of that work is reused, which shows up as fewer Apply calls.
"""

from pbmc import Session, brute_projected_count, gen_instance

f = gen_instance(3, nvars=12, nconstraints=8, x_fraction=0.5)
s = Session.from_formula(f)

first = s.count()
print("initial count:", first.count, first.stats)

again = s.count()
print("unchanged recount:", again.count, again.stats)

# replace one constraint by a tighter version
cid = next(iter(s.constraints))
old = s.constraints[cid]
s.remove(cid)
new_cid = s.add(old.render().replace(f">= {old.bound} ;", f">= {old.bound + 1} ;"))
res = s.count()
print(f"after replacing c{cid} by c{new_cid}:", res.count, res.stats)
print("brute force agrees:", res.count == brute_projected_count(s.formula))

# the same thing through the text script interface
from pbmc.incremental import run_script

script = """* #variable= 3
add +2 x1 +1 x2 +1 x3 >= 2 ;
count
add +1 x2 +1 x3 >= 2 ;
count
remove 1
count
"""
print(list(run_script(script.splitlines())))
