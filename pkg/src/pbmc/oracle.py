"""Brute-force reference counts and seeded random instances.

Nothing here touches the decision-diagram code: counts come from
evaluating every constraint on every assignment.
"""

from __future__ import annotations

import random

import numpy as np

from .formula import Comparator, PBConstraint, PBFormula, Term, normalize, render

MAX_VARS = 24
_CHUNK = 1 << 16


def _check_size(n):
    if n > MAX_VARS:
        raise ValueError(f"brute force limited to {MAX_VARS} variables, got {n}")


def _sat_vector(constraints, bitpos: dict[int, int], n: int) -> np.ndarray:
    """Boolean vector over ``2**n`` assignments; var ``v`` is bit ``bitpos[v]``."""
    total = 1 << n
    sat = np.ones(total, dtype=bool)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        ok = np.ones(idx.shape, dtype=bool)
        for c in constraints:
            lhs = np.zeros(idx.shape, dtype=np.int64)
            for t in c.terms:
                bit = (idx >> bitpos[t.var]) & 1
                if t.negated:
                    bit = 1 - bit
                lhs += t.coeff * bit
            if c.cmp is Comparator.GE:
                ok &= lhs >= c.bound
            elif c.cmp is Comparator.EQ:
                ok &= lhs == c.bound
            else:
                ok &= lhs <= c.bound
        sat[start:start + len(idx)] = ok
    return sat


def brute_count(f: PBFormula) -> int:
    """Number of assignments to ``x1..xn`` satisfying every constraint."""
    _check_size(f.nvars)
    bitpos = {v: v - 1 for v in range(1, f.nvars + 1)}
    return int(_sat_vector(list(f.constraints.values()), bitpos, f.nvars).sum())


def brute_projected_count(f: PBFormula, xset=None, yset=None) -> int:
    """``sum over X-assignments of max over Y-assignments of [F]``.

    Defaults to the formula's own partition.
    """
    xs = sorted(f.xset if xset is None else xset)
    ys = sorted(f.yset if yset is None else yset)
    n = len(xs) + len(ys)
    _check_size(n)
    # Y occupies the low bits so each row of the reshape is one X-assignment
    bitpos = {v: i for i, v in enumerate(ys)}
    bitpos.update({v: len(ys) + i for i, v in enumerate(xs)})
    sat = _sat_vector(list(f.constraints.values()), bitpos, n)
    table = sat.reshape(1 << len(xs), 1 << len(ys))
    return int(table.max(axis=1).sum())


def brute_satisfiable(f: PBFormula) -> bool:
    return brute_count(f) > 0


# ---------------------------------------------------------------------------
# Generators

FAMILIES = ("knapsack", "auction", "placement")


def _random_constraint(rng: random.Random, nvars, max_coeff, density, family) -> PBConstraint:
    k = max(1, round(density * nvars))
    vs = sorted(rng.sample(range(1, nvars + 1), k)) if k < nvars else list(range(1, nvars + 1))
    if family == "knapsack":
        # capacity row: positive weights, at most a fraction of the total
        coeffs = [rng.randint(1, max_coeff) for _ in vs]
        bound = rng.randint(0, sum(coeffs))
        terms = tuple(Term(a, v) for a, v in zip(coeffs, vs))
        return PBConstraint(terms, Comparator.LE, bound)
    if family == "auction":
        # mixed-sign utilities with occasional negated literals
        terms = []
        for v in vs:
            a = rng.choice([-1, 1]) * rng.randint(1, max_coeff)
            terms.append(Term(a, v, rng.random() < 0.2))
        lo = sum(min(t.coeff, 0) for t in terms)
        hi = sum(max(t.coeff, 0) for t in terms)
        cmp = rng.choice([Comparator.GE, Comparator.GE, Comparator.LE, Comparator.EQ])
        return PBConstraint(tuple(terms), cmp, rng.randint(lo, hi))
    # placement: small coverage rows
    terms = tuple(Term(rng.randint(1, min(2, max_coeff)), v) for v in vs)
    return PBConstraint(terms, Comparator.GE, rng.randint(1, max(1, len(vs) // 2)))


def gen_instance(seed, nvars=10, nconstraints=5, max_coeff=5, density=0.4, x_fraction=0.5,
                 family: str | None = None) -> PBFormula:
    """Deterministic random formula for ``seed``.

    ``family`` picks the row shape; None mixes all three per constraint.
    """
    if nvars < 1 or nconstraints < 0 or max_coeff < 1 or not 0 < density <= 1 or not 0 <= x_fraction <= 1:
        raise ValueError("generator parameters out of range")
    rng = random.Random(seed)
    rows = []
    for _ in range(nconstraints):
        fam = family or rng.choice(FAMILIES)
        rows.append(_random_constraint(rng, nvars, max_coeff, density, fam))
    nx = round(x_fraction * nvars)
    xs = rng.sample(range(1, nvars + 1), nx)
    return PBFormula.from_constraints(nvars, rows, xs)


def perturb(rng: random.Random, c: PBConstraint, max_coeff: int) -> PBConstraint:
    """Copy of ``c`` with one coefficient or the bound changed."""
    c = normalize(c)
    terms = list(c.terms)
    if terms and rng.random() < 0.6:
        i = rng.randrange(len(terms))
        a = terms[i].coeff
        while True:
            b = rng.choice([-1, 1]) * rng.randint(1, max_coeff)
            if b != a:
                break
        terms[i] = Term(b, terms[i].var)
        return PBConstraint(tuple(terms), c.cmp, c.bound)
    return PBConstraint(tuple(terms), c.cmp, c.bound + rng.choice([-2, -1, 1, 2]))


def gen_session(seed, steps=5, nvars=10, nconstraints=5, max_coeff=5, density=0.4, x_fraction=0.5,
                family: str | None = None) -> str:
    """Incremental script with ``steps`` counts.

    The first count covers the initial formula; each later count follows
    one modification (an existing constraint removed and a perturbed copy
    added, or occasionally a plain addition or removal).
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rng = random.Random(f"session:{seed}")
    f = gen_instance(seed, nvars, nconstraints, max_coeff, density, x_fraction, family)
    out = [f"* #variable= {nvars}"]
    if f.yset:
        out.append("* proj: " + " ".join(f"x{v}" for v in sorted(f.xset)))
    live = {}
    next_cid = 1
    for c in f.constraints.values():
        out.append("add " + c.render())
        live[next_cid] = c
        next_cid += 1
    out.append("count")
    for _ in range(steps - 1):
        r = rng.random()
        if live and r < 0.7:
            cid = rng.choice(sorted(live))
            new = perturb(rng, live.pop(cid), max_coeff)
            out.append(f"remove {cid}")
            out.append("add " + new.render())
            live[next_cid] = new
            next_cid += 1
        elif live and r < 0.85:
            cid = rng.choice(sorted(live))
            del live[cid]
            out.append(f"remove {cid}")
        else:
            fam = family or rng.choice(FAMILIES)
            new = normalize(_random_constraint(rng, nvars, max_coeff, density, fam))
            out.append("add " + new.render())
            live[next_cid] = new
            next_cid += 1
        out.append("count")
    return "\n".join(out) + "\n"


def instance_text(seed, **params) -> str:
    return render(gen_instance(seed, **params))
