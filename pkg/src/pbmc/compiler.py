"""Compile a normalized PB constraint into its 0/1 indicator ADD."""

from __future__ import annotations

from .dd import AddError, AddManager, AddRef
from .formula import Comparator, PBConstraint, normalize


def compile_constraint(m: AddManager, c: PBConstraint, clamp: bool = True) -> AddRef:
    """Return the ADD that is 1 exactly on the models of ``c``.

    Variables are visited in the manager's order while tracking the bound
    still to be met by the remaining terms. Residuals outside the range
    reachable by those terms are clamped to one sentinel on either side,
    which keeps the memo table bounded by the coefficient magnitudes.
    """
    if not c.is_normal:
        c = normalize(c)
    missing = sorted(v for v in c.vars if v not in m.position)
    if missing:
        raise AddError(f"x{missing[0]} is not in the manager's order")
    terms = sorted(c.terms, key=lambda t: m.position[t.var])
    k = len(terms)
    # extreme sums achievable by terms[i:]
    lo_rem = [0] * (k + 1)
    hi_rem = [0] * (k + 1)
    for i in range(k - 1, -1, -1):
        a = terms[i].coeff
        lo_rem[i] = lo_rem[i + 1] + min(a, 0)
        hi_rem[i] = hi_rem[i + 1] + max(a, 0)
    eq = c.cmp is Comparator.EQ
    memo: dict[tuple[int, int], AddRef] = {}

    def go(i: int, r: int) -> AddRef:
        # below lo_rem (resp. above hi_rem) the outcome no longer depends on r
        r = max(r, lo_rem[i] - 1 if eq else lo_rem[i])
        r = min(r, hi_rem[i] + 1)
        key = (i, r)
        f = memo.get(key)
        if f is not None:
            return f
        if r > hi_rem[i] or (eq and r < lo_rem[i]):
            f = m.zero
        elif (i == k) if eq else (r <= lo_rem[i]):
            f = m.one
        else:
            t = terms[i]
            f = m.mk_internal(t.var, go(i + 1, r), go(i + 1, r - t.coeff))
        memo[key] = f
        return f

    if not clamp:
        return _compile_unclamped(m, terms, c.cmp, c.bound)
    return go(0, c.bound)


def _compile_unclamped(m: AddManager, terms, cmp, bound) -> AddRef:
    # Plain Shannon expansion on the raw residual; reference route for tests.
    k = len(terms)
    memo: dict[tuple[int, int], AddRef] = {}

    def go(i, r):
        if i == k:
            ok = r == 0 if cmp is Comparator.EQ else r <= 0
            return m.one if ok else m.zero
        key = (i, r)
        f = memo.get(key)
        if f is None:
            t = terms[i]
            f = m.mk_internal(t.var, go(i + 1, r), go(i + 1, r - t.coeff))
            memo[key] = f
        return f

    return go(0, bound)
