"""Graded projected model counting over a live set of ADDs.

Non-projection (Y) variables are existentially projected first, then
projection (X) variables are sum-projected. At every step the variable
occurring in the fewest live ADDs is eliminated next, after multiplying
together every live ADD that mentions it. The computation is recorded as
a tree whose leaves are constraints and whose internal nodes carry the
projected variable and its grade.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from . import dd
from .compiler import compile_constraint
from .dd import AddManager, AddRef, mcs_order
from .formula import PBFormula, build_gaifman_graph

IX, IY, LEAF = "IX", "IY", "leaf"


class InvariantError(RuntimeError):
    """Raised when an internal counting invariant does not hold."""


@dataclass(eq=False)
class TraceNode:
    kind: str
    cid: int | None = None
    cvars: frozenset[int] = frozenset()
    projected: frozenset[int] = frozenset()
    children: list[TraceNode] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return self.kind == LEAF

    def walk(self) -> Iterator[TraceNode]:
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def leaves(self) -> Iterator[TraceNode]:
        return (n for n in self.walk() if n.is_leaf)


@dataclass
class CountTrace:
    """Tree of one count run.

    ``eliminations`` lists the internal nodes created by this run in
    creation order; subtrees reused from a cache are not included.
    """

    root: TraceNode
    eliminations: list[TraceNode] = field(default_factory=list)

    def nodes(self) -> list[TraceNode]:
        return list(self.root.walk())

    def to_dict(self) -> dict:
        ids: dict[int, int] = {}
        out = []
        for n in self.root.walk():
            if id(n) in ids:
                continue
            ids[id(n)] = len(ids)
        for n in self.root.walk():
            d = {"id": ids[id(n)], "kind": n.kind}
            if n.is_leaf:
                d["cid"] = n.cid
                d["vars"] = sorted(n.cvars)
            else:
                d["pi"] = sorted(n.projected)
                d["children"] = [ids[id(c)] for c in n.children]
            out.append(d)
        return {"root": ids[id(self.root)], "nodes": out}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> CountTrace:
        byid = {}
        for nd in d["nodes"]:
            if nd["kind"] == LEAF:
                byid[nd["id"]] = TraceNode(LEAF, nd["cid"], frozenset(nd.get("vars", ())))
            else:
                byid[nd["id"]] = TraceNode(nd["kind"], projected=frozenset(nd.get("pi", ())))
        for nd in d["nodes"]:
            byid[nd["id"]].children = [byid[c] for c in nd.get("children", ())]
        return cls(byid[d["root"]])

    @classmethod
    def from_json(cls, text: str) -> CountTrace:
        return cls.from_dict(json.loads(text))


@dataclass(eq=False)
class LiveAdd:
    add: AddRef
    constraints: frozenset[int]
    projected_x: frozenset[int]
    projected_y: frozenset[int]
    trace: TraceNode
    # variables of the represented constraints not yet projected; the ADD
    # may depend on fewer, but merging follows scope so the trace stays a
    # project-join tree
    scope: frozenset[int] = frozenset()
    uid: int = -1

    @property
    def projected(self) -> frozenset[int]:
        return self.projected_x | self.projected_y


class LiveSet:
    """The ADDs currently alive, indexed by the variables in their scope."""

    def __init__(self, manager: AddManager, items: Iterable[LiveAdd] = ()):
        self.manager = manager
        self.items: dict[int, LiveAdd] = {}
        self.index: dict[int, set[int]] = {}
        self._next = 0
        self.peak = 0
        self.x_started = False
        for la in items:
            self.insert(la)

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items.values())

    def insert(self, la: LiveAdd) -> LiveAdd:
        la.uid = self._next
        self._next += 1
        self.items[la.uid] = la
        for v in la.scope:
            self.index.setdefault(v, set()).add(la.uid)
        self.peak = max(self.peak, len(self.items))
        return la

    def remove(self, la: LiveAdd):
        del self.items[la.uid]
        for v in la.scope:
            bucket = self.index[v]
            bucket.discard(la.uid)
            if not bucket:
                del self.index[v]

    def containing(self, v: int) -> list[LiveAdd]:
        return [self.items[u] for u in sorted(self.index.get(v, ()))]

    def degree(self, v: int) -> int:
        return len(self.index.get(v, ()))


@dataclass
class CountResult:
    count: int
    trace: CountTrace
    stats: dict = field(default_factory=dict)


def pop_next_var(ls: LiveSet, pool: set[int]) -> int:
    """Remove and return the pool variable occurring in the fewest live ADDs.

    Ties go to the smaller total scope of the ADDs that would be merged,
    then to the smaller variable id.
    """
    if not pool:
        raise ValueError("empty variable pool")

    def key(v):
        users = ls.index.get(v, ())
        return (len(users), sum(len(ls.items[u].scope) for u in users), v)

    v = min(pool, key=key)
    pool.remove(v)
    return v


def eliminate_var(m: AddManager, ls: LiveSet, v: int, grade: str) -> LiveAdd:
    """Merge every live ADD mentioning ``v`` and project ``v`` away."""
    if grade == IY:
        if ls.x_started:
            raise InvariantError(f"Y variable x{v} eliminated after an X variable")
    elif grade == IX:
        ls.x_started = True
    else:
        raise ValueError(f"unknown grade {grade!r}")
    operands = ls.containing(v)
    psi = m.one
    for phi in operands:
        psi = m.apply(dd.MUL, psi, phi.add)
    if grade == IY:
        psi = m.exists_project(psi, v)
    else:
        psi = m.sum_project(psi, v)
    cons = frozenset().union(*(o.constraints for o in operands))
    px = frozenset().union(*(o.projected_x for o in operands))
    py = frozenset().union(*(o.projected_y for o in operands))
    if grade == IX:
        px |= {v}
    else:
        py |= {v}
    scope = frozenset().union(*(o.scope for o in operands)) - {v}
    node = TraceNode(grade, projected=frozenset([v]), children=[o.trace for o in operands])
    for o in operands:
        ls.remove(o)
    return ls.insert(LiveAdd(psi, cons, px, py, node, scope))


def leaf_add(m: AddManager, formula: PBFormula, cid: int) -> LiveAdd:
    c = formula.constraints[cid]
    f = compile_constraint(m, c)
    return LiveAdd(f, frozenset([cid]), frozenset(), frozenset(), TraceNode(LEAF, cid, c.vars), c.vars)


def default_manager(formula: PBFormula) -> AddManager:
    return AddManager(mcs_order(build_gaifman_graph(formula), formula.nvars))


def run_elimination(m: AddManager, ls: LiveSet, xpool: set[int], ypool: set[int],
                    on_project: Callable[[LiveAdd], None] | None = None):
    """Eliminate ``ypool`` then ``xpool`` and multiply what is left.

    Returns ``(count, trace)``. ``on_project`` sees every intermediate
    result right after its projection.
    """
    made = []
    for pool, grade in ((ypool, IY), (xpool, IX)):
        pool = set(pool)
        while pool:
            v = pop_next_var(ls, pool)
            la = eliminate_var(m, ls, v, grade)
            made.append(la.trace)
            if on_project is not None:
                on_project(la)
    rest = sorted(ls, key=lambda la: (m.node_count(la.add), la.uid))
    psi = m.one
    for la in rest:
        psi = m.apply(dd.MUL, psi, la.add)
    root = TraceNode(IX, children=[la.trace for la in rest])
    if not m.is_terminal(psi):
        # unreachable unless scope tracking lost a variable
        raise InvariantError(f"final ADD still depends on {sorted(m.support(psi))}")
    return m.value(psi), CountTrace(root, made)


def count(formula: PBFormula, manager: AddManager | None = None, preprocess: bool = True) -> CountResult:
    """Projected model count of ``formula`` onto its projection set.

    With ``preprocess`` set, constraints that hold under every assignment
    are dropped before compilation.
    """
    if preprocess:
        formula = formula.without_tautologies()
    m = manager if manager is not None else default_manager(formula)
    calls0 = m.apply_calls
    ls = LiveSet(m, (leaf_add(m, formula, cid) for cid in formula.constraints))
    value, trace = run_elimination(m, ls, set(formula.xset), set(formula.yset))
    stats = {"apply_calls": m.apply_calls - calls0, "peak_live_adds": ls.peak, "cache_hits": 0}
    return CountResult(value, trace, stats)


def validate_graded_trace(t: CountTrace, xset, yset) -> list[str]:
    """Check that ``t`` is an X,Y-graded project-join tree.

    Returns human-readable violations; an empty list means valid.
    """
    xset, yset = frozenset(xset), frozenset(yset)
    errs: list[str] = []
    seen: set[int] = set()
    leaf_cids: dict[int, TraceNode] = {}
    owner: dict[int, list[TraceNode]] = {}

    # (c) is checked on the way down; everything else per node
    stack = [(t.root, False)]
    while stack:
        n, under_y = stack.pop()
        if id(n) in seen:
            errs.append("node reachable twice: not a tree")
            continue
        seen.add(id(n))
        if n.is_leaf:
            if n.children:
                errs.append(f"leaf for c{n.cid} has children")
            if n.cid in leaf_cids:
                errs.append(f"(gamma) constraint c{n.cid} labels two leaves")
            leaf_cids[n.cid] = n
            continue
        if n.kind not in (IX, IY):
            errs.append(f"(a) internal node has no grade: {n.kind!r}")
        if n.kind == IX and not n.projected <= xset:
            errs.append(f"(b) IX node projects non-X variables {sorted(n.projected - xset)}")
        if n.kind == IY and not n.projected <= yset:
            errs.append(f"(b) IY node projects non-Y variables {sorted(n.projected - yset)}")
        if n.kind == IX and under_y:
            errs.append(f"(c) IX node projecting {sorted(n.projected)} lies below an IY node")
        for v in n.projected:
            owner.setdefault(v, []).append(n)
        for ch in n.children:
            stack.append((ch, under_y or n.kind == IY))

    for v, ns in sorted(owner.items()):
        if len(ns) > 1:
            errs.append(f"(d) x{v} appears in {len(ns)} projection labels")
    labelled = frozenset(owner)
    if labelled != xset | yset:
        missing = sorted((xset | yset) - labelled)
        extra = sorted(labelled - (xset | yset))
        if missing:
            errs.append(f"(d) variables never projected: {missing}")
        if extra:
            errs.append(f"(d) projected variables outside X and Y: {extra}")

    for v, ns in sorted(owner.items()):
        for n in ns:
            below = {id(x) for x in n.leaves()}
            for cid, leaf in sorted(leaf_cids.items()):
                if v in leaf.cvars and id(leaf) not in below:
                    errs.append(f"(e) x{v} projected before constraint c{cid} was merged")
    return errs
