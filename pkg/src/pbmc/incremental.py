"""Incremental counting: cached intermediate ADDs reused across queries.

Every ADD produced right after a projection is kept together with the
constraints it represents and the X and Y variables already projected
out of it. A later query seeds its live set with a compatible subset of
those entries instead of compiling every constraint again.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .counting import (CountResult, LiveAdd, LiveSet, TraceNode, default_manager, leaf_add,
                       run_elimination)
from .dd import AddManager, AddRef
from .formula import (ParseError, PBConstraint, PBFormula, VarPartition, constraint_vars, normalize,
                      parse_constraint, parse_header)


@dataclass(frozen=True, eq=False)
class CachedAddEntry:
    add: AddRef
    constraints: frozenset[int]
    projected_x: frozenset[int]
    projected_y: frozenset[int]
    created_at: int
    trace: TraceNode | None = None

    @property
    def projected(self) -> frozenset[int]:
        return self.projected_x | self.projected_y

    @property
    def key(self):
        return self.constraints, self.projected_x, self.projected_y

    def to_live(self, constraints: Mapping[int, PBConstraint]) -> LiveAdd:
        scope = constraint_vars(constraints, self.constraints) - self.projected
        return LiveAdd(self.add, self.constraints, self.projected_x, self.projected_y, self.trace, scope)


class CacheStore:
    """Append-only store of cached ADDs.

    Entries that mention a removed constraint are never handed out again.
    """

    def __init__(self):
        self.entries: list[CachedAddEntry] = []
        self.by_cid: dict[int, list[CachedAddEntry]] = {}
        self.dead: set[int] = set()
        self._keys: set = set()

    def __len__(self):
        return len(self.entries)

    def add(self, e: CachedAddEntry) -> bool:
        if e.key in self._keys:
            return False
        self._keys.add(e.key)
        self.entries.append(e)
        for cid in e.constraints:
            self.by_cid.setdefault(cid, []).append(e)
        return True

    def kill(self, cid: int):
        self.dead.add(cid)

    def alive(self) -> Iterator[CachedAddEntry]:
        dead = self.dead
        return (e for e in self.entries if not (e.constraints & dead))

    def clear(self):
        self.__init__()


def check_no_extra_var(e: CachedAddEntry, constraints: Mapping[int, PBConstraint]) -> bool:
    """True iff no variable projected in ``e`` occurs in a constraint ``e`` lacks."""
    projected = e.projected
    if not projected:
        return True
    for cid, c in constraints.items():
        if cid not in e.constraints and not projected.isdisjoint(c.vars):
            return False
    return True


def conflicts(a: CachedAddEntry, b: CachedAddEntry, constraints: Mapping[int, PBConstraint]) -> bool:
    """Whether two entries cannot be used together.

    They conflict when a variable projected in one still occurs unprojected
    in the other's constraints, or when both projected the same variable.
    """
    pa, pb = a.projected, b.projected
    if not pa.isdisjoint(pb):
        return True
    for mine, other, other_proj in ((pa, b, pb), (pb, a, pa)):
        if not mine:
            continue
        for cid in other.constraints:
            c = constraints.get(cid)
            if c is None:
                continue
            hit = mine & c.vars
            if hit - other_proj:
                return True
    return False


def retrieve(cache: CacheStore, fp: PBFormula, manager: AddManager,
             compiled: dict[int, AddRef] | None = None) -> tuple[list[LiveAdd], int]:
    """Seed a live set for ``fp`` from ``cache``.

    Returns ``(live_adds, hits)`` where ``hits`` counts reused entries.
    Constraints not covered by a reused entry get their single-constraint
    ADD, taken from ``compiled`` when present.
    """
    cons = fp.constraints
    cids = frozenset(cons)
    cands = [e for e in cache.alive() if e.constraints <= cids and check_no_extra_var(e, cons)]
    # among entries for the same constraints, the most projected saves the most work
    cands.sort(key=lambda e: (-len(e.constraints), -len(e.projected), e.created_at))

    chosen = _admit(cands, cons)
    if any(e.projected_x for e in chosen):
        # X-phase entries are only trusted when every occurring Y variable
        # is already projected inside the admitted set
        ys = fp.yset & fp.vars()
        done = frozenset().union(*(e.projected_y for e in chosen))
        if not ys <= done:
            chosen = _admit([e for e in cands if not e.projected_x], cons)

    covered = set()
    live = []
    for e in chosen:
        covered |= e.constraints
        live.append(e.to_live(cons))
    for cid in cons:
        if cid in covered:
            continue
        if compiled is not None and cid in compiled:
            c = cons[cid]
            live.append(LiveAdd(compiled[cid], frozenset([cid]), frozenset(), frozenset(),
                                TraceNode("leaf", cid, c.vars), c.vars))
        else:
            la = leaf_add(manager, fp, cid)
            if compiled is not None:
                compiled[cid] = la.add
            live.append(la)
    return live, len(chosen)


def _admit(cands, cons):
    chosen: list[CachedAddEntry] = []
    for e in cands:
        if any(not e.constraints.isdisjoint(b.constraints) or conflicts(e, b, cons) for b in chosen):
            continue
        chosen.append(e)
    return chosen


@dataclass
class StepRecord:
    action: str
    arg: object
    result: object


class Session:
    """Mutable formula with counting that reuses earlier work.

    The decision-variable order is fixed by the first count (maximal
    cardinality search over the formula at that moment) unless a manager
    is supplied. The projection set is fixed; changing it drops the cache.
    """

    def __init__(self, nvars: int, projection: Iterable[int] | None = None,
                 manager: AddManager | None = None, first_cid: int = 1):
        self.nvars = nvars
        self.partition = VarPartition.from_projection(nvars, projection)
        self.constraints: dict[int, PBConstraint] = {}
        self.cache = CacheStore()
        self.manager = manager
        self._next_cid = first_cid
        self._compiled: dict[int, AddRef] = {}
        self._step = 0
        self.log: list[StepRecord] = []

    @classmethod
    def from_formula(cls, f: PBFormula, manager: AddManager | None = None) -> Session:
        s = cls(f.nvars, f.xset, manager=manager or default_manager(f))
        for c in f.constraints.values():
            s.add(c)
        return s

    @property
    def formula(self) -> PBFormula:
        return PBFormula(self.nvars, dict(self.constraints), self.partition)

    def add(self, c: PBConstraint | str) -> int:
        if isinstance(c, str):
            c = parse_constraint(c, nvars=self.nvars)
        for t in c.terms:
            if not 1 <= t.var <= self.nvars:
                raise ParseError(f"variable x{t.var} outside 1..{self.nvars}")
        cid = self._next_cid
        self._next_cid += 1
        self.constraints[cid] = normalize(c).with_cid(cid)
        self.log.append(StepRecord("add", self.constraints[cid], cid))
        return cid

    def remove(self, cid: int):
        if cid not in self.constraints:
            raise KeyError(f"unknown constraint id {cid}")
        del self.constraints[cid]
        self._compiled.pop(cid, None)
        self.cache.kill(cid)
        self.log.append(StepRecord("remove", cid, None))

    def set_projection(self, xs: Iterable[int] | None):
        self.partition = VarPartition.from_projection(self.nvars, xs)
        self.cache.clear()

    def inject(self, entries: Iterable[CachedAddEntry]) -> int:
        """Add externally produced entries to the cache; returns how many were new."""
        n = 0
        for e in entries:
            if e.add.manager is not self.manager:
                raise ValueError("cache entry from a different manager")
            n += self.cache.add(e)
        return n

    def count(self) -> CountResult:
        fp = self.formula
        if self.manager is None:
            self.manager = default_manager(fp)
        m = self.manager
        calls0 = m.apply_calls
        self._step += 1
        step = self._step
        live, hits = retrieve(self.cache, fp, m, self._compiled)
        ls = LiveSet(m, live)
        done = frozenset().union(*(la.projected for la in live))
        xpool = set(fp.xset - done)
        ypool = set(fp.yset - done)
        seq = itertools.count()

        def keep(la: LiveAdd):
            self.cache.add(CachedAddEntry(la.add, la.constraints, la.projected_x, la.projected_y,
                                          step * 1_000_000 + next(seq), la.trace))

        value, trace = run_elimination(m, ls, xpool, ypool, keep)
        stats = {"apply_calls": m.apply_calls - calls0, "peak_live_adds": ls.peak, "cache_hits": hits}
        res = CountResult(value, trace, stats)
        self.log.append(StepRecord("count", None, value))
        return res


# ---------------------------------------------------------------------------
# Script front end

def run_script(lines: Iterable[str], nvars: int | None = None, projection: Iterable[int] | None = None,
               session: Session | None = None, check=None) -> Iterator[str]:
    """Execute ``add``/``remove``/``count`` commands, yielding response lines.

    ``* #variable= N`` and ``* proj: ...`` comment lines configure the
    session when no explicit ``nvars``/``projection``/``session`` is given.
    ``check``, when set, is called as ``check(formula, count)`` after every
    count.
    """
    lines = list(lines)
    if session is None:
        hn, _, hproj = parse_header(lines)
        nvars = nvars if nvars is not None else hn
        if nvars is None:
            raise ParseError("script needs '* #variable= N' or an explicit variable count", 1)
        if projection is None:
            projection = hproj
        session = Session(nvars, projection)
    for lineno, raw in enumerate(lines, start=1):
        s = raw.strip()
        if not s or s.startswith("*"):
            continue
        cmd, _, rest = s.partition(" ")
        if cmd == "add":
            c = parse_constraint(rest, lineno, session.nvars)
            yield f"cid={session.add(c)}"
        elif cmd == "remove":
            try:
                cid = int(rest)
            except ValueError:
                raise ParseError(f"bad constraint id {rest.strip()!r}", lineno) from None
            session.remove(cid)
        elif cmd == "count":
            if rest.strip():
                raise ParseError("'count' takes no argument", lineno)
            res = session.count()
            if check is not None:
                check(session.formula, res.count)
            yield str(res.count)
        else:
            raise ParseError(f"unknown command {cmd!r}", lineno)
