"""Pseudo-Boolean formulas: parsing, normalization and occurrence structures.

Input uses an OPB-like text format::

    * #variable= 3 #constraint= 1
    * proj: x1
    +2 x1 +1 x2 +1 x3 >= 2 ;

Negated literals ``~xN`` are accepted and rewritten away during
normalization, so every stored term has positive polarity.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple


class ParseError(ValueError):
    def __init__(self, msg, line=None, col=None):
        self.msg = msg
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}"
            if col is not None:
                where += f", col {col}"
            where += ": "
        super().__init__(where + msg)


class Comparator(enum.Enum):
    GE = ">="
    EQ = "="
    LE = "<="


class Term(NamedTuple):
    coeff: int
    var: int
    negated: bool = False


@dataclass(frozen=True)
class PBConstraint:
    """``sum(coeff * lit) <cmp> bound`` over Boolean variables.

    Instances produced by :func:`normalize` only use ``GE``/``EQ`` and
    positive literals, with terms sorted by variable.
    """

    terms: tuple[Term, ...]
    cmp: Comparator
    bound: int
    cid: int = 0

    @property
    def vars(self) -> frozenset[int]:
        return frozenset(t.var for t in self.terms)

    @property
    def min_sum(self) -> int:
        return sum(t.coeff for t in self.terms if t.coeff < 0)

    @property
    def max_sum(self) -> int:
        return sum(t.coeff for t in self.terms if t.coeff > 0)

    @property
    def is_normal(self) -> bool:
        vs = [t.var for t in self.terms]
        return (self.cmp is not Comparator.LE and all(not t.negated and t.coeff for t in self.terms)
                and all(a < b for a, b in zip(vs, vs[1:])))

    # The two flags below are only meaningful on normalized constraints.
    @property
    def always_true(self) -> bool:
        if self.cmp is Comparator.GE:
            return self.bound <= self.min_sum
        if self.cmp is Comparator.EQ:
            return not self.terms and self.bound == 0
        return self.bound >= self.max_sum

    @property
    def always_false(self) -> bool:
        if self.cmp is Comparator.GE:
            return self.bound > self.max_sum
        if self.cmp is Comparator.EQ:
            return not self.min_sum <= self.bound <= self.max_sum
        return self.bound < self.min_sum

    def lhs(self, assignment) -> int:
        total = 0
        for t in self.terms:
            bit = 1 if assignment[t.var] else 0
            if t.negated:
                bit = 1 - bit
            total += t.coeff * bit
        return total

    def satisfied_by(self, assignment) -> bool:
        """Evaluate under ``assignment`` (any mapping/sequence indexed by var id)."""
        s = self.lhs(assignment)
        if self.cmp is Comparator.GE:
            return s >= self.bound
        if self.cmp is Comparator.EQ:
            return s == self.bound
        return s <= self.bound

    def with_cid(self, cid: int) -> PBConstraint:
        return PBConstraint(self.terms, self.cmp, self.bound, cid)

    def render(self) -> str:
        parts = []
        for t in self.terms:
            lit = ("~x" if t.negated else "x") + str(t.var)
            parts.append(f"{t.coeff:+d} {lit}")
        parts.append(self.cmp.value)
        parts.append(str(self.bound))
        parts.append(";")
        return " ".join(parts)

    def __str__(self):
        return self.render()


def normalize(c: PBConstraint) -> PBConstraint:
    """Return the canonical form of ``c``.

    Duplicate variables are merged, negated literals rewritten via
    ``a*~x = a - a*x``, zero coefficients dropped and ``<=`` flipped to
    ``>=``. The result has the same model set as ``c``.
    """
    coeffs: dict[int, int] = {}
    bound = c.bound
    for t in c.terms:
        if t.negated:
            bound -= t.coeff
            coeffs[t.var] = coeffs.get(t.var, 0) - t.coeff
        else:
            coeffs[t.var] = coeffs.get(t.var, 0) + t.coeff
    cmp = c.cmp
    if cmp is Comparator.LE:
        coeffs = {v: -a for v, a in coeffs.items()}
        bound = -bound
        cmp = Comparator.GE
    terms = tuple(Term(a, v) for v, a in sorted(coeffs.items()) if a != 0)
    return PBConstraint(terms, cmp, bound, c.cid)


@dataclass(frozen=True)
class VarPartition:
    xset: frozenset[int]
    yset: frozenset[int]

    @classmethod
    def from_projection(cls, nvars: int, xs: Iterable[int] | None = None) -> VarPartition:
        allv = frozenset(range(1, nvars + 1))
        if xs is None:
            return cls(allv, frozenset())
        xset = frozenset(xs)
        bad = sorted(v for v in xset if v not in allv)
        if bad:
            raise ValueError(f"projection variable x{bad[0]} outside 1..{nvars}")
        return cls(xset, allv - xset)

    def check(self, nvars: int):
        allv = frozenset(range(1, nvars + 1))
        if self.xset & self.yset:
            raise ValueError("projection sets overlap")
        if self.xset | self.yset != allv:
            raise ValueError("projection sets do not cover all variables")


@dataclass
class PBFormula:
    nvars: int
    constraints: dict[int, PBConstraint]
    projection: VarPartition = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.projection is None:
            self.projection = VarPartition.from_projection(self.nvars)
        for c in self.constraints.values():
            for t in c.terms:
                if not 1 <= t.var <= self.nvars:
                    raise ValueError(f"constraint {c.cid} uses x{t.var} outside 1..{self.nvars}")
        self.projection.check(self.nvars)

    @classmethod
    def from_constraints(cls, nvars, constraints: Iterable[PBConstraint], xset=None) -> PBFormula:
        """Build a formula, normalizing and numbering constraints from 1."""
        cons = {}
        for i, c in enumerate(constraints, start=1):
            cons[i] = normalize(c).with_cid(i)
        return cls(nvars, cons, VarPartition.from_projection(nvars, xset))

    @property
    def xset(self) -> frozenset[int]:
        return self.projection.xset

    @property
    def yset(self) -> frozenset[int]:
        return self.projection.yset

    def vars(self) -> frozenset[int]:
        out: set[int] = set()
        for c in self.constraints.values():
            out.update(c.vars)
        return frozenset(out)

    def satisfied_by(self, assignment) -> bool:
        return all(c.satisfied_by(assignment) for c in self.constraints.values())

    def without_tautologies(self) -> PBFormula:
        kept = {cid: c for cid, c in self.constraints.items() if not c.always_true}
        return PBFormula(self.nvars, kept, self.projection)

    def with_projection(self, xs) -> PBFormula:
        return PBFormula(self.nvars, dict(self.constraints), VarPartition.from_projection(self.nvars, xs))


# ---------------------------------------------------------------------------
# Text format

_TOKEN = re.compile(r"\s*(?:(?P<int>[+-]?\d+)|(?P<sign>[+-])|(?P<lit>~?x\d+)|(?P<cmp>>=|<=|=)|(?P<end>;))")


def parse_constraint(text: str, lineno: int | None = None, nvars: int | None = None) -> PBConstraint:
    """Parse one constraint line into an un-normalized :class:`PBConstraint`.

    A literal without a preceding coefficient gets coefficient 1, and a
    bare sign (``x1 - x2``) acts as coefficient +1/-1. The trailing ``;``
    is optional.
    """
    pos = 0
    terms: list[Term] = []
    pending: int | None = None
    signed = False  # pending came from a bare sign
    cmp = None
    bound = None
    done = False
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _TOKEN.match(stripped, pos)
        if m is None:
            col = pos + 1 + (len(stripped[pos:]) - len(stripped[pos:].lstrip()))
            raise ParseError(f"unexpected input {stripped[col - 1:col + 8]!r}", lineno, col)
        col = m.start(m.lastgroup) + 1
        pos = m.end()
        if done:
            raise ParseError("text after ';'", lineno, col)
        kind, tok = m.lastgroup, m.group(m.lastgroup)
        if cmp is not None:
            if kind == "int" and bound is None:
                bound = int(tok)
            elif kind == "end" and bound is not None:
                done = True
            else:
                raise ParseError(f"unexpected {tok!r} after comparator", lineno, col)
            continue
        if kind == "sign":
            if pending is not None:
                raise ParseError(f"unexpected {tok!r}", lineno, col)
            pending, signed = (1 if tok == "+" else -1), True
        elif kind == "int":
            if pending is not None and not signed:
                raise ParseError("two coefficients in a row", lineno, col)
            pending = int(tok) * (pending or 1)
            signed = False
        elif kind == "lit":
            var = int(tok.lstrip("~x"))
            if var < 1 or (nvars is not None and var > nvars):
                raise ParseError(f"variable x{var} outside 1..{nvars}", lineno, col)
            terms.append(Term(1 if pending is None else pending, var, tok.startswith("~")))
            pending, signed = None, False
        elif kind == "cmp":
            if pending is not None:
                raise ParseError("coefficient without literal", lineno, col)
            cmp = Comparator(tok)
        else:
            raise ParseError("';' before comparator", lineno, col)
    if cmp is None:
        raise ParseError("missing comparator", lineno, len(stripped) + 1)
    if bound is None:
        raise ParseError("missing right-hand side", lineno, len(stripped) + 1)
    return PBConstraint(tuple(terms), cmp, bound)


_HEADER = re.compile(r"#variable=\s*(\d+)(?:\s+#constraint=\s*(\d+))?")


def parse_var_list(text: str, lineno=None, nvars=None) -> list[int]:
    out = []
    for tok in text.replace(",", " ").split():
        m = re.fullmatch(r"x?(\d+)", tok)
        if m is None:
            raise ParseError(f"bad projection variable {tok!r}", lineno)
        v = int(m.group(1))
        if v < 1 or (nvars is not None and v > nvars):
            raise ParseError(f"projection variable x{v} outside 1..{nvars}", lineno)
        if v in out:
            raise ParseError(f"duplicate projection variable x{v}", lineno)
        out.append(v)
    return out


def parse_header(lines: Iterable[str]):
    """Scan comment lines for ``#variable=`` and ``proj:`` declarations.

    Returns ``(nvars, nconstraints, proj)``; missing entries are None.
    """
    nvars = ncons = proj = None
    for lineno, line in enumerate(lines, start=1):
        s = line.strip()
        if not s.startswith("*"):
            continue
        body = s[1:].strip()
        m = _HEADER.search(body)
        if m and nvars is None:
            nvars = int(m.group(1))
            ncons = int(m.group(2)) if m.group(2) is not None else None
        elif body.startswith("proj:"):
            if proj is not None:
                raise ParseError("duplicate projection declaration", lineno)
            proj = parse_var_list(body[len("proj:"):], lineno, nvars)
    return nvars, ncons, proj


def parse_formula(text: str | bytes, projection_spec: str | bytes | None = None) -> PBFormula:
    """Parse ``.pb`` text into a normalized :class:`PBFormula`.

    ``projection_spec`` lists projection variables (``x1 x3`` or ``1 3``)
    and may not be combined with an in-file ``* proj:`` line.
    """
    if isinstance(text, bytes):
        text = text.decode()
    if isinstance(projection_spec, bytes):
        projection_spec = projection_spec.decode()
    lines = text.splitlines()
    nvars, ncons, proj = parse_header(lines)
    if nvars is None:
        raise ParseError("missing '* #variable= N' header", 1)
    raw = []
    for lineno, line in enumerate(lines, start=1):
        s = line.strip()
        if not s or s.startswith("*"):
            continue
        raw.append(parse_constraint(line, lineno, nvars))
    if not raw:
        raise ParseError("empty constraint list")
    if ncons is not None and ncons != len(raw):
        raise ParseError(f"header declares {ncons} constraints, found {len(raw)}")
    if projection_spec is not None:
        if proj is not None:
            raise ParseError("duplicate projection declaration")
        lines_ = [ln for ln in projection_spec.splitlines() if not ln.strip().startswith("*")]
        body = " ".join(lines_).strip()
        if body.startswith("proj:"):
            body = body[len("proj:"):]
        proj = parse_var_list(body, None, nvars)
    return PBFormula.from_constraints(nvars, raw, proj)


def render(f: PBFormula) -> str:
    out = [f"* #variable= {f.nvars} #constraint= {len(f.constraints)}"]
    if f.yset:
        out.append("* proj: " + " ".join(f"x{v}" for v in sorted(f.xset)))
    out.extend(c.render() for c in f.constraints.values())
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Occurrence structures

@dataclass
class OccurrenceGraph:
    var_cids: dict[int, set[int]] = field(default_factory=dict)
    cid_vars: dict[int, set[int]] = field(default_factory=dict)

    def degree(self, v: int) -> int:
        return len(self.var_cids.get(v, ()))


def build_occurrence_graph(f: PBFormula) -> OccurrenceGraph:
    g = OccurrenceGraph({v: set() for v in range(1, f.nvars + 1)}, {})
    for cid, c in f.constraints.items():
        g.cid_vars[cid] = set(c.vars)
        for v in c.vars:
            g.var_cids[v].add(cid)
    return g


@dataclass
class GaifmanGraph:
    """Variable co-occurrence graph; ``adj[u][v]`` counts shared constraints."""

    adj: dict[int, dict[int, int]]

    def neighbors(self, v: int):
        return self.adj.get(v, {}).keys()

    def weight(self, u: int, v: int) -> int:
        return self.adj.get(u, {}).get(v, 0)


def build_gaifman_graph(f: PBFormula) -> GaifmanGraph:
    return gaifman_from_supports(f.nvars, (c.vars for c in f.constraints.values()))


def gaifman_from_supports(nvars: int, supports: Iterable[Iterable[int]]) -> GaifmanGraph:
    adj: dict[int, dict[int, int]] = {v: {} for v in range(1, nvars + 1)}
    for sup in supports:
        vs = sorted(set(sup))
        for i, u in enumerate(vs):
            for v in vs[i + 1:]:
                adj[u][v] = adj[u].get(v, 0) + 1
                adj[v][u] = adj[v].get(u, 0) + 1
    return GaifmanGraph(adj)


def constraint_vars(constraints: Mapping[int, PBConstraint], cids: Iterable[int]) -> set[int]:
    out: set[int] = set()
    for cid in cids:
        out.update(constraints[cid].vars)
    return out
