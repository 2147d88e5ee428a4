"""Reduced ordered algebraic decision diagrams with exact integer leaves.

Nodes live in a per-manager unique table and are never freed. Every node
gets one :class:`AddRef` handle at creation, so equal functions are
represented by the identical handle.
"""

from __future__ import annotations

import operator
from typing import Iterable, Mapping

from .formula import GaifmanGraph

ADD, MUL, MAX = "add", "mul", "max"
_OPS = {ADD: operator.add, MUL: operator.mul, MAX: max}


class AddError(RuntimeError):
    pass


class AddRef:
    """Handle to a node of one :class:`AddManager`."""

    __slots__ = ("manager", "index")

    def __init__(self, manager, index):
        self.manager = manager
        self.index = index

    def __repr__(self):
        m = self.manager
        if m.is_terminal(self):
            return f"AddRef(#{self.index}: {m._value[self.index]})"
        return f"AddRef(#{self.index}: x{m._var[self.index]})"

    def __eq__(self, other):
        return (isinstance(other, AddRef) and other.manager is self.manager
                and other.index == self.index)

    def __hash__(self):
        return hash((id(self.manager), self.index))


class AddManager:
    """Unique table, Apply memo and the fixed decision-variable order.

    ``order`` lists the decision variables from root to leaves. Variables
    outside ``order`` cannot be used in this manager.
    """

    def __init__(self, order: Iterable[int]):
        self.order = list(order)
        if len(set(self.order)) != len(self.order):
            raise ValueError("variable order has duplicates")
        self.position = {v: i for i, v in enumerate(self.order)}
        self._leaf_level = len(self.order)
        # parallel node arrays; terminals have var None
        self._var: list = []
        self._level: list[int] = []
        self._lo: list[int] = []
        self._hi: list[int] = []
        self._value: list = []
        self._refs: list[AddRef] = []
        self._unique: dict = {}
        self._memo: dict = {}
        self._support: dict[int, frozenset] = {}
        self.apply_calls = 0
        self.apply_steps = 0
        self.zero = self.mk_terminal(0)
        self.one = self.mk_terminal(1)

    @classmethod
    def for_nvars(cls, nvars: int):
        return cls(range(1, nvars + 1))

    def __len__(self):
        return len(self._refs)

    # -- construction -----------------------------------------------------

    def _new(self, key, var, level, lo, hi, value) -> int:
        i = len(self._refs)
        self._var.append(var)
        self._level.append(level)
        self._lo.append(lo)
        self._hi.append(hi)
        self._value.append(value)
        self._refs.append(AddRef(self, i))
        self._unique[key] = i
        return i

    def _terminal(self, v) -> int:
        key = ("t", v)
        i = self._unique.get(key)
        if i is None:
            i = self._new(key, None, self._leaf_level, -1, -1, v)
        return i

    def _node(self, var, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (var, lo, hi)
        i = self._unique.get(key)
        if i is None:
            i = self._new(key, var, self.position[var], lo, hi, None)
        return i

    def mk_terminal(self, v: int) -> AddRef:
        return self._refs[self._terminal(int(v))]

    def mk_internal(self, x: int, lo: AddRef, hi: AddRef) -> AddRef:
        self._own(lo)
        self._own(hi)
        if x not in self.position:
            raise AddError(f"x{x} is not in the manager's order")
        lvl = self.position[x]
        if lvl >= self._level[lo.index] or lvl >= self._level[hi.index]:
            raise AddError(f"x{x} must precede the root variables of both children")
        return self._refs[self._node(x, lo.index, hi.index)]

    def var(self, x: int) -> AddRef:
        """0/1 indicator of ``x``."""
        return self.mk_internal(x, self.zero, self.one)

    def _own(self, f: AddRef):
        if not isinstance(f, AddRef) or f.manager is not self:
            raise AddError("operand belongs to a different manager")

    # -- inspection -------------------------------------------------------

    def is_terminal(self, f: AddRef) -> bool:
        return self._var[f.index] is None

    def top_var(self, f: AddRef):
        return self._var[f.index]

    def low(self, f: AddRef) -> AddRef:
        return self._refs[self._lo[f.index]]

    def high(self, f: AddRef) -> AddRef:
        return self._refs[self._hi[f.index]]

    def value(self, f: AddRef) -> int:
        self._own(f)
        if self._var[f.index] is not None:
            raise AddError("count not fully projected")
        return self._value[f.index]

    def evaluate(self, f: AddRef, assignment) -> int:
        """Value of ``f`` under ``assignment`` (mapping or sequence indexed by var)."""
        self._own(f)
        i = f.index
        var, lo, hi = self._var, self._lo, self._hi
        while var[i] is not None:
            i = hi[i] if assignment[var[i]] else lo[i]
        return self._value[i]

    def support(self, f: AddRef) -> frozenset[int]:
        self._own(f)
        return self._support_of(f.index)

    def _support_of(self, i: int) -> frozenset[int]:
        s = self._support.get(i)
        if s is not None:
            return s
        # iterative post-order to keep deep diagrams off the call stack
        stack = [i]
        while stack:
            j = stack[-1]
            if j in self._support:
                stack.pop()
                continue
            if self._var[j] is None:
                self._support[j] = frozenset()
                stack.pop()
                continue
            lo, hi = self._lo[j], self._hi[j]
            pending = [k for k in (lo, hi) if k not in self._support]
            if pending:
                stack.extend(pending)
                continue
            self._support[j] = self._support[lo] | self._support[hi] | {self._var[j]}
            stack.pop()
        return self._support[i]

    def nodes(self, f: AddRef) -> list[int]:
        """Indices of all nodes reachable from ``f``."""
        self._own(f)
        seen = {f.index}
        stack = [f.index]
        while stack:
            j = stack.pop()
            if self._var[j] is not None:
                for k in (self._lo[j], self._hi[j]):
                    if k not in seen:
                        seen.add(k)
                        stack.append(k)
        return sorted(seen)

    def node_count(self, f: AddRef) -> int:
        return len(self.nodes(f))

    def count_kinds(self, f: AddRef) -> tuple[int, int]:
        """``(internal, terminal)`` node counts of ``f``."""
        ns = self.nodes(f)
        term = sum(1 for j in ns if self._var[j] is None)
        return len(ns) - term, term

    # -- operations -------------------------------------------------------

    def clear_memo(self):
        self._memo.clear()

    def apply(self, op: str, a: AddRef, b: AddRef) -> AddRef:
        """Pointwise ``op`` (``"add"``, ``"mul"`` or ``"max"``) of two ADDs."""
        if op not in _OPS:
            raise ValueError(f"unknown operator {op!r}")
        self._own(a)
        self._own(b)
        self.apply_calls += 1
        return self._refs[self._apply(op, _OPS[op], a.index, b.index)]

    def _apply(self, op, fn, i: int, j: int) -> int:
        var, level, lo, hi, value = self._var, self._level, self._lo, self._hi, self._value
        # shortcuts on terminals; every supported op is commutative
        if i > j:
            i, j = j, i
        vi, vj = var[i] is None, var[j] is None
        if vi and vj:
            return self._terminal(fn(value[i], value[j]))
        if op == MUL:
            if vi and value[i] == 1:
                return j
            if vj and value[j] == 1:
                return i
            if (vi and value[i] == 0) or (vj and value[j] == 0):
                return self._terminal(0)
        elif op == ADD:
            if vi and value[i] == 0:
                return j
            if vj and value[j] == 0:
                return i
        elif i == j:
            return i
        key = (op, i, j)
        r = self._memo.get(key)
        if r is not None:
            return r
        self.apply_steps += 1
        li, lj = level[i], level[j]
        if li <= lj:
            top = var[i]
            i0, i1 = lo[i], hi[i]
        else:
            top = var[j]
            i0 = i1 = i
        if lj <= li:
            j0, j1 = lo[j], hi[j]
        else:
            j0 = j1 = j
        r = self._node(top, self._apply(op, fn, i0, j0), self._apply(op, fn, i1, j1))
        self._memo[key] = r
        return r

    def restrict(self, f: AddRef, x: int, b) -> AddRef:
        """Cofactor of ``f`` with ``x`` fixed to ``b``."""
        self._own(f)
        if x not in self.position:
            return f
        lx = self.position[x]
        branch = self._hi if b else self._lo
        var, level, lo, hi = self._var, self._level, self._lo, self._hi
        memo: dict[int, int] = {}

        def go(i):
            if level[i] > lx:
                return i
            if level[i] == lx:
                return branch[i]
            r = memo.get(i)
            if r is None:
                r = self._node(var[i], go(lo[i]), go(hi[i]))
                memo[i] = r
            return r

        return self._refs[go(f.index)]

    def sum_project(self, f: AddRef, x: int) -> AddRef:
        return self.apply(ADD, self.restrict(f, x, 1), self.restrict(f, x, 0))

    def exists_project(self, f: AddRef, x: int) -> AddRef:
        return self.apply(MAX, self.restrict(f, x, 1), self.restrict(f, x, 0))

    # -- conversion -------------------------------------------------------

    def from_truth_table(self, vars_: list[int], table: Mapping | list, top_down=True) -> AddRef:
        """Build the ADD of ``table`` over ``vars_`` (which must be in order).

        ``table[k]`` holds the value at the assignment whose bit ``i`` is
        the value of ``vars_[i]``. ``top_down=False`` builds the same
        function by a different route: a sum of minterm products.
        """
        vs = sorted(vars_, key=self.position.__getitem__)
        bitpos = {v: i for i, v in enumerate(vars_)}
        if top_down:
            def go(depth, key):
                if depth == len(vs):
                    return self.mk_terminal(table[key])
                v = vs[depth]
                return self.mk_internal(v, go(depth + 1, key), go(depth + 1, key | (1 << bitpos[v])))
            return go(0, 0)
        acc = self.zero
        for key in range(1 << len(vars_)):
            if table[key] == 0:
                continue
            term = self.mk_terminal(table[key])
            for v in reversed(vs):
                lit = self.var(v) if key >> bitpos[v] & 1 else self.apply(ADD, self.one, self.apply(MUL, self.mk_terminal(-1), self.var(v)))
                term = self.apply(MUL, term, lit)
            acc = self.apply(ADD, acc, term)
        return acc

    def to_dot(self, f: AddRef, name="add") -> str:
        """Graphviz source; dashed edges are the false branch."""
        lines = [f"digraph {name} {{"]
        for j in self.nodes(f):
            if self._var[j] is None:
                lines.append(f'  n{j} [shape=box,label="{self._value[j]}"];')
            else:
                lines.append(f'  n{j} [shape=circle,label="x{self._var[j]}"];')
                lines.append(f"  n{j} -> n{self._lo[j]} [style=dashed];")
                lines.append(f"  n{j} -> n{self._hi[j]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def mcs_order(g: GaifmanGraph, nvars: int) -> list[int]:
    """Maximal-cardinality search order over variables ``1..nvars``.

    The next variable is the unordered one with the most ordered
    neighbours, ties going to the smallest id. Isolated variables come
    last, in id order.
    """
    isolated = [v for v in range(1, nvars + 1) if not g.adj.get(v)]
    rest = set(range(1, nvars + 1)) - set(isolated)
    weight = {v: 0 for v in rest}
    order = []
    while rest:
        best = min(rest, key=lambda v: (-weight[v], v))
        rest.discard(best)
        order.append(best)
        for u in g.neighbors(best):
            if u in rest:
                weight[u] += 1
    return order + isolated
