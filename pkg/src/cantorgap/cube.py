"""Clopen subsets of a finite Cantor cube with their exact Haar measure.

Coordinates are ``(block, offset)`` pairs.  A clopen set is stored as a
reduced ordered binary decision diagram over the coordinates it mentions;
since such diagrams are canonical for a fixed variable order, structural
equality is semantic equality and the support of the diagram is exactly
the set of determining coordinates.

Variables are ordered offset-major, ``(offset, block)``.  The events built
by the construction live in per-``n`` offset windows shared by all blocks,
so this order keeps conjunctions over many ``n`` linear in size.
"""
import re
import sys
from collections.abc import Mapping
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np

if sys.getrecursionlimit() < 10000:
    sys.setrecursionlimit(10000)


class PreconditionError(ValueError):
    """An operation was called outside its domain."""


class UndefinedConditional(ZeroDivisionError):
    """Conditioning on an event of measure zero."""


class Coordinate(NamedTuple):
    block: int
    offset: int

    def __str__(self):
        return f"{self.block}.{self.offset}"

    @classmethod
    def parse(cls, text):
        block, _, offset = text.strip().partition(".")
        return cls(int(block), int(offset))


def _coord(c):
    if isinstance(c, Coordinate):
        return c
    block, offset = c
    return Coordinate(int(block), int(offset))


class Dyadic(Fraction):
    """Exact rational ``numerator / 2**exponent`` in lowest terms."""

    def __new__(cls, numerator=0, exponent=0):
        if exponent < 0:
            raise ValueError("exponent must be nonnegative")
        return super().__new__(cls, numerator, 1 << exponent)

    @classmethod
    def from_fraction(cls, value):
        q = Fraction(value)
        den = q.denominator
        if den & (den - 1):
            raise ValueError(f"{q} is not dyadic")
        return cls(q.numerator, den.bit_length() - 1)

    @property
    def exponent(self):
        return self.denominator.bit_length() - 1

    def __str__(self):
        return f"{self.numerator}/2^{self.exponent}"

    def __repr__(self):
        return f"Dyadic({self.numerator}, {self.exponent})"

    @classmethod
    def parse(cls, text):
        m = re.fullmatch(r"\s*(-?\d+)\s*/\s*2\^(\d+)\s*", text)
        if not m:
            raise ValueError(f"not a dyadic literal: {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))


class PartialAssignment(Mapping):
    """Finite partial function from coordinates to bits.

    Immutable and hashable.  Iteration is in coordinate order.
    """

    __slots__ = ("_map", "_hash")

    def __init__(self, entries=()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        m = {}
        for c, bit in items:
            c = _coord(c)
            bit = int(bit)
            if bit not in (0, 1):
                raise ValueError(f"bit for {c} must be 0 or 1, got {bit}")
            if m.get(c, bit) != bit:
                raise ValueError(f"coordinate {c} assigned twice")
            m[c] = bit
        self._map = dict(sorted(m.items()))
        self._hash = hash(frozenset(self._map.items()))

    def __getitem__(self, c):
        return self._map[c]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, PartialAssignment):
            return self._map == other._map
        return NotImplemented

    @property
    def domain(self):
        return frozenset(self._map)

    def compatible(self, other):
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        return all(big._map.get(c, b) == b for c, b in small._map.items())

    def union(self, other):
        if not self.compatible(other):
            raise ValueError("incompatible partial assignments")
        return PartialAssignment({**self._map, **other._map})

    __or__ = union

    def minus(self, other):
        """Drop every coordinate in the domain of ``other``."""
        dom = other.domain if isinstance(other, PartialAssignment) else set(other)
        return PartialAssignment((c, b) for c, b in self._map.items() if c not in dom)

    def restrict(self, coords):
        coords = set(coords)
        return PartialAssignment((c, b) for c, b in self._map.items() if c in coords)

    def extends(self, other):
        return all(self._map.get(c) == b for c, b in other.items())

    def __str__(self):
        return "(" + ",".join(f"{c}={b}" for c, b in self._map.items()) + ")"

    def __repr__(self):
        return f"PartialAssignment({self})"

    @classmethod
    def parse(cls, text):
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise ValueError(f"not a partial assignment: {text!r}")
        body = body[1:-1].strip()
        if not body:
            return cls()
        entries = []
        for part in body.split(","):
            c, _, bit = part.partition("=")
            entries.append((Coordinate.parse(c), int(bit)))
        return cls(entries)


# --- decision diagram internals -------------------------------------------

_TERMINAL_KEY = (float("inf"), float("inf"))


class _Node:
    __slots__ = ("var", "low", "high", "key", "hash")

    def __init__(self, var, low, high, h=None):
        self.var = var
        self.low = low
        self.high = high
        if var is None:
            self.key = _TERMINAL_KEY
            self.hash = h
        else:
            self.key = (var.offset, var.block)
            self.hash = hash((var, low.hash, high.hash))


_FALSE = _Node(None, None, None, h=0)
_TRUE = _Node(None, None, None, h=1)


def _same(a, b):
    if a is b:
        return True
    stack = [(a, b)]
    seen = set()
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        if x.hash != y.hash or x.var != y.var or x.var is None:
            return False
        k = (id(x), id(y))
        if k in seen:
            continue
        seen.add(k)
        stack.append((x.low, y.low))
        stack.append((x.high, y.high))
    return True


class _Builder:
    """Per-call node table; keeps results reduced and internally shared."""

    __slots__ = ("table",)

    def __init__(self):
        self.table = {}

    def mk(self, var, low, high):
        if low is high or (low.hash == high.hash and _same(low, high)):
            return low
        k = (var, id(low), id(high))
        node = self.table.get(k)
        if node is None:
            node = self.table[k] = _Node(var, low, high)
        return node


_AND, _OR, _XOR = "and", "or", "xor"


def _negate(node, b, memo):
    if node is _TRUE:
        return _FALSE
    if node is _FALSE:
        return _TRUE
    r = memo.get(id(node))
    if r is None:
        r = memo[id(node)] = b.mk(node.var, _negate(node.low, b, memo),
                                  _negate(node.high, b, memo))
    return r


def _apply(op, x, y, b, memo, neg_memo):
    if op is _AND:
        if x is _FALSE or y is _FALSE:
            return _FALSE
        if x is _TRUE or x is y:
            return y
        if y is _TRUE:
            return x
    elif op is _OR:
        if x is _TRUE or y is _TRUE:
            return _TRUE
        if x is _FALSE or x is y:
            return y
        if y is _FALSE:
            return x
    else:
        if x is y:
            return _FALSE
        if x is _FALSE:
            return y
        if y is _FALSE:
            return x
        if x is _TRUE:
            return _negate(y, b, neg_memo)
        if y is _TRUE:
            return _negate(x, b, neg_memo)
    k = (id(x), id(y))
    r = memo.get(k)
    if r is not None:
        return r
    if x.key == y.key:
        var, x0, x1, y0, y1 = x.var, x.low, x.high, y.low, y.high
    elif x.key < y.key:
        var, x0, x1, y0, y1 = x.var, x.low, x.high, y, y
    else:
        var, x0, x1, y0, y1 = y.var, x, x, y.low, y.high
    r = b.mk(var, _apply(op, x0, y0, b, memo, neg_memo),
             _apply(op, x1, y1, b, memo, neg_memo))
    memo[k] = r
    return r


def _restrict(node, assignment, b, memo):
    if node.var is None:
        return node
    r = memo.get(id(node))
    if r is not None:
        return r
    bit = assignment.get(node.var)
    if bit is None:
        r = b.mk(node.var, _restrict(node.low, assignment, b, memo),
                 _restrict(node.high, assignment, b, memo))
    else:
        r = _restrict(node.high if bit else node.low, assignment, b, memo)
    memo[id(node)] = r
    return r


def _measure(root):
    """``(num, e)`` with measure ``num / 2**e``; integer-only bottom-up pass."""
    val = {id(_FALSE): (0, 0), id(_TRUE): (1, 0)}
    for n in _walk(root):
        a, ea = val[id(n.low)]
        b, eb = val[id(n.high)]
        if ea < eb:
            a, ea = a << (eb - ea), eb
        elif eb < ea:
            b = b << (ea - eb)
        val[id(n)] = (a + b, ea + 1)
    return val[id(root)]


def _walk(node):
    """Each internal node once, children before parents."""
    order, seen, stack = [], set(), [(node, False)]
    while stack:
        n, done = stack.pop()
        if n.var is None or (not done and id(n) in seen):
            continue
        if done:
            order.append(n)
            continue
        seen.add(id(n))
        stack.append((n, True))
        stack.append((n.high, False))
        stack.append((n.low, False))
    return order


class ClopenSet:
    """A clopen subset of the Cantor cube over all coordinates.

    Supports ``&`` (meet), ``|`` (join), ``-`` (difference), ``^``
    (symmetric difference) and ``~`` (complement).  ``x <= y`` is
    inclusion and ``==`` is equality of point sets.
    """

    __slots__ = ("_root",)

    def __init__(self, _root=None):
        self._root = _FALSE if _root is None else _root

    @classmethod
    def empty(cls):
        return cls(_FALSE)

    @classmethod
    def whole(cls):
        return cls(_TRUE)

    @classmethod
    def cylinder(cls, s):
        if not isinstance(s, PartialAssignment):
            s = PartialAssignment(s)
        b = _Builder()
        node = _TRUE
        for c, bit in sorted(s.items(), key=lambda cb: (cb[0].offset, cb[0].block),
                             reverse=True):
            node = b.mk(c, _FALSE, node) if bit else b.mk(c, node, _FALSE)
        return cls(node)

    @classmethod
    def from_cylinders(cls, cylinders):
        return join_all(cls.cylinder(s) for s in cylinders)

    def _binop(self, other, op):
        if not isinstance(other, ClopenSet):
            return NotImplemented
        return ClopenSet(_apply(op, self._root, other._root, _Builder(), {}, {}))

    def __and__(self, other):
        return self._binop(other, _AND)

    def __or__(self, other):
        return self._binop(other, _OR)

    def __xor__(self, other):
        return self._binop(other, _XOR)

    def __invert__(self):
        return ClopenSet(_negate(self._root, _Builder(), {}))

    def __sub__(self, other):
        if not isinstance(other, ClopenSet):
            return NotImplemented
        return self & ~other

    def __le__(self, other):
        return (self - other).is_empty()

    def __ge__(self, other):
        return other <= self

    def __eq__(self, other):
        if not isinstance(other, ClopenSet):
            return NotImplemented
        return _same(self._root, other._root)

    def __hash__(self):
        return self._root.hash

    def is_empty(self):
        return self._root is _FALSE

    def is_whole(self):
        return self._root is _TRUE

    def measure(self):
        return Dyadic(*_measure(self._root))

    def support(self):
        return frozenset(n.var for n in _walk(self._root))

    def node_count(self):
        return len(_walk(self._root))

    def restrict(self, assignment):
        """Cofactor: fix the coordinates in ``assignment`` and drop them."""
        if not isinstance(assignment, Mapping):
            assignment = PartialAssignment(assignment)
        return ClopenSet(_restrict(self._root, dict(assignment), _Builder(), {}))

    def cylinders(self):
        """Disjoint cylinder cover, one cylinder per accepting path."""
        out = []
        stack = [(self._root, ())]
        while stack:
            node, path = stack.pop()
            if node is _TRUE:
                out.append(PartialAssignment(path))
            elif node is not _FALSE:
                stack.append((node.high, path + ((node.var, 1),)))
                stack.append((node.low, path + ((node.var, 0),)))
        return out

    def contains(self, point):
        """Membership of a point given as a mapping covering the support."""
        node = self._root
        while node.var is not None:
            node = node.high if point[node.var] else node.low
        return node is _TRUE

    def evaluate(self, bits, columns):
        """Vectorised membership over rows of a 0/1 sample matrix.

        ``columns`` maps each support coordinate to its column in ``bits``.
        """
        bits = np.asarray(bits, dtype=bool)
        n = bits.shape[0]
        values = {id(_TRUE): np.ones(n, dtype=bool), id(_FALSE): np.zeros(n, dtype=bool)}
        for node in _walk(self._root):
            values[id(node)] = np.where(bits[:, columns[node.var]],
                                        values[id(node.high)], values[id(node.low)])
        return values[id(self._root)]

    def __str__(self):
        return "[" + ",".join(str(s) for s in self.cylinders()) + "]"

    def __repr__(self):
        return f"ClopenSet({self})"

    @classmethod
    def parse(cls, text):
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"not a clopen set: {text!r}")
        return cls.from_cylinders(PartialAssignment.parse(m.group(0))
                                  for m in re.finditer(r"\([^()]*\)", body))


# --- operations ------------------------------------------------------------

def cylinder(s):
    """The basic clopen set of all points extending ``s``."""
    return ClopenSet.cylinder(s)


def _reduce(items, op, unit):
    items = list(items)
    if not items:
        return unit
    while len(items) > 1:
        nxt = [op(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


def join_all(sets: Iterable[ClopenSet]) -> ClopenSet:
    return _reduce(sets, ClopenSet.__or__, ClopenSet.empty())


def meet_all(sets: Iterable[ClopenSet]) -> ClopenSet:
    return _reduce(sets, ClopenSet.__and__, ClopenSet.whole())


def combine(x, y, op):
    if op == "meet":
        return x & y
    if op == "join":
        return x | y
    if op == "difference":
        return x - y
    if op == "complement":
        return ~x
    raise ValueError(f"unknown operation {op!r}")


def measure(x) -> Dyadic:
    return x.measure()


def distance(x, y):
    """Measure of the symmetric difference."""
    return (x ^ y).measure()


def conditional(x, y) -> Fraction:
    den = y.measure()
    if den == 0:
        raise UndefinedConditional("conditioning event has measure zero")
    return Fraction((x & y).measure()) / den


def determining_coords(x):
    """Minimal coordinate set determining ``x``.

    A coordinate belongs to it iff the two cofactors of ``x`` at that
    coordinate differ.
    """
    out = set()
    for c in x.support():
        if x.restrict({c: 0}) != x.restrict({c: 1}):
            out.add(c)
    return frozenset(out)


def project_below(x, t):
    """The unique ``y`` free of ``dom(t)`` with ``x = y & [t]``."""
    if not isinstance(t, PartialAssignment):
        t = PartialAssignment(t)
    if not x <= cylinder(t):
        raise PreconditionError("project_below requires x <= [t]")
    return x.restrict(t)


def _internal_half(e, target):
    free_all = e.support()
    pieces = sorted(e.cylinders(), key=lambda s: (len(s), str(s)))
    chosen = []
    remaining = Fraction(target)
    work = list(reversed(pieces))
    while work and remaining:
        s = work.pop()
        m = Fraction(1, 1 << len(s))
        if m <= remaining:
            chosen.append(s)
            remaining -= m
            continue
        free = sorted(free_all - s.domain)
        if free:
            f = free[0]
            work.append(s | PartialAssignment({f: 1}))
            work.append(s | PartialAssignment({f: 0}))
    if remaining:
        return None
    return ClopenSet.from_cylinders(chosen)


def split_half(e, pool=()):
    """A subset of ``e`` with exactly half its measure.

    Tries a split inside the coordinates determining ``e`` first; otherwise
    conjoins ``e`` with one fresh pool coordinate set to 0.
    """
    mu = e.measure()
    if mu == 0:
        raise PreconditionError("cannot halve an event of measure zero")
    half = _internal_half(e, mu / 2)
    if half is not None:
        return half
    used = e.support()
    fresh = sorted(_coord(c) for c in pool if _coord(c) not in used)
    if not fresh:
        raise PreconditionError("no internal split and no fresh pool coordinate")
    return e & cylinder({fresh[0]: 0})


def monte_carlo_frequency(x, samples, rng):
    """Empirical frequency of membership in ``x`` over uniform samples."""
    support = sorted(x.support())
    columns = {c: i for i, c in enumerate(support)}
    bits = rng.integers(0, 2, size=(samples, len(support)), dtype=np.int8)
    hits = int(np.count_nonzero(x.evaluate(bits, columns)))
    return Fraction(hits, samples)
