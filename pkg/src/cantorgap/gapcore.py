"""Pregaps over finite families and over random-subset names.

Concrete families live below a horizon ``M``; "modulo finite" statements
are read as "above a cut ``k``".  The Ramsey partitions are

* ``K``: unordered pairs ``{i, j}``, colour ``K0`` iff
  ``(a_i & b_j) | (a_j & b_i)`` is empty;
* ``L^k``: ordered pairs including the diagonal, colour ``L0`` iff both
  cross intersections have no element ``>= k``.
"""
import enum
import re
from collections.abc import Mapping
from dataclasses import dataclass
from itertools import combinations

import networkx as nx

from .cube import ClopenSet, Coordinate, PartialAssignment, join_all, meet_all


class Label(enum.Enum):
    K0 = "K0"
    K1 = "K1"
    L0 = "L0"
    L1 = "L1"


@dataclass(frozen=True)
class ConcretePregap:
    """Families ``a_i, b_i`` of finite subsets of ``range(horizon)``."""

    horizon: int
    a: Mapping
    b: Mapping

    def __post_init__(self):
        if set(self.a) != set(self.b):
            raise ValueError("a and b must share one index set")
        for fam in (self.a, self.b):
            for i, s in fam.items():
                if any(not 0 <= n < self.horizon for n in s):
                    raise ValueError(f"set for index {i} leaves range({self.horizon})")
        object.__setattr__(self, "a", {i: frozenset(s) for i, s in self.a.items()})
        object.__setattr__(self, "b", {i: frozenset(s) for i, s in self.b.items()})

    @classmethod
    def from_pairs(cls, pairs, horizon=None):
        pairs = dict(pairs)
        if horizon is None:
            horizon = 1 + max((n for a, b in pairs.values() for n in a | b), default=-1)
        return cls(horizon, {i: frozenset(p[0]) for i, p in pairs.items()},
                   {i: frozenset(p[1]) for i, p in pairs.items()})

    @property
    def indices(self):
        return list(self.a)

    def satisfies_club(self):
        """``a_i`` and ``b_i`` disjoint for every index."""
        return all(not (self.a[i] & self.b[i]) for i in self.a)

    def _check(self, *idx):
        for i in idx:
            if i not in self.a:
                raise KeyError(f"unknown index {i!r}")

    def witnesses(self, i, j):
        return (self.a[i] & self.b[j]) | (self.a[j] & self.b[i])


_RECORD = re.compile(r"^\s*(\S+)\s*:\s*a\s*=\s*\{([^}]*)\}\s*;\s*b\s*=\s*\{([^}]*)\}\s*$")


def _int_set(body):
    return frozenset(int(x) for x in body.replace(",", " ").split())


def parse_pregap(text, horizon=None):
    """Read records ``i : a = {0, 3} ; b = {1}``, one per line."""
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        m = _RECORD.match(line)
        if not m:
            raise ValueError(f"line {lineno}: malformed pregap record")
        key = int(m.group(1)) if m.group(1).lstrip("-").isdigit() else m.group(1)
        if key in pairs:
            raise ValueError(f"line {lineno}: duplicate index {key!r}")
        pairs[key] = (_int_set(m.group(2)), _int_set(m.group(3)))
    return ConcretePregap.from_pairs(pairs, horizon)


def format_pregap(pregap):
    def fmt(s):
        return "{" + ", ".join(map(str, sorted(s))) + "}"
    return "".join(f"{i} : a = {fmt(pregap.a[i])} ; b = {fmt(pregap.b[i])}\n"
                   for i in pregap.indices)


def classify_K(pregap, i, j):
    pregap._check(i, j)
    if i == j:
        raise ValueError("K colours unordered pairs of distinct indices")
    return Label.K1 if pregap.witnesses(i, j) else Label.K0


def classify_L(pregap, i, j, k=0):
    pregap._check(i, j)
    return Label.L1 if any(n >= k for n in pregap.witnesses(i, j)) else Label.L0


def is_homogeneous(pregap, J, label, cut=0):
    J = list(J)
    pregap._check(*J)
    if label in (Label.K0, Label.K1):
        return all(classify_K(pregap, i, j) is label for i, j in combinations(J, 2))
    return all(classify_L(pregap, i, j, cut) is label
               for x, i in enumerate(J) for j in J[x:])


def min_cut(pregap, J):
    """Smallest ``k`` with every pair of ``J`` (diagonal included) in ``L0^k``."""
    J = list(J)
    pregap._check(*J)
    top = -1
    for x, i in enumerate(J):
        for j in J[x:]:
            w = pregap.witnesses(i, j)
            if w:
                top = max(top, max(w))
    return top + 1


def interpolates_mod_k(d, F, k):
    """True iff ``a - k`` lies in ``d`` and ``b - k`` misses ``d`` for all ``(a, b)``."""
    d = frozenset(d)
    return all(all(n in d for n in a if n >= k) and not any(n in d for n in b if n >= k)
               for a, b in F)


# --- Delta-systems and uniformization --------------------------------------

@dataclass(frozen=True)
class DeltaSystem:
    root: frozenset
    indices: tuple
    petals: tuple

    def __len__(self):
        return len(self.indices)

    def verify(self):
        return all(p & q == self.root for p, q in combinations(self.petals, 2))


def largest_delta_system(sets):
    """Largest subfamily whose pairwise intersections all equal one root.

    Exact: every candidate root is a pairwise intersection, and for a fixed
    root the problem is a maximum clique on the "intersect exactly in the
    root" graph.
    """
    sets = [frozenset(s) for s in sets]
    if not sets:
        return DeltaSystem(frozenset(), (), ())
    best = DeltaSystem(sets[0], (0,), (sets[0],))
    roots = {}
    for i, j in combinations(range(len(sets)), 2):
        roots.setdefault(sets[i] & sets[j], None)
    for root in sorted(roots, key=lambda r: (len(r), sorted(map(repr, r)))):
        cand = [i for i, s in enumerate(sets) if root <= s]
        if len(cand) <= len(best):
            continue
        g = nx.Graph()
        g.add_nodes_from(cand)
        g.add_edges_from((i, j) for i, j in combinations(cand, 2)
                         if sets[i] & sets[j] == root)
        clique, _ = nx.max_weight_clique(g, weight=None)
        if len(clique) > len(best):
            idx = tuple(sorted(clique))
            best = DeltaSystem(root, idx, tuple(sets[i] for i in idx))
    return best


def delta_system(sets, target_size):
    """A Delta-subsystem of at least ``target_size`` members, or None."""
    sets = list(sets)
    if target_size > len(sets):
        return None
    best = largest_delta_system(sets)
    return best if len(best) >= target_size else None


def uniformize(items, keys):
    """Largest subfamily on which every key function is constant.

    Ties go to the group whose first member appears earliest.
    """
    groups = {}
    for item in items:
        groups.setdefault(tuple(k(item) for k in keys), []).append(item)
    if not groups:
        return []
    return max(groups.values(), key=len)


def _coords_in(obj, out):
    if isinstance(obj, Coordinate):
        out.add(obj)
    elif isinstance(obj, PartialAssignment):
        out.update(obj)
    elif isinstance(obj, ClopenSet):
        for s in obj.cylinders():
            out.update(s)
    elif isinstance(obj, Mapping):
        for k, v in obj.items():
            _coords_in(k, out)
            _coords_in(v, out)
    elif isinstance(obj, (tuple, list, set, frozenset)):
        for x in obj:
            _coords_in(x, out)
    return out


def _canon(obj, label):
    if isinstance(obj, Coordinate):
        return label.get(obj, ("root", obj.block, obj.offset))
    if isinstance(obj, PartialAssignment):
        return ("pa",) + tuple(sorted(((_canon(c, label), b) for c, b in obj.items()),
                                      key=repr))
    if isinstance(obj, ClopenSet):
        return ("clopen",) + _canon(frozenset(obj.cylinders()), label)
    if isinstance(obj, Mapping):
        return ("map",) + tuple(sorted(((_canon(k, label), _canon(v, label))
                                        for k, v in obj.items()), key=repr))
    if isinstance(obj, (set, frozenset)):
        return ("set",) + tuple(sorted((_canon(x, label) for x in obj), key=repr))
    if isinstance(obj, (tuple, list)):
        return tuple(_canon(x, label) for x in obj)
    return obj


def isomorphism_type(structure, root=()):
    """Invariant under order-preserving relabelings that fix ``root``.

    Coordinates outside ``root`` are replaced by their rank among the
    non-root coordinates of the structure; root coordinates are kept.
    """
    root = set(root)
    free = sorted(c for c in _coords_in(structure, set()) if c not in root)
    label = {c: ("free", i) for i, c in enumerate(free)}
    return _canon(structure, label)


# --- names -----------------------------------------------------------------

@dataclass(frozen=True)
class RandomSubsetName:
    """Events ``[[n in a]]`` for ``n < horizon``."""

    horizon: int
    events: tuple

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        if self.horizon < 1 or len(self.events) != self.horizon:
            raise ValueError("need one event per n below a positive horizon")

    def __getitem__(self, n):
        if not 0 <= n < self.horizon:
            raise IndexError(f"n={n} outside horizon {self.horizon}")
        return self.events[n]

    def support(self, n):
        return self[n].support()

    def to_lines(self):
        return [str(e) for e in self.events]

    @classmethod
    def from_lines(cls, lines):
        events = [ClopenSet.parse(line) for line in lines]
        return cls(len(events), tuple(events))


def name_event(a, b, kind, index):
    """Boolean value of a statement about two names, truncated at the horizon."""
    if a.horizon != b.horizon:
        raise ValueError("names must share a horizon")
    M = a.horizon
    if kind == "intersection_at_n":
        return a[index] & b[index]
    if kind == "difference_at_n":
        return a[index] - b[index]
    if not 0 <= index <= M:
        raise IndexError(f"cut {index} outside horizon {M}")
    if kind == "subset_beyond_k":
        return meet_all(~a[n] | b[n] for n in range(index, M))
    if kind == "nonempty_intersection_beyond_k":
        return join_all(a[n] & b[n] for n in range(index, M))
    raise ValueError(f"unknown event kind {kind!r}")
