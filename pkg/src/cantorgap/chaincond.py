"""Correlation inequality for disjoint independent pairs and pair extraction.

``gillis_extract`` looks for a large subfamily of events whose pairwise
meets all exceed ``delta**2``; ``conditional_extract`` does the same for
conditional probabilities ``mu(x & y | [s] & [t])`` by reducing to the
unconditional case below a common trace.

The unrestricted conditional analogue (arbitrary conditioning events in
place of cylinders) is false, so nothing here reports success unless every
returned pair has been checked exactly.
"""
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import networkx as nx

from .cube import (ClopenSet, PartialAssignment, PreconditionError, conditional,
                   cylinder, determining_coords, join_all, project_below)
from .gapcore import largest_delta_system, uniformize

EXACT_CLIQUE_LIMIT = 20


@dataclass(frozen=True)
class IndexedEventPair:
    x: ClopenSet
    s: PartialAssignment
    tag: object = None

    def __post_init__(self):
        if not isinstance(self.s, PartialAssignment):
            object.__setattr__(self, "s", PartialAssignment(self.s))


@dataclass(frozen=True)
class Unfavourable:
    lhs: Fraction
    rhs: Fraction
    equality: bool
    predicted_equality: bool


def unfavourable_check(pairs, A, B):
    """Compare ``mu(OR_A x & OR_B y)`` with ``mu(OR_A x) * mu(OR_B y)``.

    ``pairs`` maps an index to ``(x_i, y_i)``.  The pairs must be
    determined on pairwise disjoint coordinate sets and each ``x_i & y_i``
    must be empty.  ``predicted_equality`` is the closed-form prediction:
    equality holds iff no index carries nonzero ``x_i`` and ``y_i`` in both
    ``A`` and ``B``, or some ``x_i`` (``i`` in ``A``) or ``y_i`` (``i`` in
    ``B``) is the whole space.
    """
    pairs = dict(pairs)
    used = {}
    for i, (x, y) in pairs.items():
        if not (x & y).is_empty():
            raise PreconditionError(f"x and y meet at index {i!r}")
        for c in determining_coords(x) | determining_coords(y):
            if used.setdefault(c, i) != i:
                raise PreconditionError(
                    f"indices {used[c]!r} and {i!r} share coordinate {c}")
    A, B = list(A), list(B)
    X = join_all(pairs[i][0] for i in A)
    Y = join_all(pairs[i][1] for i in B)
    lhs = Fraction((X & Y).measure())
    rhs = Fraction(X.measure()) * Fraction(Y.measure())
    if lhs > rhs:
        raise AssertionError(f"correlation inequality violated: {lhs} > {rhs}")
    live_a = {i for i in A if not pairs[i][0].is_empty()}
    live_b = {i for i in B if not pairs[i][1].is_empty()}
    predicted = (not (live_a & live_b)
                 or any(pairs[i][0].is_whole() for i in A)
                 or any(pairs[i][1].is_whole() for i in B))
    return Unfavourable(lhs, rhs, lhs == rhs, predicted)


@dataclass
class Extraction:
    members: tuple
    success: bool
    method: str = ""
    failed_stage: str = None
    transcript: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps({"members": list(self.members), "success": self.success,
                           "method": self.method, "failed_stage": self.failed_stage,
                           "transcript": self.transcript}, indent=2, default=str)


def _max_clique(g):
    if g.number_of_nodes() == 0:
        return []
    if g.number_of_nodes() < EXACT_CLIQUE_LIMIT:
        clique, _ = nx.max_weight_clique(g, weight=None)
        return sorted(clique)
    order = sorted(g.nodes, key=lambda v: (-g.degree(v), v))
    best = []
    for start in order[:10]:
        clique = [start]
        nbrs = set(g[start])
        for v in order:
            if v in nbrs:
                clique.append(v)
                nbrs &= set(g[v])
        if len(clique) > len(best):
            best = clique
    return sorted(best)


def _square_bound(delta, delta_squared):
    if delta_squared is not None:
        return Fraction(delta_squared)
    return Fraction(delta) ** 2


def _exceeds(value, delta, d2):
    # value > delta, decided exactly even when only delta**2 is rational
    if delta is not None:
        return value > Fraction(delta)
    return value > 0 and value * value > d2


def gillis_extract(events, delta, threshold, *, delta_squared=None):
    """Subfamily of indices with ``mu(x & y) > delta**2`` pairwise.

    Exact maximum clique below ``EXACT_CLIQUE_LIMIT`` events, greedy
    clique growth above.  Pass ``delta=None, delta_squared=q`` when only the
    square of the bound is rational.
    """
    events = list(events)
    d2 = _square_bound(delta, delta_squared)
    for i, x in enumerate(events):
        if not _exceeds(Fraction(x.measure()), delta, d2):
            raise PreconditionError(f"event {i} does not exceed delta")
    g = nx.Graph()
    g.add_nodes_from(range(len(events)))
    for i, j in combinations(range(len(events)), 2):
        if (events[i] & events[j]).measure() > d2:
            g.add_edge(i, j)
    members = _max_clique(g)
    for i, j in combinations(members, 2):
        if not (events[i] & events[j]).measure() > d2:
            raise AssertionError(f"pair ({i}, {j}) failed exact verification")
    method = "exact" if len(events) < EXACT_CLIQUE_LIMIT else "greedy"
    return Extraction(tuple(members), len(members) >= threshold, method)


def conditional_extract(pairs, delta, threshold, *, delta_squared=None):
    """Subfamily with ``mu(x & y | [s] & [t]) > delta**2`` for all members.

    Stages: Delta-system on the domains of the ``s``; uniform size of the
    petals and uniform trace on the root; projection below the trace; pair
    extraction in the projected algebra; exact verification in the
    original algebra.  Returned members are positions in ``pairs``.
    """
    pairs = [p if isinstance(p, IndexedEventPair) else IndexedEventPair(*p) for p in pairs]
    d2 = _square_bound(delta, delta_squared)
    for i, p in enumerate(pairs):
        if not _exceeds(conditional(p.x, cylinder(p.s)), delta, d2):
            raise PreconditionError(f"pair {i}: conditional measure does not exceed delta")

    stages = []
    out = Extraction((), False, transcript={"stages": stages})

    def stage(name, survivors):
        stages.append({"stage": name, "survivors": list(survivors)})
        if len(survivors) < threshold:
            out.failed_stage = name
            out.members = tuple(survivors)
            return False
        return True

    if not stage("input", range(len(pairs))):
        return out
    ds = largest_delta_system([p.s.domain for p in pairs])
    root = ds.root
    survivors = list(ds.indices)
    if not stage("delta_system", survivors):
        return out
    survivors = uniformize(survivors, [lambda i: len(pairs[i].s) - len(root),
                                       lambda i: pairs[i].s.restrict(root)])
    if not stage("uniformize", survivors):
        return out
    t = pairs[survivors[0]].s.restrict(root)
    m = len(pairs[survivors[0]].s) - len(root)
    sigma = Fraction(1, 2 ** m)
    out.transcript.update(root=sorted(map(str, root)), trace=str(t), m=m, sigma=str(sigma))

    projected = []
    for i in survivors:
        p = pairs[i]
        cyl = cylinder(p.s)
        if Fraction(project_below(cyl, t).measure()) != sigma:
            raise AssertionError("projected cylinders must all have measure sigma")
        projected.append(project_below(p.x & cyl, t))
    d2_proj = d2 * sigma * sigma
    inner = gillis_extract(projected, None if delta is None else Fraction(delta) * sigma,
                           threshold, delta_squared=d2_proj)
    survivors = [survivors[j] for j in inner.members]
    out.method = inner.method
    if not stage("gillis", survivors):
        return out

    for i, j in combinations(survivors, 2):
        pi, pj = pairs[i], pairs[j]
        cond = cylinder(pi.s) & cylinder(pj.s)
        value = conditional(pi.x & pj.x, cond)
        if not value > d2:
            raise AssertionError(f"pair ({i}, {j}) failed exact verification")
        # conditioning is unchanged by passing to the projected algebra
        pv = conditional(project_below(pi.x & pj.x & cond, t), project_below(cond, t))
        if pv != value:
            raise AssertionError("projected and original conditionals disagree")
    stage("verified", survivors)
    out.members = tuple(survivors)
    out.success = True
    return out
