"""Seeded instance generators.  Every draw goes through ``SplitMix64``."""
from fractions import Fraction

from .chaincond import IndexedEventPair
from .construction import build_tower, extended_names
from .cube import ClopenSet, Coordinate, PartialAssignment, conditional, cylinder, join_all
from .gapcore import RandomSubsetName
from .rng import SplitMix64
from .souslin import SouslinInstance


def _rng(seed):
    return seed if isinstance(seed, SplitMix64) else SplitMix64(seed)


def random_assignment(rng, coords, length):
    return PartialAssignment((c, rng.bit()) for c in rng.sample(coords, length))


def random_clopen(seed, coords, max_cylinders=4, max_length=None):
    """Union of up to ``max_cylinders`` random cylinders over ``coords`` (possibly empty)."""
    rng = _rng(seed)
    coords = list(coords)
    max_length = max_length or len(coords)
    count = rng.below(max_cylinders + 1)
    return join_all(cylinder(random_assignment(rng, coords, 1 + rng.below(max_length)))
                    for _ in range(count))


def unfavourable_instance(seed, size=None):
    """Pairs ``(x_i, y_i)`` on private blocks with ``x_i & y_i = 0``, plus index sets A, B.

    Roughly one pair in eight is degenerate (an empty side or a whole ``x``)
    so the equality cases are exercised.
    """
    rng = _rng(seed)
    size = size or 1 + rng.below(5)
    pairs = {}
    for i in range(size):
        coords = [Coordinate(i, o) for o in range(3)]
        kind = rng.below(8)
        if kind == 0:
            x, y = ClopenSet.whole(), ClopenSet.empty()
        elif kind == 1:
            x, y = ClopenSet.empty(), random_clopen(rng, coords)
        else:
            x = random_clopen(rng, coords)
            y = random_clopen(rng, coords) - x
        pairs[i] = (x, y)
    A = [i for i in range(size) if rng.bit()]
    B = [i for i in range(size) if rng.bit()]
    return pairs, A, B


def extraction_instance(seed, N=200, delta=Fraction(3, 10)):
    """Indexed event pairs with ``mu(x | [s]) > delta``.

    The ``s`` share a small pool of root coordinates (block 1) and carry
    private coordinates (block ``2 + i``); the ``x`` live on block 0.
    """
    rng = _rng(seed)
    events = [Coordinate(0, o) for o in range(6)]
    roots = [Coordinate(1, o) for o in range(3)]
    pairs = []
    for i in range(N):
        shared = [c for c in roots if rng.below(4) == 0]
        private = [Coordinate(2 + i, o) for o in range(1 + rng.below(2))]
        s = PartialAssignment((c, rng.bit()) for c in shared + private)
        while True:
            x = random_clopen(rng, events + shared, max_cylinders=3, max_length=3)
            if conditional(x, cylinder(s)) > delta:
                break
        pairs.append(IndexedEventPair(x, s, i))
    return pairs


def name_pair(seed, M=64, width=3):
    """Two names whose events at ``n`` live on offsets ``[width*n, width*(n+1))`` of block 0.

    The reserved split coordinate for ``n`` is ``(1, n)``.
    """
    rng = _rng(seed)
    a, b = [], []
    for n in range(M):
        coords = [Coordinate(0, width * n + o) for o in range(width)]
        a.append(random_clopen(rng, coords, max_cylinders=2))
        b.append(random_clopen(rng, coords, max_cylinders=2))
    pools = lambda n: [Coordinate(1, n)]  # noqa: E731
    return RandomSubsetName(M, tuple(a)), RandomSubsetName(M, tuple(b)), pools


def greedy_cylinder(x):
    """Descend the support in order, always into the heavier cofactor (ties go to 0)."""
    t = {}
    rest = x
    for c in sorted(x.support()):
        if rest.is_whole():
            break
        low, high = rest.restrict({c: 0}), rest.restrict({c: 1})
        t[c] = 1 if high.measure() > low.measure() else 0
        rest = high if t[c] else low
    if not x.restrict(t).is_whole():
        raise AssertionError("greedy descent did not end inside the event")
    return PartialAssignment(t)


def souslin_instance(seed, N=40, A=4, M=64, max_bits=3):
    """Conditions over the extended names of the tower construction.

    Each condition has a singleton tuple ``{alpha}`` and is a cylinder inside
    ``c & ~bad``, where ``c`` is a random cylinder on the condition's private
    block ``A + xi`` and ``bad`` is the tuple's own bad event above the cut.
    """
    rng = _rng(seed)
    tower = build_tower(A, M)
    names = [extended_names(tower, alpha) for alpha in range(A)]
    a = [n[0] for n in names]
    b = [n[1] for n in names]
    cut = rng.below(M // 2)
    conditions, gammas = [], []
    for xi in range(N):
        alpha = rng.below(A)
        bits = 1 + rng.below(max_bits)
        t = PartialAssignment((Coordinate(A + xi, o), rng.bit()) for o in range(bits))
        # the bad event is a join over n of events on disjoint windows, so
        # descending into its complement factorizes window by window
        for n in range(cut, M):
            t = t | greedy_cylinder(~(a[alpha][n] & b[alpha][n]))
        conditions.append(cylinder(t))
        gammas.append((alpha,))
    return SouslinInstance(a, b, conditions, gammas, cut, "cube-root")
