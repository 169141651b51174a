from fractions import Fraction
from itertools import product

from hypothesis import settings
from hypothesis import strategies as st

from cantorgap.cube import ClopenSet, Coordinate, PartialAssignment

# fixed example streams keep the suite reproducible
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")

COORDS = [Coordinate(b, o) for b in range(2) for o in range(3)]


@st.composite
def assignments(draw, coords=COORDS, max_size=4):
    chosen = draw(st.lists(st.sampled_from(coords), unique=True, max_size=max_size))
    return PartialAssignment({c: draw(st.integers(0, 1)) for c in chosen})


@st.composite
def clopens(draw, coords=COORDS):
    cyls = draw(st.lists(assignments(coords), max_size=4))
    return ClopenSet.from_cylinders(cyls)


def points(coords):
    coords = sorted(coords)
    for bits in product((0, 1), repeat=len(coords)):
        yield dict(zip(coords, bits))


def brute_measure(x, coords=COORDS):
    """Fraction of points of the finite cube over ``coords`` that lie in ``x``."""
    coords = sorted(set(coords) | set(x.support()))
    pts = list(points(coords))
    return Fraction(sum(x.contains(p) for p in pts), len(pts))
