"""Explicit construction of the base names, the tower and the extended names.

Block ``alpha`` holds the coordinates ``(alpha, offset)``.  For each ``n``
the base names of block ``alpha`` live in the window
``[n * clog2(n + 1), n * clog2(n + 1) + clog2(n + 2))`` where ``clog2`` is
the ceiling of the binary logarithm; ``c_alpha`` asks for the all-zero
pattern there and ``d_alpha`` for the pattern encoding 1.

All verifiers use exact integer or rational arithmetic.  Cube roots are
compared by cubing, so ``|T| <= (n + 1) ** (1/3)`` is tested as
``|T| ** 3 <= n + 1``.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .cube import (ClopenSet, Coordinate, Dyadic, PartialAssignment, PreconditionError,
                   cylinder, join_all, split_half)
from .gapcore import RandomSubsetName


def clog2(x):
    """Ceiling of log2(x) for a positive integer."""
    if x < 1:
        raise ValueError("clog2 needs a positive integer")
    return (x - 1).bit_length()


def icbrt(x):
    """Floor of the real cube root of a nonnegative integer."""
    if x < 0:
        raise ValueError("icbrt needs a nonnegative integer")
    if x < 2:
        return x
    r = 1 << ((x.bit_length() + 2) // 3)
    while True:
        nxt = (2 * r + x // (r * r)) // 3
        if nxt >= r:
            break
        r = nxt
    while r ** 3 > x:
        r -= 1
    while (r + 1) ** 3 <= x:
        r += 1
    return r


def window(n):
    """``(start, length)`` of the offset window used at ``n``."""
    return n * clog2(n + 1), clog2(n + 2)


def phi(block, length, value, start=0):
    """Bits of ``value mod 2**length`` on offsets ``start .. start+length-1``, low bit first."""
    if length < 0:
        raise ValueError("length must be nonnegative")
    v = value % (1 << length) if length else 0
    return PartialAssignment((Coordinate(block, start + k), (v >> k) & 1)
                             for k in range(length))


def base_assignments(alpha, n):
    start, length = window(n)
    return phi(alpha, length, 0, start), phi(alpha, length, 1, start)


def base_names(alpha, M):
    if M < 1:
        raise ValueError("horizon must be positive")
    cs, ds = [], []
    for n in range(M):
        s, t = base_assignments(alpha, n)
        cs.append(cylinder(s))
        ds.append(cylinder(t))
    return RandomSubsetName(M, tuple(cs)), RandomSubsetName(M, tuple(ds))


# --- reports ---------------------------------------------------------------

@dataclass
class Check:
    tag: str
    passed: bool
    values: dict = field(default_factory=dict)

    def record(self):
        return {"tag": self.tag, "passed": self.passed,
                **{k: str(v) for k, v in self.values.items()}}


@dataclass
class Report:
    checks: list = field(default_factory=list)

    def add(self, tag, passed, **values):
        self.checks.append(Check(tag, bool(passed), values))
        return passed

    def extend(self, other):
        self.checks.extend(other.checks)
        return self

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def records(self):
        return [c.record() for c in self.checks]


def verify_blocks(M):
    """Window arithmetic: the window at ``n`` ends before the one at ``n + 1`` starts.

    That is the inequality ``(n+1) clog2(n+2) - n clog2(n+1) >= clog2(n+2)``;
    it makes windows within a block pairwise disjoint, so the events at
    different ``n`` are determined by disjoint coordinate sets.
    """
    report = Report()
    bad = []
    prev_end = 0
    for n in range(M):
        start, length = window(n)
        nxt = (n + 1) * clog2(n + 2)
        if nxt - start < length or start < prev_end:
            bad.append(n)
            if len(bad) >= 10:
                break
        prev_end = start + length
    report.add("eq:14", not bad, checked=M, first_failures=bad)
    return report


def verify_base_measures(A, M):
    """Measure law and sandwich ``1/(2n+4) < mu <= 1/(n+2)`` for every base event."""
    report = Report()
    law_bad, sandwich_bad, disjoint_bad = [], [], []
    for alpha in range(A):
        c, d = base_names(alpha, M)
        for n in range(M):
            expected = Dyadic(1, clog2(n + 2))
            mc, md = c[n].measure(), d[n].measure()
            if mc != expected or md != expected:
                law_bad.append((alpha, n, mc, md))
            if not Fraction(1, 2 * n + 4) < mc <= Fraction(1, n + 2):
                sandwich_bad.append((alpha, n, mc))
            if not (c[n] & d[n]).is_empty():
                disjoint_bad.append((alpha, n))
    report.add("eq:23", not law_bad, checked=A * M, failures=law_bad[:10])
    report.add("eq:30", not sandwich_bad, checked=A * M, failures=sandwich_bad[:10])
    report.add("eq:28", not disjoint_bad, checked=A * M, failures=disjoint_bad[:10])
    return report


def verify_cross_terms(samples):
    """``mu(c_alpha & d_beta at n) = 2**(-2 clog2(n+2)) <= 1/(n+2)**2`` for ``alpha != beta``."""
    report = Report()
    for alpha, beta, n in samples:
        s, _ = base_assignments(alpha, n)
        _, t = base_assignments(beta, n)
        value = (cylinder(s) & cylinder(t)).measure()
        expected = Dyadic(1, 2 * clog2(n + 2))
        report.add("eq:26", value == expected and value <= Fraction(1, (n + 2) ** 2),
                   alpha=alpha, beta=beta, n=n, measure=value, expected=expected)
    return report


# --- tower -----------------------------------------------------------------

def tower_reach(n):
    """Number of ``xi`` with ``2 (xi+1)**2 <= (n+1)**(1/3)``, i.e. ``8 (xi+1)**6 <= n+1``."""
    r = 0
    while 8 * (r + 1) ** 6 <= n + 1:
        r += 1
    return r


def containment_threshold(xi):
    """First ``n`` from which ``xi`` (and everything below it) joins every higher ``T_alpha(n)``."""
    return 8 * (xi + 1) ** 6 - 1


@dataclass(frozen=True)
class Tower:
    generators: int
    horizon: int
    entries: tuple  # entries[alpha][n] is a sorted tuple of indices

    def __getitem__(self, key):
        alpha, n = key
        return self.entries[alpha][n]


def build_tower(A, M):
    if A < 1 or M < 1:
        raise ValueError("tower needs A >= 1 and M >= 1")
    reach = [tower_reach(n) for n in range(M)]
    entries = tuple(
        tuple(tuple(range(min(alpha, reach[n]))) + (alpha,) for n in range(M))
        for alpha in range(A))
    return Tower(A, M, entries)


def verify_tower(tower):
    """Membership, eventual containment and both cardinality bounds.

    ``|T| <= cbrt(n+1)`` is tested as ``|T|**3 <= n+1`` and the slack bound
    ``|T| <= 1 + sqrt(cbrt(n+1) / 2)`` as ``8 (|T| - 1)**6 <= n + 1``.
    Containment gets one record per pair ``xi < alpha`` with the formula
    threshold and the threshold observed inside the horizon.
    """
    report = Report()
    A, M = tower.generators, tower.horizon
    bad1, bad3, bad4 = [], [], []
    for alpha in range(A):
        for n in range(M):
            T = tower[alpha, n]
            if alpha not in T or any(not 0 <= x <= alpha for x in T):
                bad1.append((alpha, n))
            size = len(set(T))
            if size ** 3 > n + 1:
                bad3.append((alpha, n, size))
            if 8 * (size - 1) ** 6 > n + 1:
                bad4.append((alpha, n, size))
    report.add("(m)(1)", not bad1, checked=A * M, failures=bad1[:10])
    report.add("(m)(3)", not bad3, checked=A * M, failures=bad3[:10])
    report.add("(m)(4)", not bad4, checked=A * M, failures=bad4[:10], form="slack")
    for xi, alpha in combinations(range(A), 2):
        formula = containment_threshold(xi)
        holds = all(set(tower[xi, n]) <= set(tower[alpha, n]) for n in range(formula, M))
        observed = M
        while observed > 0 and set(tower[xi, observed - 1]) <= set(tower[alpha, observed - 1]):
            observed -= 1
        report.add("(m)(2)", holds, xi=xi, alpha=alpha, threshold=formula,
                   observed=observed if observed < M else "beyond horizon")
    return report


def tower_to_json(tower):
    return {"generators": tower.generators, "horizon": tower.horizon,
            "entries": [[list(T) for T in row] for row in tower.entries]}


def tower_from_json(data):
    return Tower(int(data["generators"]), int(data["horizon"]),
                 tuple(tuple(tuple(int(x) for x in T) for T in row)
                       for row in data["entries"]))


# --- extended names --------------------------------------------------------

def extended_names(tower, alpha):
    """Joins of the base cylinders of every block listed in ``T_alpha(n)``."""
    M = tower.horizon
    a_events, b_events = [], []
    for n in range(M):
        pairs = [base_assignments(xi, n) for xi in tower[alpha, n]]
        a_events.append(join_all(cylinder(s) for s, _ in pairs))
        b_events.append(join_all(cylinder(t) for _, t in pairs))
    return RandomSubsetName(M, tuple(a_events)), RandomSubsetName(M, tuple(b_events))


def all_extended_names(tower):
    return [extended_names(tower, alpha) for alpha in range(tower.generators)]


def verify_extended(tower, samples, names=None):
    """Bound chain for ``mu(a_alpha & b_beta at n)`` on the given ``(alpha, beta, n)``.

    Checks ``mu(a & b) <= mu(a) mu(b) <= (cbrt(n+1)/(n+2))**2 < (n+1)**(-4/3)``
    by cubing, plus ``c_alpha <= a_alpha`` at ``n``.
    """
    names = names or {}
    report = Report()

    def get(alpha):
        if alpha not in names:
            names[alpha] = extended_names(tower, alpha)
        return names[alpha]

    for alpha, beta, n in samples:
        a, _ = get(alpha)
        _, b = get(beta)
        pa, pb = Fraction(a[n].measure()), Fraction(b[n].measure())
        q = Fraction((a[n] & b[n]).measure())
        product = pa * pb
        middle = product ** 3 * (n + 2) ** 6 <= (n + 1) ** 2
        final = q ** 3 * (n + 1) ** 4 < 1
        s, _ = base_assignments(alpha, n)
        below = cylinder(s) <= a[n]
        report.add("eq:62", q <= product and middle and final and below,
                   alpha=alpha, beta=beta, n=n, measure=q, product=product,
                   bound="(n+1)^(-4/3)")
    return report


# --- weights ---------------------------------------------------------------

class WeightSequence:
    """A positive summable weight ``h`` known through exact rational bounds."""

    def lower(self, n):
        raise NotImplementedError

    def upper(self, n):
        raise NotImplementedError

    def dominates(self, n, q):
        """Exactly decide ``q <= h(n)``."""
        raise NotImplementedError

    def tail_majorant(self, M):
        """Rational upper bound on the infinite tail ``sum_{n >= M} h(n)``."""
        raise NotImplementedError

    def partial_sums(self, M):
        out, total = [], Fraction(0)
        for n in range(M):
            total += self.upper(n)
            out.append(total)
        return out

    def _suffix_sums(self, M):
        cache = self.__dict__.setdefault("_suffix_cache", {})
        if M not in cache:
            sums = [Fraction(0)] * (M + 1)
            for n in range(M - 1, -1, -1):
                sums[n] = sums[n + 1] + self.upper(n)
            cache[M] = sums
        return cache[M]

    def tail_upper(self, p, M, *, majorant=True):
        """Upper bound on ``sum_{n >= p} h(n)``.

        With ``majorant=False`` the names are taken to vanish beyond the
        horizon, so only the terms below ``M`` count.
        """
        suffix = self._suffix_sums(M)
        total = suffix[min(max(p, 0), M)]
        if majorant:
            total += self.tail_majorant(max(p, M))
        return total


class InverseSquareWeight(WeightSequence):
    """``h(n) = 1 / (n + 2)**2``."""

    def lower(self, n):
        return Fraction(1, (n + 2) ** 2)

    upper = lower

    def dominates(self, n, q):
        return q <= self.lower(n)

    def tail_majorant(self, M):
        return Fraction(1, M + 1)


class CubeRootWeight(WeightSequence):
    """``h(n) = (n + 1) ** (-4/3)``, bracketed by ``2**-bits``-accurate cube roots."""

    def __init__(self, bits=20):
        self.bits = bits

    def _root_bounds(self, n):
        scale = 1 << self.bits
        r = icbrt((n + 1) * scale ** 3)
        lo = Fraction(r, scale)
        hi = lo if r ** 3 == (n + 1) * scale ** 3 else Fraction(r + 1, scale)
        return lo, hi

    def lower(self, n):
        _, hi = self._root_bounds(n)
        return 1 / ((n + 1) * hi)

    def upper(self, n):
        lo, _ = self._root_bounds(n)
        return 1 / ((n + 1) * lo)

    def dominates(self, n, q):
        return q <= 0 or q ** 3 * (n + 1) ** 4 <= 1

    def tail_majorant(self, M):
        # sum_{n >= M} (n+1)^(-4/3) <= integral_M^inf x^(-4/3) dx = 3 M^(-1/3)
        M = max(M, 1)
        return Fraction(3, icbrt(M))


# --- continuous representatives ---------------------------------------------

@dataclass
class Representatives:
    c: RandomSubsetName
    d: RandomSubsetName
    report: Report
    pool_used: dict


def _h_lower(h, n):
    if isinstance(h, WeightSequence):
        return h.lower(n)
    return Fraction(h(n))


def continuous_representatives(a, b, h, pools):
    """Per-``n`` disjoint events close to ``a`` and ``b``.

    Where ``a`` and ``b`` overlap at ``n``, half of the overlap ``E_n`` goes
    to ``c`` and the other half to ``d``: ``C_n = a - (b - E_n)``,
    ``D_n = (b - E_n) - C_n``.  Both then differ from the inputs by half
    the overlap.  ``pools(n)`` lists reserved coordinates for the split
    when no half-measure subset is available inside the inputs'
    coordinates; at most one is used per ``n`` and it is reported.
    """
    if a.horizon != b.horizon:
        raise ValueError("names must share a horizon")
    M = a.horizon
    report = Report()
    cs, ds, used = [], [], {}
    for n in range(M):
        overlap = a[n] & b[n]
        mu_o = Fraction(overlap.measure())
        slack = mu_o + _h_lower(h, n)
        if not slack > 0:
            raise PreconditionError(f"eq:70 fails at n={n}: overlap and weight both vanish")
        if overlap.is_empty():
            C, D = a[n], b[n]
        else:
            pool = pools(n) if callable(pools) else pools.get(n, ())
            E = split_half(overlap, pool)
            C = a[n] - (b[n] - E)
            D = (b[n] - E) - C
        inputs = a[n].support() | b[n].support()
        extra = (C.support() | D.support()) - inputs
        if extra:
            used[n] = sorted(extra)
        report.add("lemma:a", (C & D).is_empty(), n=n)
        report.add("lemma:b", len(extra) <= 1, n=n, strict=not extra,
                   extra=",".join(map(str, sorted(extra))))
        err_c = Fraction((a[n] ^ C).measure())
        err_d = Fraction((b[n] ^ D).measure())
        report.add("lemma:c", err_c < slack, n=n, error=err_c, bound=slack)
        report.add("lemma:d", err_d < slack, n=n, error=err_d, bound=slack)
        cs.append(C)
        ds.append(D)
    return Representatives(RandomSubsetName(M, tuple(cs)), RandomSubsetName(M, tuple(ds)),
                           report, used)


def tail_mismatch(a, c, k):
    """``OR_{k <= n < M} [[n in a xor c]]`` with its exact measure."""
    event = join_all(a[n] ^ c[n] for n in range(k, a.horizon))
    return event, event.measure()


def summability_diagnostic(a, M):
    """Partial sums over ``a`` of the base event measures and of ``1/(n+1)``."""
    a = sorted(set(a))
    if any(not 0 <= n < M for n in a):
        raise ValueError(f"indices must lie in range({M})")
    measures, harmonic = [], []
    total_m, total_h = Fraction(0), Fraction(0)
    for n in a:
        total_m += Fraction(1, 1 << clog2(n + 2))
        total_h += Fraction(1, n + 1)
        measures.append(Dyadic.from_fraction(total_m))
        harmonic.append(total_h)
    return {"indices": a, "measure_sums": measures, "harmonic_sums": harmonic,
            "measure_total": Dyadic.from_fraction(total_m), "harmonic_total": total_h}
