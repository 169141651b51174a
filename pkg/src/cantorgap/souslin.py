"""Souslin instances and the two pair finders.

An instance fixes names ``a_alpha, b_alpha`` below a horizon ``M``,
conditions ``x_xi`` with tuples ``Gamma_xi`` and a cut ``k``.  The bad event
of a pair of tuples is

    OR_{alpha in G, beta in H} OR_{k <= n < M} (a_alpha & b_beta)[n] | (a_beta & b_alpha)[n]

and two conditions merge when ``x_xi & x_eta`` survives the removal of
the bad event.  ``find_pair_bruteforce`` scans all pairs;
``find_pair_pipeline`` follows the refinement argument and returns a
certificate whose final bound is checked exactly.
"""
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .chaincond import IndexedEventPair, conditional_extract
from .construction import CubeRootWeight, InverseSquareWeight
from .cube import (ClopenSet, PartialAssignment, PreconditionError, conditional, cylinder,
                   join_all)
from .gapcore import RandomSubsetName, isomorphism_type, largest_delta_system, uniformize

WEIGHTS = {"cube-root": CubeRootWeight(), "inverse-square": InverseSquareWeight()}


@dataclass
class SouslinInstance:
    a: list
    b: list
    conditions: list
    gammas: list
    cut: int
    weight: str = "cube-root"
    _pair_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.a) != len(self.b) or not self.a:
            raise PreconditionError("need the same positive number of a- and b-names")
        M = self.a[0].horizon
        if any(n.horizon != M for n in self.a + self.b):
            raise PreconditionError("all names must share one horizon")
        if len(self.conditions) != len(self.gammas):
            raise PreconditionError("one tuple per condition")
        if not 0 <= self.cut <= M:
            raise PreconditionError(f"cut {self.cut} outside [0, {M}]")
        self.gammas = [tuple(sorted(set(g))) for g in self.gammas]
        for xi, (x, g) in enumerate(zip(self.conditions, self.gammas)):
            if x.is_empty():
                raise PreconditionError(f"condition {xi} has measure zero")
            if any(not 0 <= alpha < len(self.a) for alpha in g):
                raise PreconditionError(f"tuple of condition {xi} names an unknown index")
        if self.weight not in WEIGHTS:
            raise PreconditionError(f"unknown weight {self.weight!r}")

    @property
    def horizon(self):
        return self.a[0].horizon

    @property
    def h(self):
        return WEIGHTS[self.weight]

    def __len__(self):
        return len(self.conditions)

    def meet_tail(self, alpha, beta, start=None, stop=None):
        """``OR_{start <= n < stop} a_alpha[n] & b_beta[n]``; defaults ``[cut, M)``."""
        start = self.cut if start is None else start
        stop = self.horizon if stop is None else stop
        key = (alpha, beta, start, stop)
        if key not in self._pair_cache:
            self._pair_cache[key] = join_all(self.a[alpha][n] & self.b[beta][n]
                                             for n in range(start, stop))
        return self._pair_cache[key]

    def bad_event(self, G, H):
        return join_all(self.meet_tail(al, be) | self.meet_tail(be, al)
                        for al in G for be in H)

    def block_support(self, alpha, n):
        return self.a[alpha][n].support() | self.b[alpha][n].support()

    # --- preconditions ----------------------------------------------------

    def check_invariant(self):
        """Condition ``x_xi & OR_{alpha, beta in Gamma_xi} [[a_alpha & b_beta - k != 0]] = 0``."""
        for xi, (x, g) in enumerate(zip(self.conditions, self.gammas)):
            bad = join_all(self.meet_tail(al, be) for al in g for be in g)
            if not (x & bad).is_empty():
                raise PreconditionError(f"condition {xi} meets its own bad event (eq:52)")

    def check_layout(self):
        """Events at different ``n`` use disjoint coordinates."""
        seen = {}
        for n in range(self.horizon):
            for alpha in range(len(self.a)):
                for c in self.block_support(alpha, n):
                    if seen.setdefault(c, n) != n:
                        raise PreconditionError(
                            f"coordinate {c} is used at n={seen[c]} and n={n} (eq:56)")

    def check_weight(self):
        """``mu(a_alpha & b_beta at n) <= h(n)`` for all ``alpha, beta, n``."""
        h = self.h
        for n in range(self.horizon):
            for al in range(len(self.a)):
                for be in range(len(self.b)):
                    q = Fraction((self.a[al][n] & self.b[be][n]).measure())
                    if not h.dominates(n, q):
                        raise PreconditionError(
                            f"eq:10 fails at alpha={al}, beta={be}, n={n}: {q}")

    # --- serialization ----------------------------------------------------

    def to_json(self):
        return json.dumps({
            "horizon": self.horizon, "cut": self.cut, "weight": self.weight,
            "names": [{"a": a.to_lines(), "b": b.to_lines()} for a, b in zip(self.a, self.b)],
            "conditions": [str(x) for x in self.conditions],
            "gammas": [list(g) for g in self.gammas],
        }, indent=1)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
            names = data["names"]
            a = [RandomSubsetName.from_lines(e["a"]) for e in names]
            b = [RandomSubsetName.from_lines(e["b"]) for e in names]
            conds = [ClopenSet.parse(s) for s in data["conditions"]]
            return cls(a, b, conds, [tuple(g) for g in data["gammas"]], int(data["cut"]),
                       data.get("weight", "cube-root"))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, PreconditionError):
                raise
            raise PreconditionError(f"malformed instance: {exc}") from exc


@dataclass(frozen=True)
class PairEvaluation:
    compatible: bool
    residual_measure: Fraction
    overlap: bool
    residual: ClopenSet


def eval_pair(instance, xi, eta):
    if xi == eta:
        raise ValueError("eval_pair needs two distinct indices")
    meet = instance.conditions[xi] & instance.conditions[eta]
    residual = meet - instance.bad_event(instance.gammas[xi], instance.gammas[eta])
    return PairEvaluation(not meet.is_empty() and not residual.is_empty(),
                          Fraction(residual.measure()), not meet.is_empty(), residual)


def find_pair_bruteforce(instance):
    instance.check_invariant()
    for xi, eta in combinations(range(len(instance)), 2):
        if eval_pair(instance, xi, eta).compatible:
            return xi, eta
    return None


# --- pipeline ----------------------------------------------------------------

@dataclass
class PairCertificate:
    xi: int
    eta: int
    t_xi: PartialAssignment
    t_eta: PartialAssignment
    p: int
    l: int
    root: frozenset
    epsilon: Fraction
    m: int
    tau: Fraction
    residual: ClopenSet
    residual_measure: Fraction
    bound: Fraction
    checks: list = field(default_factory=list)

    def verify(self, instance):
        """Recompute the final bound from scratch."""
        t = self.t_xi | self.t_eta
        cyl = cylinder(t)
        ev = eval_pair(instance, self.xi, self.eta)
        residual = cyl & ev.residual
        return (residual == self.residual
                and Fraction(residual.measure()) > (1 - self.epsilon) * Fraction(cyl.measure()))

    def to_dict(self):
        return {"xi": self.xi, "eta": self.eta, "t_xi": str(self.t_xi),
                "t_eta": str(self.t_eta), "p": self.p, "l": self.l,
                "root": sorted(map(str, self.root)), "epsilon": str(self.epsilon),
                "m": self.m, "tau": str(self.tau), "residual": str(self.residual),
                "residual_measure": str(self.residual_measure), "bound": str(self.bound),
                "checks": self.checks}


@dataclass
class PipelineResult:
    certificate: PairCertificate = None
    failed_stage: str = None
    reason: str = ""
    stages: list = field(default_factory=list)

    @property
    def success(self):
        return self.certificate is not None

    def to_dict(self):
        return {"success": self.success, "failed_stage": self.failed_stage,
                "reason": self.reason, "stages": self.stages,
                "certificate": self.certificate.to_dict() if self.certificate else None}


def _greedy_extension(x, t, coords):
    """Fix ``coords`` one at a time, keeping the larger conditional measure of ``x``."""
    t = dict(t)
    rest = x.restrict(t)
    for c in sorted(coords):
        if c in t:
            continue
        low, high = rest.restrict({c: 0}), rest.restrict({c: 1})
        t[c] = 1 if high.measure() > low.measure() else 0
        rest = high if t[c] else low
    return PartialAssignment(t)


def find_pair_pipeline(instance, epsilon, *, tail="truncated"):
    """Staged search for a mergeable pair.

    ``tail="truncated"`` treats the names as ending at the horizon, so tail
    sums only run up to ``M``.  ``tail="majorant"`` adds a certified bound for
    the infinite tail of ``h``; at desk-scale horizons this usually ends in
    the "horizon too small" failure.
    """
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise PreconditionError("epsilon must lie strictly between 0 and 1")
    if tail not in ("truncated", "majorant"):
        raise ValueError(f"unknown tail model {tail!r}")
    instance.check_invariant()
    instance.check_layout()
    instance.check_weight()
    h, M, k = instance.h, instance.horizon, instance.cut
    majorant = tail == "majorant"
    result = PipelineResult()

    def stage(name, survivors, reason="family exhausted", **info):
        result.stages.append({"stage": name, "survivors": list(survivors),
                              **{key: str(v) for key, v in info.items()}})
        if len(survivors) < 2:
            result.failed_stage, result.reason = name, reason
            return False
        return True

    X = list(range(len(instance)))
    if not stage("input", X):
        return result
    X = uniformize(X, [lambda xi: len(instance.gammas[xi])])
    m = len(instance.gammas[X[0]]) if X else 0
    if not stage("uniform_m", X, m=m):
        return result
    m2 = max(m, 1) ** 2
    d2 = 1 - epsilon / 2

    # s_xi: a largest cylinder inside x_xi, so x_xi fills it
    s = {}
    for xi in X:
        cyls = sorted(instance.conditions[xi].cylinders(), key=lambda c: (len(c), str(c)))
        cand = cyls[0]
        q = conditional(instance.conditions[xi], cylinder(cand))
        if q * q > d2:
            s[xi] = cand
    X = [xi for xi in X if xi in s]
    if not stage("choose_s", X):
        return result

    def B(xi, lo, hi):
        out = set()
        for alpha in instance.gammas[xi]:
            for n in range(lo, hi):
                out |= instance.block_support(alpha, n)
        return out

    tail_bound = epsilon / (24 * m2)
    p = {}
    for xi in X:
        dom = s[xi].domain
        for cand in range(M + 1):
            if h.tail_upper(cand, M, majorant=majorant) < tail_bound and not dom & B(xi, cand, M):
                p[xi] = cand
                break
    X = [xi for xi in X if xi in p]
    if not stage("choose_p", X, reason="horizon too small", bound=tail_bound):
        return result

    t = {}
    for xi in X:
        t[xi] = _greedy_extension(instance.conditions[xi], s[xi], B(xi, 0, p[xi]))
        q = conditional(instance.conditions[xi], cylinder(t[xi]))
        if not q * q > d2:
            del t[xi]
    X = [xi for xi in X if xi in t]
    if not stage("extend_t", X):
        return result

    X = uniformize(X, [lambda xi: p[xi], lambda xi: len(t[xi])])
    if not X:
        return result
    P = p[X[0]]
    tau = Fraction(1, 2 ** len(t[X[0]]))
    l_bound = tau * tau * epsilon / (24 * m2)
    L = next((cand for cand in range(P, M + 1)
              if h.tail_upper(cand, M, majorant=majorant) < l_bound), None)
    if not stage("uniform_p_tau", X, p=P, tau=tau):
        return result
    if L is None:
        result.failed_stage, result.reason = "choose_l", "horizon too small"
        return result

    omega = {xi: frozenset(t[xi].domain | B(xi, 0, L)) for xi in X}
    ds = largest_delta_system([omega[xi] for xi in X])
    root = ds.root
    X = [X[i] for i in ds.indices]
    if not stage("delta_system", X, l=L, root_size=len(root)):
        return result

    def structure(xi):
        return (frozenset(tuple((instance.a[al][n], instance.b[al][n]) for n in range(L))
                          for al in instance.gammas[xi]),
                t[xi], tuple(sorted(root)))

    X = uniformize(X, [lambda xi: isomorphism_type(structure(xi), root)])
    if not stage("isomorphism", X):
        return result

    extraction = conditional_extract(
        [IndexedEventPair(instance.conditions[xi], t[xi], xi) for xi in X],
        None, 2, delta_squared=d2)
    if not extraction.success:
        stage("extract", extraction.members)
        result.failed_stage = f"extract:{extraction.failed_stage}"
        return result
    xi, eta = X[extraction.members[0]], X[extraction.members[1]]
    stage("extract", [xi, eta])

    checks = _claim_checks(instance, xi, eta, t, k, P, L, B)
    tt = t[xi] | t[eta]
    cyl = cylinder(tt)
    mu_t = Fraction(cyl.measure())
    for al in instance.gammas[xi]:
        for be in instance.gammas[eta]:
            for tag, ev in (("eq:42", instance.meet_tail(al, be)),
                            ("eq:45", instance.meet_tail(be, al))):
                v = Fraction((cyl & ev).measure())
                checks.append({"tag": tag, "alpha": al, "beta": be, "measure": str(v),
                               "passed": v < epsilon * mu_t / (4 * m2)})
    residual = cyl & eval_pair(instance, xi, eta).residual
    rm = Fraction(residual.measure())
    bound = (1 - epsilon) * mu_t
    checks.append({"tag": "eq:18", "measure": str(rm), "bound": str(bound),
                   "passed": rm > bound})
    failed = [c for c in checks if not c["passed"]]
    if failed:
        result.failed_stage, result.reason = "verify", f"{failed[0]['tag']} failed"
        result.stages.append({"stage": "verify", "failures": failed})
        return result
    result.certificate = PairCertificate(xi, eta, t[xi], t[eta], P, L, root, epsilon, m, tau,
                                         residual, rm, bound, checks)
    return result


def _claim_checks(instance, xi, eta, t, k, p, l, B):
    checks = []
    both = cylinder(t[xi]) & cylinder(t[eta])
    ok = True
    for n in range(k, p):
        for al in instance.gammas[xi]:
            for be in instance.gammas[eta]:
                ev = ((instance.a[al][n] & instance.b[be][n])
                      | (instance.a[be][n] & instance.b[al][n]))
                if not (both & ev).is_empty():
                    ok = False
    checks.append({"tag": "claim:c-1", "passed": ok, "range": f"[{k}, {p})"})
    dom = t[xi].domain | t[eta].domain
    middle = B(xi, p, l) | B(eta, p, l)
    checks.append({"tag": "claim:c-2", "passed": not dom & middle, "range": f"[{p}, {l})"})
    for c in checks:
        if not c["passed"]:
            raise AssertionError(f"{c['tag']} failed for pair ({xi}, {eta})")
    return checks
