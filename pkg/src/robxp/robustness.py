"""Local and global robustness queries.

:func:`find_aex` is the single oracle primitive: an adversarial example
inside a ball with some features pinned.  It routes a query to

* the exact polyhedral procedure for linear / piecewise-linear models over
  real intervals,
* the SAT encoding for discrete or quantized spaces (real features are
  quantized around the instance when a query step ``qs`` is given),
* exhaustive enumeration for l1 / l2 balls over small discrete spaces.

Every returned witness is checked by forward evaluation, ball membership
and agreement on the pinned features.  Solver budgets that run out raise
:class:`~robxp.errors.OracleUnknown`, so no verdict is ever guessed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from . import polyhedra
from .brute import DEFAULT_CAP, EnumerableSpace, brute_find_aex, brute_global_pair
from .distance import INF, DistanceSpec, minimum_meaningful_epsilon, within_ball
from .encode import DEFAULT_QS, aex_query, decode, dual_query, encode_distance
from .errors import (
    EncodingUnsupported, NotApplicable, OracleUnknown, PrecisionError, TooLarge,
)
from .model import (
    Categorical, ExplanationProblem, FeatureSpace, Linear, RealInterval, _evaluate_normalized, is_grid,
    is_nontrivial, sample_point,
)
from .oracle import Status, solve, solve_external
from .pb import PBConstraint
from .rational import as_point, as_rational

MAX_BISECTIONS = 4096


@dataclass(frozen=True)
class OracleConfig:
    """How :func:`find_aex` answers queries.

    ``backend`` is ``"auto"``, ``"sat"``, ``"exact"`` or ``"brute"``;
    ``solver`` is ``None`` for the embedded solver or a command line for
    an external one.  ``qs`` quantizes real features on the SAT route.
    """

    backend: str = "auto"
    qs: Fraction | None = None
    solver: str | None = None
    fmt: str = "cnf"
    max_conflicts: int | None = None
    time_limit: float | None = None

    def __post_init__(self):
        if self.backend not in ("auto", "sat", "exact", "brute"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.qs is not None:
            object.__setattr__(self, "qs", as_rational(self.qs))


DEFAULT_ORACLE = OracleConfig()


@dataclass
class OracleStats:
    calls: int = 0
    sat_calls: int = 0
    conflicts: int = 0
    seconds: float = 0.0

    def add(self, other):
        self.calls += other.calls
        self.sat_calls += other.sat_calls
        self.conflicts += other.conflicts
        self.seconds += other.seconds


@dataclass(frozen=True)
class ConstraintSet:
    """Conjunction of per-feature bounds ``lo <= x_i <= hi`` (1-based ``i``).

    ``None`` leaves a side open; ``lo == hi`` is an equality.
    """

    bounds: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for i, (lo, hi) in dict(self.bounds).items():
            lo = None if lo is None else as_rational(lo)
            hi = None if hi is None else as_rational(hi)
            if lo is not None and hi is not None and lo > hi:
                raise ValueError(f"empty constraint on feature {i}")
            clean[int(i)] = (lo, hi)
        object.__setattr__(self, "bounds", clean)

    def holds(self, point):
        for i, (lo, hi) in self.bounds.items():
            x = as_rational(point[i - 1])
            if (lo is not None and x < lo) or (hi is not None and x > hi):
                return False
        return True

    def check(self, space):
        """Raise ``ValueError`` unless every bound meets its domain."""
        for i, (lo, hi) in self.bounds.items():
            if not 1 <= i <= space.m:
                raise ValueError(f"constraint on unknown feature {i}")
            d = space.domains[i - 1]
            if isinstance(d, RealInterval):
                a = lo if d.lo is None else (d.lo if lo is None else max(lo, d.lo))
                b = hi if d.hi is None else (d.hi if hi is None else min(hi, d.hi))
                if a is not None and b is not None and a > b:
                    raise ValueError(f"constraint on feature {i} misses its domain")
            elif not any(
                (lo is None or as_rational(x) >= lo) and (hi is None or as_rational(x) <= hi) for x in d.values()
            ):
                raise ValueError(f"constraint on feature {i} misses its domain")


class Status3(str, Enum):
    ROBUST = "Robust"
    NOT_ROBUST = "NotRobust"
    UNKNOWN = "Unknown"


@dataclass
class Verdict:
    status: Status3
    witness: tuple | None = None
    reason: str | None = None
    stats: OracleStats = field(default_factory=OracleStats)

    @property
    def robust(self):
        return self.status is Status3.ROBUST


# --------------------------------------------------------------------------
# the oracle
# --------------------------------------------------------------------------


def _continuous(space):
    return any(isinstance(d, RealInterval) for d in space.domains)


def _route(problem, spec, oracle):
    clf = problem.classifier
    if oracle.backend != "auto":
        return oracle.backend
    if _continuous(clf.space):
        return "exact"
    if spec is not None and spec.p in (1, 2):
        return "brute"
    return "sat"


def find_aex(problem, spec, fixed=frozenset(), xi=None, oracle=None, stats=None):
    """An adversarial example for ``problem`` or ``None`` (verified absence).

    ``spec=None`` drops the distance restriction; ``fixed`` holds 1-based
    feature indices pinned to their values in the instance; ``xi`` is an
    optional :class:`ConstraintSet`.
    """
    oracle = oracle or DEFAULT_ORACLE
    stats = stats if stats is not None else OracleStats()
    fixed = frozenset(fixed)
    if spec is not None and not isinstance(spec, DistanceSpec):
        raise TypeError("spec must be a DistanceSpec or None")
    if xi is not None:
        xi.check(problem.classifier.space)
    t0 = time.perf_counter()
    stats.calls += 1
    try:
        route = _route(problem, spec, oracle)
        if route == "exact":
            x = _exact(problem, spec, fixed, xi)
        elif route == "brute":
            x = brute_find_aex(problem, spec, fixed) if xi is None else _brute_xi(problem, spec, fixed, xi)
        else:
            x = _sat(problem, spec, fixed, xi, oracle, stats)
    finally:
        stats.seconds += time.perf_counter() - t0
    if x is not None:
        _verify(problem, spec, fixed, xi, x)
    return x


def _exact(problem, spec, fixed, xi):
    bounds = None if xi is None else {i - 1: b for i, b in xi.bounds.items()}
    if spec is not None and spec.p == 2:
        if bounds:
            raise EncodingUnsupported("l2 closed form does not take input constraints")
        return polyhedra.linear_l2_aex(problem, spec, fixed)
    return polyhedra.exact_find_aex(problem, spec, fixed, bounds)


def _brute_xi(problem, spec, fixed, xi):
    clf, v = problem.classifier, problem.v
    for x in EnumerableSpace(clf.space, DEFAULT_CAP):
        if any(x[i - 1] != v[i - 1] for i in fixed) or not xi.holds(x):
            continue
        if (spec is None or within_ball(x, v, spec, clf.space)) and _evaluate_normalized(clf, x) != problem.c:
            return x
    return None


def _sat(problem, spec, fixed, xi, oracle, stats):
    if spec is not None and spec.p in (1, 2):
        raise EncodingUnsupported(f"l{spec.p} balls have no propositional encoding; use the brute backend")
    qs = oracle.qs
    if qs is None and _continuous(problem.classifier.space):
        qs = DEFAULT_QS
    formula = aex_query(problem, spec, fixed, qs)
    if xi is not None:
        _encode_xi(formula, problem.classifier.space, xi)
    result = _run_solver(formula, oracle, stats)
    if result.status is Status.UNSAT:
        return None
    return problem.classifier.space.normalize(decode(result.model, formula.varmap, "x"))


def _run_solver(formula, oracle, stats):
    stats.sat_calls += 1
    if oracle.solver:
        result = solve_external(formula, oracle.solver, oracle.fmt, timeout=oracle.time_limit)
    else:
        result = solve(formula, max_conflicts=oracle.max_conflicts, time_limit=oracle.time_limit)
    stats.conflicts += result.stats.get("conflicts", 0)
    if result.status is Status.RESOURCE_OUT:
        raise OracleUnknown("solver budget exhausted")
    return result


def _encode_xi(formula, space, xi):
    vm = formula.varmap
    for i, (lo, hi) in xi.bounds.items():
        fv = vm.features[("x", i - 1)]
        if fv.kind == "onehot":
            allowed = [
                var for c, var in zip(fv.domain.choices, fv.vars)
                if (lo is None or as_rational(c) >= lo) and (hi is None or as_rational(c) <= hi)
            ]
            formula.add_clause(allowed)
            continue
        if fv.kind == "bool":
            terms, base, step, offset = [(1, fv.vars[0])], Fraction(0), Fraction(1), 0
        else:
            terms = [(1 << j, v) for j, v in enumerate(fv.vars)]
            base, step, offset = fv.base, fv.step, fv.offset
        if lo is not None:
            formula.add_pb(PBConstraint(tuple(terms), ">=", math.ceil((lo - base) / step) - offset))
        if hi is not None:
            formula.add_pb(PBConstraint(tuple(terms), "<=", math.floor((hi - base) / step) - offset))


def _verify(problem, spec, fixed, xi, x):
    clf = problem.classifier
    ok = (
        clf.space.contains(x)
        and _evaluate_normalized(clf, clf.space.normalize(x)) != problem.c
        and (spec is None or within_ball(x, problem.v, spec, clf.space))
        and all(x[i - 1] == problem.v[i - 1] for i in fixed)
        and (xi is None or xi.holds(x))
    )
    if not ok:
        raise AssertionError(f"adversarial example {x} failed verification")


def is_locally_robust(problem, spec, xi=None, oracle=None):
    """Robust iff no adversarial example exists in the ball (and in ``xi``)."""
    if spec.epsilon <= 0:
        raise ValueError("local robustness needs epsilon > 0")
    stats = OracleStats()
    try:
        x = find_aex(problem, spec, frozenset(), xi, oracle, stats)
    except OracleUnknown as exc:
        return Verdict(Status3.UNKNOWN, reason=str(exc), stats=stats)
    if x is None:
        return Verdict(Status3.ROBUST, stats=stats)
    return Verdict(Status3.NOT_ROBUST, witness=x, stats=stats)


# --------------------------------------------------------------------------
# sampling
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SamplingConfig:
    """Monte Carlo settings: ``n`` draws per point, target confidence ``confidence``.

    ``distribution`` is ``"uniform"`` (uniform in the ball, intersected
    with the feature space) or ``"empirical"`` (draws from ``data``, kept
    only when inside the ball).
    """

    n: int = 100
    confidence: float = 0.95
    distribution: str = "uniform"
    data: tuple = ()
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("sampling needs n >= 1")
        if not 0 < self.confidence < 1:
            raise ValueError("confidence must lie in (0, 1)")
        if self.distribution not in ("uniform", "empirical"):
            raise ValueError(f"unknown distribution {self.distribution!r}")


@dataclass(frozen=True)
class NoAExFound:
    """No sampled point was adversarial.  This is not a robustness proof.

    ``mass_bound`` is the usual one-sided bound: with the configured
    confidence the adversarial fraction of the sampled distribution is
    below it.
    """

    n: int
    confidence: float
    mass_bound: float


@dataclass(frozen=True)
class AExFound:
    witness: tuple
    draws: int


def _sample_in_ball(space, v, spec, rng, tries=64):
    for _ in range(tries):
        x = list(v)
        if spec.p == 0:
            k = min(spec.budget, space.m)
            moved = rng.choice(space.m, size=k, replace=False) if k else []
            for i in moved:
                d = space.domains[int(i)]
                x[int(i)] = sample_point(FeatureSpace([d]), rng)[0]
        else:
            for i, d in enumerate(space.domains):
                x[i] = _coordinate_near(d, v[i], spec.epsilon, rng)
        x = tuple(x)
        if within_ball(x, v, spec, space):
            return x
    return tuple(v)


def _coordinate_near(d, c, eps, rng):
    if isinstance(d, Categorical):
        if eps >= 1:
            return d.choices[int(rng.integers(len(d.choices)))]
        return c
    if is_grid(d):
        k = d.index_of(c)
        steps = math.floor(eps / d.step)
        lo, hi = max(0, k - steps), min(d.levels - 1, k + steps)
        return d.value_at(int(rng.integers(lo, hi + 1)))
    lo, hi = c - eps, c + eps
    if d.lo is not None:
        lo = max(lo, d.lo)
    if d.hi is not None:
        hi = min(hi, d.hi)
    return lo + (hi - lo) * Fraction(float(rng.random()))


def sample_local_robustness(problem, spec, cfg):
    """Naive Monte Carlo search for an adversarial example around the instance."""
    rng = np.random.default_rng(cfg.seed)
    clf, v = problem.classifier, problem.v
    if cfg.distribution == "empirical":
        pool = [clf.space.normalize(p) for p in cfg.data]
        pool = [p for p in pool if within_ball(p, v, spec, clf.space)]
        if not pool:
            return NoAExFound(0, cfg.confidence, 1.0)
        draws = (pool[int(rng.integers(len(pool)))] for _ in range(cfg.n))
    else:
        draws = (_sample_in_ball(clf.space, v, spec, rng) for _ in range(cfg.n))
    for k, x in enumerate(draws, 1):
        if _evaluate_normalized(clf, x) != problem.c:
            return AExFound(x, k)
    return NoAExFound(cfg.n, cfg.confidence, 1 - (1 - cfg.confidence) ** (1 / cfg.n))


# --------------------------------------------------------------------------
# transition points and global counterexamples
# --------------------------------------------------------------------------


def _label(clf, point):
    return _evaluate_normalized(clf, point)


def _coordinate_walk(clf, a, b):
    """Neighbouring points on the axis-parallel path from ``a`` to ``b`` with different labels."""
    la = _label(clf, a)
    cur = list(a)
    for i in range(len(a)):
        if cur[i] == b[i]:
            continue
        nxt = list(cur)
        nxt[i] = b[i]
        if _label(clf, tuple(nxt)) != la:
            return tuple(cur), tuple(nxt)
        cur = nxt
    raise AssertionError("labels at the end points agree")


def transition_bracket(classifier, a, b, tol):
    """Points ``(p, q)`` of different classes, close to each other.

    Real spaces: bisection on the segment from ``a`` to ``b`` until
    ``||p - q||_inf <= tol``.  Grid spaces: the walk ends at neighbouring
    grid points (one step apart in one feature).
    """
    space = classifier.space
    a, b = space.normalize(a), space.normalize(b)
    la, lb = _label(classifier, a), _label(classifier, b)
    if la == lb:
        raise ValueError("end points must be classified differently")
    tol = as_rational(tol)
    if tol <= 0:
        raise PrecisionError("tolerance must be positive")
    if all(isinstance(d, RealInterval) for d in space.domains):
        lo, hi = Fraction(0), Fraction(1)
        width = max(abs(x - y) for x, y in zip(a, b))
        at = lambda t: tuple(x + t * (y - x) for x, y in zip(a, b))  # noqa: E731
        for _ in range(MAX_BISECTIONS):
            if (hi - lo) * width <= tol:
                return at(lo), at(hi)
            mid = (lo + hi) / 2
            if _label(classifier, at(mid)) != la:
                hi = mid
            else:
                lo = mid
        raise PrecisionError("bisection did not reach the requested tolerance")
    if _continuous(space):
        raise NotApplicable("mixed real/discrete spaces need a quantization step")
    p, q = _coordinate_walk(classifier, a, b)
    i = next(k for k in range(len(p)) if p[k] != q[k])
    d = space.domains[i]
    if is_grid(d):
        lo, hi = d.index_of(p[i]), d.index_of(q[i])
        lp = _label(classifier, p)
        while abs(hi - lo) > 1:
            mid = (lo + hi) // 2
            z = p[:i] + (d.value_at(mid),) + p[i + 1:]
            if _label(classifier, z) != lp:
                hi = mid
            else:
                lo = mid
        p = p[:i] + (d.value_at(lo),) + p[i + 1:]
        q = p[:i] + (d.value_at(hi),) + p[i + 1:]
        gap = d.step
    else:
        gap = Fraction(1)
    if gap > tol:
        raise PrecisionError(f"tolerance {tol} is below the grid step {gap}")
    return p, q


def find_transition_point(classifier, a, b, tol=Fraction(1, 10**6)):
    """Point ``z`` with points of both classes within ``tol`` of it.

    For real spaces ``z`` lies on the segment from ``a`` to ``b``.
    """
    p, q = transition_bracket(classifier, a, b, tol)
    if all(isinstance(d, RealInterval) for d in classifier.space.domains):
        return tuple((x + y) / 2 for x, y in zip(p, q))
    return q


def find_global_counterexample(classifier, spec, oracle=None, stats=None):
    """Two points within ``spec`` of each other with different labels.

    Returns ``None`` only when no such pair exists.  Raises
    :class:`TrivialClassifier` for constant classifiers.
    """
    oracle = oracle or DEFAULT_ORACLE
    stats = stats if stats is not None else OracleStats()
    space = classifier.space
    a, b = is_nontrivial(classifier)
    if _continuous(space) and oracle.backend != "sat":
        pair = _continuous_pair(classifier, spec, a, b)
    else:
        if not _continuous(space) and spec.epsilon < minimum_meaningful_epsilon(space, spec.p):
            raise ValueError(
                f"epsilon {spec.epsilon} is below the smallest meaningful distance "
                f"{minimum_meaningful_epsilon(space, spec.p)}"
            )
        pair = _discrete_pair(classifier, spec, oracle, stats)
    if pair is not None:
        v, x = pair
        if _label(classifier, v) == _label(classifier, x) or not within_ball(x, v, spec, space):
            raise AssertionError("global counterexample failed verification")
    return pair


def _continuous_pair(classifier, spec, a, b):
    if spec.p == 0:
        if spec.budget < 1:
            return None  # only identical points are within l0 distance < 1
        return _coordinate_walk(classifier, a, b)
    if spec.epsilon <= 0:
        return None
    if any(not isinstance(d, RealInterval) for d in classifier.space.domains):
        raise NotApplicable("mixed real/discrete spaces need a quantization step")
    # an l_inf gap of tol bounds every l_p gap by m^(1/p) * tol
    m = classifier.m
    tol = spec.epsilon / m if spec.p != INF else spec.epsilon
    p, q = transition_bracket(classifier, a, b, tol)
    return p, q


def _discrete_pair(classifier, spec, oracle, stats):
    if oracle.backend == "brute" or (spec.p in (1, 2) and oracle.backend == "auto" and _small(classifier.space)):
        return brute_global_pair(classifier, spec)
    if spec.p in (1, 2):
        # a pair differing in one coordinate has equal l1, l2 and l_inf gaps
        formula = _single_coordinate_dual(classifier, spec)
    else:
        if _continuous(classifier.space):
            raise EncodingUnsupported("dual-copy queries need discrete or quantized features")
        formula = dual_query(classifier, spec)
    result = _run_solver(formula, oracle, stats)
    if result.status is Status.UNSAT:
        if spec.p in (1, 2):
            raise OracleUnknown("single-coordinate search found no pair; l1/l2 search is incomplete here")
        return None
    space = classifier.space
    v = space.normalize(decode(result.model, formula.varmap, "x"))
    x = space.normalize(decode(result.model, formula.varmap, "y"))
    return v, x


def _small(space):
    try:
        EnumerableSpace(space, 2**12)
    except (TooLarge, NotApplicable):
        return False
    return True


def _single_coordinate_dual(classifier, spec):
    formula = dual_query(classifier, DistanceSpec(INF, spec.epsilon))
    encode_distance(formula, "y", DistanceSpec(0, 1), "x")
    return formula


def find_global_counterexample_delta(classifier, spec, delta):
    """Pair inside the ball whose linear scores differ by more than ``delta``.

    Closed form: over a ball the score can move by ``epsilon`` times the
    dual norm of the weights (capped by the domain widths).
    """
    delta = as_rational(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    body = classifier.body
    if not isinstance(body, Linear):
        raise NotApplicable("the delta variant needs a single linear score")
    if not all(isinstance(d, RealInterval) for d in classifier.space.domains):
        raise NotApplicable("the delta variant is implemented for real features")
    w = list(body.weights)
    doms = classifier.space.domains
    eps = spec.epsilon
    width = [None if not d.bounded else d.hi - d.lo for d in doms]
    moves = [Fraction(0)] * len(w)
    if spec.p == INF:
        moves = [eps if wd is None else min(eps, wd) for wd in width]
    elif spec.p == 1:
        budget = eps
        for i in sorted(range(len(w)), key=lambda i: (-abs(w[i]), i)):
            if budget <= 0 or w[i] == 0:
                break
            moves[i] = budget if width[i] is None else min(budget, width[i])
            budget -= moves[i]
    elif spec.p == 0:
        order = sorted(range(len(w)), key=lambda i: (width[i] is not None, -abs(w[i]) * (width[i] or 0), i))
        for i in order[: spec.budget]:
            if w[i] != 0:
                moves[i] = delta / abs(w[i]) + 1 if width[i] is None else width[i]
    else:
        if any(wd is not None for wd in width):
            raise NotApplicable("l2 delta variant is implemented for unbounded features")
        ww = sum(a * a for a in w)
        if ww == 0 or eps * eps * ww <= delta * delta:
            return None
        t = polyhedra._sqrt_ratio_below(eps, ww, delta / ww)
        v = tuple(Fraction(0) for _ in w)
        x = tuple(t * a for a in w)
        return v, x
    gain = sum(abs(a) * mv for a, mv in zip(w, moves))
    if gain <= delta:
        return None
    v, x = [], []
    for d, a, mv in zip(doms, w, moves):
        low = d.lo if d.lo is not None else (d.hi - mv if d.hi is not None else Fraction(0))
        high = low + mv
        v.append(low if a >= 0 else high)
        x.append(high if a >= 0 else low)
    v, x = tuple(v), tuple(x)
    if not within_ball(x, v, spec, classifier.space) or abs(body.score(x) - body.score(v)) <= delta:
        raise AssertionError("delta counterexample failed verification")
    return v, x


def local_flip_threshold(problem, p=INF, tol=Fraction(1, 10**9), eps_hi=None, oracle=None):
    """Smallest distance at which an adversarial example appears.

    Exact for a linear model over unbounded reals under l1 / l_inf
    (``|score(v)|`` over the dual norm of the weights); otherwise bisection
    on epsilon with :func:`find_aex`, returning the upper end of the final
    bracket.
    """
    clf = problem.classifier
    body = clf.body
    p = DistanceSpec(p, 0).p
    if (
        isinstance(body, Linear)
        and p in (1, INF)
        and all(isinstance(d, RealInterval) and d.lo is None and d.hi is None for d in clf.space.domains)
    ):
        dual = sum(abs(w) for w in body.weights) if p == INF else max(abs(w) for w in body.weights)
        if dual == 0:
            return None
        return abs(body.score(problem.v)) / dual
    tol = as_rational(tol)
    hi = as_rational(eps_hi) if eps_hi is not None else Fraction(1)
    while find_aex(problem, DistanceSpec(p, hi), oracle=oracle) is None:
        hi *= 2
        if hi > 2**64:
            return None
    lo = Fraction(0)
    for _ in range(MAX_BISECTIONS):
        if hi - lo <= tol:
            return hi
        mid = (lo + hi) / 2
        if find_aex(problem, DistanceSpec(p, mid), oracle=oracle) is None:
            lo = mid
        else:
            hi = mid
    raise PrecisionError("bisection did not converge")


# --------------------------------------------------------------------------
# certification demo
# --------------------------------------------------------------------------


@dataclass
class CertifyRow:
    point: tuple
    label: int
    sampled: NoAExFound | AExFound
    complete: Verdict


@dataclass
class CertifyReport:
    spec: DistanceSpec
    rows: list
    counterexample: tuple | None
    transition: tuple | None

    @property
    def sampled_clean(self):
        return all(isinstance(r.sampled, NoAExFound) for r in self.rows)

    @property
    def complete_robust(self):
        return all(r.complete.status is Status3.ROBUST for r in self.rows)

    @property
    def refuted(self):
        return self.counterexample is not None


def certify_demo(classifier, spec, points, cfg, oracle=None):
    """Contrast sampled and complete verdicts with a global counterexample.

    Sampling at the given points may find nothing, and the complete oracle
    may even agree at those points; the counterexample pair still shows
    that no ball of radius epsilon is label-constant everywhere.
    """
    rows = []
    for k, point in enumerate(points):
        problem = ExplanationProblem.at(classifier, as_point(point))
        sub = SamplingConfig(cfg.n, cfg.confidence, cfg.distribution, cfg.data, cfg.seed + k)
        sampled = sample_local_robustness(problem, spec, sub)
        complete = is_locally_robust(problem, spec, oracle=oracle)
        rows.append(CertifyRow(problem.v, problem.c, sampled, complete))
    pair = find_global_counterexample(classifier, spec, oracle)
    z = None
    if pair is not None and all(isinstance(d, RealInterval) for d in classifier.space.domains):
        z = tuple((x + y) / 2 for x, y in zip(*pair))
    return CertifyReport(spec, rows, pair, z)


def uniform_points(n, lo=0, hi=1, dims=1, seed=0):
    """``n`` points drawn uniformly from the box ``[lo, hi]^dims`` (exact rationals)."""
    rng = np.random.default_rng(seed)
    lo, hi = as_rational(lo), as_rational(hi)
    return [tuple(lo + (hi - lo) * Fraction(float(u)) for u in rng.random(dims)) for _ in range(n)]


__all__ = [
    "OracleConfig", "OracleStats", "ConstraintSet", "Verdict", "Status3", "SamplingConfig",
    "NoAExFound", "AExFound", "find_aex", "is_locally_robust", "sample_local_robustness",
    "find_global_counterexample", "find_global_counterexample_delta", "find_transition_point",
    "transition_bracket", "local_flip_threshold", "certify_demo", "CertifyReport", "uniform_points",
]
