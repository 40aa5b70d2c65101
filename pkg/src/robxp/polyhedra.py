"""Exact adversarial-example search for linear and piecewise-linear classifiers
over real intervals.

The region where the classifier disagrees with the instance label is a
finite union of polyhedra (one per branch leaf).  Intersected with the
feature domains, the fixed features and an l_inf / l1 / l0 ball, every
piece is decided by Fourier-Motzkin elimination over rationals, keeping
track of strict inequalities.  A witness is rebuilt by back-substitution,
preferring coordinates of the instance whenever they are feasible.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .distance import INF, within_ball
from .errors import EncodingUnsupported
from .model import Linear, Piecewise, RealInterval, _evaluate_normalized


class Ineq:
    """``sum coef[i] * x_i + const >= 0`` (``> 0`` when ``strict``)."""

    __slots__ = ("coef", "const", "strict")

    def __init__(self, coef, const, strict=False):
        self.coef = {i: Fraction(a) for i, a in coef.items() if a != 0}
        self.const = Fraction(const)
        self.strict = strict

    def key(self):
        if not self.coef:
            return ((), self.const > 0 or (self.const == 0 and not self.strict), self.strict)
        scale = max(abs(a) for a in self.coef.values())
        return (tuple(sorted((i, a / scale) for i, a in self.coef.items())), self.const / scale, self.strict)

    def holds(self, x):
        s = sum((a * x[i] for i, a in self.coef.items()), self.const)
        return s > 0 if self.strict else s >= 0


def _dedupe(ineqs):
    seen = {}
    for q in ineqs:
        seen.setdefault(q.key(), q)
    return list(seen.values())


def solve_system(ineqs, n, prefer):
    """A rational point satisfying ``ineqs`` over ``n`` variables, or None.

    ``prefer`` gives the value each variable takes when it is unconstrained
    or when that value is feasible.
    """
    stages = []
    current = _dedupe(ineqs)
    for var in range(n):
        lower, upper, rest = [], [], []
        for q in current:
            a = q.coef.get(var, 0)
            (lower if a > 0 else upper if a < 0 else rest).append(q)
        stages.append((var, lower, upper))
        combined = []
        for lo in lower:
            for up in upper:
                a, b = lo.coef[var], -up.coef[var]
                coef = {}
                for i, c in lo.coef.items():
                    coef[i] = coef.get(i, 0) + c * b
                for i, c in up.coef.items():
                    coef[i] = coef.get(i, 0) + c * a
                coef.pop(var, None)
                combined.append(Ineq(coef, lo.const * b + up.const * a, lo.strict or up.strict))
        current = []
        for q in _dedupe(rest + combined):
            if q.coef:
                current.append(q)
            elif q.const < 0 or (q.const == 0 and q.strict):
                return None
    x = [None] * n
    for var, lower, upper in reversed(stages):
        lo = hi = None
        lo_strict = hi_strict = False
        for q in lower:
            bound = -(q.const + sum(a * x[i] for i, a in q.coef.items() if i != var)) / q.coef[var]
            if lo is None or bound > lo or (bound == lo and q.strict):
                lo, lo_strict = bound, q.strict
        for q in upper:
            bound = (q.const + sum(a * x[i] for i, a in q.coef.items() if i != var)) / -q.coef[var]
            if hi is None or bound < hi or (bound == hi and q.strict):
                hi, hi_strict = bound, q.strict
        x[var] = _pick(prefer[var], lo, lo_strict, hi, hi_strict)
    return x


def _pick(want, lo, lo_strict, hi, hi_strict):
    above = lo is None or want > lo or (want == lo and not lo_strict)
    below = hi is None or want < hi or (want == hi and not hi_strict)
    if above and below:
        return want
    if not above:
        if not lo_strict:
            return lo
        if hi is None:
            return lo + 1
        return (lo + hi) / 2
    if not hi_strict:
        return hi
    if lo is None:
        return hi - 1
    return (lo + hi) / 2


# --------------------------------------------------------------------------
# classifier regions
# --------------------------------------------------------------------------


def _halfspace(weights, bias, negate=False):
    coef = {i: w for i, w in enumerate(weights)}
    if negate:
        return Ineq({i: -w for i, w in coef.items()}, bias, strict=True)
    return Ineq(coef, -bias)


def leaves(body, path=()):
    """``(constraints, label)`` for each polyhedral piece of ``body``."""
    if isinstance(body, Linear):
        neg, pos = body.labels
        yield path + (_halfspace(body.weights, body.bias),), pos
        yield path + (_halfspace(body.weights, body.bias, negate=True),), neg
        return
    if isinstance(body, Piecewise):
        earlier = ()
        for guard, sub in body.branches:
            if guard is None:
                yield from leaves(sub, path + earlier)
                return
            yield from leaves(sub, path + earlier + (_halfspace(guard.weights, guard.bias),))
            earlier = earlier + (_halfspace(guard.weights, guard.bias, negate=True),)
        return
    raise EncodingUnsupported(f"{type(body).__name__} has no polyhedral description")


def supports(classifier):
    return all(isinstance(d, RealInterval) for d in classifier.space.domains) and _is_polyhedral(
        classifier.body
    )


def _is_polyhedral(body):
    if isinstance(body, Linear):
        return True
    if isinstance(body, Piecewise):
        return all(_is_polyhedral(b) for _, b in body.branches)
    return False


def _box(i, lo=None, hi=None):
    out = []
    if lo is not None:
        out.append(Ineq({i: 1}, -lo))
    if hi is not None:
        out.append(Ineq({i: -1}, hi))
    return out


def _eq(i, value):
    return _box(i, value, value)


def exact_find_aex(problem, spec, fixed=frozenset(), xi=None):
    """Adversarial example by exact polyhedral reasoning, or None.

    ``spec=None`` means no distance restriction.  ``xi`` maps 0-based
    feature indices to inclusive ``(lo, hi)`` bounds (``None`` = open).
    """
    clf = problem.classifier
    if not supports(clf):
        raise EncodingUnsupported("exact route needs a linear/piecewise-linear model over real intervals")
    v = [Fraction(x) for x in problem.v]
    m = len(v)
    base = []
    for i, d in enumerate(clf.space.domains):
        base += _box(i, d.lo, d.hi)
        if (i + 1) in fixed:
            base += _eq(i, v[i])
    for i, (lo, hi) in (xi or {}).items():
        base += _box(i, lo, hi)
    free = [i for i in range(m) if (i + 1) not in fixed]
    balls = list(_ball_systems(v, spec, free))
    for region, label in leaves(clf.body):
        if label == problem.c:
            continue
        for ball in balls:
            x = solve_system(base + list(region) + ball, m, v)
            if x is None:
                continue
            x = tuple(x)
            if _evaluate_normalized(clf, x) != problem.c and (spec is None or within_ball(x, problem.v, spec)):
                return x
            raise AssertionError("polyhedral witness failed verification")
    return None


def _ball_systems(v, spec, free):
    """Alternative constraint lists whose union is the ball (over ``free``)."""
    if spec is None:
        yield []
        return
    eps = spec.epsilon
    if spec.p == INF:
        out = []
        for i in free:
            out += _box(i, v[i] - eps, v[i] + eps)
        yield out
        return
    if spec.p == 0:
        k = min(spec.budget, len(free))
        for moved in itertools.combinations(free, k):
            yield [q for i in free if i not in moved for q in _eq(i, v[i])]
        return
    if spec.p == 1:
        for signs in itertools.product((1, -1), repeat=len(free)):
            out = [Ineq({i: s}, -s * v[i]) for i, s in zip(free, signs)]
            out.append(Ineq({i: -s for i, s in zip(free, signs)}, eps + sum(s * v[i] for i, s in zip(free, signs))))
            yield out
        return
    raise EncodingUnsupported("l2 balls are not polyhedral")


def linear_l2_aex(problem, spec, fixed=frozenset()):
    """Closed form for a single linear model, l2 ball and unbounded features."""
    clf = problem.classifier
    body = clf.body
    if not isinstance(body, Linear) or not all(
        isinstance(d, RealInterval) and d.lo is None and d.hi is None for d in clf.space.domains
    ):
        raise EncodingUnsupported("l2 closed form needs a linear model over unbounded reals")
    v = [Fraction(x) for x in problem.v]
    w = [a if (i + 1) not in fixed else Fraction(0) for i, a in enumerate(body.weights)]
    ww = sum(a * a for a in w)
    s = body.score(v)
    eps = spec.epsilon
    if ww == 0 or body.labels[0] == body.labels[1]:
        return None
    if problem.c == body.labels[1]:
        # need s - t*ww < 0 with t * sqrt(ww) <= eps
        if s * s >= eps * eps * ww and s >= 0:
            return None
        t0 = s / ww
        t = _sqrt_ratio_below(eps, ww, t0)
        direction = -1
    else:
        # need s + t*ww >= 0; the smallest such t is rational
        t = -s / ww
        if t * t * ww > eps * eps:
            return None
        direction = 1
    x = tuple(vi + direction * t * wi for vi, wi in zip(v, w))
    if _evaluate_normalized(clf, x) == problem.c or not within_ball(x, problem.v, spec):
        raise AssertionError("l2 witness failed verification")
    return x


def _sqrt_ratio_below(eps, ww, floor_value):
    """Rational ``t`` with ``floor_value < t <= eps / sqrt(ww)``."""
    bits = 16
    while True:
        scale = 1 << bits
        # largest integer r with (r / scale)^2 * ww <= eps^2
        num = eps * eps * scale * scale / ww
        r = math.isqrt(num.numerator // num.denominator)
        t = Fraction(r, scale)
        if t > floor_value:
            return t
        bits *= 2
