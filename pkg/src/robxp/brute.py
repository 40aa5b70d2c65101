"""Exhaustive reference oracles for small discrete instances.

Nothing here shares code with the encoders or the solver: points are
enumerated, labelled by forward evaluation and measured with
:func:`robxp.distance.within_ball`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .distance import within_ball
from .errors import NotApplicable, TooLarge
from .model import RealInterval, _evaluate_normalized

DEFAULT_CAP = 2**20
MAX_FEATURES = 16


@dataclass(frozen=True)
class EnumerableSpace:
    """All points of a fully discrete feature space, in lexicographic index order."""

    space: object
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if any(isinstance(d, RealInterval) for d in self.space.domains):
            raise NotApplicable("real features must be quantized before brute-force enumeration")
        if self.size > self.cap:
            raise TooLarge(f"space has {self.size} points, cap is {self.cap}")

    @property
    def size(self):
        return math.prod(d.levels for d in self.space.domains)

    def __len__(self):
        return self.size

    def __iter__(self):
        return itertools.product(*(d.values() for d in self.space.domains))


def brute_find_aex(problem, spec, fixed=frozenset(), cap=DEFAULT_CAP):
    """First point (in enumeration order) that is an adversarial example, or None."""
    clf = problem.classifier
    v = problem.v
    pinned = sorted(i - 1 for i in fixed)
    space = clf.space
    for x in EnumerableSpace(space, cap):
        if any(x[i] != v[i] for i in pinned):
            continue
        if spec is not None and not within_ball(x, v, spec, space):
            continue
        if _evaluate_normalized(clf, x) != problem.c:
            return x
    return None


def brute_global_pair(classifier, spec, cap=DEFAULT_CAP):
    """Some pair within ``spec`` of each other with different labels, or None."""
    points = list(EnumerableSpace(classifier.space, cap))
    labels = [_evaluate_normalized(classifier, p) for p in points]
    for i, a in enumerate(points):
        for j in range(i + 1, len(points)):
            if labels[i] != labels[j] and within_ball(points[j], a, spec, classifier.space):
                return a, points[j]
    return None


def _adversarial_points(problem, spec, cap):
    clf = problem.classifier
    v = problem.v
    out = []
    for x in EnumerableSpace(clf.space, cap):
        if (spec is None or within_ball(x, v, spec, clf.space)) and _evaluate_normalized(clf, x) != problem.c:
            out.append(x)
    return out


def brute_enumerate_explanations(problem, spec, cap=DEFAULT_CAP):
    """All AXps and CXps by evaluating both weak predicates on every subset.

    A set X is a weak AXp iff every adversarial example changes some
    feature of X; a set Y is a weak CXp iff some adversarial example
    changes only features of Y.
    """
    from .explain import ExplanationListing

    m = problem.m
    if m > MAX_FEATURES:
        raise TooLarge(f"{m} features; subset lattice limited to {MAX_FEATURES}")
    v = problem.v
    changes = {
        frozenset(i + 1 for i in range(m) if x[i] != v[i]) for x in _adversarial_points(problem, spec, cap)
    }
    subsets = [frozenset(c) for k in range(m + 1) for c in itertools.combinations(range(1, m + 1), k)]
    weak_axp = {s for s in subsets if all(s & ch for ch in changes)}
    weak_cxp = {s for s in subsets if any(ch <= s for ch in changes)}
    axps = {s for s in weak_axp if all((s - {i}) not in weak_axp for i in s)}
    cxps = {s for s in weak_cxp if all((s - {i}) not in weak_cxp for i in s)}
    return ExplanationListing(frozenset(axps), frozenset(cxps), True)
