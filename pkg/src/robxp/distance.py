"""l_p distances (p in {0, 1, 2, inf}), epsilon-balls and discrete epsilon floors.

Coordinates are compared exactly.  Categorical coordinates contribute 0
when equal and 1 otherwise, under every norm.  ``within_ball`` for l2
compares squared quantities so no square root is ever taken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionError, NotApplicable
from .model import Binary, Categorical, RealInterval, is_grid
from .rational import as_rational

INF = math.inf
NORMS = (0, 1, 2, INF)

_NORM_NAMES = {
    "0": 0, "l0": 0, "hamming": 0,
    "1": 1, "l1": 1,
    "2": 2, "l2": 2,
    "inf": INF, "linf": INF, "l_inf": INF, "chebyshev": INF,
}


def parse_norm(p):
    """Accept 0/1/2/inf or a name such as ``"l0"`` / ``"linf"``."""
    if isinstance(p, str):
        try:
            return _NORM_NAMES[p.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown norm {p!r}") from None
    if p in NORMS:
        return INF if p == INF else int(p)
    raise ValueError(f"unsupported norm {p!r}; use one of 0, 1, 2, inf")


def norm_name(p):
    return "linf" if p == INF else f"l{p}"


@dataclass(frozen=True)
class DistanceSpec:
    p: int | float
    epsilon: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", parse_norm(self.p))
        eps = as_rational(self.epsilon)
        if eps < 0:
            raise ValueError("epsilon must be non-negative")
        object.__setattr__(self, "epsilon", eps)

    @property
    def budget(self):
        """Number of features allowed to change under l0."""
        return math.floor(self.epsilon)

    def __str__(self):
        return f"{norm_name(self.p)}<={self.epsilon}"


def _gaps(x, y, space=None):
    if len(x) != len(y):
        raise DimensionError(f"points of arity {len(x)} and {len(y)}")
    categorical = [isinstance(d, Categorical) for d in space.domains] if space else [False] * len(x)
    out = []
    for a, b, cat in zip(x, y, categorical):
        if a == b:
            out.append(Fraction(0))
        elif cat or isinstance(a, str) or isinstance(b, str):
            out.append(Fraction(1))
        else:
            out.append(abs(as_rational(a) - as_rational(b)))
    return out


def distance(x, y, p, space=None):
    """``||x - y||_p``; exact (Fraction) except for l2, which is a float.

    Pass ``space`` when categorical features hold numeric values.
    """
    p = parse_norm(p)
    gaps = _gaps(x, y, space)
    if p == 0:
        return sum(1 for g in gaps if g != 0)
    if p == 1:
        return sum(gaps, Fraction(0))
    if p == 2:
        return math.sqrt(sum(g * g for g in gaps))
    return max(gaps, default=Fraction(0))


def within_ball(x, v, spec, space=None):
    """True iff ``||x - v||_p <= epsilon``, decided in exact arithmetic."""
    gaps = _gaps(x, v, space)
    eps = spec.epsilon
    if spec.p == 0:
        return sum(1 for g in gaps if g != 0) <= eps
    if spec.p == 1:
        return sum(gaps, Fraction(0)) <= eps
    if spec.p == 2:
        return sum(g * g for g in gaps) <= eps * eps
    return all(g <= eps for g in gaps)


def feature_step(domain):
    """Smallest non-zero gap between two values of a discrete domain."""
    if isinstance(domain, RealInterval):
        raise NotApplicable("continuous domains have no smallest step")
    if isinstance(domain, (Binary, Categorical)):
        return Fraction(1)
    if is_grid(domain):
        return domain.step
    raise NotApplicable(f"unknown domain {domain!r}")


def minimum_meaningful_epsilon(space, p):
    """Below this budget no point can have an adversarial example.

    l0 needs at least one changed feature (1); the other norms need at
    least one grid step of some feature.
    """
    p = parse_norm(p)
    if any(isinstance(d, RealInterval) for d in space.domains):
        raise NotApplicable("continuous features admit arbitrarily small perturbations")
    if p == 0:
        return Fraction(1)
    return min(feature_step(d) for d in space.domains)


def max_steps(domain, spec):
    """Largest number of grid steps a single coordinate may move under ``spec``.

    Only meaningful for l_p with p >= 1, where each coordinate moves at most
    ``epsilon`` on its own.
    """
    step = feature_step(domain)
    return math.floor(spec.epsilon / step)


__all__ = [
    "INF", "NORMS", "DistanceSpec", "distance", "within_ball",
    "minimum_meaningful_epsilon", "parse_norm", "norm_name", "max_steps",
    "feature_step",
]
