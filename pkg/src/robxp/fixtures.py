"""Ready-made classifiers: the two running examples and seeded random models."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .errors import TrivialClassifier
from .model import (
    BNN, BNNLayer, Binary, Classifier, FeatureSpace, Guard, Linear, Lookup, Piecewise,
    QuantizedReal, RealInterval, is_nontrivial,
)

KAPPA1_W = Fraction("0.93198992")
KAPPA1_B = Fraction("0.64735516")
KAPPA1_TRAINING = ((0.0, 0), (0.3, 0), (0.4, 0), (0.7, 1), (1.0, 1))


def kappa1_threshold():
    """The exact point where kappa1 switches from 0 to 1."""
    return KAPPA1_B / KAPPA1_W


def build_kappa1(qs=None, lo=0, hi=1):
    """``ITE(0.93198992 * x1 - 0.64735516 >= 0, 1, 0)``.

    Over the whole real line by default; with ``qs`` the feature becomes
    the grid ``lo, lo + qs, ..., hi``.
    """
    domain = RealInterval() if qs is None else QuantizedReal(lo, hi, qs)
    return Classifier(FeatureSpace([domain]), (0, 1), Linear([KAPPA1_W], KAPPA1_B))


def build_kappa2(qs=None, lo=-1, hi=2):
    """kappa1 on x1 when ``x1 <= 1``, otherwise ``ITE(x1 > x2, 1, 0)``."""
    if qs is None:
        domains = [RealInterval(), RealInterval()]
    else:
        domains = [QuantizedReal(lo, hi, qs), QuantizedReal(lo, hi, qs)]
    body = Piecewise([
        (Guard([-1, 0], -1), Linear([KAPPA1_W, 0], KAPPA1_B)),
        # label 0 when x2 - x1 >= 0, i.e. label 1 exactly when x1 > x2
        (None, Linear([-1, 1], 0, labels=(1, 0))),
    ])
    return Classifier(FeatureSpace(domains), (0, 1), body)


def random_bnn(seed, n_inputs=None, hidden=None, n_classes=None, levels=4, max_tries=50):
    """A seeded random nontrivial BNN over quantized inputs on ``[0, 1]``.

    Inputs have ``levels`` grid points (``levels == 2`` gives binary
    features).  Thresholds sit near the middle of each neuron's
    pre-activation range so that units actually switch.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        m = int(n_inputs if n_inputs is not None else rng.integers(8, 33))
        widths = list(hidden) if hidden is not None else [
            int(rng.integers(8, 25)) for _ in range(int(rng.integers(2, 4)))
        ]
        k = int(n_classes if n_classes is not None else rng.integers(2, 5))
        if levels == 2:
            domains = [Binary() for _ in range(m)]
            mean_in = np.zeros(m)
        else:
            domains = [QuantizedReal(0, 1, Fraction(1, levels - 1)) for _ in range(m)]
            mean_in = np.full(m, (levels - 1) / 2)
        layers = []
        n_in, mean = m, mean_in
        for width in widths:
            w = rng.choice(np.array([-1, 1]), size=(width, n_in))
            centre = w @ mean
            t = np.round(centre + rng.normal(0, 1, size=width)).astype(np.int64)
            layers.append(BNNLayer(w, t))
            n_in, mean = width, np.zeros(width)
        w = rng.choice(np.array([-1, 1]), size=(k, n_in))
        t = rng.integers(-2, 3, size=k)
        layers.append(BNNLayer(w, t))
        clf = Classifier(FeatureSpace(domains), tuple(range(k)), BNN(layers))
        try:
            is_nontrivial(clf, search_budget=64, seed=seed)
        except TrivialClassifier:
            continue
        return clf
    raise TrivialClassifier(f"no nontrivial BNN found for seed {seed}")


def random_lookup(seed, m=4, n_classes=2, density=0.5, default=0):
    """Random table over ``m`` binary features; about ``density`` of points listed."""
    rng = np.random.default_rng(seed)
    table = {}
    for point in itertools.product((0, 1), repeat=m):
        if rng.random() < density:
            table[point] = int(rng.integers(n_classes))
    return Classifier(FeatureSpace([Binary() for _ in range(m)]), tuple(range(n_classes)), Lookup(table, default))


def constant_lookup(m=3, label=0):
    return Classifier(FeatureSpace([Binary() for _ in range(m)]), (0, 1), Lookup({}, label))
