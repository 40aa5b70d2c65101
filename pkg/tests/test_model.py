from fractions import Fraction
import itertools

import numpy as np
import pytest

from robxp import (
    BNN, BNNLayer, Binary, Categorical, Classifier, DomainError, ExplanationProblem, FeatureSpace,
    Instance, IntegerRange, Lookup, QuantizedReal, RealInterval, TrivialClassifier, evaluate,
    is_nontrivial, random_bnn,
)
from robxp.errors import DimensionError
from robxp.fixtures import KAPPA1_TRAINING, constant_lookup, kappa1_threshold


def test_kappa1_training_points(kappa1):
    assert evaluate(kappa1, (1.0,)) == 1
    assert evaluate(kappa1, (0.0,)) == 0
    assert [evaluate(kappa1, (x,)) for x, _ in KAPPA1_TRAINING] == [c for _, c in KAPPA1_TRAINING]


def test_kappa1_threshold_is_inclusive(kappa1):
    t = kappa1_threshold()
    assert evaluate(kappa1, (t,)) == 1
    assert evaluate(kappa1, (t - Fraction(1, 10**12),)) == 0
    assert abs(float(t) - 0.69459459) < 1e-8


def test_kappa2_branches(kappa2):
    assert evaluate(kappa2, (2.0, 1.0)) == 1
    assert evaluate(kappa2, (2.0, 3.0)) == 0
    assert evaluate(kappa2, (0, 1)) == 0
    assert evaluate(kappa2, (0.7, 1)) == 1
    # the guard x1 <= 1 is inclusive: at x1 = 1 the first branch decides
    assert evaluate(kappa2, (1, 5)) == 1


def test_floats_are_read_by_shortest_repr(kappa1):
    assert kappa1.space.normalize((0.7,)) == (Fraction(7, 10),)


def test_domain_errors():
    space = FeatureSpace([QuantizedReal(0, 1, "0.25"), Binary(), Categorical(("a", "b"))])
    assert space.normalize((0.5, 1, "a")) == (Fraction(1, 2), 1, "a")
    for bad in [(0.3, 1, "a"), (0.5, 2, "a"), (0.5, 1, "c"), (2, 1, "a")]:
        with pytest.raises(DomainError):
            space.normalize(bad)
    with pytest.raises(DimensionError):
        space.normalize((0.5, 1))


def test_space_size():
    space = FeatureSpace([Binary(), IntegerRange(0, 4), QuantizedReal(0, 1, "0.5")])
    assert space.size() == 2 * 5 * 3
    assert FeatureSpace([RealInterval()]).size() == float("inf")


def test_explanation_problem_checks_label(kappa1):
    with pytest.raises(ValueError):
        ExplanationProblem(kappa1, Instance((0.7,), 0))
    assert ExplanationProblem.at(kappa1, (0.7,)).c == 1


def test_bnn_argmax_ties_go_low():
    out = BNNLayer([[1, 1], [1, 1]], [0, 0])
    clf = Classifier(FeatureSpace([Binary(), Binary()]), (0, 1), BNN([out]))
    assert evaluate(clf, (1, 1)) == 0


def test_bnn_batch_matches_pointwise():
    clf = random_bnn(3, n_inputs=8, levels=2)
    rng = np.random.default_rng(0)
    pts = [tuple(int(b) for b in rng.integers(0, 2, 8)) for _ in range(50)]
    batch = clf.body.evaluate_batch([clf.body.inputs(p, clf.space) for p in pts])
    assert list(batch) == [evaluate(clf, p) for p in pts]


def test_bnn_rejects_non_binary_weights():
    with pytest.raises(ValueError):
        BNNLayer([[1, 0]], [0])


def test_lookup_keys_are_normalized():
    clf = Classifier(FeatureSpace([Binary(), Binary()]), (0, 1), Lookup({(1.0, 0): 1}, 0))
    assert evaluate(clf, (1, 0)) == 1


def test_is_nontrivial_kappa1(kappa1):
    a, b = is_nontrivial(kappa1)
    assert {evaluate(kappa1, a), evaluate(kappa1, b)} == {0, 1}


def test_is_nontrivial_constant_lookup():
    with pytest.raises(TrivialClassifier):
        is_nontrivial(constant_lookup())


def test_is_nontrivial_rare_label_found_by_oracle():
    # one point out of 2^10 carries label 1; random sampling almost surely misses it
    clf = Classifier(FeatureSpace([Binary()] * 10), (0, 1), Lookup({(1,) * 10: 1}, 0))
    a, b = is_nontrivial(clf, search_budget=4)
    assert evaluate(clf, a) != evaluate(clf, b)


def test_is_nontrivial_bnn_against_exhaustive():
    clf = random_bnn(1, n_inputs=8, levels=2)
    labels = {evaluate(clf, p) for p in itertools.product((0, 1), repeat=8)}
    assert len(labels) > 1
    a, b = is_nontrivial(clf)
    assert evaluate(clf, a) != evaluate(clf, b)
