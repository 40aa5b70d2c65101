import itertools
from fractions import Fraction

import pytest

from robxp import (
    Binary, Classifier, DistanceSpec, ExplanationProblem, FeatureSpace, INF, IntegerRange, Lookup,
    NotApplicable, TooLarge, build_kappa2, evaluate,
)
from robxp.brute import EnumerableSpace, brute_enumerate_explanations, brute_find_aex, brute_global_pair

S = frozenset


def _xor3():
    table = {p: (p[0] ^ p[1] ^ p[2]) for p in itertools.product((0, 1), repeat=3)}
    return Classifier(FeatureSpace([Binary()] * 3), (0, 1), Lookup(table, 0))


def test_xor_every_flip_is_adversarial():
    problem = ExplanationProblem.at(_xor3(), (0, 0, 0))
    x = brute_find_aex(problem, DistanceSpec(0, 1))
    assert sum(x) == 1


def test_majority_center_is_stable_under_one_flip():
    # label 1 only at (1, 1, 1): no single flip from (0, 0, 0) reaches it
    clf = Classifier(FeatureSpace([Binary()] * 3), (0, 1), Lookup({(1, 1, 1): 1}, 0))
    problem = ExplanationProblem.at(clf, (0, 0, 0))
    assert brute_find_aex(problem, DistanceSpec(0, 1)) is None
    assert brute_find_aex(problem, DistanceSpec(0, 3)) == (1, 1, 1)


def test_all_fixed():
    problem = ExplanationProblem.at(_xor3(), (0, 1, 0))
    assert brute_find_aex(problem, DistanceSpec(0, 3), {1, 2, 3}) is None


def test_cap():
    space = FeatureSpace([Binary()] * 21)
    with pytest.raises(TooLarge):
        EnumerableSpace(space)
    assert len(EnumerableSpace(FeatureSpace([IntegerRange(0, 9)] * 2))) == 100
    with pytest.raises(NotApplicable):
        EnumerableSpace(build_kappa2().space)


def test_global_pair():
    v, x = brute_global_pair(_xor3(), DistanceSpec(0, 1))
    assert evaluate(_xor3(), v) != evaluate(_xor3(), x)


def test_enumeration_kappa2_grid():
    clf = build_kappa2(qs=Fraction(1, 10))
    problem = ExplanationProblem.at(clf, (0, 1))
    got = brute_enumerate_explanations(problem, DistanceSpec(INF, "0.7"))
    assert got.axps == {S({1})} and got.cxps == {S({1})}


def test_enumeration_constant_ball():
    clf = build_kappa2(qs=Fraction(1, 10))
    problem = ExplanationProblem.at(clf, (0, 1))
    got = brute_enumerate_explanations(problem, DistanceSpec(INF, "0.5"))
    assert got.axps == {S()} and got.cxps == set()
