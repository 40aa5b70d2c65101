from fractions import Fraction

import pytest

from robxp import (
    DistanceSpec, EmptyChangeError, ExplanationListing, ExplanationProblem, INF, NotApplicable,
    OracleConfig, build_kappa2, check_mhs_duality, cxp_from_aex, enumerate_explanations, find_aex,
    find_axp, find_cxp, is_weak_axp, plain_explanations, random_lookup,
)
from robxp.brute import brute_enumerate_explanations
from robxp.explain import is_weak_cxp, minimal_hitting_sets

S = frozenset


def test_weak_axp_predicate(e2):
    assert is_weak_axp(e2, set(), DistanceSpec(INF, "0.5"))
    assert not is_weak_axp(e2, set(), DistanceSpec(INF, "0.7"))
    assert is_weak_axp(e2, {1, 2}, DistanceSpec(INF, 100))


def test_weak_cxp_predicate(e2):
    assert is_weak_cxp(e2, {1}, DistanceSpec(INF, "0.7"))
    assert not is_weak_cxp(e2, {2}, DistanceSpec(INF, "0.7"))


def test_axp_kappa2(e2):
    assert find_axp(e2, DistanceSpec(INF, "0.7")).features == S({1})
    assert find_axp(e2, DistanceSpec(INF, "0.5")).features == S()
    assert find_axp(e2, DistanceSpec(0, 2)).features == S({1})


def test_axp_rejects_bad_seed(e2):
    with pytest.raises(ValueError):
        find_axp(e2, DistanceSpec(INF, "0.7"), R={2})


def test_cxp_kappa2(e2):
    assert find_cxp(e2, DistanceSpec(INF, "0.7")).features == S({1})
    assert find_cxp(e2, DistanceSpec(0, 2)).features == S({1})


def test_cxp_needs_an_aex(e1):
    with pytest.raises(ValueError):
        find_cxp(e1, DistanceSpec(INF, "0.005"))


def test_plain_explanations(e1, e2):
    assert plain_explanations(e2, "axp").features == S({1})
    assert plain_explanations(e2, "cxp").features == S({1})
    assert plain_explanations(e1, "axp").features == S({1})
    with pytest.raises(ValueError):
        plain_explanations(e2, "why")


def test_call_counts(e2):
    e = find_axp(e2, DistanceSpec(INF, "0.7"))
    assert e.calls == 2


def test_enumerate_kappa2(e2):
    got = enumerate_explanations(e2, DistanceSpec(INF, "0.7"))
    assert got == ExplanationListing({S({1})}, {S({1})}, True)
    got = enumerate_explanations(e2, DistanceSpec(INF, "0.5"))
    assert got.axps == {S()} and got.cxps == set() and got.complete


def test_enumerate_limit(e2):
    got = enumerate_explanations(e2, DistanceSpec(INF, "0.7"), limit=1)
    assert len(got) == 1 and not got.complete and got.reason == "limit reached"
    with pytest.raises(ValueError):
        enumerate_explanations(e2, DistanceSpec(INF, "0.7"), limit=0)


def test_enumerate_unknown_is_partial():
    clf = random_lookup(3, m=6)
    problem = ExplanationProblem.at(clf, (0,) * 6)
    got = enumerate_explanations(problem, DistanceSpec(0, 6), oracle=OracleConfig(max_conflicts=0))
    if not got.complete:
        assert got.reason.startswith("oracle unknown")


def test_enumerate_lookup_matches_brute():
    clf = random_lookup(9, m=4)
    problem = ExplanationProblem.at(clf, (1, 0, 1, 0))
    spec = DistanceSpec(0, 4)
    got = enumerate_explanations(problem, spec)
    assert got == brute_enumerate_explanations(problem, spec)
    assert check_mhs_duality(got)


def test_enumerate_quantized_kappa2_matches_brute():
    clf = build_kappa2(qs=Fraction(1, 10))
    problem = ExplanationProblem.at(clf, (0, 1))
    for eps in ("0.5", "0.7", "2"):
        spec = DistanceSpec(INF, eps)
        assert enumerate_explanations(problem, spec) == brute_enumerate_explanations(problem, spec)


def test_cxp_from_aex():
    assert cxp_from_aex((0, 1), (0.7, 1)) == S({1})
    assert cxp_from_aex((0, 0, 0), (1, 0, 1)) == S({1, 3})
    with pytest.raises(EmptyChangeError):
        cxp_from_aex((0, 1), (0, 1))


def test_aex_change_set_is_weak_cxp(e2):
    spec = DistanceSpec(INF, "0.7")
    x = find_aex(e2, spec)
    assert is_weak_cxp(e2, cxp_from_aex(e2.v, x), spec)


def test_duality_check():
    assert check_mhs_duality(ExplanationListing({S({1})}, {S({1})}, True))
    assert not check_mhs_duality(ExplanationListing({S({1, 2})}, {S({1})}, True))
    assert check_mhs_duality(ExplanationListing({S({1, 2}), S({1, 3})}, {S({1}), S({2, 3})}, True))
    with pytest.raises(NotApplicable):
        check_mhs_duality(ExplanationListing(set(), set(), False))


def test_minimal_hitting_sets():
    assert minimal_hitting_sets([{1, 2}, {2, 3}]) == {S({2}), S({1, 3})}
    assert minimal_hitting_sets([]) == {S()}
