import itertools
import random
import sys

import pytest
from hypothesis import given, settings, strategies as st

from robxp import BridgeError, DistanceSpec, ExplanationProblem, INF, random_bnn, random_lookup
from robxp.encode import Formula, aex_query, decode
from robxp.model import evaluate
from robxp.oracle import (
    Solver, Status, main, parse_solver_output, read_dimacs, read_opb, solve, solve_cnf, solve_external,
)
from robxp.pb import at_least, at_most


def _formula(n, clauses=(), pbs=()):
    f = Formula()
    for _ in range(n):
        f.varmap.new_var()
    for c in clauses:
        f.add_clause(c)
    for c in pbs:
        f.add_pb(c)
    return f


def _pigeonhole(pigeons, holes):
    var = lambda p, h: p * holes + h + 1  # noqa: E731
    f = _formula(pigeons * holes)
    for p in range(pigeons):
        f.add_pb(at_least([var(p, h) for h in range(holes)], 1))
    for h in range(holes):
        f.add_pb(at_most([var(p, h) for p in range(pigeons)], 1))
    return f


def test_small_sat():
    res = solve(_formula(2, [[1, 2], [-1]]))
    assert res.status is Status.SAT
    assert res.model == {1: False, 2: True}


def test_small_unsat():
    assert solve(_formula(1, [[1], [-1]])).unsat


def test_empty_clause_unsat():
    assert solve_cnf(1, [[]]).unsat


def test_pigeonhole_4_into_3():
    assert solve(_pigeonhole(4, 3)).unsat
    assert solve(_pigeonhole(3, 3)).sat


def test_pigeonhole_via_opb_text():
    from robxp.encode import pb_text
    f = read_opb(pb_text(_pigeonhole(4, 3)))
    assert solve(f).unsat


def test_budget_gives_resource_out():
    res = solve(_pigeonhole(8, 7), max_conflicts=5)
    assert res.status is Status.RESOURCE_OUT


def test_assumptions():
    s = Solver(2, [[1, 2]])
    assert s.solve([-1]).model[2] is True
    assert Solver(2, [[1, 2]]).solve([-1, -2]).unsat


def test_bad_literal():
    with pytest.raises(ValueError):
        Solver(2, [[3]])


def _brute_sat(n, clauses):
    for bits in itertools.product((False, True), repeat=n):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return True
    return False


clause_sets = st.integers(1, 8).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.lists(st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v])), min_size=1, max_size=4),
                 max_size=40),
    )
)


@settings(max_examples=300, deadline=None)
@given(clause_sets)
def test_embedded_matches_truth_table(data):
    n, clauses = data
    res = solve_cnf(n, clauses)
    assert res.sat == _brute_sat(n, clauses)


def test_random_3sat_near_threshold():
    rng = random.Random(7)
    for _ in range(40):
        n = 12
        clauses = [[rng.choice([1, -1]) * v for v in rng.sample(range(1, n + 1), 3)] for _ in range(51)]
        assert solve_cnf(n, clauses).sat == _brute_sat(n, clauses)


def test_parse_solver_output():
    status, model = parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n")
    assert status is Status.SAT
    assert model == {1: True, 2: False, 3: True}
    assert parse_solver_output("s UNSATISFIABLE\n")[0] is Status.UNSAT
    assert parse_solver_output("s SATISFIABLE\nv x1 -x2\n", "opb")[1] == {1: True, 2: False}
    with pytest.raises(BridgeError):
        parse_solver_output("nothing here")


def test_read_dimacs():
    n, clauses = read_dimacs("c x\np cnf 3 2\n1 -2 0\n3\n0\n")
    assert n == 3
    assert clauses == [[1, -2], [3]]


def test_external_matches_embedded(self_solver):
    for f in (_formula(2, [[1, 2], [-1]]), _formula(1, [[1], [-1]])):
        ext = solve_external(f, self_solver)
        emb = solve(f)
        assert ext.status is emb.status
        if emb.sat:
            assert ext.model == emb.model


def test_external_opb(self_solver):
    assert solve_external(_pigeonhole(4, 3), self_solver, fmt="opb").unsat
    assert solve_external(_pigeonhole(2, 2), self_solver, fmt="opb").sat


def test_external_non_model_rejected(tmp_path):
    liar = tmp_path / "liar.py"
    liar.write_text("print('s SATISFIABLE')\nprint('v -1 -2 0')\n")
    with pytest.raises(BridgeError, match="verification failed"):
        solve_external(_formula(2, [[1, 2]]), f"{sys.executable} {liar}")


def test_external_crash_and_missing(tmp_path):
    crash = tmp_path / "crash.py"
    crash.write_text("import sys\nsys.exit(3)\n")
    with pytest.raises(BridgeError):
        solve_external(_formula(1, [[1]]), f"{sys.executable} {crash}")
    with pytest.raises(BridgeError, match="not found"):
        solve_external(_formula(1, [[1]]), str(tmp_path / "no-such-solver"))


def test_external_timeout(tmp_path):
    slow = tmp_path / "slow.py"
    slow.write_text("import time\ntime.sleep(10)\n")
    res = solve_external(_formula(1, [[1]]), f"{sys.executable} {slow}", timeout=0.5)
    assert res.status is Status.RESOURCE_OUT


def test_external_env_default(monkeypatch, self_solver):
    monkeypatch.setenv("ROBXP_SOLVER", self_solver)
    assert solve_external(_formula(2, [[1, 2], [-1]])).model == {1: False, 2: True}


def test_front_end_exit_codes(tmp_path, capsys):
    p = tmp_path / "q.cnf"
    p.write_text("p cnf 2 2\n1 2 0\n-1 0\n")
    assert main([str(p)]) == 10
    assert "v -1 2 0" in capsys.readouterr().out
    p.write_text("p cnf 1 2\n1 0\n-1 0\n")
    assert main([str(p)]) == 20


def test_fifty_queries_embedded_vs_external(self_solver):
    rng = random.Random(11)
    agree = 0
    for k in range(50):
        clf = random_lookup(k, m=4)
        v = tuple(rng.randint(0, 1) for _ in range(4))
        problem = ExplanationProblem.at(clf, v)
        spec = DistanceSpec(rng.choice([0, INF]), rng.randint(1, 2))
        fixed = frozenset(i for i in range(1, 5) if rng.random() < 0.3)
        f = aex_query(problem, spec, fixed)
        emb, ext = solve(f), solve_external(f, self_solver)
        assert emb.status is ext.status
        agree += 1
    assert agree == 50


def test_bnn_model_decodes_to_counterexample():
    clf = random_bnn(2, n_inputs=8, levels=2)
    v = (0,) * 8
    problem = ExplanationProblem.at(clf, v)
    f = aex_query(problem, DistanceSpec(0, 8))
    res = solve(f)
    assert res.sat
    x = decode(res.model, f.varmap)
    assert evaluate(clf, x) != problem.c
