from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mqv import (
    DoubledQuiver,
    Quiver,
    a_n,
    bilinear_form,
    build_star,
    double,
    enumerate_Rplus_bounded,
    is_generic,
    jordan,
    kronecker,
    reflect_dim,
    reflect_q,
    reflect_theta,
    root_datum_from_graph,
)
from mqv.errors import ContractViolation, FunctorInapplicable
from mqv.roots import adjacency_matrix, q_power, theta_dot, unit
from mqv.scalars import GaussianRational

from conftest import S

# ---------------------------------------------------------------------------
# quivers


def test_double_a2():
    dq = double(a_n(2))
    assert dq.order == ("h1", "h1*")
    assert dq.out("h1*") == "2" and dq.into("h1*") == "1"
    assert dq.eps("h1") == 1 and dq.eps("h1*") == -1
    assert dq.bar(dq.bar("h1")) == "h1"


def test_double_jordan_has_two_opposite_loops():
    dq = double(jordan())
    assert all(dq.is_loop(h) for h in dq.order)
    assert sorted(dq.eps(h) for h in dq.order) == [-1, 1]


def test_empty_arrow_set():
    dq = double(Quiver(["a", "b"], []))
    assert dq.order == ()
    assert dq.incoming == {"a": (), "b": ()}


def test_explicit_order_must_be_a_permutation():
    with pytest.raises(ContractViolation):
        double(a_n(2), ["h1", "h1"])
    dq = double(a_n(2), ["h1*", "h1"])
    assert not dq.is_canonical()


@pytest.mark.parametrize("arms,count", [((1, 1, 1), 4), ((1,), 2), ((2, 2), 5)])
def test_star_vertex_counts(arms, count):
    sq = build_star(arms)
    assert len(sq.vertices) == count
    assert sq.is_tree()


def test_star_needs_an_arm():
    with pytest.raises(ContractViolation):
        build_star([])


def test_star_with_one_arm_is_a2():
    sq = build_star([1])
    assert [(a.out, a.into) for a in sq.arrows] == [("1.1", "0")]


def test_sign_sum_vanishes_and_opposite_negates():
    for q in (a_n(3), kronecker(3), jordan(), build_star([2, 1])):
        dq = double(q)
        assert sum(dq.eps(h) for h in dq.order) == 0
        op = DoubledQuiver(q.opposite())
        assert {(op.out(h), op.into(h)) for h in op.order} == {(dq.out(h), dq.into(h)) for h in dq.order}


def test_quiver_json_round_trip_keeps_order():
    dq = double(kronecker(2), ["h2", "h1", "h1*", "h2*"])
    back = DoubledQuiver.from_json(dq.to_json())
    assert back == dq and back.order == dq.order


# ---------------------------------------------------------------------------
# form and reflections


def test_bilinear_form_examples():
    dq = double(a_n(2))
    assert bilinear_form(dq, [1, 0], [1, 0]) == 2
    assert bilinear_form(dq, [1, 0], [0, 1]) == -1
    assert bilinear_form(double(jordan()), [1], [1]) == 0


def test_bilinear_form_vertex_mismatch():
    with pytest.raises(ContractViolation):
        bilinear_form(double(a_n(2)), [1, 0, 0], [1, 0])


def test_reflect_dim_examples():
    dq = double(a_n(2))
    assert reflect_dim(dq, "1", [1, 1]) == {"1": 0, "2": 1}
    assert reflect_dim(dq, "1", [0, 1]) == {"1": 1, "2": 1}
    assert reflect_dim(dq, "2", {"1": 0, "2": 1}) == {"1": 0, "2": -1}


def test_reflections_refuse_loops():
    with pytest.raises(FunctorInapplicable):
        reflect_dim(double(jordan()), "v", [1])


def test_reflect_theta_examples():
    dq = double(a_n(2))
    assert reflect_theta(dq, "1", [1, -1]) == {"1": -1, "2": 0}
    assert reflect_theta(dq, "1", [0, 0]) == {"1": 0, "2": 0}


def test_reflect_q_examples():
    dq = double(a_n(2))
    assert reflect_q(dq, "1", ["4", "1/4"]) == {"1": S("1/4"), "2": S(1)}
    assert reflect_q(dq, "2", ["1/2", "2"]) == {"1": S(1), "2": S("1/2")}
    assert reflect_q(dq, "1", [1, 1]) == {"1": S(1), "2": S(1)}


def test_rplus_examples():
    assert enumerate_Rplus_bounded(double(a_n(2)), [1, 1]) == [{"1": 0, "2": 1}, {"1": 1, "2": 0}, {"1": 1, "2": 1}]
    assert enumerate_Rplus_bounded(double(Quiver(["1"], [])), [3]) == [{"1": 1}]
    assert enumerate_Rplus_bounded(double(jordan()), [2]) == [{"v": 1}, {"v": 2}]


def test_genericity_examples():
    dq = double(a_n(2))
    assert is_generic(dq, [1, 1], ["2", "1/2"], [1, -1]).generic
    rep = is_generic(dq, [1, 1], [1, 1], [0, 0])
    assert not rep.generic and rep.reason == "wall" and rep.witness is not None
    rep = is_generic(dq, [1, 1], ["2", "1/3"], [1, -1])
    assert not rep.generic and rep.reason == "q^v != 1"


def test_root_datum_examples():
    assert root_datum_from_graph(double(a_n(2))).cartan.tolist() == [[2, -1], [-1, 2]]
    assert root_datum_from_graph(double(kronecker(2))).cartan.tolist() == [[2, -2], [-2, 2]]
    assert root_datum_from_graph(double(Quiver(["x"], []))).cartan.tolist() == [[2]]
    with pytest.raises(ContractViolation):
        root_datum_from_graph(double(jordan()))


def test_root_datum_axioms():
    rd = root_datum_from_graph(double(build_star([2, 1, 1])))
    c = rd.cartan
    assert all(c[i, i] == 2 for i in range(rd.n))
    for i, vi in enumerate(rd.vertices):
        for j, vj in enumerate(rd.vertices):
            assert rd.pair(vi, rd.simple_root(vj)) == c[i, j]
            assert rd.pair(vj, rd.fundamental_weight(vi)) == int(i == j)
            assert rd.form(rd.simple_root(vi), rd.simple_root(vj)) == c[i, j]
            assert (c[i, j] == 0) == (c[j, i] == 0)


def test_form_on_units_matches_cartan():
    for q in (a_n(3), kronecker(3), build_star([1, 1, 1])):
        dq = double(q)
        c = root_datum_from_graph(dq).cartan
        names = list(dq.vertices)
        for a, i in enumerate(names):
            for b, j in enumerate(names):
                assert bilinear_form(dq, unit(dq, i), unit(dq, j)) == c[a, b]
        # independent oracle: 2I - A from the raw arrow list
        a = adjacency_matrix(dq)
        assert (c == 2 * np.eye(len(names), dtype=int) - a).all()


QUIVERS = [a_n(2), a_n(3), kronecker(2), build_star([1, 1, 1]), build_star([2, 1])]
vec = st.lists(st.integers(0, 3), min_size=5, max_size=5)


@st.composite
def reflection_data(draw):
    q = QUIVERS[draw(st.integers(0, len(QUIVERS) - 1))]
    dq = double(q)
    n = len(dq.vertices)
    i = dq.vertices[draw(st.integers(0, n - 1))]
    alpha = draw(vec)[:n]
    beta = draw(vec)[:n]
    theta = [Fraction(draw(st.integers(-6, 6)), draw(st.integers(1, 4))) for _ in range(n)]
    pool = [GaussianRational(2), GaussianRational(-1), GaussianRational(1, 1), GaussianRational(Fraction(2, 3))]
    qv = [pool[draw(st.integers(0, 3))] for _ in range(n)]
    names = list(dq.vertices)
    return dq, i, dict(zip(names, alpha)), dict(zip(names, beta)), dict(zip(names, theta)), dict(zip(names, qv))


@given(reflection_data())
def test_reflection_preserves_form(data):
    dq, i, alpha, beta, _, _ = data
    assert bilinear_form(dq, reflect_dim(dq, i, alpha), reflect_dim(dq, i, beta)) == bilinear_form(dq, alpha, beta)


@given(reflection_data())
def test_reflection_dualities_and_involutions(data):
    dq, i, alpha, _, theta, q = data
    sa = reflect_dim(dq, i, alpha)
    assert theta_dot(theta, sa) == theta_dot(reflect_theta(dq, i, theta), alpha)
    assert q_power(q, sa) == q_power(reflect_q(dq, i, q), alpha)
    assert reflect_dim(dq, i, sa) == alpha
    assert reflect_theta(dq, i, reflect_theta(dq, i, theta)) == theta
    assert reflect_q(dq, i, reflect_q(dq, i, q)) == q
    assert reflect_q(dq, i, q)[i] == q[i].inverse()


@given(reflection_data())
def test_form_is_symmetric(data):
    dq, _, alpha, beta, _, _ = data
    assert bilinear_form(dq, alpha, beta) == bilinear_form(dq, beta, alpha)
