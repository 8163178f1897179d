import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mqv import (
    Representation,
    a_n,
    check_lusztig_conditions,
    check_relation,
    jordan,
    middle_convolve,
    reduce_dimension_vector,
    reflect_dim,
    verify_involution,
)
from mqv.convolution import find_intertwiner, intertwines, normalize_at, denormalize
from mqv.errors import ContractViolation, EmptinessError, FunctorInapplicable, ModeError
from mqv.generators import InstanceRecipe, generate_solution
from mqv.representation import phi
from mqv.scalars import ONE

from conftest import S, mat

THETA = {"1": 1, "2": -1}


def test_a2_convolution_at_vertex_2(a2_worked, a2_q):
    res = middle_convolve(a2_worked, "2", a2_q, THETA)
    assert res.ok
    assert res.q_prime == {"1": S(1), "2": S("1/2")}
    assert res.theta_prime == {"1": 0, "2": 1}
    assert res.dims_prime == {"1": 1, "2": 0}
    assert all(v == 0 for v in res.identities.values())
    assert check_relation(res.x_prime, res.q_prime).ok


def test_a2_convolution_at_vertex_1(a2_worked, a2_q):
    # vertex 1 only sees the reversed arrow, so the orientation swap is used
    res = middle_convolve(a2_worked, "1", a2_q, THETA)
    assert res.ok
    assert res.q_prime == {"1": S(2), "2": S(1)}
    assert res.dims_prime == {"1": 0, "2": 1}


def test_negative_reflection_is_emptiness():
    x = Representation(a_n(2), {"1": 0, "2": 1})
    with pytest.raises(EmptinessError) as info:
        middle_convolve(x, "2", {"1": 1, "2": 1}, {"1": 1, "2": -1})
    assert info.value.dims == {"1": 0, "2": -1}


def test_q_one_needs_negative_theta(a2_worked):
    x = Representation(a_n(2), {"1": 1, "2": 0})
    with pytest.raises(ContractViolation):
        middle_convolve(x, "2", {"1": 1, "2": 1})


def test_non_solution_is_rejected(a2_worked):
    with pytest.raises(ContractViolation):
        middle_convolve(a2_worked, "2", {"1": 1, "2": 1})


def test_loops_and_float_are_rejected():
    x = Representation(jordan(), {"v": 1}, {"l": mat([[1]]), "l*": mat([[1]])})
    with pytest.raises(FunctorInapplicable):
        middle_convolve(x, "v", {"v": 1})
    with pytest.raises(ModeError):
        middle_convolve(Representation(a_n(2), {"1": 1, "2": 1}).to_float(), "1", [1, 1])


def test_involution_on_worked_example(a2_worked, a2_q):
    cert = verify_involution(a2_worked, "2", a2_q, THETA)
    assert cert.ok
    assert intertwines(cert.g, a2_worked, cert.x2)


def test_correspondence_conditions_on_worked_example(a2_worked, a2_q):
    res = middle_convolve(a2_worked, "2", a2_q, THETA)
    report = check_lusztig_conditions(a2_worked, res.x_prime, "2", a2_q, THETA)
    for key in ("R1", "R2", "R3", "R4", "R4'", "R5", "R5'"):
        assert report[key] is True, key
    assert report["R6"] == "Stable" and report["R6'"] == "Stable"


def test_correspondence_conditions_reject_the_identity_pair(a2_worked, a2_q):
    report = check_lusztig_conditions(a2_worked, a2_worked, "2", a2_q, stability=False)
    assert report["R1"] and report["R5"]
    assert not report["R2"] and not report["R3"] and not report["R5'"]
    assert report["R6"] == "Unknown"


def test_reduction_trace(a2_worked, a2_q):
    trace = reduce_dimension_vector(a2_worked, a2_q, THETA)
    assert [s.vertex for s in trace.steps] == ["2"]
    assert trace.final.dims == {"1": 1, "2": 0}
    # (dim, e_1) = 2 > 0 at the end, but q_1 = 1 with theta_1 = 0 blocks S_1
    assert trace.terminal == "stalled"


def test_normalization_preserves_phi(a2_worked):
    y, flip = normalize_at(a2_worked, "1")
    assert flip == ["h1*"]
    px, py = phi(a2_worked), phi(y)
    assert all(px[v] == py[v] for v in px)
    assert denormalize(y, flip, a2_worked.dq) == a2_worked


# ---------------------------------------------------------------------------
# generated solutions


FAMILIES = [("scalar", {"n": 3}), ("hypergeometric", {"r": 2}), ("hypergeometric", {"r": 3})]


def _admissible(inst):
    x = inst.rep
    return [i for i in x.dq.vertices if inst.q[i] != ONE and min(reflect_dim(x.dq, i, x.dims).values()) >= 0]


@given(st.integers(0, 10**6), st.sampled_from(range(len(FAMILIES))), st.integers(0, 20))
def test_convolution_identities_on_generated_solutions(seed, fam, pick):
    family, params = FAMILIES[fam]
    inst = generate_solution(InstanceRecipe(family, params, seed))
    verts = _admissible(inst)
    if not verts:
        return
    i = verts[pick % len(verts)]
    res = middle_convolve(inst.rep, i, inst.q, inst.theta)
    assert res.ok
    assert res.dims_prime == reflect_dim(inst.rep.dq, i, inst.rep.dims)


def test_involution_on_generated_hypergeometric():
    inst = generate_solution(InstanceRecipe("hypergeometric", {"r": 2}, 7))
    rng = np.random.default_rng(0)
    for i in _admissible(inst):
        assert verify_involution(inst.rep, i, inst.q, inst.theta, rng=rng).ok


def test_intertwiner_detects_non_isomorphic_pairs(a2_worked):
    other = Representation(a_n(2), {"1": 1, "2": 1}, {"h1": mat([[1]]), "h1*": mat([[0]])})
    assert find_intertwiner(a2_worked, other) is None
