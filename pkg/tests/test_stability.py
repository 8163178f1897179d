from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mqv import (
    FramedRepresentation,
    Quiver,
    Representation,
    Subspace,
    a_n,
    check_framed_stability,
    check_general_stability,
    double,
    frame,
    kronecker,
)
from mqv.errors import ContractViolation, ModeError
from mqv.generators import InstanceRecipe, generate_solution, random_framed
from mqv.stability import (
    STABLE,
    UNKNOWN,
    UNSTABLE,
    associated_graded,
    verify_certificate,
)

from conftest import mat


def test_simple_a2_rep_is_stable_for_every_admissible_theta(a2_worked):
    for theta in ({"1": 1, "2": -1}, {"1": -1, "2": 1}, {"1": 0, "2": 0}):
        verdict = check_general_stability(a2_worked, theta)
        assert verdict.status == STABLE and verdict.certificate is None


def test_zero_a2_rep_has_a_destabilizer():
    z = Representation.zero(double(a_n(2)), {"1": 1, "2": 1})
    verdict = check_general_stability(z, {"1": 1, "2": -1})
    assert verdict.status == UNSTABLE
    assert verdict.certificate.dims == {"1": 1, "2": 0}
    assert verdict.value == 1
    assert verify_certificate(z, verdict.certificate, {"1": 1, "2": -1}, 1)


def test_half_zero_a2_rep_is_semistable_only_on_one_side():
    # only h1: 1 -> 2 is nonzero, so V_2 is invariant and V_1 is not
    x = Representation(a_n(2), {"1": 1, "2": 1}, {"h1": mat([[1]])})
    assert check_general_stability(x, {"1": 1, "2": -1}).status == STABLE
    bad = check_general_stability(x, {"1": -1, "2": 1})
    assert bad.status == UNSTABLE and bad.certificate.dims == {"1": 0, "2": 1}


def test_theta_must_pair_to_zero(a2_worked):
    with pytest.raises(ContractViolation):
        check_general_stability(a2_worked, {"1": 1, "2": 0})


def test_float_is_rejected(a2_worked):
    with pytest.raises(ModeError):
        check_general_stability(a2_worked.to_float(), {"1": 0, "2": 0})


def test_certificate_checks_reject_bad_subspaces(a2_worked):
    theta = {"1": 1, "2": -1}
    assert not verify_certificate(a2_worked, Subspace.coordinate(a2_worked, ["1"]), theta, 1)
    assert not verify_certificate(a2_worked, Subspace.full(a2_worked), theta, 0)
    assert not verify_certificate(a2_worked, Subspace.zero(a2_worked), theta, 0)


def test_framed_zero_b_is_unstable():
    base = Representation(Quiver(["1"], []), {"1": 1})
    fx = FramedRepresentation(base, {"1": 1}, {"1": mat([[1]])}, {"1": mat([[0]])})
    verdict = check_framed_stability(fx, {"1": 1})
    assert verdict.status == UNSTABLE
    assert verdict.certificate.dims == {"1": 1, "inf": 0}


def test_framed_injective_b_is_stable():
    base = Representation(Quiver(["1"], []), {"1": 1})
    fx = FramedRepresentation(base, {"1": 1}, None, {"1": mat([[1]])})
    verdict = check_framed_stability(fx, {"1": 1})
    assert verdict.stable
    assert verdict.diagnostics["im_a_closure_is_V"] is False


def test_framed_with_nonpositive_theta_delegates():
    base = Representation(Quiver(["1"], []), {"1": 1})
    fx = FramedRepresentation(base, {"1": 1}, {"1": mat([[1]])}, {"1": mat([[1]])})
    verdict = check_framed_stability(fx, {"1": -1})
    assert verdict.method == "ExhaustiveTiny"
    assert verdict.stable


def test_large_instances_fall_back_to_search():
    inst = generate_solution(InstanceRecipe("hypergeometric", {"r": 3}, 5))
    verdict = check_general_stability(inst.rep, inst.theta, budget=20, rng=np.random.default_rng(0), q=inst.q)
    # the tuple is irreducible, so a search cannot find a destabilizer
    assert verdict.status == UNKNOWN
    assert verdict.method == "RandomizedSearch"


def test_associated_graded_splits_the_filtration():
    x = Representation(a_n(2), {"1": 1, "2": 1}, {"h1": mat([[1]])})
    sub = Subspace.coordinate(x, ["2"])
    gr = associated_graded(x, [Subspace.full(x), sub, Subspace.zero(x)])
    assert gr.dims == x.dims
    assert gr.maps["h1"].is_zero()


# ---------------------------------------------------------------------------
# cross-validation of the two exact regimes


CROSS = [
    (Quiver(["1"], []), 3),
    (a_n(2), 2),
    (kronecker(2), 2),
    (Quiver(["1", "2"], [("h1", "1", "2"), ("h2", "2", "1")]), 2),
]


@given(st.integers(0, 10**6), st.sampled_from(range(len(CROSS))), st.sampled_from([0.3, 0.6, 1.0]))
def test_framed_fixpoint_agrees_with_exhaustive_check(seed, shape, density):
    rng = np.random.default_rng(seed)
    quiver, hi = CROSS[shape]
    dims = {v: int(rng.integers(1, hi + 1)) for v in quiver.vertices}
    while sum(dims.values()) > 4:
        v = max(dims, key=dims.get)
        dims[v] -= 1
    w = {v: int(rng.integers(0, 3)) for v in quiver.vertices}
    fx = random_framed(rng, quiver, dims, w, density=density)
    theta = {v: Fraction(int(rng.integers(1, 4)), int(rng.integers(1, 3))) for v in quiver.vertices}
    framed = check_framed_stability(fx, theta)
    ext, _, tt = frame(fx, None, theta)
    tiny = check_general_stability(ext, tt)
    assert framed.status == tiny.status
    for verdict in (framed, tiny):
        if verdict.certificate is not None:
            assert verify_certificate(ext, verdict.certificate, tt, 1)
