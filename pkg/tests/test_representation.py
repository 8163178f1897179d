import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mqv import (
    FramedRepresentation,
    Matrix,
    Quiver,
    Representation,
    Subspace,
    a_n,
    arm_complex,
    build_star,
    check_relation,
    double,
    frame,
    in_invertibility_domain,
    invariant_closure,
    jordan,
    kronecker,
    mu,
    phi,
    phi_split,
    psi,
    quadratic_approx_probe,
    sigma_tau,
)
from mqv.errors import ContractViolation, DomainError, FunctorInapplicable, ModeError
from mqv.generators import framed_q1_instance, random_invertible, random_representation, shape_catalog
from mqv.linalg import contains
from mqv.representation import LARGEST, SMALLEST, act, is_invariant
from mqv.scalars import ONE

from conftest import S, mat

SHAPES = shape_catalog()
SHAPE_NAMES = sorted(SHAPES)
seeds = st.integers(0, 2**32 - 1)


def _random_rep(seed, name):
    quiver, dims = SHAPES[name]
    return random_representation(np.random.default_rng(seed), quiver, dims)


# ---------------------------------------------------------------------------
# worked examples


def test_a2_worked_example(a2_worked, a2_q):
    p = phi(a2_worked)
    assert p["1"] == mat([["1/2"]])
    assert p["2"] == mat([[2]])
    assert check_relation(a2_worked, a2_q).ok
    m = mu(a2_worked)
    assert m["1"] == mat([[-1]]) and m["2"] == mat([[1]])


def test_a2_sigma_tau(a2_worked, a2_q):
    for i in ("1", "2"):
        stt = sigma_tau(a2_worked, i, a2_q[i])
        assert stt.tau @ stt.sigma == Matrix.scalar(1, a2_q[i] - ONE)


def test_singular_factor_raises_domain_error():
    x = Representation(a_n(2), {"1": 1, "2": 1}, {"h1": mat([[1]]), "h1*": mat([[-1]])})
    assert not in_invertibility_domain(x)
    with pytest.raises(DomainError) as info:
        phi(x)
    assert info.value.arrow == "h1*"


def test_zero_representation_gives_identity():
    x = Representation.zero(double(kronecker(2)), {"1": 2, "2": 3})
    for v, m in phi(x).items():
        assert m == Matrix.identity(x.dims[v])


def test_zero_dimensional_vertex():
    x = Representation(a_n(2), {"1": 0, "2": 2})
    assert phi(x)["1"].shape == (0, 0)
    assert check_relation(x, {"1": 5, "2": 1}).ok


def test_phi_rejects_loops_and_psi_handles_them():
    x = Representation(jordan(), {"v": 1}, {"l": mat([[2]]), "l*": mat([[3]])})
    with pytest.raises(FunctorInapplicable):
        phi(x)
    assert psi(x)["v"] == mat([[1]])
    with pytest.raises(FunctorInapplicable):
        sigma_tau(x, "v", 1)


def test_wrong_shape_is_contract_violation():
    with pytest.raises(ContractViolation):
        Representation(a_n(2), {"1": 1, "2": 2}, {"h1": mat([[1]])})


def test_json_round_trip(a2_worked):
    back = Representation.from_json(a2_worked.to_json())
    assert back == a2_worked


def test_sigma_tau_needs_local_canonicity():
    dq = double(a_n(2), ["h1*", "h1"])
    x = Representation(dq, {"1": 1, "2": 1}, {"h1": mat([[1]]), "h1*": mat([[1]])})
    # each vertex sees a single arrow, so local canonicity holds
    assert sigma_tau(x, "1", "1/2").tau.shape == (1, 1)
    with pytest.raises(ContractViolation):
        phi_split(x)


def test_phi_split_recombines(a2_worked):
    for v, (plus, minus) in phi_split(a2_worked).items():
        assert plus @ minus.inverse() == phi(a2_worked)[v]


def test_closure_directions_on_a2(a2_worked):
    seed = Subspace.coordinate(a2_worked, ["1"])
    assert invariant_closure(a2_worked, seed, SMALLEST).dims == {"1": 1, "2": 1}
    assert invariant_closure(a2_worked, seed, LARGEST).dims == {"1": 0, "2": 0}
    with pytest.raises(ModeError):
        invariant_closure(a2_worked.to_float(), seed)


# ---------------------------------------------------------------------------
# properties on random in-domain representations


@given(seeds, st.sampled_from(SHAPE_NAMES))
def test_determinant_identity(seed, name):
    x = _random_rep(seed, name)
    prod = ONE
    for m in phi(x).values():
        if m.rows:
            prod = prod * m.det()
    assert prod == ONE


@given(seeds, st.sampled_from(SHAPE_NAMES))
def test_phi_and_mu_are_equivariant(seed, name):
    rng = np.random.default_rng(seed)
    x = _random_rep(seed, name)
    g = {v: random_invertible(rng, x.dims[v]) for v in x.dq.vertices}
    y = act(g, x)
    px, py = phi(x), phi(y)
    mx, my = mu(x), mu(y)
    for v in x.dq.vertices:
        if not x.dims[v]:
            continue
        gi = g[v].inverse()
        assert py[v] == g[v] @ px[v] @ gi
        assert my[v] == g[v] @ mx[v] @ gi


@given(seeds, st.sampled_from(SHAPE_NAMES))
def test_sigma_tau_recovers_phi(seed, name):
    x = _random_rep(seed, name)
    p = phi(x)
    for i in x.dq.vertices:
        if x.dq.has_loop_at(i):
            continue
        # with q_i = 1 the composite telescopes to Phi^+ - Phi^-
        stt = sigma_tau(x, i, 1)
        plus, minus = phi_split(x)[i]
        assert stt.tau @ stt.sigma == plus - minus
        assert plus @ minus.inverse() == p[i]


@given(seeds, st.sampled_from(SHAPE_NAMES), st.integers(0, 5))
def test_closure_extremality(seed, name, pick):
    x = _random_rep(seed, name)
    verts = list(x.dq.vertices)
    chosen = [verts[pick % len(verts)]]
    seed_sub = Subspace.coordinate(x, chosen)
    up = invariant_closure(x, seed_sub, SMALLEST)
    down = invariant_closure(x, seed_sub, LARGEST)
    assert is_invariant(x, up) is None and is_invariant(x, down) is None
    assert up.contains(seed_sub) and seed_sub.contains(down)
    # extremality: closing again changes nothing
    assert invariant_closure(x, up, SMALLEST) == up
    assert invariant_closure(x, down, LARGEST) == down


def test_closure_is_contained_in_any_invariant_superspace():
    rng = np.random.default_rng(4)
    quiver, dims = SHAPES[SHAPE_NAMES[0]]
    x = random_representation(rng, quiver, dims)
    full = Subspace.full(x)
    for v in x.dq.vertices:
        seed_sub = Subspace.coordinate(x, [v])
        up = invariant_closure(x, seed_sub)
        assert full.contains(up)
        for w in x.dq.vertices:
            assert contains(full[w], up[w])


# ---------------------------------------------------------------------------
# first-order expansion


def test_quadratic_probe_slope_is_four():
    rng = np.random.default_rng(0)
    from mqv.generators import random_float_representation

    x = random_float_representation(rng, a_n(3), {"1": 2, "2": 2, "3": 1})
    probe = quadratic_approx_probe(x)
    assert 3.7 <= probe.slope <= 4.3


def test_quadratic_probe_zero_rep_matches_exactly():
    x = Representation.zero(double(a_n(2)), {"1": 1, "2": 1}).to_float()
    probe = quadratic_approx_probe(x)
    assert probe.exact_match and probe.slope is None


# ---------------------------------------------------------------------------
# framing


def test_frame_parameters(a2_worked):
    fx = FramedRepresentation(a2_worked, {"1": 1, "2": 0})
    ext, qt, tt = frame(fx, {"1": 2, "2": 3}, {"1": 1, "2": -1})
    assert ext.dims["inf"] == 1
    assert qt["inf"] == S("1/6")
    assert tt["inf"] == 0
    assert ext.dq.order[0] == "f.1.0" and ext.dq.order[-1] == "f.1.0*"


def test_arm_complex_single_vertex():
    # one vertex, v = 1, w = 2, b a = 0 solves q = 1; tau is onto, so corank 0
    fx = FramedRepresentation(Representation(Quiver(["1"], []), {"1": 1}), {"1": 2}, {"1": mat([[1, 0]])}, {"1": mat([[0], [1]])})
    ac = arm_complex(fx, "1")
    assert ac.ok
    # <h_1, w - v> = w_1 - 2 v_1
    assert ac.pairing == 2 - 2 * 1
    assert ac.corank == 0 and ac.rank_q == 0


@given(seeds, st.sampled_from([0, 1, 2]), st.booleans())
def test_arm_complex_rank_formula(seed, shape, quiet):
    quiver, dims = [
        (a_n(2), {"1": 1, "2": 1}),
        (kronecker(2), {"1": 1, "2": 1}),
        (build_star([1, 1]), {"0": 1, "1.1": 1, "2.1": 1}),
    ][shape]
    rng = np.random.default_rng(seed)
    q_verts = (list(quiver.vertices)[0],) if quiet else ()
    fx = framed_q1_instance(rng, quiver, dims, pairs=1, quiet=q_verts)
    for i in fx.dq.vertices:
        ac = arm_complex(fx, i)
        assert ac.rank_q == ac.pairing + ac.corank
