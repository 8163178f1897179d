"""Named property suites.

Each suite draws ``count`` instances from independent child seeds of one
master seed, checks one invariant per instance and aggregates the results in
instance-id order.  Reports contain no timing data, so equal ``(name, seed,
count)`` produce equal JSON.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .convolution import find_intertwiner, intertwines, middle_convolve, verify_involution
from .errors import ContractViolation
from .generators import (
    InstanceRecipe,
    framed_q1_instance,
    generate_solution,
    generic_solution,
    random_float_representation,
    random_framed,
    random_representation,
    shape_catalog,
)
from .jacobian import dimension_check
from .linalg import Matrix
from .quiver import DoubledQuiver, Quiver, a_n, kronecker
from .representation import arm_complex, check_relation, frame, phi, quadratic_approx_probe, sigma_tau
from .roots import q_power, reflect_dim, reflect_q, reflect_theta, theta_dot
from .scalars import ONE, GaussianRational
from .stability import STABLE, UNSTABLE, check_framed_stability, check_general_stability, verify_certificate
from .star import beta_stability_report, rep_to_tuple, tuple_to_rep

logger = logging.getLogger(__name__)


@dataclass
class SuiteReport:
    name: str
    seed: int
    count: int
    instances: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(inst["ok"] for inst in self.instances)

    @property
    def failures(self) -> list:
        return [inst for inst in self.instances if not inst["ok"]]

    def summary(self) -> str:
        bad = len(self.failures)
        return f"{self.name}: {len(self.instances) - bad}/{len(self.instances)} instances pass"

    def to_json(self):
        return {
            "suite": self.name,
            "seed": self.seed,
            "count": self.count,
            "passed": self.passed,
            "failures": len(self.failures),
            "warnings": self.warnings,
            "instances": sorted(self.instances, key=lambda d: d["id"]),
        }


def _child_rngs(seed: int, count: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _child_seed(rng) -> int:
    return int(rng.integers(2**62))


# ---------------------------------------------------------------------------
# one function per suite; each takes (rng, k) and returns a JSON-able dict with "ok"

SOLUTION_SHAPES = (
    ("scalar", {"n": 3}),
    ("hypergeometric", {"r": 2}),
    ("four-punctured", {}),
    ("hypergeometric", {"r": 3}),
)


def _det_identity(rng, k):
    shapes = shape_catalog()
    name = sorted(shapes)[k % len(shapes)]
    quiver, dims = shapes[name]
    x = random_representation(rng, quiver, dims)
    prod = ONE
    for v, m in phi(x).items():
        if m.rows:
            prod = prod * m.det()
    return {"shape": name, "det_product": str(prod), "ok": prod == ONE}


def _sigma_tau(rng, k):
    fam, params = SOLUTION_SHAPES[k % len(SOLUTION_SHAPES)]
    inst = generate_solution(InstanceRecipe(fam, params, _child_seed(rng)))
    x = inst.rep
    bad = []
    for i in x.dq.vertices:
        st = sigma_tau(x, i, inst.q[i])
        want = Matrix.scalar(x.dims[i], inst.q[i] - ONE)
        if st.tau @ st.sigma != want:
            bad.append(i)
    return {"family": fam, "dims": x.dims, "failing_vertices": bad, "ok": not bad}


def _admissible_vertices(inst):
    x = inst.rep
    out = []
    for i in x.dq.vertices:
        if inst.q[i] == ONE:
            continue
        sd = reflect_dim(x.dq, i, x.dims)
        if min(sd.values()) >= 0:
            out.append(i)
    return out


def _solution_with_vertex(rng, k):
    fam, params = SOLUTION_SHAPES[k % len(SOLUTION_SHAPES)]
    for _ in range(10):
        inst = generate_solution(InstanceRecipe(fam, params, _child_seed(rng)))
        verts = _admissible_vertices(inst)
        if verts:
            return fam, inst, verts[int(rng.integers(len(verts)))]
    raise ContractViolation("no vertex with q_i != 1 and nonnegative reflection")


def _convolution(rng, k):
    fam, inst, i = _solution_with_vertex(rng, k)
    x = inst.rep
    res = middle_convolve(x, i, inst.q, inst.theta)
    expected = reflect_dim(x.dq, i, x.dims)
    irreducible = not beta_stability_report(inst.data).entries
    return {
        "family": fam,
        "vertex": i,
        "dims": x.dims,
        "dims_prime": res.dims_prime,
        "identities": {key: str(val) for key, val in res.identities.items()},
        "tuple_irreducible": irreducible,
        "ok": res.ok and res.dims_prime == expected and irreducible,
    }


def _involution(rng, k):
    fam, inst, i = _solution_with_vertex(rng, k)
    cert = verify_involution(inst.rep, i, inst.q, inst.theta, rng=rng)
    return {"family": fam, "vertex": i, "dims": inst.rep.dims, "ok": cert.ok}


def _star_dictionary(rng, k):
    fam, params = SOLUTION_SHAPES[k % len(SOLUTION_SHAPES)]
    inst = generate_solution(InstanceRecipe(fam, params, _child_seed(rng)))
    d, x = inst.data, inst.rep
    back = rep_to_tuple(x, d.ladders, d.beta)
    round_trip = all(a == b for a, b in zip(back.data.matrices, d.matrices))
    again = tuple_to_rep(back.data)
    g = find_intertwiner(x, again, rng)
    rebuilt = g is not None and intertwines(g, x, again)
    center_ok = check_relation(x, inst.q).residuals["0"] == 0
    # scaling one ladder breaks the product and the center relation together
    c = GaussianRational(2)
    scaled = [list(l) for l in d.ladders]
    scaled[0] = [z * c for z in scaled[0]]
    neg = rep_to_tuple(x, scaled, d.beta, check=False)
    q0 = ONE
    for lad in scaled:
        q0 = q0 * lad[0].inverse()
    center_neg = (phi(x)["0"] - Matrix.scalar(x.dims["0"], q0)).is_zero()
    equivalence = (center_ok == back.product_is_one) and (center_neg == neg.product_is_one)
    ok = round_trip and rebuilt and equivalence and back.containments and back.dims_match and not neg.product_is_one
    return {
        "family": fam,
        "round_trip": round_trip,
        "rebuilt_rep_isomorphic": rebuilt,
        "center_iff_product": equivalence,
        "containments": back.containments,
        "dims_match": back.dims_match,
        "ok": ok,
    }


JACOBIAN_SHAPES = (("four-punctured", {}), ("hypergeometric", {"r": 2}), ("hypergeometric", {"r": 3}), ("scalar", {"n": 4}))


def _jacobian(rng, k):
    fam, params = JACOBIAN_SHAPES[k % len(JACOBIAN_SHAPES)]
    inst = generic_solution(rng, fam, params)
    rep = dimension_check(inst.rep.to_float())
    out = rep.to_json()
    out.update({"family": fam, "dims": inst.rep.dims})
    return out


def _quadratic(rng, k):
    shapes = shape_catalog()
    name = sorted(shapes)[k % len(shapes)]
    quiver, dims = shapes[name]
    x = random_float_representation(rng, quiver, dims)
    probe = quadratic_approx_probe(x)
    slope = probe.slope
    return {"shape": name, "slope": slope, "ok": slope is not None and 3.7 <= slope <= 4.3}


FRAMED_SHAPES = (
    (Quiver(["1"], []), {"1": 1}),
    (a_n(2), {"1": 1, "2": 1}),
    (a_n(3), {"1": 1, "2": 1, "3": 1}),
    (kronecker(2), {"1": 1, "2": 1}),
    (a_n(2), {"1": 2, "2": 1}),
)


def _framed_rank(rng, k):
    quiver, dims = FRAMED_SHAPES[k % len(FRAMED_SHAPES)]
    pairs = int(rng.integers(1, 3))
    quiet = ()
    if k % 2:
        verts = list(quiver.vertices)
        quiet = (verts[int(rng.integers(len(verts)))],)
    fx = framed_q1_instance(rng, quiver, dims, pairs=max(pairs, max(dims.values())), quiet=quiet)
    stable = check_framed_stability(fx, {v: 1 for v in quiver.vertices}).stable
    per_vertex = {}
    ok = stable
    for i in fx.dq.vertices:
        ac = arm_complex(fx, i)
        per_vertex[i] = ac.to_json()
        ok = ok and ac.ok
    return {"dims": fx.dims, "w": fx.w, "quiet": list(quiet), "framed_stable": stable, "vertices": per_vertex, "ok": ok}


CROSS_SHAPES = (
    (Quiver(["1"], []), (1, 3)),
    (a_n(2), (1, 2)),
    (a_n(3), (1, 1)),
    (kronecker(2), (1, 2)),
    (Quiver(["1", "2"], [("h1", "1", "2"), ("h2", "2", "1")]), (1, 2)),
)


def _cross_validation(rng, k):
    quiver, (lo, hi) = CROSS_SHAPES[k % len(CROSS_SHAPES)]
    dims = {v: int(rng.integers(lo, hi + 1)) for v in quiver.vertices}
    while sum(dims.values()) > 4:
        v = max(dims, key=dims.get)
        dims[v] -= 1
    w = {v: int(rng.integers(0, 3)) for v in quiver.vertices}
    fx = random_framed(rng, quiver, dims, w, density=float(rng.choice([0.3, 0.6, 1.0])))
    theta = {v: Fraction(int(rng.integers(1, 4)), int(rng.integers(1, 3))) for v in quiver.vertices}
    framed = check_framed_stability(fx, theta)
    ext, _, tt = frame(fx, None, theta)
    tiny = check_general_stability(ext, tt)
    certs = True
    for verdict in (framed, tiny):
        if verdict.certificate is not None:
            sign = 1 if verdict.status == UNSTABLE else 0
            certs = certs and verify_certificate(ext, verdict.certificate, tt, sign)
    total = ext.total_dim
    return {
        "dims": dims,
        "w": w,
        "total_dim": total,
        "framed": framed.status,
        "tiny": tiny.status,
        "certificates_verified": certs,
        "ok": total <= 5 and framed.status == tiny.status and certs,
    }


def _reflections(rng, k):
    shapes = shape_catalog()
    name = sorted(shapes)[k % len(shapes)]
    quiver, _ = shapes[name]
    verts = list(quiver.vertices)
    i = verts[int(rng.integers(len(verts)))]
    alpha = {v: int(rng.integers(0, 4)) for v in verts}
    theta = {v: Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for v in verts}
    pool = [GaussianRational(c) for c in (2, -3, Fraction(1, 2), Fraction(3, 4), -1)] + [GaussianRational(1, 1)]
    q = {v: pool[int(rng.integers(len(pool)))] for v in verts}
    dq = DoubledQuiver(quiver)
    sa = reflect_dim(dq, i, alpha)
    rt = reflect_theta(dq, i, theta)
    uq = reflect_q(dq, i, q)
    dual_theta = theta_dot(theta, sa) == theta_dot(rt, alpha)
    dual_q = q_power(q, sa) == q_power(uq, alpha)
    inv = reflect_dim(dq, i, sa) == alpha and reflect_theta(dq, i, rt) == theta and reflect_q(dq, i, uq) == q
    return {"shape": name, "vertex": i, "dual_theta": dual_theta, "dual_q": dual_q, "involutions": inv, "ok": dual_theta and dual_q and inv}


SUITES: dict[str, tuple[Callable, int, str]] = {
    "determinant-identity": (_det_identity, 50, "product of det Phi_i is one on random in-domain representations"),
    "sigma-tau": (_sigma_tau, 80, "tau_i sigma_i = q_i - 1 at generated solutions (20 per shape)"),
    "convolution-identities": (_convolution, 20, "middle convolution identities and s_i(dims)"),
    "involution": (_involution, 10, "S_i twice is isomorphic to the input"),
    "star-dictionary": (_star_dictionary, 10, "tuple <-> star representation dictionary"),
    "jacobian-dimension": (_jacobian, 5, "numeric Jacobian nullity matches 2 - (v, v)"),
    "quadratic-approximation": (_quadratic, 10, "Phi(tx) - 1 - t^2 mu(x) is quartic in t"),
    "framed-rank": (_framed_rank, 10, "rank Q_i = <h_i, w - v> + corank tau_i"),
    "stability-cross-validation": (_cross_validation, 200, "framed fixpoint agrees with the exhaustive tiny check"),
    "reflection-dualities": (_reflections, 100, "theta.s_i(a) = r_i(theta).a, q^{s_i a} = u_i(q)^a, involutions"),
}


def suite_names() -> list[str]:
    return list(SUITES)


def run_suite(name: str, seed: int = 0, count: int | None = None) -> SuiteReport:
    """Run a named suite.  Unknown names raise :class:`ContractViolation`."""
    if name not in SUITES:
        raise ContractViolation(f"unknown suite {name!r}; known suites: {', '.join(SUITES)}")
    fn, default, _ = SUITES[name]
    count = default if count is None else int(count)
    if count < 0:
        raise ContractViolation("count must be nonnegative")
    report = SuiteReport(name, int(seed), count)
    if count == 0:
        msg = f"suite {name!r} ran with count 0: vacuous pass"
        warnings.warn(msg, stacklevel=2)
        report.warnings.append(msg)
        return report
    for k, rng in enumerate(_child_rngs(int(seed), count)):
        try:
            result = fn(rng, k)
        except Exception as exc:  # a crash inside an instance is a property failure
            logger.exception("suite %s instance %d raised", name, k)
            result = {"ok": False, "error": f"{type(exc).__name__}: {exc}"}
        result = {"id": k, **result}
        report.instances.append(result)
    return report
