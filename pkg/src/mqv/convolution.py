"""The middle convolution functor ``S_i`` on solutions of ``Phi(x) = q``.

The construction replaces ``V_i`` by ``Ker tau_i`` and rewrites the arrows at
``i`` through the maps ``phi_h``.  It is stated for ``H_i`` contained in the
base arrows.  When some arrow into ``i`` is a reversed one we first swap the
orientation of that pair with the substitution
``x_h -> -(1 + x_h x_hbar)^{-1} x_h``, which preserves every ``Phi_j``
pointwise and is its own inverse, convolve, then swap back.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ContractViolation, DomainError, EmptinessError, FunctorInapplicable, ModeError
from .linalg import EXACT, Matrix, coordinates, kernel_basis, solve_sylvester_intertwiner
from .quiver import DoubledQuiver
from .representation import (
    Representation,
    check_relation,
    factor,
    in_invertibility_domain,
    phi,
    sigma_tau,
)
from .roots import as_q, as_theta, bilinear_form, reflect_dim, reflect_q, reflect_theta, unit
from .scalars import ONE, parse_scalar

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# orientation normalization


def _swap_pairs(x: Representation, flip, dq: DoubledQuiver) -> Representation:
    """Apply ``x_h -> -(1 + x_h x_hbar)^{-1} x_h`` for ``h`` in ``flip`` and move to ``dq``."""
    maps = dict(x.maps)
    for h in flip:
        f = factor(x, h)
        if f.rows and not f.det():
            raise DomainError(f"factor for arrow {h!r} is singular", arrow=h)
        maps[h] = -((f.inverse() if f.rows else f) @ x.maps[h])
    return Representation(dq, x.dims, maps, x.mode)


def normalize_at(x: Representation, i: str):
    """Return ``(y, flip)`` with every arrow into ``i`` a base arrow of ``y``'s quiver."""
    flip = [h for h in x.dq.incoming[i] if x.dq.eps(h) < 0]
    if not flip:
        return x, []
    return _swap_pairs(x, flip, x.dq.reorient(flip)), flip


def denormalize(y: Representation, flip, dq: DoubledQuiver) -> Representation:
    if not flip:
        return Representation(dq, y.dims, y.maps, y.mode)
    return _swap_pairs(y, flip, dq)


# ---------------------------------------------------------------------------
# phi_h and the functor


def phi_maps(y: Representation, i: str, q_i, st=None) -> dict:
    """``phi_h: V_out(h) -> V-hat_i`` for ``h in H_i`` (all of them base arrows)."""
    q_i = parse_scalar(q_i)
    st = st or sigma_tau(y, i, q_i)
    hs = y.dq.incoming[i]
    out = {}
    for k, h in enumerate(hs):
        xh = y.maps[h]
        acc = Matrix.zeros(st.hat_dim, xh.cols)
        for k2, h2 in enumerate(hs):
            term = st.iota(h2) @ y.maps[y.dq.bar(h2)] @ xh
            acc = acc + (term if k2 < k else term * q_i.inverse())
        acc = acc + st.iota(h) * ((ONE - q_i) / q_i)
        out[h] = acc
    return out


@dataclass
class ConvolutionResult:
    x_prime: Representation
    i: str
    q_prime: dict
    theta_prime: dict
    dims_prime: dict
    identities: dict
    flip: list = field(default_factory=list)
    kernel: Matrix | None = None
    normalized: tuple | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return all(v == 0 for v in self.identities.values())

    def to_json(self):
        return {
            "vertex": self.i,
            "dims": dict(self.dims_prime),
            "q": {k: str(v) for k, v in self.q_prime.items()},
            "theta": {k: str(v) for k, v in self.theta_prime.items()},
            "identities": {k: str(v) for k, v in self.identities.items()},
            "ok": self.ok,
            "flipped": list(self.flip),
            "rep": self.x_prime.to_json(),
        }


def _max_residual(pairs) -> object:
    worst = 0
    for a, b in pairs:
        r = (a - b).max_abs()
        if r > worst:
            worst = r
    return worst


def middle_convolve(x: Representation, i: str, q, theta=None) -> ConvolutionResult:
    """``S_i(x)``; raises :class:`EmptinessError` when ``s_i(dim)`` leaves the positive cone."""
    if x.mode != EXACT:
        raise ModeError("middle convolution is exact-only")
    dq = x.dq
    if i not in dq.vertices:
        raise ContractViolation(f"unknown vertex {i!r}")
    if dq.has_loop_at(i):
        raise FunctorInapplicable(f"vertex {i!r} carries a loop")
    qq = as_q(dq, q)
    th = as_theta(dq, theta if theta is not None else [0] * len(dq.vertices))
    if not check_relation(x, qq).ok:
        raise ContractViolation("x does not solve Phi(x) = q")
    dims_p = reflect_dim(dq, i, x.dims)
    if any(d < 0 for d in dims_p.values()):
        raise EmptinessError(f"s_{i}(dim) = {dims_p} has a negative entry; the target variety is empty", dims_p)
    q_i = qq[i]
    y, flip = normalize_at(x, i)
    st = sigma_tau(y, i, q_i)
    if q_i == ONE:
        if not th[i] < 0:
            raise ContractViolation("q_i = 1 needs theta_i < 0")
        if st.tau.rank() != x.dims[i]:
            raise ContractViolation("tau_i is not surjective although theta_i < 0 (x cannot be theta-stable)")
    k = kernel_basis(st.tau)
    if k.cols != dims_p[i]:
        raise ContractViolation(f"Ker tau has dimension {k.cols}, expected {dims_p[i]}")
    phis = phi_maps(y, i, q_i, st)
    new = {}
    for h in y.dq.incoming[i]:
        new[h] = coordinates(k, phis[h])
        new[y.dq.bar(h)] = st.pi(h) @ k
    y_p = Representation(y.dq, dims_p, {**y.maps, **new}, EXACT)

    qinv = q_i.inverse()
    hat_id = Matrix.identity(st.hat_dim)
    prod = hat_id
    for h in y.dq.incoming[i]:
        prod = prod @ (hat_id + phis[h] @ st.pi(h))
    rhs = hat_id - (hat_id * (q_i - ONE) - st.sigma @ st.tau) * qinv
    per_arrow = []
    for h in y.dq.incoming[i]:
        hb = y.dq.bar(h)
        lhs = (y_p.maps[hb] @ y_p.maps[h]).plus_identity(1)
        per_arrow.append((lhs, (y.maps[hb] @ y.maps[h]).plus_identity(1) * qinv))
    q_p = reflect_q(dq, i, qq)
    th_p = reflect_theta(dq, i, th)
    x_p = denormalize(y_p, flip, dq)
    identities = {
        "tau_phi": _max_residual((st.tau @ phis[h], Matrix.zeros(x.dims[i], phis[h].cols)) for h in phis),
        "product_formula": _max_residual([(prod, rhs)]),
        "per_arrow": _max_residual(per_arrow),
        "phi_target": check_relation(x_p, q_p).max_residual(),
        "dims": 0 if x_p.dims == reflect_dim(dq, i, x.dims) else 1,
    }
    return ConvolutionResult(x_p, i, q_p, th_p, dims_p, identities, flip, k, (y, y_p))


# ---------------------------------------------------------------------------
# S_i squared


@dataclass
class InvolutionCertificate:
    g: dict | None
    x2: Representation
    ok: bool

    def to_json(self):
        return {
            "ok": self.ok,
            "g": {k: m.to_json() for k, m in self.g.items()} if self.g else None,
            "rep": self.x2.to_json(),
        }


def find_intertwiner(x: Representation, y: Representation, rng=None, attempts: int = 64) -> dict | None:
    """An invertible ``g`` with ``g_in(h) x_h = y_h g_out(h)`` for all ``h``, or ``None``."""
    if x.dq != y.dq or x.dims != y.dims:
        return None
    ident = {v: Matrix.identity(x.dims[v]) for v in x.dq.vertices}
    if all(x.maps[h] == y.maps[h] for h in x.dq.order):
        return ident
    unknowns = {v: (x.dims[v], x.dims[v]) for v in x.dq.vertices}
    eqs = []
    for h in x.dq.order:
        o, t = x.dq.out(h), x.dq.into(h)
        eqs.append(
            (
                [(t, Matrix.identity(x.dims[t]), x.maps[h]), (o, -y.maps[h], Matrix.identity(x.dims[o]))],
                None,
            )
        )
    return solve_sylvester_intertwiner(unknowns, eqs, invertible=True, rng=rng, attempts=attempts)


def intertwines(g: Mapping, x: Representation, y: Representation) -> bool:
    for h in x.dq.order:
        o, t = x.dq.out(h), x.dq.into(h)
        if g[t] @ x.maps[h] != y.maps[h] @ g[o]:
            return False
    return all(g[v].rows == 0 or g[v].det() for v in x.dq.vertices)


def verify_involution(x: Representation, i: str, q, theta=None, rng=None) -> InvolutionCertificate:
    first = middle_convolve(x, i, q, theta)
    second = middle_convolve(first.x_prime, i, first.q_prime, first.theta_prime)
    x2 = second.x_prime
    g = find_intertwiner(x, x2, rng)
    ok = g is not None and intertwines(g, x, x2)
    if not ok:
        logger.warning("no invertible intertwiner between x and S_i(S_i(x)) at vertex %s", i)
    return InvolutionCertificate(g, x2, ok)


# ---------------------------------------------------------------------------
# correspondence conditions


def check_lusztig_conditions(x: Representation, xp: Representation, i: str, q, theta=None, stability: bool = True) -> dict:
    """Evaluate R1-R6' for the pair ``(x, x')`` at vertex ``i``.

    Values are booleans, except R6/R6' which carry a stability status string.
    """
    from .stability import STABLE, check_general_stability

    dq = x.dq
    qq = as_q(dq, q)
    q_p = reflect_q(dq, i, qq)
    report = {}
    hi = set(dq.incoming[i]) | {dq.bar(h) for h in dq.incoming[i]}
    same_dims = all(x.dims[v] == xp.dims[v] for v in dq.vertices if v != i)
    report["R1"] = same_dims and all(x.maps[h] == xp.maps[h] for h in dq.order if h not in hi)
    try:
        y, flip = normalize_at(x, i)
        yp = _swap_pairs(xp, flip, y.dq) if flip else xp
        st = sigma_tau(y, i, qq[i])
        stp = sigma_tau(yp, i, q_p[i])
        sig_p, tau, tau_p, sig = stp.sigma, st.tau, stp.tau, st.sigma
        shapes_ok = st.hat_dim == stp.hat_dim
        if shapes_ok:
            r_sig = sig_p.rank()
            r_tau = tau.rank()
            report["R2"] = (
                r_sig == xp.dims[i]
                and r_tau == x.dims[i]
                and (tau @ sig_p).is_zero()
                and r_sig == st.hat_dim - r_tau
            )
            lhs = sig @ tau
            rhs = (sig_p @ tau_p) * qq[i] + Matrix.identity(st.hat_dim) * (qq[i] - ONE)
            report["R3"] = lhs == rhs
        else:
            report["R2"] = report["R3"] = False
    except (DomainError, ContractViolation):
        report["R2"] = report["R3"] = False
    report["R4"] = in_invertibility_domain(x)
    report["R4'"] = in_invertibility_domain(xp)
    report["R5"] = report["R4"] and check_relation(x, qq).ok
    report["R5'"] = report["R4'"] and check_relation(xp, q_p).ok
    if stability and theta is not None:
        th = as_theta(dq, theta)
        th_p = reflect_theta(dq, i, th)
        for name, rep, t in (("R6", x, th), ("R6'", xp, th_p)):
            try:
                report[name] = check_general_stability(rep, t).status
            except ContractViolation:
                report[name] = "Unknown"
    else:
        report["R6"] = report["R6'"] = "Unknown"
    return report


# ---------------------------------------------------------------------------
# dimension reduction driver


@dataclass
class ReductionStep:
    vertex: str
    dims_before: dict
    dims_after: dict
    q: dict
    theta: dict

    def to_json(self):
        return {
            "vertex": self.vertex,
            "dims_before": self.dims_before,
            "dims_after": self.dims_after,
            "q": {k: str(v) for k, v in self.q.items()},
            "theta": {k: str(v) for k, v in self.theta.items()},
        }


@dataclass
class ReductionTrace:
    steps: list
    final: Representation
    q: dict
    theta: dict
    terminal: str

    def to_json(self):
        return {
            "steps": [s.to_json() for s in self.steps],
            "final_dims": dict(self.final.dims),
            "terminal": self.terminal,
            "rep": self.final.to_json(),
        }


def reduce_dimension_vector(x: Representation, q, theta=None, max_steps: int = 50) -> ReductionTrace:
    """Greedily apply ``S_i`` wherever ``(dim, e_i) > 0`` until nothing applies."""
    dq = x.dq
    qq = as_q(dq, q)
    th = as_theta(dq, theta if theta is not None else [0] * len(dq.vertices))
    steps = []
    cur = x
    terminal = "max_steps"
    for _ in range(max_steps):
        # largest drop first; among ties prefer vertices needing no re-orientation
        ranked = []
        for pos, i in enumerate(dq.vertices):
            if dq.has_loop_at(i) or cur.dims[i] == 0:
                continue
            drop = bilinear_form(dq, cur.dims, unit(dq, i))
            if drop > 0:
                flips = sum(1 for h in dq.incoming[i] if dq.eps(h) < 0)
                ranked.append((-drop, flips > 0, pos, i))
        ranked.sort()
        moved = False
        for _, _, _, i in ranked:
            try:
                res = middle_convolve(cur, i, qq, th)
            except (EmptinessError, ContractViolation, DomainError) as exc:
                logger.info("S_%s not applicable: %s", i, exc)
                continue
            if not res.ok:
                raise AssertionError(f"convolution identities failed at {i}: {res.identities}")
            steps.append(ReductionStep(i, dict(cur.dims), dict(res.dims_prime), res.q_prime, res.theta_prime))
            cur, qq, th = res.x_prime, res.q_prime, res.theta_prime
            moved = True
            break
        if not moved:
            terminal = "stalled" if ranked else "minimal"
            break
    return ReductionTrace(steps, cur, qq, th, terminal)
