"""Bilinear form, simple reflections, bounded positive roots and genericity.

Dimension vectors, stability vectors and multiplicative parameters are plain
dicts keyed by vertex name.  Helpers accept sequences too, read in the vertex
order of the quiver.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import ContractViolation, FunctorInapplicable
from .quiver import DoubledQuiver, Quiver
from .scalars import ONE, GaussianRational, parse_scalar


def _as_dq(q) -> DoubledQuiver:
    if isinstance(q, DoubledQuiver):
        return q
    if isinstance(q, Quiver):
        return DoubledQuiver(q)
    raise ContractViolation(f"expected a quiver, got {type(q).__name__}")


def as_vector(dq, values, convert=int) -> dict:
    """Normalize ``values`` (mapping or sequence) to a dict over the vertices of ``dq``."""
    dq = _as_dq(dq)
    if isinstance(values, Mapping):
        named = {str(k): x for k, x in values.items()}
        if set(named) != set(dq.vertices):
            raise ContractViolation(f"vector keys {sorted(named)} do not match vertices {list(dq.vertices)}")
        return {v: convert(named[v]) for v in dq.vertices}
    values = list(values)
    if len(values) != len(dq.vertices):
        raise ContractViolation(f"vector of length {len(values)} for {len(dq.vertices)} vertices")
    return {v: convert(x) for v, x in zip(dq.vertices, values)}


def as_dims(dq, dims) -> dict:
    out = as_vector(dq, dims, int)
    if any(x < 0 for x in out.values()):
        raise ContractViolation("dimension vectors are nonnegative")
    return out


def as_theta(dq, theta) -> dict:
    return as_vector(dq, theta, _to_fraction)


def as_q(dq, q) -> dict:
    out = as_vector(dq, q, parse_scalar)
    if any(not x for x in out.values()):
        raise ContractViolation("multiplicative parameters must be nonzero")
    return out


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, GaussianRational):
        if x.im:
            raise ContractViolation("stability parameters are rational")
        return Fraction(int(x.re.numerator), int(x.re.denominator))
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


# ---------------------------------------------------------------------------
# the form and reflections


def bilinear_form(dq, alpha, beta) -> int:
    """``(alpha, beta) = 2 alpha.beta - sum_{h in H} alpha_out(h) beta_in(h)``."""
    dq = _as_dq(dq)
    a = as_vector(dq, alpha, int)
    b = as_vector(dq, beta, int)
    total = 2 * sum(a[v] * b[v] for v in dq.vertices)
    for h in dq.order:
        total -= a[dq.out(h)] * b[dq.into(h)]
    return total


def unit(dq, i) -> dict:
    dq = _as_dq(dq)
    if i not in dq.vertices:
        raise ContractViolation(f"unknown vertex {i!r}")
    return {v: int(v == i) for v in dq.vertices}


def _require_loop_free(dq, i):
    if i not in dq.vertices:
        raise ContractViolation(f"unknown vertex {i!r}")
    if dq.has_loop_at(i):
        raise FunctorInapplicable(f"vertex {i!r} carries a loop; reflections are undefined there")


def form_with_unit(dq, i, j) -> int:
    """``(e_i, e_j)``."""
    return bilinear_form(dq, unit(dq, i), unit(dq, j))


def reflect_dim(dq, i, alpha) -> dict:
    """``s_i(alpha) = alpha - (alpha, e_i) e_i``; entries may turn negative."""
    dq = _as_dq(dq)
    _require_loop_free(dq, i)
    a = as_vector(dq, alpha, int)
    c = bilinear_form(dq, a, unit(dq, i))
    out = dict(a)
    out[i] -= c
    return out


def reflect_theta(dq, i, theta) -> dict:
    """``r_i(theta)_j = theta_j - (e_i, e_j) theta_i``."""
    dq = _as_dq(dq)
    _require_loop_free(dq, i)
    t = as_theta(dq, theta)
    return {j: t[j] - form_with_unit(dq, i, j) * t[i] for j in dq.vertices}


def reflect_q(dq, i, q) -> dict:
    """``u_i(q)_j = q_j q_i^{-(e_i, e_j)}``."""
    dq = _as_dq(dq)
    _require_loop_free(dq, i)
    qq = as_q(dq, q)
    return {j: qq[j] * qq[i] ** (-form_with_unit(dq, i, j)) for j in dq.vertices}


def q_power(q: Mapping, alpha: Mapping) -> GaussianRational:
    """``q^alpha = prod_i q_i^{alpha_i}`` computed exactly."""
    out = ONE
    for v, a in alpha.items():
        if a:
            out = out * parse_scalar(q[v]) ** int(a)
    return out


def theta_dot(theta: Mapping, alpha: Mapping) -> Fraction:
    return sum((_to_fraction(theta[v]) * int(a) for v, a in alpha.items()), Fraction(0))


# ---------------------------------------------------------------------------
# positive roots bounded by v


def enumerate_Rplus_bounded(dq, v) -> list[dict]:
    """All nonzero ``alpha <= v`` with ``(alpha, alpha) <= 2``.

    Output is sorted by total dimension, then lexicographically in vertex order.
    """
    dq = _as_dq(dq)
    vv = as_dims(dq, v)
    names = list(dq.vertices)
    out = []
    for combo in itertools.product(*(range(vv[n] + 1) for n in names)):
        if not any(combo):
            continue
        alpha = dict(zip(names, combo))
        if bilinear_form(dq, alpha, alpha) <= 2:
            out.append(alpha)
    out.sort(key=lambda a: (sum(a.values()), [a[n] for n in names]))
    return out


@dataclass
class GenericityReport:
    generic: bool
    reason: str
    witness: dict | None = None

    def __bool__(self):
        return self.generic

    def to_json(self):
        return {"generic": self.generic, "reason": self.reason, "witness": self.witness}


def is_generic(dq, v, q, theta) -> GenericityReport:
    """Check that ``(q, theta)`` avoids every wall ``E_alpha x D_alpha`` for proper ``alpha in R_+(v)``."""
    dq = _as_dq(dq)
    vv = as_dims(dq, v)
    qq = as_q(dq, q)
    tt = as_theta(dq, theta)
    if q_power(qq, vv) != ONE:
        return GenericityReport(False, "q^v != 1")
    if theta_dot(tt, vv) != 0:
        return GenericityReport(False, "theta.v != 0")
    for alpha in enumerate_Rplus_bounded(dq, vv):
        if alpha == vv:
            continue
        if q_power(qq, alpha) == ONE and theta_dot(tt, alpha) == 0:
            return GenericityReport(False, "wall", alpha)
    return GenericityReport(True, "generic")


# ---------------------------------------------------------------------------
# root datum of the underlying graph


def adjacency_matrix(dq) -> np.ndarray:
    """``A_ij`` = number of arrows of the underlying graph joining ``i`` and ``j``."""
    dq = _as_dq(dq)
    names = list(dq.vertices)
    idx = {n: k for k, n in enumerate(names)}
    a = np.zeros((len(names), len(names)), dtype=int)
    for arrow in dq.base.arrows:
        i, j = idx[arrow.out], idx[arrow.into]
        a[i, j] += 1
        if i != j:
            a[j, i] += 1
    return a


@dataclass(frozen=True)
class RootDatum:
    """A realization of the Cartan matrix ``C = 2 - A`` on the lattice ``Z^{2n}``.

    ``Lambda_i = e_i`` and ``alpha_j = sum_i c_ij e_i + e_{n+j}``; the coroot
    ``h_i`` reads the ``i``-th coordinate, so ``<h_i, alpha_j> = c_ij`` and
    ``<h_j, Lambda_i> = delta_ij``.  The symmetric form with Gram matrix
    ``[[0, 1], [1, -C]]`` gives ``(alpha_i, alpha_j) = c_ij``.
    """

    vertices: tuple
    cartan: np.ndarray

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, i) -> int:
        return self.vertices.index(i)

    def fundamental_weight(self, i) -> np.ndarray:
        out = np.zeros(2 * self.n, dtype=int)
        out[self.index(i)] = 1
        return out

    def simple_root(self, j) -> np.ndarray:
        k = self.index(j)
        out = np.zeros(2 * self.n, dtype=int)
        out[: self.n] = self.cartan[:, k]
        out[self.n + k] = 1
        return out

    def coroot(self, i) -> np.ndarray:
        """``h_i`` as a row functional on the weight lattice."""
        out = np.zeros(2 * self.n, dtype=int)
        out[self.index(i)] = 1
        return out

    def gram(self) -> np.ndarray:
        n = self.n
        g = np.zeros((2 * n, 2 * n), dtype=int)
        g[:n, n:] = np.eye(n, dtype=int)
        g[n:, :n] = np.eye(n, dtype=int)
        g[n:, n:] = -self.cartan
        return g

    def form(self, x, y) -> int:
        return int(np.asarray(x) @ self.gram() @ np.asarray(y))

    def pair(self, i, weight) -> int:
        return int(self.coroot(i) @ np.asarray(weight))

    def weight(self, w: Mapping, v: Mapping) -> np.ndarray:
        """``sum_i w_i Lambda_i - sum_j v_j alpha_j``."""
        out = np.zeros(2 * self.n, dtype=int)
        for i in self.vertices:
            out += int(w.get(i, 0)) * self.fundamental_weight(i)
            out -= int(v.get(i, 0)) * self.simple_root(i)
        return out

    def pairing_w_minus_v(self, i, w: Mapping, v: Mapping) -> int:
        """``<h_i, w - v> = w_i - sum_j c_ij v_j``."""
        return self.pair(i, self.weight(w, v))

    def to_json(self):
        return {"vertices": list(self.vertices), "cartan": self.cartan.tolist()}


def root_datum_from_graph(dq) -> RootDatum:
    dq = _as_dq(dq)
    if dq.has_loops():
        raise ContractViolation("root data from a graph with loops are not supported")
    c = 2 * np.eye(len(dq.vertices), dtype=int) - adjacency_matrix(dq)
    c.flags.writeable = False
    return RootDatum(tuple(dq.vertices), c)


def cartan_matrix(dq) -> np.ndarray:
    return root_datum_from_graph(dq).cartan


def dims_from_sequence(dq, seq: Sequence[int]) -> dict:
    return as_dims(dq, seq)
