"""Representations of a doubled quiver and the maps Phi, mu, Psi, sigma, tau.

A :class:`Representation` stores one matrix per doubled arrow ``h``, of shape
``dims[in(h)] x dims[out(h)]``.  Every routine works in exact mode; ``phi``,
``mu`` and the probes also accept float mode.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ContractViolation, DomainError, FunctorInapplicable, ModeError
from .linalg import (
    EXACT,
    _rref,
    FLOAT,
    Matrix,
    column_basis,
    contains,
    hstack,
    intersect,
    kernel_basis,
    preimage,
    rank_numeric,
    vstack,
)
from .quiver import Arrow, DoubledQuiver, Quiver
from .roots import as_dims, as_q, as_theta, as_vector, q_power
from .scalars import ONE, ZERO, parse_scalar

logger = logging.getLogger(__name__)

INF = "inf"


class Representation:
    """A point ``x`` of ``M(V) = ⊕_h Hom(V_out(h), V_in(h))``."""

    __slots__ = ("dq", "dims", "maps", "mode")

    def __init__(self, dq, dims, maps: Mapping | None = None, mode: str | None = None):
        if isinstance(dq, Quiver):
            dq = DoubledQuiver(dq)
        if not isinstance(dq, DoubledQuiver):
            raise ContractViolation("a representation needs a (doubled) quiver")
        dims = as_dims(dq, dims)
        maps = dict(maps or {})
        if mode is None:
            modes = {m.mode for m in maps.values() if isinstance(m, Matrix)}
            if len(modes) > 1:
                raise ModeError("representation mixes exact and float maps")
            mode = modes.pop() if modes else EXACT
        unknown = set(maps) - set(dq.arrows)
        if unknown:
            raise ContractViolation(f"maps given for unknown arrows {sorted(unknown)}")
        out = {}
        for h in dq.order:
            shape = (dims[dq.into(h)], dims[dq.out(h)])
            m = maps.get(h)
            if m is None:
                m = Matrix.zeros(*shape, mode)
            elif not isinstance(m, Matrix):
                m = Matrix.from_json(m, mode, shape)
            if m.mode != mode:
                raise ModeError(f"arrow {h!r} is {m.mode} in a {mode} representation")
            if m.shape != shape:
                raise ContractViolation(f"arrow {h!r} has shape {m.shape}, expected {shape}")
            out[h] = m
        object.__setattr__(self, "dq", dq)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "maps", out)
        object.__setattr__(self, "mode", mode)

    def __setattr__(self, name, value):
        raise AttributeError("Representation is immutable")

    @classmethod
    def zero(cls, dq, dims, mode: str = EXACT) -> "Representation":
        return cls(dq, dims, {}, mode)

    def __getitem__(self, h: str) -> Matrix:
        return self.maps[h]

    def __eq__(self, other):
        return (
            isinstance(other, Representation)
            and self.dq == other.dq
            and self.dims == other.dims
            and self.mode == other.mode
            and all(self.maps[h] == other.maps[h] for h in self.dq.order)
        )

    def __hash__(self):
        return hash((self.dq, tuple(self.dims.items()), tuple(self.maps[h] for h in self.dq.order)))

    def __repr__(self):
        return f"Representation(dims={self.dims}, mode={self.mode!r})"

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def replace(self, updates: Mapping[str, Matrix], dims: Mapping | None = None, dq=None) -> "Representation":
        maps = dict(self.maps)
        maps.update(updates)
        return Representation(dq or self.dq, dims or self.dims, maps, self.mode)

    def to_float(self) -> "Representation":
        return Representation(self.dq, self.dims, {h: m.to_float() for h, m in self.maps.items()}, FLOAT)

    def scaled(self, t) -> "Representation":
        return Representation(self.dq, self.dims, {h: m * t for h, m in self.maps.items()}, self.mode)

    def identity(self, i: str) -> Matrix:
        return Matrix.identity(self.dims[i], self.mode)

    def to_json(self):
        return {
            "quiver": self.dq.to_json(),
            "dims": dict(self.dims),
            "maps": {h: self.maps[h].to_json() for h in self.dq.order},
            "mode": self.mode,
        }

    @classmethod
    def from_json(cls, data, mode: str | None = None) -> "Representation":
        dq = DoubledQuiver.from_json(data["quiver"])
        mode = mode or data.get("mode", EXACT)
        return cls(dq, data["dims"], data.get("maps", {}), mode)


def act(g: Mapping[str, Matrix], x: Representation) -> Representation:
    """``(g.x)_h = g_in(h) x_h g_out(h)^{-1}``."""
    inv = {}
    for v in x.dq.vertices:
        gv = g.get(v) if v in g else Matrix.identity(x.dims[v], x.mode)
        if gv.shape != (x.dims[v], x.dims[v]):
            raise ContractViolation(f"g at {v!r} has the wrong shape")
        inv[v] = gv.inverse() if gv.rows else gv
    new = {}
    for h in x.dq.order:
        gi = g.get(x.dq.into(h), Matrix.identity(x.dims[x.dq.into(h)], x.mode))
        new[h] = gi @ x.maps[h] @ inv[x.dq.out(h)]
    return x.replace(new)


# ---------------------------------------------------------------------------
# the invertibility domain and the product maps


def factor(x: Representation, h: str) -> Matrix:
    """``1 + x_h x_hbar`` on ``V_in(h)``."""
    return (x.maps[h] @ x.maps[x.dq.bar(h)]).plus_identity(1)


def _nonsingular(m: Matrix) -> bool:
    if m.rows == 0:
        return True
    if m.mode == EXACT:
        return bool(m.det())
    return rank_numeric(m, 1e-12) == m.rows


def _inv(m: Matrix, h: str) -> Matrix:
    if not _nonsingular(m):
        raise DomainError(f"factor for arrow {h!r} is singular", arrow=h)
    return m.inverse() if m.rows else m


def in_invertibility_domain(x: Representation) -> bool:
    """``det(1 + x_h x_hbar) != 0`` off loops and ``det x_h != 0`` on loops."""
    for h in x.dq.order:
        m = x.maps[h] if x.dq.is_loop(h) else factor(x, h)
        if not _nonsingular(m):
            return False
    return True


def _reject_loops(x: Representation, what: str):
    if x.dq.has_loops():
        raise FunctorInapplicable(f"{what} is defined for loop-free quivers; use psi for loops")


def phi(x: Representation) -> dict:
    """``Phi_i(x) = prod^<_{h in H_i} (1 + x_h x_hbar)^{eps(h)}``."""
    _reject_loops(x, "phi")
    out = {}
    for i in x.dq.vertices:
        acc = x.identity(i)
        for h in x.dq.incoming[i]:
            f = factor(x, h)
            acc = acc @ (f if x.dq.eps(h) > 0 else _inv(f, h))
        out[i] = acc
    return out


def _split_at(x: Representation, i: str):
    hs = x.dq.incoming[i]
    plus = x.identity(i)
    minus = x.identity(i)
    for h in hs:
        if x.dq.eps(h) > 0:
            plus = plus @ factor(x, h)
    for h in reversed(hs):
        if x.dq.eps(h) < 0:
            minus = minus @ factor(x, h)
    return plus, minus


def phi_split(x: Representation) -> dict:
    """``(Phi_i^+, Phi_i^-)`` with ``Phi_i = Phi_i^+ (Phi_i^-)^{-1}``.

    Requires the canonical order (base arrows before reversed ones).
    """
    _reject_loops(x, "phi_split")
    if not x.dq.is_canonical():
        raise ContractViolation("phi_split needs the canonical order (base arrows first)")
    return {i: _split_at(x, i) for i in x.dq.vertices}


def mu(x: Representation) -> dict:
    """Additive moment map ``mu_i = sum_{h in H_i} eps(h) x_h x_hbar``."""
    out = {}
    for i in x.dq.vertices:
        acc = Matrix.zeros(x.dims[i], x.dims[i], x.mode)
        for h in x.dq.incoming[i]:
            term = x.maps[h] @ x.maps[x.dq.bar(h)]
            acc = acc + term if x.dq.eps(h) > 0 else acc - term
        out[i] = acc
    return out


def psi(x: Representation) -> dict:
    """Loop relation: multiplicative commutators over base loops, then ``phi``-type factors."""
    out = {}
    for i in x.dq.vertices:
        acc = x.identity(i)
        hs = x.dq.incoming[i]
        for h in hs:
            if x.dq.is_loop(h) and x.dq.eps(h) > 0:
                a, b = x.maps[h], x.maps[x.dq.bar(h)]
                acc = acc @ a @ b @ _inv(a, h) @ _inv(b, x.dq.bar(h))
        for h in hs:
            if not x.dq.is_loop(h):
                f = factor(x, h)
                acc = acc @ (f if x.dq.eps(h) > 0 else _inv(f, h))
        out[i] = acc
    return out


@dataclass
class RelationReport:
    residuals: dict
    exact: bool

    @property
    def ok(self) -> bool:
        return all(r == 0 for r in self.residuals.values()) if self.exact else False

    def max_residual(self):
        return max(self.residuals.values(), default=0)

    def to_json(self):
        return {
            "residuals": {k: str(v) if self.exact else float(v) for k, v in self.residuals.items()},
            "ok": self.ok,
            "max": str(self.max_residual()) if self.exact else float(self.max_residual()),
        }


def check_relation(x: Representation, q, values: dict | None = None) -> RelationReport:
    """Max-norm of ``Phi_i(x) - q_i`` per vertex (``Psi`` when the quiver has loops)."""
    qq = as_q(x.dq, q) if x.mode == EXACT else as_vector(x.dq, q, _to_complex)
    vals = values if values is not None else (psi(x) if x.dq.has_loops() else phi(x))
    res = {}
    for i in x.dq.vertices:
        res[i] = (vals[i] - Matrix.scalar(x.dims[i], qq[i], x.mode)).max_abs()
    return RelationReport(res, x.mode == EXACT)


def _to_complex(c) -> complex:
    return complex(parse_scalar(c)) if isinstance(c, (str, list)) else complex(c)


def solves(x: Representation, q) -> bool:
    try:
        return check_relation(x, q).ok
    except DomainError:
        return False


# ---------------------------------------------------------------------------
# sigma and tau


@dataclass
class SigmaTau:
    sigma: Matrix
    tau: Matrix
    hat_dim: int
    blocks: list  # (arrow, offset, size) in V-hat order

    def iota(self, h: str) -> Matrix:
        for hh, off, size in self.blocks:
            if hh == h:
                m = Matrix.zeros(self.hat_dim, size, self.sigma.mode)
                if size:
                    arr = m.array.copy()
                    for k in range(size):
                        arr[off + k, k] = ONE if m.mode == EXACT else 1.0
                    m = Matrix._wrap(arr, m.mode)
                return m
        raise KeyError(h)

    def pi(self, h: str) -> Matrix:
        return self.iota(h).T


def sigma_tau(x: Representation, i: str, q_i) -> SigmaTau:
    """``sigma_i: V_i -> V-hat_i`` and ``tau_i: V-hat_i -> V_i``.

    ``V-hat_i = ⊕_{h in H_i} V_out(h)`` in the order of ``H_i``.  The order
    restricted to ``H_i`` must list base arrows before reversed ones; then the
    relation ``Phi_i(x) = q_i`` holds iff ``tau_i sigma_i = q_i - 1``.
    """
    dq = x.dq
    if dq.has_loop_at(i):
        raise FunctorInapplicable(f"vertex {i!r} carries a loop")
    if not dq.is_canonical_at(i):
        raise ContractViolation(f"order at vertex {i!r} must put base arrows first")
    q_i = parse_scalar(q_i) if x.mode == EXACT else complex(q_i)
    hs = dq.incoming[i]
    n = x.dims[i]
    blocks = []
    off = 0
    for h in hs:
        size = x.dims[dq.out(h)]
        blocks.append((h, off, size))
        off += size
    sig_rows = []
    tau_cols = []
    plus = x.identity(i)
    for h in hs:
        if dq.eps(h) > 0:
            tau_cols.append(plus @ x.maps[h])
            sig_rows.append(x.maps[dq.bar(h)])
            plus = plus @ factor(x, h)
        else:
            # Phi_h^- = prod^> over reversed arrows h' < h
            minus = x.identity(i)
            for h2 in reversed(hs[: hs.index(h)]):
                if dq.eps(h2) < 0:
                    minus = minus @ factor(x, h2)
            sig_rows.append(x.maps[dq.bar(h)] @ minus)
            tau_cols.append(x.maps[h] * (-q_i))
    sigma = vstack(sig_rows, cols=n, mode=x.mode)
    tau = hstack(tau_cols, rows=n, mode=x.mode)
    return SigmaTau(sigma, tau, off, blocks)


# ---------------------------------------------------------------------------
# subspaces and invariant closures


class Subspace:
    """Per-vertex column bases ``S_i ⊆ V_i`` (independent columns)."""

    __slots__ = ("bases",)

    def __init__(self, bases: Mapping[str, Matrix]):
        object.__setattr__(self, "bases", dict(bases))

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def zero(cls, x: Representation) -> "Subspace":
        return cls({v: Matrix.zeros(x.dims[v], 0, x.mode) for v in x.dq.vertices})

    @classmethod
    def full(cls, x: Representation) -> "Subspace":
        return cls({v: Matrix.identity(x.dims[v], x.mode) for v in x.dq.vertices})

    @classmethod
    def coordinate(cls, x: Representation, vertices: Iterable[str]) -> "Subspace":
        vs = set(vertices)
        return cls(
            {
                v: Matrix.identity(x.dims[v], x.mode) if v in vs else Matrix.zeros(x.dims[v], 0, x.mode)
                for v in x.dq.vertices
            }
        )

    @classmethod
    def spanned(cls, x: Representation, vectors: Mapping[str, Matrix]) -> "Subspace":
        out = {}
        for v in x.dq.vertices:
            m = vectors.get(v)
            out[v] = column_basis(m) if m is not None and m.cols else Matrix.zeros(x.dims[v], 0, x.mode)
        return cls(out)

    def __getitem__(self, v):
        return self.bases[v]

    @property
    def dims(self) -> dict:
        return {v: b.cols for v, b in self.bases.items()}

    @property
    def total_dim(self) -> int:
        return sum(b.cols for b in self.bases.values())

    def key(self):
        """Canonical form for deduplication: reduced row echelon of each basis."""
        out = []
        for v in sorted(self.bases):
            b = self.bases[v]
            if b.cols == 0:
                out.append((v, ()))
                continue
            red, piv = _rref(b.T.array)
            out.append((v, tuple(tuple(str(c) for c in red[r]) for r in range(len(piv)))))
        return tuple(out)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def contains(self, other: "Subspace") -> bool:
        return all(contains(self.bases[v], other.bases[v]) for v in self.bases)

    def __repr__(self):
        return f"Subspace(dims={self.dims})"

    def to_json(self):
        return {"dims": self.dims, "bases": {v: b.to_json() for v, b in self.bases.items()}}


def is_invariant(x: Representation, s: Subspace) -> str | None:
    """``None`` if ``s`` is ``x``-invariant, else the first violating arrow."""
    for h in x.dq.order:
        img = x.maps[h] @ s[x.dq.out(h)]
        if not contains(s[x.dq.into(h)], img):
            return h
    return None


SMALLEST = "smallest-containing"
LARGEST = "largest-inside"


def invariant_closure(x: Representation, seed: Subspace, direction: str = SMALLEST, arrows=None) -> Subspace:
    """Smallest invariant subspace containing ``seed`` or largest one inside it.

    ``arrows`` restricts the arrow set (default: all of ``H``).
    """
    if x.mode != EXACT:
        raise ModeError("invariant_closure is exact-only")
    dq = x.dq
    arrows = tuple(dq.order if arrows is None else arrows)
    cur = {v: column_basis(seed[v]) if seed[v].cols else seed[v] for v in dq.vertices}
    bound = x.total_dim + 1
    for _ in range(bound + 1):
        changed = False
        if direction == SMALLEST:
            for h in arrows:
                o, t = dq.out(h), dq.into(h)
                img = x.maps[h] @ cur[o]
                if not contains(cur[t], img):
                    cur[t] = column_basis(hstack([cur[t], img]))
                    changed = True
        elif direction == LARGEST:
            for h in arrows:
                o, t = dq.out(h), dq.into(h)
                if cur[o].cols == 0:
                    continue
                img = x.maps[h] @ cur[o]
                if contains(cur[t], img):
                    continue
                pre = preimage(x.maps[h], cur[t])
                cur[o] = intersect(cur[o], pre)
                changed = True
        else:
            raise ContractViolation(f"unknown closure direction {direction!r}")
        if not changed:
            return Subspace(cur)
    raise AssertionError("invariant closure did not reach a fixpoint")


# ---------------------------------------------------------------------------
# first-order expansion


@dataclass
class ProbeResult:
    slope: float | None
    ts: list
    errors: list
    exact_match: bool
    per_vertex_zero: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)

    def to_json(self):
        return {
            "slope": self.slope,
            "ts": self.ts,
            "errors": self.errors,
            "exact_match": self.exact_match,
            "per_vertex_zero": self.per_vertex_zero,
            "skipped": self.skipped,
        }


DEFAULT_TS = tuple(np.logspace(-1, -3, 5))


def quadratic_approx_probe(x: Representation, ts: Sequence[float] = DEFAULT_TS, floor: float = 1e-300) -> ProbeResult:
    """Fit the slope of ``log ||Phi(t x) - 1 - t^2 mu(x)||`` against ``log t``."""
    if x.mode != FLOAT:
        x = x.to_float()
    m = mu(x)
    used, errs, skipped = [], [], []
    vertex_err = {v: 0.0 for v in x.dq.vertices}
    for t in ts:
        xt = x.scaled(float(t))
        if not in_invertibility_domain(xt):
            logger.warning("t=%g leaves the invertibility domain; skipped", t)
            skipped.append(float(t))
            continue
        p = phi(xt)
        total = 0.0
        for v in x.dq.vertices:
            d = (p[v] - m[v] * (float(t) ** 2)).plus_identity(-1)
            e = float(np.linalg.norm(d.array)) if d.size else 0.0
            vertex_err[v] = max(vertex_err[v], e)
            total = math.hypot(total, e)
        used.append(float(t))
        errs.append(total)
    per_vertex_zero = {v: e <= 1e-15 for v, e in vertex_err.items()}
    if all(e <= floor for e in errs):
        return ProbeResult(None, used, errs, True, per_vertex_zero, skipped)
    pts = [(math.log(t), math.log(e)) for t, e in zip(used, errs) if e > floor]
    if len(pts) < 2:
        return ProbeResult(None, used, errs, False, per_vertex_zero, skipped)
    lx, ly = zip(*pts)
    slope = float(np.polyfit(lx, ly, 1)[0])
    return ProbeResult(slope, used, errs, False, per_vertex_zero, skipped)


# ---------------------------------------------------------------------------
# framed representations


class FramedRepresentation:
    """``(B, a, b)`` with ``a_i: W_i -> V_i`` and ``b_i: V_i -> W_i``."""

    __slots__ = ("base", "w", "a", "b")

    def __init__(self, base: Representation, w, a: Mapping | None = None, b: Mapping | None = None):
        w = as_dims(base.dq, w)
        a = dict(a or {})
        b = dict(b or {})
        mode = base.mode
        aa, bb = {}, {}
        for v in base.dq.vertices:
            ma = a.get(v)
            mb = b.get(v)
            if ma is None:
                ma = Matrix.zeros(base.dims[v], w[v], mode)
            elif not isinstance(ma, Matrix):
                ma = Matrix.from_json(ma, mode, (base.dims[v], w[v]))
            if mb is None:
                mb = Matrix.zeros(w[v], base.dims[v], mode)
            elif not isinstance(mb, Matrix):
                mb = Matrix.from_json(mb, mode, (w[v], base.dims[v]))
            if ma.shape != (base.dims[v], w[v]) or mb.shape != (w[v], base.dims[v]):
                raise ContractViolation(f"framing maps at {v!r} have the wrong shape")
            aa[v], bb[v] = ma, mb
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "a", aa)
        object.__setattr__(self, "b", bb)

    def __setattr__(self, name, value):
        raise AttributeError("FramedRepresentation is immutable")

    @property
    def dq(self):
        return self.base.dq

    @property
    def dims(self):
        return self.base.dims

    @property
    def mode(self):
        return self.base.mode

    def __repr__(self):
        return f"FramedRepresentation(v={self.dims}, w={self.w})"

    def extended(self) -> Representation:
        return frame(self)[0]

    def to_json(self):
        return {
            "rep": self.base.to_json(),
            "w": dict(self.w),
            "a": {v: m.to_json() for v, m in self.a.items()},
            "b": {v: m.to_json() for v, m in self.b.items()},
        }

    @classmethod
    def from_json(cls, data, mode: str | None = None) -> "FramedRepresentation":
        base = Representation.from_json(data["rep"], mode)
        return cls(base, data["w"], data.get("a"), data.get("b"))


def framing_arrow(i: str, k: int) -> str:
    return f"f.{i}.{k}"


def extended_quiver(dq: DoubledQuiver, w: Mapping[str, int]) -> DoubledQuiver:
    """Add a vertex ``"inf"`` with ``w_i`` arrows ``inf -> i``.

    Framing arrows come first in the order, so their factors lead the product
    at each vertex; their reverses come last.
    """
    if INF in dq.vertices:
        raise ContractViolation(f"vertex name {INF!r} is reserved for framing")
    framing = [Arrow(framing_arrow(i, k), INF, i) for i in dq.vertices for k in range(w[i])]
    base = Quiver(list(dq.vertices) + [INF], list(framing) + list(dq.base.arrows))
    order = [a.id for a in framing] + list(dq.order) + [a.id + "*" for a in framing]
    return DoubledQuiver(base, order)


def frame(x: FramedRepresentation, q=None, theta=None):
    """Framing extension by one vertex: returns ``(x_tilde, q_tilde, theta_tilde)``.

    ``q`` and ``theta`` may be omitted, in which case the matching output is
    ``None``.
    """
    base = x.base
    dq = extended_quiver(base.dq, x.w)
    dims = dict(base.dims)
    dims[INF] = 1
    maps = dict(base.maps)
    for i in base.dq.vertices:
        for k in range(x.w[i]):
            h = framing_arrow(i, k)
            maps[h] = x.a[i][:, k : k + 1]
            maps[h + "*"] = x.b[i][k : k + 1, :]
    ext = Representation(dq, dims, maps, base.mode)
    qt = tt = None
    if q is not None:
        qq = as_q(base.dq, q)
        qt = dict(qq)
        qt[INF] = q_power(qq, {v: -d for v, d in base.dims.items()})
    if theta is not None:
        th = as_theta(base.dq, theta)
        tt = dict(th)
        tt[INF] = -sum(th[v] * base.dims[v] for v in base.dq.vertices)
    return ext, qt, tt


@dataclass
class ArmComplex:
    sigma: Matrix
    tau: Matrix
    corank: int
    rank_q: int
    expected: int
    pairing: int

    @property
    def ok(self) -> bool:
        return self.rank_q == self.expected

    def to_json(self):
        return {
            "corank": self.corank,
            "rank_Q": self.rank_q,
            "pairing": self.pairing,
            "expected": self.expected,
            "ok": self.ok,
        }


def arm_complex(x: FramedRepresentation, i: str) -> ArmComplex:
    """The complex ``V_i -> ⊕_{h in H_i} V_out(h) ⊕ W_i -> V_i`` at ``q = 1``."""
    from .errors import StabilityViolation
    from .roots import root_datum_from_graph

    if x.mode != EXACT:
        raise ModeError("arm_complex is exact-only")
    ext, _, _ = frame(x)
    st = sigma_tau(ext, i, 1)
    if not (st.tau @ st.sigma).is_zero():
        raise ContractViolation("tau sigma != 0: the representation does not solve the relation at q = 1")
    n = x.dims[i] - st.tau.rank()
    rk_sigma = st.sigma.rank()
    if rk_sigma != x.dims[i]:
        raise StabilityViolation(f"sigma at {i!r} is not injective (rank {rk_sigma} < {x.dims[i]})")
    dim_ker_tau = st.hat_dim - st.tau.rank()
    rank_q = dim_ker_tau - rk_sigma
    pairing = root_datum_from_graph(x.dq).pairing_w_minus_v(i, x.w, x.dims)
    return ArmComplex(st.sigma, st.tau, n, rank_q, pairing + n, pairing)
