"""theta-stability verdicts with certificates.

Convention: ``x`` is theta-semistable when every ``x``-invariant subspace ``S``
has ``theta . dim S <= 0``, and stable when the inequality is strict for
``0 != S != V``.

Two exact regimes are covered.  For framed representations with positive
``theta`` the verdict reduces to a single fixpoint (the largest invariant
subspace inside ``Ker b``).  For tiny total dimension we close a grid of seed
vectors under the arrows and inspect every resulting invariant subspace.
Beyond that a randomized search can only ever find destabilizers, so its
negative result is ``Unknown``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import ContractViolation, ModeError
from .linalg import EXACT, Matrix, column_basis, contains, hstack, kernel_basis, solve
from .representation import (
    LARGEST,
    SMALLEST,
    FramedRepresentation,
    Representation,
    Subspace,
    frame,
    invariant_closure,
    is_invariant,
)
from .roots import as_theta, is_generic, theta_dot
from .scalars import ONE, ZERO, parse_scalar

logger = logging.getLogger(__name__)

STABLE = "Stable"
SEMISTABLE = "SemistableNotStable"
UNSTABLE = "Unstable"
UNKNOWN = "Unknown"

EXACT_FIXPOINT = "ExactFixpoint"
EXHAUSTIVE_TINY = "ExhaustiveTiny"
RANDOMIZED = "RandomizedSearch"

TINY_BOUND = 6


@dataclass
class StabilityVerdict:
    status: str
    method: str
    certificate: Subspace | None = None
    value: Fraction | None = None
    rep: Representation | None = field(default=None, repr=False)
    diagnostics: dict = field(default_factory=dict)

    @property
    def stable(self) -> bool:
        return self.status == STABLE

    @property
    def semistable(self) -> bool:
        return self.status in (STABLE, SEMISTABLE)

    def to_json(self):
        out = {"status": self.status, "method": self.method}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
            out["theta_dot_dim"] = str(self.value)
        diag = {}
        for k, v in self.diagnostics.items():
            diag[k] = v.to_json() if hasattr(v, "to_json") else v
        if diag:
            out["diagnostics"] = diag
        return out


def _theta_of(s: Subspace, theta: Mapping) -> Fraction:
    return theta_dot(theta, s.dims)


def verify_certificate(x: Representation, cert: Subspace, theta, expected_sign: int) -> bool:
    """Re-check a certificate: invariant, proper, nonzero, and ``sign(theta . dim S)``."""
    th = as_theta(x.dq, theta)
    if is_invariant(x, cert) is not None:
        return False
    total = cert.total_dim
    if total == 0 or total == x.total_dim:
        return False
    val = _theta_of(cert, th)
    return (val > 0) if expected_sign > 0 else (val == 0) if expected_sign == 0 else (val < 0)


def _emit(x, th, status, method, cert, diagnostics=None) -> StabilityVerdict:
    value = _theta_of(cert, th) if cert is not None else None
    if cert is not None:
        sign = 1 if status == UNSTABLE else 0
        if status == UNKNOWN:
            sign = 0
        if not verify_certificate(x, cert, th, sign):
            raise AssertionError(f"emitted certificate failed re-verification ({status})")
    return StabilityVerdict(status, method, cert, value, x, diagnostics or {})


# ---------------------------------------------------------------------------
# candidate invariant subspaces


def _grid_vectors(d: int, grid: Sequence[int]):
    """Nonzero vectors with entries in ``grid``, one per line (first nonzero entry 1)."""
    for combo in itertools.product(grid, repeat=d):
        nz = [c for c in combo if c]
        if not nz or nz[0] != 1:
            continue
        yield combo


def _single(x: Representation, v: str, vec) -> Subspace:
    bases = {}
    for u in x.dq.vertices:
        if u == v:
            bases[u] = Matrix([[parse_scalar(c)] for c in vec])
        else:
            bases[u] = Matrix.zeros(x.dims[u], 0)
    return Subspace(bases)


def _sum(x: Representation, a: Subspace, b: Subspace) -> Subspace:
    return Subspace({v: column_basis(hstack([a[v], b[v]])) for v in x.dq.vertices})


def candidate_subspaces(x: Representation, grid: Sequence[int] = (-1, 0, 1), pair_limit: int = 80) -> list[Subspace]:
    """Invariant subspaces reachable from the seed grid.

    Seeds: closures of single grid vectors, kernels of arrow maps, and every
    coordinate subspace (both closure directions); then pairwise sums.
    """
    seen = {}

    def add(s: Subspace):
        k = s.key()
        if k not in seen:
            seen[k] = s

    cyclic = []
    for v in x.dq.vertices:
        for vec in _grid_vectors(x.dims[v], grid):
            s = invariant_closure(x, _single(x, v, vec), SMALLEST)
            k = s.key()
            if k not in seen:
                seen[k] = s
                cyclic.append(s)
    names = list(x.dq.vertices)
    for r in range(len(names) + 1):
        for subset in itertools.combinations(names, r):
            seed = Subspace.coordinate(x, subset)
            add(invariant_closure(x, seed, SMALLEST))
            add(invariant_closure(x, seed, LARGEST))
    for h in x.dq.order:
        o = x.dq.out(h)
        seed = Subspace.full(x).bases
        seed = dict(seed)
        seed[o] = kernel_basis(x.maps[h]) if x.maps[h].rows else seed[o]
        add(invariant_closure(x, Subspace(seed), LARGEST))
    base = list(seen.values())
    if len(base) <= pair_limit:
        for a, b in itertools.combinations(base, 2):
            add(_sum(x, a, b))
    return list(seen.values())


def _order_key(x: Representation, s: Subspace):
    return (s.total_dim, [s.dims[v] for v in x.dq.vertices], s.key())


def _tier1(x: Representation, th: dict, grid) -> StabilityVerdict:
    n = x.total_dim
    positives, zeros = [], []
    cands = candidate_subspaces(x, grid)
    for s in cands:
        t = s.total_dim
        if t == 0 or t == n:
            continue
        val = _theta_of(s, th)
        if val > 0:
            positives.append(s)
        elif val == 0:
            zeros.append(s)
    diag = {"candidates": len(cands)}
    if positives:
        best = min(positives, key=lambda s: _order_key(x, s))
        return _emit(x, th, UNSTABLE, EXHAUSTIVE_TINY, best, diag)
    if zeros:
        best = min(zeros, key=lambda s: _order_key(x, s))
        return _emit(x, th, SEMISTABLE, EXHAUSTIVE_TINY, best, diag)
    return _emit(x, th, STABLE, EXHAUSTIVE_TINY, None, diag)


def _tier2(x: Representation, th: dict, budget: int, rng, q=None) -> StabilityVerdict:
    rng = rng if rng is not None else np.random.default_rng(0)
    n = x.total_dim
    found_pos, found_zero = [], []
    verts = [v for v in x.dq.vertices if x.dims[v]]
    seeds = [Subspace.coordinate(x, [v]) for v in verts]
    for _ in range(max(budget, 0)):
        k = int(rng.integers(1, 3))
        bases = {}
        for v in x.dq.vertices:
            if v in verts and rng.random() < 0.5:
                cols = rng.integers(-3, 4, size=(x.dims[v], k))
                bases[v] = Matrix([[int(c) for c in row] for row in cols])
            else:
                bases[v] = Matrix.zeros(x.dims[v], 0)
        seeds.append(Subspace.spanned(x, bases))
    for seed in seeds:
        for direction in (SMALLEST, LARGEST):
            if direction == LARGEST:
                seed = Subspace(
                    {v: seed[v] if seed[v].cols else Matrix.identity(x.dims[v]) for v in x.dq.vertices}
                )
            s = invariant_closure(x, seed, direction)
            t = s.total_dim
            if t == 0 or t == n:
                continue
            val = _theta_of(s, th)
            if val > 0:
                found_pos.append(s)
            elif val == 0:
                found_zero.append(s)
    diag = {"seeds": len(seeds)}
    if found_pos:
        best = min(found_pos, key=lambda s: _order_key(x, s))
        return _emit(x, th, UNSTABLE, RANDOMIZED, best, diag)
    if found_zero:
        best = min(found_zero, key=lambda s: _order_key(x, s))
        diag["not_stable_witness"] = best
        diag["interpretation"] = "a proper invariant subspace with theta.dim = 0 exists, so x is not stable"
        return StabilityVerdict(UNKNOWN, RANDOMIZED, None, None, x, diag)
    if q is not None:
        try:
            from .representation import solves

            if solves(x, q) and is_generic(x.dq, x.dims, q, th):
                diag["interpretation"] = "x solves Phi = q with generic (q, theta): semistable would imply stable"
        except ContractViolation:
            pass
    return StabilityVerdict(UNKNOWN, RANDOMIZED, None, None, x, diag)


def check_general_stability(
    x: Representation,
    theta,
    budget: int = 200,
    tiny_bound: int = TINY_BOUND,
    grid: Sequence[int] = (-1, 0, 1),
    rng: np.random.Generator | None = None,
    q=None,
) -> StabilityVerdict:
    """Tiered stability check; requires ``theta . dim V = 0``."""
    if x.mode != EXACT:
        raise ModeError("stability checks are exact-only")
    th = as_theta(x.dq, theta)
    if theta_dot(th, x.dims) != 0:
        raise ContractViolation("theta . dim V must vanish")
    if x.total_dim <= tiny_bound:
        return _tier1(x, th, grid)
    return _tier2(x, th, budget, rng, q)


def check_framed_stability(x: FramedRepresentation, theta, **kwargs) -> StabilityVerdict:
    """Stability of the framed point ``(B, a, b)`` for ``theta > 0``.

    With every ``theta_i > 0`` the point is stable iff no nonzero
    ``B``-invariant subspace sits inside ``Ker b``.  Other ``theta`` are
    delegated to :func:`check_general_stability` on the extended quiver.
    Certificates live on the extended representation (zero at ``inf``).
    """
    if x.mode != EXACT:
        raise ModeError("stability checks are exact-only")
    th = as_theta(x.dq, theta)
    ext, _, tt = frame(x, None, th)
    if any(t <= 0 for t in th.values()):
        return check_general_stability(ext, tt, **kwargs)
    base = x.base
    seed = Subspace({v: kernel_basis(x.b[v]) if x.w[v] else Matrix.identity(base.dims[v]) for v in base.dq.vertices})
    inside = invariant_closure(base, seed, LARGEST)
    im_a = Subspace.spanned(base, {v: x.a[v] for v in base.dq.vertices})
    closure_a = invariant_closure(base, im_a, SMALLEST)
    diag = {"im_a_closure_is_V": closure_a.total_dim == base.total_dim, "ker_b_core_dims": inside.dims}
    if inside.total_dim == 0:
        return StabilityVerdict(STABLE, EXACT_FIXPOINT, None, None, ext, diag)
    cert = Subspace({**{v: inside[v] for v in base.dq.vertices}, "inf": Matrix.zeros(1, 0)})
    return _emit(ext, tt, UNSTABLE, EXACT_FIXPOINT, cert, diag)


# ---------------------------------------------------------------------------
# associated graded


def _complement(sub: Matrix, whole: Matrix) -> Matrix:
    """Columns of ``whole`` extending a basis of ``sub`` to one of ``span(whole)``."""
    cur = sub
    picked = []
    for j in range(whole.cols):
        col = whole.column(j)
        if not contains(cur, col):
            picked.append(col)
            cur = hstack([cur, col])
    return hstack(picked, rows=whole.rows)


def associated_graded(x: Representation, filtration: Sequence[Subspace], theta=None) -> Representation:
    """Block-diagonal part of ``x`` in a basis adapted to ``V = F^0 ⊃ F^1 ⊃ ... ⊃ 0``.

    The ends ``V`` and ``0`` are added when missing.  Each step must be
    invariant (and, when ``theta`` is given, have ``theta . dim = 0``).
    """
    if x.mode != EXACT:
        raise ModeError("associated_graded is exact-only")
    steps = list(filtration)
    if not steps or steps[0].total_dim != x.total_dim:
        steps.insert(0, Subspace.full(x))
    if steps[-1].total_dim != 0:
        steps.append(Subspace.zero(x))
    th = as_theta(x.dq, theta) if theta is not None else None
    for k, s in enumerate(steps):
        bad = is_invariant(x, s)
        if bad is not None:
            raise ContractViolation(f"filtration step {k} is not invariant under arrow {bad!r}")
        if th is not None and theta_dot(th, s.dims) != 0:
            raise ContractViolation(f"filtration step {k} has theta.dim != 0")
        if k and not (steps[k - 1].contains(s) and steps[k - 1].total_dim > s.total_dim):
            raise ContractViolation(f"filtration is not strictly decreasing at step {k}")
    change = {}
    blocks = {}
    for v in x.dq.vertices:
        parts = []
        for k in range(len(steps) - 1):
            parts.append(_complement(steps[k + 1][v], steps[k][v]))
        change[v] = hstack(parts, rows=x.dims[v])
        blocks[v] = [p.cols for p in parts]
    new = {}
    for h in x.dq.order:
        o, t = x.dq.out(h), x.dq.into(h)
        pin = change[t]
        y = (pin.inverse() if pin.rows else pin) @ x.maps[h] @ change[o]
        arr = y.array.copy()
        ro = np.cumsum([0] + blocks[t])
        co = np.cumsum([0] + blocks[o])
        for a in range(len(blocks[t])):
            for b in range(len(blocks[o])):
                if a != b:
                    arr[ro[a] : ro[a + 1], co[b] : co[b + 1]] = ZERO
        new[h] = Matrix(arr, EXACT)
    return x.replace(new)
