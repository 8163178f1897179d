"""Numerical dimension count for the multiplicative quiver variety at a point.

At a stable solution the reduced map ``x -> (Phi_i(x))`` is a submersion onto
the hypersurface ``prod det = 1`` and ``G_V / C^*`` acts freely, so

    dim Ker dPhi - (dim G_V - 1) = 2 - (v, v).

The Jacobian is assembled column by column from the product rule, rows are
trivialized by ``Phi_i(x)^{-1}`` and the scalar direction is projected out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import FLOAT
from .representation import Representation, phi
from .roots import bilinear_form

DEFAULT_TOL = 1e-9
DEFAULT_GAP = 1e3


def _factors(x: Representation, i: str):
    """``(h, F_h, eps)`` along ``H_i`` in order, with ``F_h = 1 + x_h x_hbar`` as numpy arrays."""
    out = []
    for h in x.dq.incoming[i]:
        a = x.maps[h].array
        b = x.maps[x.dq.bar(h)].array
        out.append((h, np.eye(x.dims[i], dtype=complex) + a @ b, x.dq.eps(h)))
    return out


def _directional(x: Representation, i: str, facs, direction: dict) -> np.ndarray:
    """``d Phi_i`` along ``direction`` (arrow -> dense array, absent means zero)."""
    n = x.dims[i]
    pieces = []
    for h, f, e in facs:
        hb = x.dq.bar(h)
        df = np.zeros((n, n), dtype=complex)
        if h in direction:
            df = df + direction[h] @ x.maps[hb].array
        if hb in direction:
            df = df + x.maps[h].array @ direction[hb]
        if e > 0:
            g, dg = f, df
        else:
            g = np.linalg.inv(f)
            dg = -g @ df @ g
        pieces.append((g, dg))
    total = np.zeros((n, n), dtype=complex)
    for k in range(len(pieces)):
        if not pieces[k][1].any():
            continue
        acc = np.eye(n, dtype=complex)
        for m, (g, dg) in enumerate(pieces):
            acc = acc @ (dg if m == k else g)
        total = total + acc
    return total


def jacobian(x: Representation) -> np.ndarray:
    """Matrix of ``y -> (Phi_i(x)^{-1} dPhi_i(y))_i`` with the scalar component removed.

    Columns run over the matrix entries of every doubled arrow in order; rows
    over the entries of every ``gl(V_i)``.
    """
    x = x if x.mode == FLOAT else x.to_float()
    vals = {i: m.array for i, m in phi(x).items()}
    facs = {i: _factors(x, i) for i in x.dq.vertices}
    inv = {i: np.linalg.inv(vals[i]) if x.dims[i] else vals[i] for i in x.dq.vertices}
    cols = []
    for h in x.dq.order:
        r, c = x.maps[h].shape
        for k in range(r * c):
            e = np.zeros(r * c, dtype=complex)
            e[k] = 1
            direction = {h: e.reshape(r, c)}
            blocks = []
            for i in x.dq.vertices:
                if x.dims[i] == 0:
                    continue
                if i in (x.dq.into(h), x.dq.out(h)):
                    d = inv[i] @ _directional(x, i, facs[i], direction)
                else:
                    d = np.zeros((x.dims[i], x.dims[i]), dtype=complex)
                blocks.append(d.reshape(-1))
            cols.append(np.concatenate(blocks) if blocks else np.zeros(0, dtype=complex))
    rows = sum(d * d for d in x.dims.values())
    j = np.column_stack(cols) if cols else np.zeros((rows, 0), dtype=complex)
    scalar = np.concatenate([np.eye(d, dtype=complex).reshape(-1) for d in x.dims.values() if d])
    if scalar.size:
        u = scalar / np.linalg.norm(scalar)
        j = j - np.outer(u, u.conj() @ j)
    return j


@dataclass
class DimensionReport:
    arrow_space: int
    group_dim: int
    rank: int
    nullity: int
    observed: int
    expected: int
    gap: float
    tol: float
    min_gap: float

    @property
    def ok(self) -> bool:
        return self.observed == self.expected and self.gap >= self.min_gap

    def to_json(self):
        return {
            "dim_M(V)": self.arrow_space,
            "dim_G": self.group_dim,
            "rank": self.rank,
            "nullity": self.nullity,
            "observed": self.observed,
            "expected": self.expected,
            "gap": None if np.isinf(self.gap) else float(self.gap),
            "tol": self.tol,
            "ok": self.ok,
        }


def dimension_check(x: Representation, tol: float = DEFAULT_TOL, min_gap: float = DEFAULT_GAP) -> DimensionReport:
    """Compare ``dim Ker dPhi - (dim G_V - 1)`` against ``2 - (v, v)``.

    The rank counts singular values above ``tol`` times the largest one; the
    gap is the ratio between the last kept and the first dropped value.
    """
    j = jacobian(x)
    s = np.linalg.svd(j, compute_uv=False) if j.size else np.zeros(0)
    top = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * top)) if top > 0 else 0
    if rank == 0 or rank == s.size:
        gap = float("inf")
    else:
        gap = float(s[rank - 1] / s[rank]) if s[rank] > 0 else float("inf")
    n_cols = j.shape[1]
    nullity = n_cols - rank
    group = sum(d * d for d in x.dims.values())
    observed = nullity - (group - 1)
    expected = 2 - bilinear_form(x.dq, x.dims, x.dims)
    return DimensionReport(n_cols, group, rank, nullity, observed, expected, gap, tol, min_gap)
