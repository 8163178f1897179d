"""Matrix tuples with filtrations versus representations of star-shaped quivers.

A tuple ``(A_1, ..., A_n)`` with ``A_1 ... A_n = 1`` together with eigenvalue
ladders ``xi_{i,0}, ..., xi_{i,l_i}`` and flags ``V_0 = F_i^0 ⊃ F_i^1 ⊃ ...``
satisfying ``(A_i - xi_{i,j}) F_i^j ⊆ F_i^{j+1}`` corresponds to a solution of
the multiplicative preprojective relation on the star with arms of lengths
``l_i``:

* ``A_i = xi_{i,0} (1 + a_{i,0} b_{i,0})``;
* ``F_i^j = Im(a_{i,0} ... a_{i,j-1})``;
* conversely ``a_{i,j}`` is the inclusion ``F^{j+1} ⊂ F^j`` and
  ``b_{i,j} = (xi_{i,j}^{-1} A_i - 1)`` restricted to ``F^j``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import ContractViolation
from .linalg import EXACT, Matrix, column_basis, contains, coordinates, hstack, intersect, kernel_basis
from .quiver import StarQuiver, build_star
from .representation import Representation, check_relation, is_invariant
from .roots import as_theta, q_power, theta_dot
from .scalars import ONE, ZERO, parse_scalar


def _mat(m) -> Matrix:
    return m if isinstance(m, Matrix) else Matrix.from_json(m, EXACT)


def _frac(x) -> Fraction:
    return Fraction(str(x)) if not isinstance(x, Fraction) else x


@dataclass
class LocalSystemData:
    """Monodromy tuple, ladders, optional explicit flags, and weights."""

    r: int
    matrices: list
    ladders: list
    flags: list | None = None
    beta: list | None = None

    def __post_init__(self):
        self.matrices = [_mat(m) for m in self.matrices]
        self.ladders = [[parse_scalar(c) for c in lad] for lad in self.ladders]
        if len(self.matrices) != len(self.ladders):
            raise ContractViolation("one ladder per matrix is required")
        for k, m in enumerate(self.matrices):
            if m.shape != (self.r, self.r):
                raise ContractViolation(f"A_{k + 1} is not {self.r}x{self.r}")
        for k, lad in enumerate(self.ladders):
            if not lad:
                raise ContractViolation(f"ladder {k + 1} is empty")
            if any(not c for c in lad):
                raise ContractViolation(f"ladder {k + 1} has a zero entry")
        if self.flags is not None:
            self.flags = [[_mat(f) for f in fl] for fl in self.flags]
            for k, fl in enumerate(self.flags):
                if len(fl) != len(self.ladders[k]) - 1:
                    raise ContractViolation(f"puncture {k + 1}: {len(fl)} flag steps for a ladder of length {len(self.ladders[k])}")
        if self.beta is None:
            self.beta = [[Fraction(j) for j in range(len(lad))] for lad in self.ladders]
        else:
            self.beta = [[_frac(b) for b in row] for row in self.beta]
        check_weights(self.beta, self.ladders)

    @property
    def n(self) -> int:
        return len(self.matrices)

    @property
    def arm_lengths(self) -> list[int]:
        return [len(lad) - 1 for lad in self.ladders]

    def quiver(self) -> StarQuiver:
        return build_star(self.arm_lengths)

    def resolved_flags(self) -> list:
        """Explicit flags, or the canonical ones ``Im prod_{k<j} (A_i - xi_{i,k})``."""
        if self.flags is not None:
            return self.flags
        return [canonical_flags(a, lad) for a, lad in zip(self.matrices, self.ladders)]

    def dims(self) -> dict:
        sq = self.quiver()
        out = {"0": self.r}
        for i, fl in enumerate(self.resolved_flags(), start=1):
            for j, f in enumerate(fl, start=1):
                out[sq.vertex(i, j)] = f.cols
        return out

    def product(self) -> Matrix:
        acc = Matrix.identity(self.r)
        for a in self.matrices:
            acc = acc @ a
        return acc

    def to_json(self):
        out = {
            "r": self.r,
            "matrices": [m.to_json() for m in self.matrices],
            "ladders": [[str(c) for c in lad] for lad in self.ladders],
            "beta": [[str(b) for b in row] for row in self.beta],
        }
        if self.flags is not None:
            out["flags"] = [[f.to_json() if f.cols else [] for f in fl] for fl in self.flags]
        return out

    @classmethod
    def from_json(cls, data) -> "LocalSystemData":
        r = int(data["r"])
        flags = data.get("flags")
        if flags is not None:
            flags = [[Matrix.from_json(f, EXACT) if f and f[0] else Matrix.zeros(r, 0) for f in fl] for fl in flags]
        return cls(r, data["matrices"], data["ladders"], flags, data.get("beta"))


def check_weights(beta, ladders):
    if len(beta) != len(ladders):
        raise ContractViolation("one weight row per puncture is required")
    for k, (row, lad) in enumerate(zip(beta, ladders)):
        if len(row) != len(lad):
            raise ContractViolation(f"weight row {k + 1} has length {len(row)}, ladder has {len(lad)}")
        if any(b >= c for b, c in zip(row, row[1:])):
            raise ContractViolation(f"weights at puncture {k + 1} are not strictly increasing")


# ---------------------------------------------------------------------------
# parameters


def params_from_weights(ladders, beta, dims: dict):
    """``(q, theta)`` on the star from ladders, weights and the dimension vector.

    ``q_{i,j} = xi^{j-1}/xi^j``, ``q_0 = prod_i (xi_i^0)^{-1}``,
    ``theta_{i,j} = beta^j - beta^{j-1}`` and ``theta_0`` balances
    ``theta . dims = 0``.  ``q^dims = 1`` is a condition on the eigenvalue data
    (it says ``prod det A_i = 1``) and is enforced here.
    """
    ladders = [[parse_scalar(c) for c in lad] for lad in ladders]
    if any(not c for lad in ladders for c in lad):
        raise ContractViolation("ladder entries must be nonzero")
    beta = [[_frac(b) for b in row] for row in beta]
    check_weights(beta, ladders)
    sq = build_star([len(lad) - 1 for lad in ladders])
    dims = {str(k): int(v) for k, v in dims.items()}
    if set(dims) != set(sq.vertices):
        raise ContractViolation(f"dims keys {sorted(dims)} do not match the star {list(sq.vertices)}")
    r = dims["0"]
    if r <= 0:
        raise ContractViolation("the central dimension must be positive")
    q = {"0": ONE}
    theta = {}
    for i, lad in enumerate(ladders, start=1):
        q["0"] = q["0"] * lad[0].inverse()
        for j in range(1, len(lad)):
            v = sq.vertex(i, j)
            q[v] = lad[j - 1] / lad[j]
            theta[v] = beta[i - 1][j] - beta[i - 1][j - 1]
    theta["0"] = -sum((theta[v] * dims[v] for v in theta), Fraction(0)) / r
    q = {v: q[v] for v in sq.vertices}
    theta = {v: theta[v] for v in sq.vertices}
    if theta_dot(theta, dims) != 0:
        raise AssertionError("theta . dims != 0")
    if q_power(q, dims) != ONE:
        raise ContractViolation(f"q^dims = {q_power(q, dims)} != 1: the determinant condition fails for these ladders and dims")
    return q, theta


# ---------------------------------------------------------------------------
# flags


def canonical_flags(a: Matrix, ladder) -> list:
    """``F^j = Im (A - xi_0) ... (A - xi_{j-1})`` for ``j = 1..l``; checks ``F^{l+1} = 0``."""
    ladder = [parse_scalar(c) for c in ladder]
    r = a.rows
    acc = Matrix.identity(r)
    out = []
    for j in range(1, len(ladder) + 1):
        acc = acc @ a.plus_identity(-ladder[j - 1])
        if j < len(ladder):
            out.append(column_basis(acc))
    if not acc.is_zero():
        raise ContractViolation("the ladder does not annihilate A: prod_j (A - xi_j) != 0")
    return out


def check_flag(a: Matrix, ladder, flag) -> tuple | None:
    """First failing ``(j, reason)`` of ``F^j`` being ``A``-stable with ``(A - xi_j) F^j ⊆ F^{j+1}``."""
    r = a.rows
    steps = [Matrix.identity(r)] + list(flag) + [Matrix.zeros(r, 0)]
    for j in range(len(ladder)):
        f, nxt = steps[j], steps[j + 1]
        if not contains(f, nxt):
            return (j, "flag is not decreasing")
        if not contains(f, a @ f):
            return (j, "F^j is not A-stable")
        if not contains(nxt, a.plus_identity(-ladder[j]) @ f):
            return (j, "(A - xi_j) F^j is not inside F^{j+1}")
    return None


# ---------------------------------------------------------------------------
# the two directions


def tuple_to_rep(d: LocalSystemData) -> Representation:
    """Star representation with ``V_{i,j} = F_i^j``, inclusions ``a`` and ``b = (xi^{-1} A - 1)|_F``."""
    if d.product() != Matrix.identity(d.r):
        raise ContractViolation("A_1 ... A_n != 1")
    flags = d.resolved_flags()
    sq = d.quiver()
    dims = {"0": d.r}
    maps = {}
    for i, (a, lad, fl) in enumerate(zip(d.matrices, d.ladders, flags), start=1):
        bad = check_flag(a, lad, fl)
        if bad is not None:
            raise ContractViolation(f"puncture {i}, step {bad[0]}: {bad[1]}")
        bases = [Matrix.identity(d.r)] + [column_basis(f) if f.cols else f for f in fl]
        for j in range(1, len(bases)):
            dims[sq.vertex(i, j)] = bases[j].cols
        for j in range(len(bases) - 1):
            cur, nxt = bases[j], bases[j + 1]
            maps[sq.a_id(i, j)] = coordinates(cur, nxt) if nxt.cols else Matrix.zeros(cur.cols, 0)
            img = (a * lad[j].inverse()).plus_identity(-1) @ cur
            maps[sq.b_id(i, j)] = coordinates(nxt, img) if nxt.cols else Matrix.zeros(0, cur.cols)
    return Representation(sq.double(), dims, maps, EXACT)


def _arm_product(x: Representation, sq: StarQuiver, i: int, j: int) -> Matrix:
    """``a_{i,0} a_{i,1} ... a_{i,j-1}: V_{i,j} -> V_0``."""
    acc = Matrix.identity(x.dims["0"])
    for k in range(j):
        acc = acc @ x.maps[sq.a_id(i, k)]
    return acc


@dataclass
class TupleReport:
    data: LocalSystemData
    product_is_one: bool
    containments: bool
    dims_match: bool
    failures: list = field(default_factory=list)

    def to_json(self):
        return {
            "tuple": self.data.to_json(),
            "product_is_one": self.product_is_one,
            "containments": self.containments,
            "dims_match": self.dims_match,
            "failures": self.failures,
        }


def rep_to_tuple(x: Representation, ladders, beta=None, check: bool = True) -> TupleReport:
    """``A_i = xi_{i,0}(1 + a_{i,0} b_{i,0})`` with flags ``Im(a_{i,0} ... a_{i,j-1})``."""
    sq = x.dq.base
    if not isinstance(sq, StarQuiver):
        raise ContractViolation("rep_to_tuple needs a representation of a star quiver")
    ladders = [[parse_scalar(c) for c in lad] for lad in ladders]
    if [len(l) - 1 for l in ladders] != list(sq.arm_lengths):
        raise ContractViolation("ladder lengths do not match the arm lengths")
    if check:
        beta_rows = beta if beta is not None else [list(range(len(l))) for l in ladders]
        q, _ = params_from_weights(ladders, beta_rows, x.dims)
        if not check_relation(x, q).ok:
            raise ContractViolation("x does not solve the relation for the q given by the ladders")
    r = x.dims["0"]
    mats, flags, failures = [], [], []
    dims_match = True
    for i, lad in enumerate(ladders, start=1):
        if sq.arm_lengths[i - 1] == 0:
            a = Matrix.scalar(r, lad[0])
        else:
            ab = x.maps[sq.a_id(i, 0)] @ x.maps[sq.b_id(i, 0)]
            a = ab.plus_identity(1) * lad[0]
        mats.append(a)
        fl = []
        for j in range(1, len(lad)):
            img = column_basis(_arm_product(x, sq, i, j))
            if img.cols != x.dims[sq.vertex(i, j)]:
                dims_match = False
                failures.append(f"dim F_{i}^{j} = {img.cols} != v = {x.dims[sq.vertex(i, j)]} (a not injective)")
            fl.append(img)
        flags.append(fl)
    data = LocalSystemData(r, mats, ladders, flags, beta)
    contain_ok = True
    for i, (a, lad, fl) in enumerate(zip(mats, ladders, flags), start=1):
        bad = check_flag(a, lad, fl)
        if bad is not None:
            contain_ok = False
            failures.append(f"puncture {i}, step {bad[0]}: {bad[1]}")
    prod_one = data.product() == Matrix.identity(r)
    return TupleReport(data, prod_one, contain_ok, dims_match, failures)


# ---------------------------------------------------------------------------
# (dagger) inequality


def _joint_closure(mats, seed: Matrix) -> Matrix:
    cur = column_basis(seed) if seed.cols else seed
    while True:
        grown = cur
        for a in mats:
            img = a @ grown
            if not contains(grown, img):
                grown = column_basis(hstack([grown, img]))
        if grown.cols == cur.cols:
            return cur
        cur = grown


def _key(m: Matrix):
    from .linalg import _rref

    if m.cols == 0:
        return ()
    red, piv = _rref(m.T.array)
    return tuple(tuple(str(c) for c in red[k]) for k in range(len(piv)))


def invariant_subspaces(d: LocalSystemData, seeds: Sequence[Matrix] = (), grid=(-1, 0, 1)) -> list:
    """Proper nonzero subspaces of ``C^r`` invariant under every ``A_i``, reachable from the seeds.

    Default seeds: kernels of ``A_i - xi_{i,j}``, the flags, and grid vectors.
    """
    r = d.r
    seeds = list(seeds)
    for a, lad in zip(d.matrices, d.ladders):
        for c in lad:
            k = kernel_basis(a.plus_identity(-c))
            seeds.extend(k.column(t) for t in range(k.cols))
    for fl in d.resolved_flags():
        seeds.extend(f for f in fl if f.cols)
    if r <= 4:
        for combo in itertools.product(grid, repeat=r):
            nz = [c for c in combo if c]
            if nz and nz[0] == 1:
                seeds.append(Matrix([[c] for c in combo]))
    found = {}
    for s in seeds:
        m = _joint_closure(d.matrices, s)
        if 0 < m.cols < r:
            found.setdefault(_key(m), m)
    base = list(found.values())
    for u, w in itertools.combinations(base, 2):
        m = _joint_closure(d.matrices, hstack([u, w]))
        if 0 < m.cols < r:
            found.setdefault(_key(m), m)
    return sorted(found.values(), key=lambda m: (m.cols, _key(m)))


@dataclass
class DaggerEntry:
    basis: Matrix
    lhs: Fraction
    rhs: Fraction

    @property
    def violates_semistability(self) -> bool:
        return self.lhs > self.rhs

    @property
    def violates_stability(self) -> bool:
        return self.lhs >= self.rhs

    def to_json(self):
        return {
            "basis": self.basis.to_json(),
            "rank": self.basis.cols,
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "violates_semistability": self.violates_semistability,
            "violates_stability": self.violates_stability,
        }


@dataclass
class DaggerReport:
    entries: list

    @property
    def semistable_violations(self) -> list:
        return [e for e in self.entries if e.violates_semistability]

    @property
    def stable_violations(self) -> list:
        return [e for e in self.entries if e.violates_stability]

    @property
    def passes(self) -> bool:
        return not self.stable_violations

    def to_json(self):
        return {
            "tested": len(self.entries),
            "passes_strict": self.passes,
            "passes_weak": not self.semistable_violations,
            "entries": [e.to_json() for e in self.entries],
        }


def beta_stability_report(d: LocalSystemData, seeds: Sequence[Matrix] = ()) -> DaggerReport:
    """Compare ``sum theta_ij rank(M ∩ F_i^j) / rank M`` with ``sum theta_ij rank F_i^j / r``."""
    flags = d.resolved_flags()
    thetas = [[row[j] - row[j - 1] for j in range(1, len(row))] for row in d.beta]
    rhs = sum(
        (t * f.cols for th, fl in zip(thetas, flags) for t, f in zip(th, fl)),
        Fraction(0),
    ) / d.r
    entries = []
    for m in invariant_subspaces(d, seeds):
        total = Fraction(0)
        for th, fl in zip(thetas, flags):
            for t, f in zip(th, fl):
                total += t * intersect(m, f).cols
        entries.append(DaggerEntry(m, total / m.cols, rhs))
    return DaggerReport(entries)


# ---------------------------------------------------------------------------
# trace coordinates


def _canonical_rotation(word: tuple) -> tuple:
    return min(word[k:] + word[:k] for k in range(len(word)))


def enumerate_cycles(dq, max_len: int = 4) -> list:
    """Closed words ``(h_1, ..., h_n)`` with ``out(h_k) = in(h_{k+1})`` and ``out(h_n) = in(h_1)``, up to rotation."""
    found = set()

    def extend(word):
        if len(word) > max_len:
            return
        if word and dq.out(word[-1]) == dq.into(word[0]):
            found.add(_canonical_rotation(tuple(word)))
        if len(word) == max_len:
            return
        nxt = dq.out(word[-1])
        for h in dq.incoming[nxt]:
            extend(word + [h])

    for h in dq.order:
        extend([h])
    return sorted(found, key=lambda w: (len(w), w))


def trace_coordinates(x: Representation, cycles=None, max_len: int = 4) -> dict:
    """``Tr(x_{h_1} x_{h_2} ... x_{h_n})`` per cycle; keys are space-joined arrow ids."""
    dq = x.dq
    if cycles is None:
        cycles = enumerate_cycles(dq, max_len)
    out = {}
    for word in cycles:
        word = tuple(word)
        if not word:
            raise ContractViolation("empty word")
        for h in word:
            if h not in dq.arrows:
                raise ContractViolation(f"unknown arrow {h!r}")
        for a, b in zip(word, word[1:] + word[:1]):
            if dq.out(a) != dq.into(b):
                raise ContractViolation(f"word {' '.join(word)} is not a cycle")
        acc = x.maps[word[0]]
        for h in word[1:]:
            acc = acc @ x.maps[h]
        tr = ZERO if x.mode == EXACT else 0j
        for k in range(acc.rows):
            tr = tr + acc[k, k]
        out[" ".join(word)] = tr
    return out
