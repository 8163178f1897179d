"""Deterministic random instances.

All randomness flows from one integer seed through :func:`numpy.random.default_rng`.
Exact entries are drawn from a pool of small-height rationals so that exact
row reduction stays cheap.

Solutions of the relation are produced on star quivers from monodromy tuples:
draw a tuple with product one and known eigenvalue ladders, then translate it
with :func:`mqv.star.tuple_to_rep`.  Three families are available:

``scalar``
    rank one, ``n`` punctures, every arm of length one;
``hypergeometric``
    companion matrices ``A``, ``B^{-1}`` and the pseudo-reflection ``B A^{-1}``
    (arms ``(r-1, r-1, 1)``), irreducible when the two spectra are disjoint;
``four-punctured``
    rank two, four arms of length one, two dimensional moduli.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import ContractViolation, DomainError, GenerationFailure
from .linalg import EXACT, FLOAT, Matrix, hstack, kernel_basis
from .quiver import DoubledQuiver, Quiver, StarQuiver, a_n, build_star, kronecker
from .representation import (
    FramedRepresentation,
    Representation,
    check_relation,
    frame,
    in_invertibility_domain,
    phi,
)
from .roots import as_dims, is_generic
from .scalars import ONE, ZERO, GaussianRational
from .star import LocalSystemData, beta_stability_report, params_from_weights, tuple_to_rep

SMALL = tuple(Fraction(p, q) for p, q in [(1, 1), (2, 1), (1, 2), (3, 1), (1, 3), (3, 2), (2, 3), (4, 1), (1, 4), (5, 2)])
POOL = tuple(sorted(set(SMALL) | {-s for s in SMALL}))
POOL_WITH_ZERO = (Fraction(0),) + POOL

FAMILIES = ("scalar", "hypergeometric", "four-punctured", "zero")
STRATEGIES = ("generic-random", "solve-at-vertexwise-target")


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)


def draw(rng, pool=POOL) -> GaussianRational:
    return GaussianRational(pool[int(rng.integers(len(pool)))])


def draw_distinct(rng, k: int, pool=POOL, avoid=()) -> list:
    avoid = {GaussianRational(a) if not isinstance(a, GaussianRational) else a for a in avoid}
    choices = [GaussianRational(p) for p in pool if GaussianRational(p) not in avoid]
    if len(choices) < k:
        raise GenerationFailure("value pool too small")
    idx = rng.choice(len(choices), size=k, replace=False)
    return [choices[int(t)] for t in idx]


def random_matrix(rng, rows: int, cols: int, pool=POOL_WITH_ZERO, density: float = 1.0) -> Matrix:
    data = [[draw(rng, pool) if rng.random() < density else ZERO for _ in range(cols)] for _ in range(rows)]
    return Matrix(data, EXACT) if rows and cols else Matrix.zeros(rows, cols)


def random_invertible(rng, n: int, attempts: int = 100) -> Matrix:
    ints = tuple(Fraction(k) for k in (-2, -1, 0, 1, 2))
    for _ in range(attempts):
        g = random_matrix(rng, n, n, ints)
        if n == 0 or g.det():
            return g
    raise GenerationFailure("no invertible matrix drawn")


def random_float_matrix(rng, rows: int, cols: int, complex_entries: bool = True) -> Matrix:
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols)) if complex_entries else np.zeros((rows, cols))
    return Matrix(re + 1j * im, FLOAT)


# ---------------------------------------------------------------------------
# companion matrices and tuple families


def companion(roots) -> Matrix:
    """Companion matrix of ``prod (t - root)``; last column carries ``-coefficients``."""
    coeffs = [ONE]
    for z in roots:
        nxt = [ZERO] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k] = nxt[k] - z * c
            nxt[k + 1] = nxt[k + 1] + c
        coeffs = nxt
    r = len(roots)
    rows = [[ZERO] * r for _ in range(r)]
    for k in range(1, r):
        rows[k][k - 1] = ONE
    for k in range(r):
        rows[k][r - 1] = -coeffs[k]
    return Matrix(rows, EXACT)


def eigenbasis(m: Matrix, values) -> Matrix:
    cols = [kernel_basis(m.plus_identity(-v)) for v in values]
    out = hstack(cols, rows=m.rows)
    if out.cols != m.rows:
        raise GenerationFailure("matrix is not diagonalizable over the given values")
    return out


def _conjugate_all(rng, mats):
    g = random_invertible(rng, mats[0].rows)
    gi = g.inverse()
    return [g @ a @ gi for a in mats]


def _increasing_beta(rng, lengths):
    out = []
    for l in lengths:
        start = Fraction(int(rng.integers(-2, 3)))
        steps = [Fraction(int(rng.integers(1, 4)), int(rng.integers(1, 3))) for _ in range(l - 1)]
        row = [start]
        for s in steps:
            row.append(row[-1] + s)
        out.append(row)
    return out


def scalar_tuple(rng, n: int, values=None) -> LocalSystemData:
    """Rank one: scalars ``c_i`` with product one, ladders ``(xi_i, c_i)`` with ``xi_i != c_i``."""
    if values is None:
        values = [draw(rng) for _ in range(n - 1)]
        prod = ONE
        for c in values:
            prod = prod * c
        values.append(prod.inverse())
    values = [GaussianRational(c) if not isinstance(c, GaussianRational) else c for c in values]
    ladders = [[draw_distinct(rng, 1, avoid=[c])[0], c] for c in values]
    mats = [Matrix([[c]], EXACT) for c in values]
    return LocalSystemData(1, mats, ladders, None, _increasing_beta(rng, [2] * n))


def hypergeometric_tuple(rng, r: int, a=None, b=None) -> LocalSystemData:
    """``(A, B^{-1}, B A^{-1})`` for companion matrices with disjoint spectra ``a`` and ``b``."""
    if r < 1:
        raise ContractViolation("rank must be positive")
    for _ in range(50):
        aa = list(a) if a is not None else draw_distinct(rng, r)
        bb = list(b) if b is not None else draw_distinct(rng, r, avoid=aa)
        if len(aa) != r or len(bb) != r or set(aa) & set(bb):
            raise ContractViolation("spectra must have length r and be disjoint")
        big_a, big_b = companion(aa), companion(bb)
        lam = big_b.det() / big_a.det()
        if lam == ONE and (a is None or b is None):
            continue
        mats = [big_a, big_b.inverse(), big_b @ big_a.inverse()]
        ladders = [aa, [z.inverse() for z in bb], [ONE, lam] if lam != ONE else [ONE, ONE]]
        mats = _conjugate_all(rng, mats)
        return LocalSystemData(r, mats, ladders, None, _increasing_beta(rng, [len(l) for l in ladders]))
    raise GenerationFailure("could not draw a hypergeometric tuple with a nontrivial pseudo-reflection")


def _levelt_pair(rng, a, c):
    """``(A, A^{-1} C, C)`` in the companion basis of ``C``."""
    big_a, big_c = companion(a), companion(c)
    return big_a, big_a.inverse() @ big_c, big_c


def four_punctured_tuple(rng, attempts: int = 50) -> LocalSystemData:
    """Rank two, four pseudo-reflection-or-semisimple factors with product one."""
    for _ in range(attempts):
        a = draw_distinct(rng, 2)
        c = draw_distinct(rng, 2, avoid=a)
        d = draw_distinct(rng, 2, avoid=[z.inverse() for z in c])
        a1, a2, big_c = _levelt_pair(rng, a, c)
        ci = [z.inverse() for z in c]
        a3, a4, big_d = _levelt_pair(rng, d, ci)
        lam2 = a2.det()
        lam4 = a4.det()
        if lam2 == ONE or lam4 == ONE:
            continue
        p = eigenbasis(big_c.inverse(), ci) @ eigenbasis(big_d, ci).inverse()
        pi = p.inverse()
        a3, a4 = p @ a3 @ pi, p @ a4 @ pi
        mats = [a1, a2, a3, a4]
        ladders = [a, [ONE, lam2], d, [ONE, lam4]]
        mats = _conjugate_all(rng, mats)
        data = LocalSystemData(2, mats, ladders, None, _increasing_beta(rng, [2, 2, 2, 2]))
        if data.product() != Matrix.identity(2):
            raise AssertionError("four-punctured tuple does not multiply to one")
        if beta_stability_report(data).entries:
            continue
        return data
    raise GenerationFailure("no irreducible four-punctured tuple drawn")


# ---------------------------------------------------------------------------
# recipes


@dataclass
class InstanceRecipe:
    """What to generate.  ``(recipe, seed)`` determines the output completely."""

    family: str = "hypergeometric"
    params: dict = field(default_factory=dict)
    seed: int = 0
    mode: str = EXACT
    strategy: str = "generic-random"
    quiver: dict | None = None
    dims: dict | None = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ContractViolation(f"unknown strategy {self.strategy!r}")
        if self.mode not in (EXACT, FLOAT):
            raise ContractViolation(f"unknown mode {self.mode!r}")
        if self.family is None:
            self.family = infer_family(self.quiver, self.dims)
        if self.family not in FAMILIES:
            raise ContractViolation(f"unknown family {self.family!r}; expected one of {FAMILIES}")

    def to_json(self):
        return {
            "family": self.family,
            "params": self.params,
            "seed": self.seed,
            "mode": self.mode,
            "strategy": self.strategy,
            "quiver": self.quiver,
            "dims": self.dims,
        }

    @classmethod
    def from_json(cls, data) -> "InstanceRecipe":
        return cls(
            data.get("family"),
            dict(data.get("params", {})),
            int(data.get("seed", 0)),
            data.get("mode", EXACT),
            data.get("strategy", "generic-random"),
            data.get("quiver"),
            data.get("dims"),
        )


def infer_family(quiver, dims) -> str:
    """Pick a family matching a star quiver and dimension vector."""
    if quiver is None or dims is None:
        raise ContractViolation("a recipe needs a family, or a star quiver with dims")
    arms = quiver.get("arm_lengths") if isinstance(quiver, Mapping) else None
    if arms is None:
        raise ContractViolation("only star quivers can be matched to a family")
    sq = build_star(arms)
    dv = as_dims(sq.double(), dims)
    if sum(1 for v in dv.values() if v) == 1:
        return "zero"
    r = dv["0"]
    if r == 1 and all(l == 1 for l in arms) and all(v == 1 for v in dv.values()):
        return "scalar"
    if r == 2 and list(arms) == [1, 1, 1, 1] and all(dv[sq.vertex(i, 1)] == 1 for i in range(1, 5)):
        return "four-punctured"
    if r >= 2 and list(arms) == [r - 1, r - 1, 1]:
        expect = {sq.vertex(i, j): r - j for i in (1, 2) for j in range(1, r)}
        expect[sq.vertex(3, 1)] = 1
        if all(dv[k] == v for k, v in expect.items()):
            return "hypergeometric"
    raise GenerationFailure(f"no generator for star {list(arms)} with dims {dv}")


@dataclass
class GeneratedInstance:
    rep: Representation
    q: dict
    theta: dict
    data: LocalSystemData | None
    recipe: InstanceRecipe

    def to_json(self):
        from .scalars import format_scalar

        return {
            "recipe": self.recipe.to_json(),
            "rep": self.rep.to_json(),
            "q": {k: format_scalar(v) if isinstance(v, GaussianRational) else v for k, v in self.q.items()},
            "theta": {k: str(v) for k, v in self.theta.items()},
            "tuple": self.data.to_json() if self.data is not None else None,
        }


def _tuple_for(recipe: InstanceRecipe, rng) -> LocalSystemData:
    p = recipe.params
    target = recipe.strategy == "solve-at-vertexwise-target"
    if recipe.family == "scalar":
        vals = p.get("values") if target else None
        n = len(vals) if vals else int(p.get("n", 3))
        return scalar_tuple(rng, n, vals)
    if recipe.family == "hypergeometric":
        if target:
            from .scalars import parse_scalar

            a = [parse_scalar(z) for z in p["a"]]
            b = [parse_scalar(z) for z in p["b"]]
            return hypergeometric_tuple(rng, len(a), a, b)
        return hypergeometric_tuple(rng, int(p.get("r", 2)))
    if recipe.family == "four-punctured":
        return four_punctured_tuple(rng)
    raise ContractViolation(f"family {recipe.family!r} is not tuple based")


def generate_solution(recipe: InstanceRecipe, attempts: int = 20) -> GeneratedInstance:
    """An exact solution of ``Phi(x) = q`` together with ``q`` and ``theta``."""
    rng = make_rng(recipe.seed)
    if recipe.family == "zero":
        return _zero_instance(recipe)
    last = None
    for _ in range(attempts):
        try:
            data = _tuple_for(recipe, rng)
            x = tuple_to_rep(data)
            q, theta = params_from_weights(data.ladders, data.beta, x.dims)
        except (DomainError, ContractViolation) as exc:
            last = exc
            continue
        if not check_relation(x, q).ok:
            raise AssertionError("generated representation does not solve the relation")
        if recipe.mode == FLOAT:
            x = x.to_float()
        return GeneratedInstance(x, q, theta, data, recipe)
    raise GenerationFailure(f"generation budget exhausted: {last}")


def _zero_instance(recipe: InstanceRecipe) -> GeneratedInstance:
    if recipe.quiver is None or recipe.dims is None:
        raise ContractViolation("the zero family needs a quiver and dims")
    dq = DoubledQuiver.from_json(recipe.quiver)
    dims = as_dims(dq, recipe.dims)
    x = Representation.zero(dq, dims, recipe.mode)
    q = {v: ONE for v in dq.vertices}
    theta = {v: Fraction(0) for v in dq.vertices}
    return GeneratedInstance(x, q, theta, None, recipe)


def generic_solution(rng, family: str, params: dict | None = None, attempts: int = 30) -> GeneratedInstance:
    """A solution whose ``(q, theta)`` is generic for its dimension vector."""
    params = params or {}
    for _ in range(attempts):
        seed = int(rng.integers(2**62))
        inst = generate_solution(InstanceRecipe(family, params, seed))
        if is_generic(inst.rep.dq, inst.rep.dims, inst.q, inst.theta):
            return inst
    raise GenerationFailure("no generic instance drawn")


# ---------------------------------------------------------------------------
# unconstrained representations


def cycle_quiver(n: int) -> Quiver:
    return Quiver([str(k) for k in range(1, n + 1)], [(f"c{k}", str(k), str(k % n + 1)) for k in range(1, n + 1)])


def shape_catalog() -> dict:
    """Small loop-free quivers with a default dimension vector each."""
    d4 = build_star([1, 1, 1])
    return {
        "A3": (a_n(3), {"1": 1, "2": 2, "3": 1}),
        "D4": (d4, {"0": 2, "1.1": 1, "2.1": 1, "3.1": 1}),
        "Kronecker": (kronecker(2), {"1": 2, "2": 2}),
        "cycle3": (cycle_quiver(3), {"1": 1, "2": 2, "3": 1}),
        "A2": (a_n(2), {"1": 2, "2": 1}),
    }


def random_representation(rng, quiver, dims, density: float = 1.0, attempts: int = 50) -> Representation:
    """Random exact representation inside the invertibility domain."""
    dq = quiver if isinstance(quiver, DoubledQuiver) else DoubledQuiver(quiver)
    dims = as_dims(dq, dims)
    for _ in range(attempts):
        maps = {h: random_matrix(rng, dims[dq.into(h)], dims[dq.out(h)], density=density) for h in dq.order}
        x = Representation(dq, dims, maps, EXACT)
        if in_invertibility_domain(x):
            return x
    raise GenerationFailure("no representation inside the invertibility domain drawn")


def random_float_representation(rng, quiver, dims) -> Representation:
    dq = quiver if isinstance(quiver, DoubledQuiver) else DoubledQuiver(quiver)
    dims = as_dims(dq, dims)
    maps = {h: random_float_matrix(rng, dims[dq.into(h)], dims[dq.out(h)]) for h in dq.order}
    return Representation(dq, dims, maps, FLOAT)


def random_framed(rng, quiver, dims, w, density: float = 0.5) -> FramedRepresentation:
    """Sparse random framed representation (no relation imposed)."""
    dq = quiver if isinstance(quiver, DoubledQuiver) else DoubledQuiver(quiver)
    dims = as_dims(dq, dims)
    w = as_dims(dq, w)
    maps = {h: random_matrix(rng, dims[dq.into(h)], dims[dq.out(h)], density=density) for h in dq.order}
    base = Representation(dq, dims, maps, EXACT)
    a = {v: random_matrix(rng, dims[v], w[v], density=density) for v in dq.vertices}
    b = {v: random_matrix(rng, w[v], dims[v], density=density) for v in dq.vertices}
    return FramedRepresentation(base, w, a, b)


def pseudo_reflection_factors(m: Matrix) -> list:
    """``[(a_1, b_1), ...]`` with ``m = (1 + a_1 b_1)(1 + a_2 b_2) ...``; columns ``a``, rows ``b``.

    Gauss-Jordan reduction of ``m`` to the identity, recording the inverse of
    each elementary row operation.
    """
    n = m.rows
    work = [[m[i, j] for j in range(n)] for i in range(n)]
    ops = []

    def unit_col(k, c=ONE):
        return [[c if t == k else ZERO] for t in range(n)]

    def unit_row(k, c=ONE):
        return [[c if t == k else ZERO for t in range(n)]]

    for col in range(n):
        piv = next((r for r in range(col, n) if work[r][col]), None)
        if piv is None:
            raise ContractViolation("matrix is singular")
        if piv != col:
            work[piv], work[col] = work[col], work[piv]
            d = [[ONE if t == col else (-ONE if t == piv else ZERO)] for t in range(n)]
            ops.append((Matrix(d), Matrix([[-c[0] for c in d]])))
        p = work[col][col]
        if p != ONE:
            work[col] = [c / p for c in work[col]]
            ops.append((Matrix(unit_col(col, p - ONE)), Matrix(unit_row(col))))
        for r in range(n):
            c = work[r][col]
            if r != col and c:
                work[r] = [x - c * y for x, y in zip(work[r], work[col])]
                ops.append((Matrix(unit_col(r, c)), Matrix(unit_row(col))))
    return ops


def framed_q1_instance(rng, quiver, dims, pairs: int | None = None, density: float = 1.0, quiet=(), attempts: int = 30):
    """A framed solution at ``q = 1`` with ``b`` jointly injective at every vertex.

    The framing factors at each vertex are paired random factors
    ``(1 + a b)(1 + a b')`` with ``b' = -(1 + b a)^{-1} b`` (product one),
    followed by a pseudo-reflection factorization of ``Phi_i(x)^{-1}``.
    At a ``quiet`` vertex every incident arrow and every framing ``a`` is
    zero, so ``tau`` vanishes there and its corank is ``dim V_i``.
    """
    from .stability import STABLE, check_framed_stability

    dq = quiver if isinstance(quiver, DoubledQuiver) else DoubledQuiver(quiver)
    dims = as_dims(dq, dims)
    quiet = set(quiet)
    for _ in range(attempts):
        try:
            x = random_representation(rng, dq, dims, density)
        except GenerationFailure:
            continue
        if quiet:
            silent = {h: Matrix.zeros(*x.maps[h].shape) for h in dq.order if dq.out(h) in quiet or dq.into(h) in quiet}
            x = x.replace(silent)
        vals = phi(x)
        a_cols, b_rows = {}, {}
        for v in dq.vertices:
            cols, rows = [], []
            if v in quiet:
                for _ in range(dims[v] + int(rng.integers(0, 2))):
                    cols.append(Matrix.zeros(dims[v], 1))
                    rows.append(random_matrix(rng, 1, dims[v]))
                a_cols[v], b_rows[v] = cols, rows
                continue
            for _ in range(dims[v] if pairs is None else pairs):
                a = random_matrix(rng, dims[v], 1)
                b = random_matrix(rng, 1, dims[v])
                s = (b @ a)[0, 0] + ONE
                if not s:
                    continue
                cols += [a, a]
                rows += [b, b * (-s.inverse())]
            if dims[v]:
                for a, b in pseudo_reflection_factors(vals[v].inverse()):
                    cols.append(a)
                    rows.append(b)
            a_cols[v], b_rows[v] = cols, rows
        w = {v: len(a_cols[v]) for v in dq.vertices}
        a = {v: hstack(a_cols[v], rows=dims[v]) for v in dq.vertices}
        from .linalg import vstack

        b = {v: vstack(b_rows[v], cols=dims[v]) for v in dq.vertices}
        fx = FramedRepresentation(x, w, a, b)
        ext, qt, _ = frame(fx, {v: ONE for v in dq.vertices})
        if not check_relation(ext, qt).ok:
            raise AssertionError("framed instance does not solve the relation at q = 1")
        theta = {v: Fraction(1) for v in dq.vertices}
        if check_framed_stability(fx, theta).status == STABLE:
            return fx
    raise GenerationFailure("no framed-stable instance drawn")
