"""Dense matrices over Q(i) (exact) or complex doubles (float).

A :class:`Matrix` wraps a read-only numpy array.  Exact matrices hold
:class:`~mqv.scalars.GaussianRational` objects; float matrices hold
``complex128``.  The two modes never mix.
"""

from __future__ import annotations

import logging
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ContractViolation, ModeError
from .scalars import ONE, ZERO, GaussianRational, format_scalar, parse_scalar

logger = logging.getLogger(__name__)

EXACT = "exact"
FLOAT = "float"


def _exact_array(rows, cols, values=None):
    a = np.empty((rows, cols), dtype=object)
    if values is None:
        a.fill(ZERO)
    else:
        a[...] = values
    return a


def _float_entry(v) -> complex:
    """A float-mode entry: a number, an ``[re, im]`` pair, or an exact string such as ``"1/2"``."""
    if isinstance(v, list):
        return complex(*v)
    if isinstance(v, str):
        return complex(parse_scalar(v))
    return complex(v)


class Matrix:
    """Immutable ``rows x cols`` matrix in exact or float mode."""

    __slots__ = ("_a", "mode")

    def __init__(self, data, mode: str | None = None):
        if isinstance(data, Matrix):
            arr, inferred = data._a, data.mode
        else:
            arr, inferred = _to_array(data, mode)
        mode = mode or inferred
        if mode == EXACT:
            if arr.dtype != object and (np.iscomplexobj(arr) or arr.dtype.kind == "f"):
                raise ModeError("float data given for an exact matrix")
            if arr.dtype != object or not all(type(v) is GaussianRational for v in arr.ravel()):
                arr = _convert_exact(arr)
        elif mode == FLOAT and arr.dtype != np.complex128:
            arr = _convert_float(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "_a", arr)
        object.__setattr__(self, "mode", mode)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def _wrap(cls, arr, mode):
        obj = object.__new__(cls)
        arr.flags.writeable = False
        object.__setattr__(obj, "_a", arr)
        object.__setattr__(obj, "mode", mode)
        return obj

    # constructors -----------------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int, mode: str = EXACT) -> "Matrix":
        if mode == EXACT:
            return cls._wrap(_exact_array(rows, cols), EXACT)
        return cls._wrap(np.zeros((rows, cols), dtype=np.complex128), FLOAT)

    @classmethod
    def identity(cls, n: int, mode: str = EXACT) -> "Matrix":
        return cls.scalar(n, ONE if mode == EXACT else 1.0, mode)

    @classmethod
    def scalar(cls, n: int, value, mode: str = EXACT) -> "Matrix":
        if mode == EXACT:
            a = _exact_array(n, n)
            v = parse_scalar(value)
            for k in range(n):
                a[k, k] = v
            return cls._wrap(a, EXACT)
        return cls._wrap(np.eye(n, dtype=np.complex128) * complex(value), FLOAT)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int, mode: str = EXACT) -> "Matrix":
        if not columns:
            return cls.zeros(rows, 0, mode)
        return cls(np.array([list(c) for c in columns], dtype=object).T, mode)

    # shape and access -------------------------------------------------------
    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def entries(self) -> tuple:
        """Row-major entries."""
        return tuple(self._a.ravel())

    @property
    def array(self) -> np.ndarray:
        return self._a

    def __getitem__(self, key):
        out = self._a[key]
        if isinstance(out, np.ndarray):
            if out.ndim == 1:
                raise ContractViolation("use 2-d slices, e.g. m[:, j:j+1]")
            return Matrix._wrap(out.copy(), self.mode)
        return out

    def column(self, j: int) -> "Matrix":
        return Matrix._wrap(self._a[:, j : j + 1].copy(), self.mode)

    # algebra ----------------------------------------------------------------
    def _check(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other).__name__}")
        if other.mode != self.mode:
            raise ModeError("cannot mix exact and float matrices")

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check(other)
        if self.shape != other.shape:
            raise ContractViolation(f"shape mismatch {self.shape} + {other.shape}")
        return Matrix._wrap(self._a + other._a, self.mode)

    def __sub__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check(other)
        if self.shape != other.shape:
            raise ContractViolation(f"shape mismatch {self.shape} - {other.shape}")
        return Matrix._wrap(self._a - other._a, self.mode)

    def __neg__(self):
        return Matrix._wrap(-self._a, self.mode)

    def __matmul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check(other)
        if self.cols != other.rows:
            raise ContractViolation(f"shape mismatch {self.shape} @ {other.shape}")
        if self.mode == EXACT:
            return Matrix._wrap(_exact_matmul(self._a, other._a), EXACT)
        return Matrix._wrap(self._a @ other._a, FLOAT)

    def __mul__(self, c):
        if isinstance(c, Matrix):
            return NotImplemented
        if self.mode == EXACT:
            c = parse_scalar(c)
            out = _exact_array(*self.shape)
            for idx, v in np.ndenumerate(self._a):
                out[idx] = c * v
            return Matrix._wrap(out, EXACT)
        return Matrix._wrap(self._a * complex(c), FLOAT)

    __rmul__ = __mul__

    @property
    def size(self) -> int:
        return self._a.size

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.mode == other.mode and self.shape == other.shape and bool(np.all(self._a == other._a))

    def __hash__(self):
        return hash((self.mode, self.shape, self.entries))

    @property
    def T(self) -> "Matrix":
        return Matrix._wrap(self._a.T.copy(), self.mode)

    def plus_identity(self, c=1) -> "Matrix":
        """``self + c*1`` for a square matrix."""
        if self.rows != self.cols:
            raise ContractViolation("plus_identity needs a square matrix")
        return self + Matrix.scalar(self.rows, c, self.mode)

    def is_zero(self) -> bool:
        if self.mode == EXACT:
            return not any(self._a.ravel())
        return not np.any(self._a)

    def is_square(self) -> bool:
        return self.rows == self.cols

    # exact routines ---------------------------------------------------------
    def _require_exact(self, what: str):
        if self.mode != EXACT:
            raise ModeError(f"{what} is exact-only; use rank_numeric for float matrices")

    def rank(self) -> int:
        if self.mode == FLOAT:
            return rank_numeric(self)
        return len(_rref(self._a)[1])

    def det(self):
        if not self.is_square():
            raise ContractViolation("determinant of a non-square matrix")
        if self.mode == FLOAT:
            return complex(np.linalg.det(self._a)) if self.rows else 1.0 + 0j
        return _det(self._a)

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise ContractViolation("inverse of a non-square matrix")
        if self.mode == FLOAT:
            return Matrix._wrap(np.linalg.inv(self._a), FLOAT)
        n = self.rows
        aug = np.concatenate([self._a, _identity_array(n)], axis=1)
        red, piv = _rref(aug)
        if piv[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return Matrix._wrap(red[:, n:].copy(), EXACT)

    def is_invertible(self) -> bool:
        if not self.is_square():
            return False
        if self.mode == EXACT:
            return bool(self.det())
        return rank_numeric(self) == self.rows

    def max_abs(self):
        """Max-norm: largest ``max(|re|, |im|)`` over the entries (0 when empty)."""
        if self.size == 0:
            return ZERO.re if self.mode == EXACT else 0.0
        if self.mode == EXACT:
            return max(max(abs(v.re), abs(v.im)) for v in self._a.ravel())
        return float(np.max(np.maximum(np.abs(self._a.real), np.abs(self._a.imag))))

    # conversion -------------------------------------------------------------
    def to_float(self) -> "Matrix":
        if self.mode == FLOAT:
            return self
        return Matrix._wrap(_convert_float(self._a), FLOAT)

    def to_json(self):
        if self.mode == EXACT:
            return [[format_scalar(v) for v in row] for row in self._a]
        out = []
        for row in self._a:
            out.append([v.real if v.imag == 0 else [v.real, v.imag] for v in row])
        return out

    @classmethod
    def from_json(cls, data, mode: str = EXACT, shape: tuple[int, int] | None = None) -> "Matrix":
        if mode not in (EXACT, FLOAT):
            raise ContractViolation(f"unknown mode {mode!r}")
        if data is None or (isinstance(data, list) and len(data) == 0):
            if shape is None:
                raise ContractViolation("empty matrix needs an explicit shape")
            return cls.zeros(*shape, mode)
        if mode == EXACT:
            rows = [[parse_scalar(v) for v in row] for row in data]
        else:
            rows = [[_float_entry(v) for v in row] for row in data]
        width = {len(r) for r in rows}
        if len(width) != 1:
            raise ContractViolation("ragged matrix rows")
        if shape is not None and (len(rows), width.pop()) != tuple(shape):
            raise ContractViolation(f"matrix shape {len(rows)}x{len(data[0])} does not match {shape}")
        return cls(np.array(rows, dtype=object) if mode == EXACT else np.array(rows, dtype=np.complex128), mode)

    def __repr__(self):
        return f"Matrix({self.to_json()!r}, mode={self.mode!r})"


def _to_array(data, mode):
    if isinstance(data, np.ndarray):
        arr = data.copy()
    else:
        rows = [list(r) for r in data]
        if rows and len({len(r) for r in rows}) != 1:
            raise ContractViolation("ragged matrix rows")
        if not rows:
            arr = np.empty((0, 0), dtype=object)
        else:
            arr = np.empty((len(rows), len(rows[0])), dtype=object)
            for i, r in enumerate(rows):
                for j, v in enumerate(r):
                    arr[i, j] = v
    if arr.ndim != 2:
        raise ContractViolation("matrices are 2-dimensional")
    if mode is not None:
        return arr, mode
    if arr.dtype != object:
        return arr, FLOAT if arr.dtype.kind in "fc" else EXACT
    kinds = {type(v) for v in arr.ravel()}
    if kinds & {float, complex, np.float64, np.complex128}:
        if kinds - {float, complex, np.float64, np.complex128, int}:
            raise ModeError("cannot mix exact and float entries in one matrix")
        return arr, FLOAT
    return arr, EXACT


def _convert_exact(arr):
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        if isinstance(v, (float, np.floating, complex, np.complexfloating)):
            raise ModeError("cannot mix exact and float entries in one matrix")
        out[idx] = parse_scalar(int(v) if isinstance(v, np.integer) else v)
    return out


def _convert_float(arr):
    out = np.empty(arr.shape, dtype=np.complex128)
    for idx, v in np.ndenumerate(arr):
        out[idx] = complex(v)
    return out


def _identity_array(n):
    a = _exact_array(n, n)
    for k in range(n):
        a[k, k] = ONE
    return a


def _exact_matmul(a, b):
    p, q = a.shape
    r = b.shape[1]
    out = _exact_array(p, r)
    if q == 0:
        return out
    bt = b.T
    for i in range(p):
        row = a[i]
        nz = [k for k in range(q) if row[k]]
        if not nz:
            continue
        for j in range(r):
            col = bt[j]
            acc = ZERO
            for k in nz:
                v = col[k]
                if v:
                    acc = acc + row[k] * v
            out[i, j] = acc
    return out


def _pick_pivot(m, r, c, nrows):
    best, best_h = None, None
    for i in range(r, nrows):
        v = m[i][c]
        if v:
            h = v.height()
            if best is None or h < best_h:
                best, best_h = i, h
                if h <= 2:
                    break
    return best


def _rref(arr):
    """Reduced row echelon form over Q(i).

    Returns ``(reduced_array, pivot_columns)``.  Pivots are chosen per column as
    the nonzero entry of smallest height, which keeps intermediate fractions
    small.
    """
    nrows, ncols = arr.shape
    m = [list(row) for row in arr]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = _pick_pivot(m, r, c, nrows)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse()
        if inv != ONE:
            m[r] = [v * inv if v else v for v in m[r]]
        pivot_row = m[r]
        nz = [k for k in range(c, ncols) if pivot_row[k]]
        for i in range(nrows):
            if i == r:
                continue
            f = m[i][c]
            if f:
                row = m[i]
                for k in nz:
                    row[k] = row[k] - f * pivot_row[k]
        pivots.append(c)
        r += 1
    out = _exact_array(nrows, ncols, m) if nrows and ncols else np.empty((nrows, ncols), dtype=object)
    return out, pivots


def _det(arr):
    n = arr.shape[0]
    m = [list(row) for row in arr]
    det = ONE
    for c in range(n):
        p = _pick_pivot(m, c, c, n)
        if p is None:
            return ZERO
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        piv = m[c][c]
        det = det * piv
        inv = piv.inverse()
        for i in range(c + 1, n):
            f = m[i][c]
            if f:
                f = f * inv
                row, prow = m[i], m[c]
                for k in range(c + 1, n):
                    if prow[k]:
                        row[k] = row[k] - f * prow[k]
    return det


# ---------------------------------------------------------------------------
# subspace utilities (column-span bases)


def kernel_basis(m: Matrix) -> Matrix:
    """Columns spanning ``Ker m``; ``cols(result) == m.cols - rank(m)``."""
    m._require_exact("kernel_basis")
    n = m.cols
    if m.rows == 0:
        return Matrix.identity(n)
    red, piv = _rref(m._a)
    free = [c for c in range(n) if c not in set(piv)]
    basis = _exact_array(n, len(free))
    for k, f in enumerate(free):
        basis[f, k] = ONE
        for r, p in enumerate(piv):
            v = red[r, f]
            if v:
                basis[p, k] = -v
    return Matrix._wrap(basis, EXACT)


def column_basis(m: Matrix) -> Matrix:
    """Independent columns of ``m`` spanning its image."""
    m._require_exact("column_basis")
    if m.cols == 0 or m.rows == 0:
        return Matrix.zeros(m.rows, 0)
    _, piv = _rref(m._a)
    return Matrix._wrap(m._a[:, piv].copy(), EXACT)


def rank(m: Matrix) -> int:
    return m.rank()


def hstack(mats: Sequence[Matrix], rows: int | None = None, mode: str = EXACT) -> Matrix:
    mats = list(mats)
    if not mats:
        return Matrix.zeros(rows or 0, 0, mode)
    mode = mats[0].mode
    if any(x.mode != mode for x in mats):
        raise ModeError("cannot mix exact and float matrices")
    if len({x.rows for x in mats}) != 1:
        raise ContractViolation("hstack needs equal row counts")
    return Matrix._wrap(np.concatenate([x._a for x in mats], axis=1), mode)


def vstack(mats: Sequence[Matrix], cols: int | None = None, mode: str = EXACT) -> Matrix:
    mats = list(mats)
    if not mats:
        return Matrix.zeros(0, cols or 0, mode)
    mode = mats[0].mode
    if any(x.mode != mode for x in mats):
        raise ModeError("cannot mix exact and float matrices")
    if len({x.cols for x in mats}) != 1:
        raise ContractViolation("vstack needs equal column counts")
    return Matrix._wrap(np.concatenate([x._a for x in mats], axis=0), mode)


def block_diag(mats: Sequence[Matrix], mode: str = EXACT) -> Matrix:
    mats = list(mats)
    if mats:
        mode = mats[0].mode
    r = sum(x.rows for x in mats)
    c = sum(x.cols for x in mats)
    out = Matrix.zeros(r, c, mode)._a.copy()
    i = j = 0
    for x in mats:
        out[i : i + x.rows, j : j + x.cols] = x._a
        i += x.rows
        j += x.cols
    return Matrix._wrap(out, mode)


def solve(a: Matrix, b: Matrix) -> Matrix | None:
    """Some ``X`` with ``a @ X == b``, or ``None`` when inconsistent."""
    a._require_exact("solve")
    if a.rows != b.rows:
        raise ContractViolation("solve: row mismatch")
    n, k = a.cols, b.cols
    if a.rows == 0:
        return Matrix.zeros(n, k)
    red, piv = _rref(np.concatenate([a._a, b._a], axis=1))
    if any(p >= n for p in piv):
        return None
    x = _exact_array(n, k)
    for r, p in enumerate(piv):
        x[p, :] = red[r, n:]
    return Matrix._wrap(x, EXACT)


def coordinates(basis: Matrix, vectors: Matrix) -> Matrix:
    """Coordinates of ``vectors`` in an independent column ``basis``; raises if outside the span."""
    x = solve(basis, vectors)
    if x is None:
        raise ContractViolation("vectors do not lie in the span of the basis")
    return x


def span_sum(u: Matrix, w: Matrix) -> Matrix:
    return column_basis(hstack([u, w]))


def intersect(u: Matrix, w: Matrix) -> Matrix:
    """Basis of ``span(u) ∩ span(w)`` (inputs need not be independent)."""
    if u.cols == 0 or w.cols == 0:
        return Matrix.zeros(u.rows, 0)
    k = kernel_basis(hstack([u, -w]))
    return column_basis(u @ k[: u.cols, :]) if k.cols else Matrix.zeros(u.rows, 0)


def preimage(m: Matrix, target: Matrix) -> Matrix:
    """Basis of ``{v : m v ∈ span(target)}``."""
    if target.cols == 0:
        return kernel_basis(m)
    k = kernel_basis(hstack([m, -target]))
    return column_basis(k[: m.cols, :]) if k.cols else Matrix.zeros(m.cols, 0)


def contains(u: Matrix, w: Matrix) -> bool:
    """True iff ``span(w) ⊆ span(u)``."""
    if w.cols == 0:
        return True
    return solve(u, w) is not None if u.cols else w.is_zero()


# ---------------------------------------------------------------------------
# numeric rank


def singular_values(m: Matrix) -> np.ndarray:
    a = m.to_float().array if m.mode == EXACT else m.array
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def rank_numeric(m: Matrix, tol: float = 1e-9) -> int:
    """Number of singular values above ``tol`` times the largest one."""
    if m.mode != FLOAT:
        raise ModeError("rank_numeric expects a float matrix")
    s = singular_values(m)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


# ---------------------------------------------------------------------------
# linear matrix equations


def _term_rows(left: Matrix, right: Matrix, offset: int, width: int):
    """Coefficient rows of ``vec(left @ X @ right)`` w.r.t. row-major ``vec(X)``."""
    p, r = left.shape
    c, s = right.shape
    la, ra = left._a, right._a
    out = []
    for a in range(p):
        lrow = la[a]
        lnz = [k for k in range(r) if lrow[k]]
        for b in range(s):
            rcol = ra[:, b]
            rnz = [l for l in range(c) if rcol[l]]
            row = {}
            for k in lnz:
                for l in rnz:
                    row[offset + k * width + l] = lrow[k] * rcol[l]
            out.append(row)
    return out


def solve_sylvester_intertwiner(
    unknowns: Mapping,
    equations: Iterable,
    invertible: bool = False,
    rng: np.random.Generator | None = None,
    attempts: int = 64,
):
    """Solve a system of linear equations in a tuple of unknown matrices.

    ``unknowns`` maps a key to the ``(rows, cols)`` shape of ``xi[key]``.  Each
    equation is ``(terms, rhs)`` where ``terms`` is a list of
    ``(key, left, right)`` standing for ``left @ xi[key] @ right`` and ``rhs`` is
    a Matrix or ``None`` (zero).  The equation asserts ``sum(terms) == rhs``.

    Returns a dict ``key -> Matrix`` or ``None`` if the system is inconsistent.
    With ``invertible=True`` every ``xi[key]`` must be square; random points of
    the affine solution space are tried until all determinants are nonzero,
    returning ``None`` when ``attempts`` run out.
    """
    keys = list(unknowns)
    offsets, total = {}, 0
    for k in keys:
        r, c = unknowns[k]
        offsets[k] = total
        total += r * c
    eq_rows, rhs_vals = [], []
    for terms, rhs in equations:
        terms = list(terms)
        shape = None
        block_rows = None
        for key, left, right in terms:
            if key not in unknowns:
                raise ContractViolation(f"unknown key {key!r}")
            r, c = unknowns[key]
            if left.cols != r or right.rows != c:
                raise ContractViolation(
                    f"term for {key!r}: left {left.shape}, right {right.shape} vs unknown {(r, c)}"
                )
            if left.mode != EXACT or right.mode != EXACT:
                raise ModeError("solve_sylvester_intertwiner is exact-only")
            this = (left.rows, right.cols)
            if shape is None:
                shape = this
                block_rows = [dict() for _ in range(this[0] * this[1])]
            elif shape != this:
                raise ContractViolation("terms of one equation have different shapes")
            for acc, row in zip(block_rows, _term_rows(left, right, offsets[key], c)):
                for col, v in row.items():
                    acc[col] = acc.get(col, ZERO) + v
        if rhs is None:
            if shape is None:
                continue
            rvals = [ZERO] * (shape[0] * shape[1])
        else:
            if shape is not None and rhs.shape != shape:
                raise ContractViolation(f"rhs shape {rhs.shape} does not match terms {shape}")
            if shape is None:
                shape = rhs.shape
                block_rows = [dict() for _ in range(shape[0] * shape[1])]
            rvals = list(rhs._a.ravel())
        eq_rows.extend(block_rows)
        rhs_vals.extend(rvals)

    m = _exact_array(len(eq_rows), total + 1)
    for i, row in enumerate(eq_rows):
        for col, v in row.items():
            m[i, col] = v
        m[i, total] = rhs_vals[i]
    if len(eq_rows) == 0:
        particular = [ZERO] * total
        null = [[ONE if j == k else ZERO for j in range(total)] for k in range(total)]
    else:
        red, piv = _rref(m)
        if total in piv:
            return None
        particular = [ZERO] * total
        for r, p in enumerate(piv):
            particular[p] = red[r, total]
        pivset = set(piv)
        null = []
        for f in range(total):
            if f in pivset:
                continue
            vec = [ZERO] * total
            vec[f] = ONE
            for r, p in enumerate(piv):
                v = red[r, f]
                if v:
                    vec[p] = -v
            null.append(vec)

    def unpack(vec):
        out = {}
        for k in keys:
            r, c = unknowns[k]
            o = offsets[k]
            block = _exact_array(r, c)
            for t in range(r * c):
                block[t // c, t % c] = vec[o + t]
            out[k] = Matrix._wrap(block, EXACT)
        return out

    if not invertible:
        return unpack(particular)
    for k in keys:
        r, c = unknowns[k]
        if r != c:
            raise ContractViolation(f"invertible solution requested but {k!r} is {r}x{c}")
    rng = rng if rng is not None else np.random.default_rng(0)
    candidates = [particular]
    if null:
        candidates.append([sum((v[j] for v in null), ZERO) + particular[j] for j in range(total)])
    for _ in range(attempts):
        coeffs = [parse_scalar(int(c)) for c in rng.integers(-9, 10, size=len(null))]
        candidates.append([particular[j] + sum((coeffs[t] * null[t][j] for t in range(len(null))), ZERO) for j in range(total)])
    for vec in candidates:
        sol = unpack(vec)
        if all(sol[k].rows == 0 or sol[k].det() for k in keys):
            return sol
    logger.warning("no invertible solution found in %d attempts (solution space dim %d)", attempts, len(null))
    return None
