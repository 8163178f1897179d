import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from mqv import Matrix, kernel_basis, rank_numeric, solve_sylvester_intertwiner
from mqv.errors import ContractViolation, ModeError
from mqv.linalg import FLOAT, column_basis, intersect, preimage, rank, solve
from mqv.scalars import GaussianRational, format_scalar, parse_scalar

from conftest import S, mat

small = st.integers(min_value=-3, max_value=3)


@st.composite
def exact_matrices(draw, max_rows=4, max_cols=4):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    vals = draw(st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))
    if r == 0 or c == 0:
        return Matrix.zeros(r, c)
    return Matrix([[GaussianRational(v) for v in row] for row in vals])


def to_sympy(m: Matrix):
    return sympy.Matrix(m.rows, m.cols, lambda i, j: sympy.Rational(str(m[i, j].re)) + sympy.I * sympy.Rational(str(m[i, j].im)))


# ---------------------------------------------------------------------------
# scalars


def test_scalar_round_trip_and_format():
    z = parse_scalar("3/4-1/2*i")
    assert format_scalar(z) == "3/4-1/2*i"
    assert parse_scalar(format_scalar(z)) == z
    assert format_scalar(parse_scalar("6/8")) == "3/4"
    assert parse_scalar("i") * parse_scalar("i") == parse_scalar(-1)


@given(small, small, small, small)
def test_scalar_division_is_exact(a, b, c, d):
    x = GaussianRational(a, b)
    y = GaussianRational(c, d)
    if y:
        assert (x / y) * y == x


# ---------------------------------------------------------------------------
# kernels


def test_kernel_of_identity_is_empty():
    k = kernel_basis(Matrix.identity(2))
    assert k.shape == (2, 0)


def test_kernel_of_row_of_ones():
    k = kernel_basis(mat([[1, 1]]))
    assert k.shape == (2, 1)
    # hand solution of x + y = 0: proportional to (1, -1)
    assert k[0, 0] == -k[1, 0] and k[0, 0] != 0


def test_kernel_of_zero_map_is_everything():
    k = kernel_basis(Matrix.zeros(2, 2))
    assert k.shape == (2, 2) and k.rank() == 2


def test_kernel_refuses_float_mode():
    with pytest.raises(ModeError):
        kernel_basis(Matrix(np.eye(2), FLOAT))


@given(exact_matrices())
def test_rank_nullity_and_exact_annihilation(m):
    k = kernel_basis(m)
    assert k.cols + rank(m) == m.cols
    assert (m @ k).is_zero()


@given(exact_matrices())
def test_rank_matches_sympy(m):
    expected = to_sympy(m).rank() if m.rows and m.cols else 0
    assert rank(m) == expected


def test_empty_shapes_are_legal():
    z = Matrix.zeros(0, 3)
    assert kernel_basis(z).shape == (3, 3)
    assert (Matrix.zeros(2, 0) @ Matrix.zeros(0, 4)).shape == (2, 4)


def test_intersect_and_preimage():
    u = mat([[1, 0], [0, 1], [0, 0]])
    w = mat([[1], [1], [1]])
    assert intersect(u, w).cols == 0
    w2 = mat([[1], [1], [0]])
    assert intersect(u, w2).cols == 1
    p = preimage(mat([[1, 0], [0, 0]]), mat([[0], [1]]))
    assert p.cols == 1 and p[0, 0] == 0


def test_solve_reports_inconsistency():
    assert solve(mat([[1], [1]]), mat([[1], [2]])) is None
    x = solve(mat([[2, 0], [0, 4]]), mat([[1], [1]]))
    assert x == mat([["1/2"], ["1/4"]])


def test_det_and_inverse_against_sympy():
    m = mat([[2, "1/3", 0], [1, 1, "-1"], ["1/2", 0, 3]])
    assert str(m.det()) == str(to_sympy(m).det())
    assert m @ m.inverse() == Matrix.identity(3)


# ---------------------------------------------------------------------------
# numeric rank


def test_rank_numeric_examples():
    assert rank_numeric(Matrix(np.eye(3), FLOAT), 1e-9) == 3
    assert rank_numeric(Matrix(np.diag([1.0, 1e-14]), FLOAT), 1e-9) == 1
    assert rank_numeric(Matrix(np.zeros((2, 3)), FLOAT), 1e-9) == 0
    assert rank_numeric(Matrix.zeros(0, 0, FLOAT), 1e-9) == 0


def test_rank_numeric_product_of_generic_factors():
    rng = np.random.default_rng(11)
    m = rng.standard_normal((5, 3)) @ rng.standard_normal((3, 7))
    assert rank_numeric(Matrix(m, FLOAT), 1e-9) == 3


# ---------------------------------------------------------------------------
# intertwiners


def _intertwiner_equations(x_maps, y_maps, arrows, dims):
    eqs = []
    for h, (o, t) in arrows.items():
        eqs.append(([(t, Matrix.identity(dims[t]), x_maps[h]), (o, -y_maps[h], Matrix.identity(dims[o]))], None))
    return eqs


def test_intertwiner_identity_for_identical_inputs():
    arrows = {"h": ("1", "2")}
    dims = {"1": 2, "2": 1}
    xm = {"h": mat([[1, 2]])}
    g = solve_sylvester_intertwiner({"1": (2, 2), "2": (1, 1)}, _intertwiner_equations(xm, xm, arrows, dims), invertible=True)
    assert g is not None
    for h, (o, t) in arrows.items():
        assert g[t] @ xm[h] == xm[h] @ g[o]


def test_intertwiner_recovers_a_conjugation():
    rng = np.random.default_rng(3)
    arrows = {"a": ("1", "2"), "b": ("2", "1")}
    dims = {"1": 2, "2": 2}
    xm = {"a": mat([[1, 2], [0, 1]]), "b": mat([[0, 1], [1, 1]])}
    g = {"1": mat([[1, 1], [0, 1]]), "2": mat([[2, 0], [1, 1]])}
    ym = {h: g[t] @ xm[h] @ g[o].inverse() for h, (o, t) in arrows.items()}
    found = solve_sylvester_intertwiner({"1": (2, 2), "2": (2, 2)}, _intertwiner_equations(xm, ym, arrows, dims), invertible=True, rng=rng)
    assert found is not None
    for h, (o, t) in arrows.items():
        assert found[t] @ xm[h] == ym[h] @ found[o]
    assert all(found[v].det() for v in found)


def test_intertwiner_rank_obstruction_gives_none():
    # xi: C^1 -> C^2 with xi @ 1 = identity_2 columns is impossible
    eqs = [([("xi", Matrix.identity(2), Matrix.identity(1))], mat([[1, 0], [0, 1]]))]
    with pytest.raises(ContractViolation):
        solve_sylvester_intertwiner({"xi": (2, 1)}, eqs)
    eqs = [([("xi", Matrix.identity(2), mat([[1, 1]]))], mat([[1, 0], [0, 1]]))]
    assert solve_sylvester_intertwiner({"xi": (2, 1)}, eqs) is None


def test_intertwiner_shape_mismatch_is_contract_violation():
    with pytest.raises(ContractViolation):
        solve_sylvester_intertwiner({"k": (2, 2)}, [([("k", Matrix.identity(3), Matrix.identity(2))], None)])


def test_column_basis_spans_the_image():
    m = mat([[1, 2, 3], [2, 4, 6]])
    b = column_basis(m)
    assert b.cols == 1
    assert S(2) * b[0, 0] == b[1, 0]
