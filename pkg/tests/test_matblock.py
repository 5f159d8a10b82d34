import numpy as np
import pytest

from afpartial.errors import CapExceeded, ShapeMismatch
from afpartial.matblock import (
    BlockElement,
    BlockShape,
    add,
    adjoint,
    diagonal_units,
    identity,
    matrix_unit,
    matrix_units,
    mul,
    op_norm,
    random_element,
    scale,
    span_dimension,
    zeros,
)


def unit(p, r, s):
    return matrix_unit((p,), 0, r, s)


def test_shape_dimension():
    shape = BlockShape([2, 3, 5])
    assert shape.dimension == 4 + 9 + 25
    assert shape.trace_dimension == 10
    assert shape.max_size == 5


@pytest.mark.parametrize("sizes", [[], [0], [2, -1]])
def test_shape_rejects_bad_sizes(sizes):
    with pytest.raises(ValueError):
        BlockShape(sizes)


def test_shape_cap(monkeypatch):
    monkeypatch.setenv("AFPARTIAL_MAX_BLOCK", "8")
    BlockShape([8])
    with pytest.raises(CapExceeded):
        BlockShape([9])


def test_element_is_immutable():
    a = identity((2,))
    with pytest.raises(ValueError):
        a.blocks[0][0, 0] = 5
    with pytest.raises(AttributeError):
        a.shape = BlockShape([3])


def test_element_dimension_checks():
    with pytest.raises(ShapeMismatch):
        BlockElement((2, 3), [np.eye(2)])
    with pytest.raises(ShapeMismatch):
        BlockElement((2,), [np.eye(3)])


def test_add_identity_and_inverse(shape):
    a = random_element(shape, 3)
    assert add(a, zeros(shape)).equals(a)
    assert add(a, scale(a, -1)).is_zero()


def test_add_matrix_units():
    got = add(unit(2, 0, 1), unit(2, 1, 0)).blocks[0]
    np.testing.assert_array_equal(got, [[0, 1], [1, 0]])


def test_add_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        add(identity((2,)), identity((3,)))
    with pytest.raises(ShapeMismatch):
        mul(identity((2,)), identity((2, 1)))


def test_mul_matrix_units():
    assert mul(unit(3, 0, 1), unit(3, 1, 2)).equals(unit(3, 0, 2))
    assert mul(unit(3, 0, 1), unit(3, 0, 1)).is_zero()


def test_mul_identity(shape):
    a = random_element(shape, 1)
    assert mul(identity(shape), a).equals(a)
    assert (a @ identity(shape)).equals(a)


def test_adjoint_of_units():
    assert adjoint(unit(3, 0, 2)).equals(unit(3, 2, 0))


def test_adjoint_conjugate_linear(shape):
    a = random_element(shape, 2)
    z = 0.3 - 1.7j
    assert adjoint(scale(a, z)).equals(scale(adjoint(a), np.conj(z)))


def test_adjoint_reverses_products(shape):
    a, b = random_element(shape, 4), random_element(shape, 5)
    lhs, rhs = adjoint(a @ b), adjoint(b) @ adjoint(a)
    for x, y in zip(lhs.blocks, rhs.blocks):
        np.testing.assert_allclose(x, y, atol=1e-12)


def test_adjoint_involution(shape):
    a = random_element(shape, 6)
    assert a.H.H.equals(a)


def test_op_norm_basics():
    assert op_norm(identity((2, 3))) == pytest.approx(1.0)
    assert op_norm(unit(4, 1, 3)) == pytest.approx(1.0)
    assert op_norm(zeros((3,))) == 0.0


def test_op_norm_is_max_over_blocks():
    a = BlockElement((1, 2), [[[3.0]], np.diag([1.0, -5.0])])
    assert op_norm(a) == pytest.approx(5.0)


def test_op_norm_cstar_identity(shape):
    a = random_element(shape, 7)
    # oracle: singular values straight from numpy, per block
    sv = max(np.linalg.svd(b, compute_uv=False).max() for b in a.blocks)
    assert op_norm(a) == pytest.approx(sv, rel=1e-12)
    assert abs(op_norm(a.H @ a) - op_norm(a) ** 2) <= 1e-10 * max(1, op_norm(a) ** 2)


def test_random_element_deterministic(shape):
    a, b = random_element(shape, 11), random_element(shape, 11)
    assert a.equals(b)


def test_random_element_seeds_differ():
    # fixed seed pair recorded for the fixture
    a, b = random_element((3,), 0), random_element((3,), 1)
    assert not a.equals(b)


def test_random_element_range():
    a = random_element((50,), 9)
    x = a.blocks[0]
    assert np.all(np.abs(x.real) <= 1) and np.all(np.abs(x.imag) <= 1)
    assert x.dtype == np.complex128


def test_random_element_scalar_block():
    a = random_element((1,), 0)
    assert a.blocks[0].shape == (1, 1)


def test_span_dimension_examples():
    assert span_dimension([unit(2, 0, 0), unit(2, 0, 0)]) == 1
    for k in (1, 2, 3, 5):
        assert span_dimension(matrix_units((k,))) == k * k
    assert span_dimension([unit(2, 0, 0) + unit(2, 1, 1), unit(2, 0, 0) - unit(2, 1, 1)]) == 2


def test_span_dimension_mixed_shapes():
    with pytest.raises(ShapeMismatch):
        span_dimension([identity((2,)), identity((3,))])


def test_span_dimension_empty_and_zero():
    assert span_dimension([]) == 0
    assert span_dimension([zeros((3,))]) == 0


def test_diagonal_units_count():
    assert len(diagonal_units((2, 3))) == 5
    assert len(matrix_units((2, 3))) == 13
