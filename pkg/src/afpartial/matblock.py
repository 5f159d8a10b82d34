"""
matblock
========

Direct sums of complex matrix algebras ``M_{p_1} + ... + M_{p_n}``.

Elements are stored densely, one ``complex128`` array per block. Every
value is immutable once built; arithmetic returns fresh elements.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, ShapeMismatch

DEFAULT_MAX_BLOCK = 4096
CAP_ENV_VAR = "AFPARTIAL_MAX_BLOCK"

# relative singular-value cutoff for rank decisions
RANK_RTOL = 1e-9


def max_block_size() -> int:
    """Current block-size cap, overridable through ``AFPARTIAL_MAX_BLOCK``."""
    raw = os.environ.get(CAP_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_BLOCK
    cap = int(raw)
    if cap < 1:
        raise ValueError(f"{CAP_ENV_VAR} must be a positive integer, got {raw!r}")
    return cap


@dataclass(frozen=True)
class BlockShape:
    sizes: tuple[int, ...]

    def __init__(self, sizes: Iterable[int]):
        sizes = tuple(int(p) for p in sizes)
        if not sizes:
            raise ValueError("a block shape needs at least one block")
        if any(p < 1 for p in sizes):
            raise ValueError(f"block sizes must be positive, got {sizes}")
        cap = max_block_size()
        if max(sizes) > cap:
            raise CapExceeded(f"block size {max(sizes)} exceeds the cap {cap}")
        object.__setattr__(self, "sizes", sizes)

    def __len__(self) -> int:
        return len(self.sizes)

    def __iter__(self):
        return iter(self.sizes)

    def __repr__(self) -> str:
        return f"BlockShape{self.sizes}"

    @property
    def dimension(self) -> int:
        """Complex dimension of the algebra, sum of p_i**2."""
        return sum(p * p for p in self.sizes)

    @property
    def trace_dimension(self) -> int:
        """Sum of p_i, the dimension of the diagonal subalgebra."""
        return sum(self.sizes)

    @property
    def max_size(self) -> int:
        return max(self.sizes)


def as_shape(shape) -> BlockShape:
    return shape if isinstance(shape, BlockShape) else BlockShape(shape)


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


class BlockElement:
    """An element of a direct sum of matrix algebras.

    Supports ``+``, ``-``, scalar ``*``, ``@`` for the algebra product and
    ``.H`` for the adjoint.
    """

    __slots__ = ("shape", "blocks")

    def __init__(self, shape, blocks: Sequence):
        shape = as_shape(shape)
        if len(blocks) != len(shape):
            raise ShapeMismatch(f"{len(blocks)} blocks given for {shape}")
        frozen = []
        for p, b in zip(shape.sizes, blocks):
            b = _frozen(b)
            if b.shape != (p, p):
                raise ShapeMismatch(f"block of shape {b.shape} where {(p, p)} was expected")
            frozen.append(b)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "blocks", tuple(frozen))

    def __setattr__(self, name, value):
        raise AttributeError("BlockElement is immutable")

    def __repr__(self) -> str:
        return f"BlockElement({self.shape.sizes}, {[b.tolist() for b in self.blocks]})"

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(other, -1))

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, z):
        if isinstance(z, BlockElement):
            return NotImplemented
        return scale(self, z)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return mul(self, other)

    @property
    def H(self) -> "BlockElement":
        return adjoint(self)

    def flat(self) -> np.ndarray:
        """All entries, block after block, as one vector."""
        return np.concatenate([b.ravel() for b in self.blocks])

    def equals(self, other: "BlockElement") -> bool:
        """Exact entrywise equality."""
        _same_shape(self, other)
        return all(np.array_equal(x, y) for x, y in zip(self.blocks, other.blocks))

    def is_zero(self) -> bool:
        return not any(np.any(b) for b in self.blocks)


def _same_shape(a: BlockElement, b: BlockElement) -> None:
    if a.shape != b.shape:
        raise ShapeMismatch(f"{a.shape} vs {b.shape}")


# constructors


def zeros(shape) -> BlockElement:
    shape = as_shape(shape)
    return BlockElement(shape, [np.zeros((p, p)) for p in shape.sizes])


def identity(shape) -> BlockElement:
    shape = as_shape(shape)
    return BlockElement(shape, [np.eye(p) for p in shape.sizes])


def matrix_unit(shape, block: int, row: int, col: int) -> BlockElement:
    """The matrix unit e_{row,col} sitting in block ``block`` (0-based)."""
    shape = as_shape(shape)
    p = shape.sizes[block]
    if not (0 <= row < p and 0 <= col < p):
        raise IndexError(f"({row}, {col}) outside a {p}x{p} block")
    blocks = [np.zeros((q, q)) for q in shape.sizes]
    blocks[block][row, col] = 1.0
    return BlockElement(shape, blocks)


def matrix_units(shape) -> list[BlockElement]:
    shape = as_shape(shape)
    return [
        matrix_unit(shape, i, r, s)
        for i, p in enumerate(shape.sizes)
        for r in range(p)
        for s in range(p)
    ]


def diagonal_units(shape) -> list[BlockElement]:
    shape = as_shape(shape)
    return [matrix_unit(shape, i, r, r) for i, p in enumerate(shape.sizes) for r in range(p)]


def from_diagonals(shape, diagonals: Sequence[Sequence[complex]]) -> BlockElement:
    shape = as_shape(shape)
    return BlockElement(shape, [np.diag(np.asarray(d, dtype=np.complex128)) for d in diagonals])


def random_element(shape, seed: int) -> BlockElement:
    """Deterministic random element, real and imaginary parts uniform in [-1, 1]."""
    shape = as_shape(shape)
    rng = np.random.default_rng(seed)
    blocks = []
    for p in shape.sizes:
        re = rng.uniform(-1.0, 1.0, size=(p, p))
        im = rng.uniform(-1.0, 1.0, size=(p, p))
        blocks.append(re + 1j * im)
    return BlockElement(shape, blocks)


# arithmetic


def add(a: BlockElement, b: BlockElement) -> BlockElement:
    _same_shape(a, b)
    return BlockElement(a.shape, [x + y for x, y in zip(a.blocks, b.blocks)])


def scale(a: BlockElement, z: complex) -> BlockElement:
    return BlockElement(a.shape, [z * x for x in a.blocks])


def mul(a: BlockElement, b: BlockElement) -> BlockElement:
    _same_shape(a, b)
    return BlockElement(a.shape, [x @ y for x, y in zip(a.blocks, b.blocks)])


def adjoint(a: BlockElement) -> BlockElement:
    return BlockElement(a.shape, [x.conj().T for x in a.blocks])


def _block_norm(b: np.ndarray) -> float:
    nz = b != 0
    if not nz.any():
        return 0.0
    if nz.sum(axis=0).max() <= 1 and nz.sum(axis=1).max() <= 1:
        # a scaled partial permutation: singular values are the entry moduli
        return float(np.abs(b).max())
    return float(np.linalg.norm(b, 2))


def op_norm(a: BlockElement) -> float:
    """C*-norm: largest singular value over all blocks."""
    return max((_block_norm(b) for b in a.blocks), default=0.0)


def distance(a: BlockElement, b: BlockElement) -> float:
    """``op_norm(a - b)``."""
    _same_shape(a, b)
    return max((_block_norm(x - y) for x, y in zip(a.blocks, b.blocks)), default=0.0)


def _rank(rows: np.ndarray) -> int:
    if rows.size == 0:
        return 0
    sv = np.linalg.svd(rows, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > RANK_RTOL * sv[0]))


def span_dimension(elements: Sequence[BlockElement]) -> int:
    """Dimension of the complex linear span of ``elements``."""
    if not elements:
        return 0
    first = elements[0]
    for e in elements[1:]:
        _same_shape(first, e)
    return _rank(np.stack([e.flat() for e in elements]))
