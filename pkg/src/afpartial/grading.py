"""The standard circle action and its spectral subspaces.

On each block ``M_p`` the action conjugates by ``diag(1, z, ..., z**(p-1))``,
so the matrix unit ``e_{rs}`` has degree ``r - s``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NotUnitModulus
from .matblock import BlockElement, BlockShape, as_shape, matrix_unit, span_dimension

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class GradedAlgebra:
    shape: BlockShape

    def __init__(self, shape):
        object.__setattr__(self, "shape", as_shape(shape))

    @property
    def weights(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(range(p)) for p in self.shape.sizes)

    @cached_property
    def degree_masks(self) -> tuple[np.ndarray, ...]:
        # r - s for every entry of every block
        return tuple(np.subtract.outer(np.arange(p), np.arange(p)) for p in self.shape.sizes)

    @property
    def max_degree(self) -> int:
        return self.shape.max_size - 1

    def degrees(self) -> range:
        return range(-self.max_degree, self.max_degree + 1)


def as_graded(g) -> GradedAlgebra:
    return g if isinstance(g, GradedAlgebra) else GradedAlgebra(g)


def act(g: GradedAlgebra, z: complex, a: BlockElement) -> BlockElement:
    """``alpha_z(a)``: entry (r, s) of every block is multiplied by ``z**(r-s)``."""
    if abs(abs(z) - 1.0) > UNIT_TOL:
        raise NotUnitModulus(f"|z| = {abs(z)!r} is not 1")
    z = complex(z)
    out = []
    for b in a.blocks:
        p = b.shape[0]
        u = z ** np.arange(p)
        # u a u^{-1} with u unitary diagonal
        out.append(u[:, None] * b * u.conj()[None, :])
    return BlockElement(a.shape, out)


def spectral_project(g: GradedAlgebra, a: BlockElement, n: int) -> BlockElement:
    """Keep only the degree-``n`` entries (r - s == n)."""
    g = as_graded(g)
    return BlockElement(
        a.shape, [np.where(mask == n, b, 0) for mask, b in zip(g.degree_masks, a.blocks)]
    )


def fourier_project(g: GradedAlgebra, a: BlockElement, n: int, nodes: int) -> BlockElement:
    """Discrete average ``(1/M) sum_m w**(-n m) act(w**m, a)`` with ``w = exp(2 pi i / M)``.

    Exact for ``nodes > 2 * (max block size - 1)``; for fewer nodes degrees
    alias modulo ``nodes``.
    """
    if nodes < 1:
        raise ValueError("need at least one quadrature node")
    m = np.arange(nodes)
    w = np.exp(2j * np.pi * m / nodes)
    coeff = np.exp(-2j * np.pi * n * m / nodes)
    out = []
    for b in a.blocks:
        p = b.shape[0]
        u = w[:, None] ** np.arange(p)  # row m is the diagonal unitary at node m
        # sum_m coeff_m * u_m b u_m^*, evaluated for all nodes at once
        kernel = np.einsum("m,mr,ms->rs", coeff, u, u.conj())
        out.append(kernel * b / nodes)
    return BlockElement(a.shape, out)


def homogeneous_units(g: GradedAlgebra, n: int) -> list[BlockElement]:
    """All matrix units of degree ``n``."""
    g = as_graded(g)
    units = []
    for i, p in enumerate(g.shape.sizes):
        for s in range(p):
            r = s + n
            if 0 <= r < p:
                units.append(matrix_unit(g.shape, i, r, s))
    return units


def _unit_position(m: np.ndarray) -> tuple[int, int] | None:
    nz = np.argwhere(m != 0)
    if len(nz) == 0:
        return None
    if len(nz) > 1 or m[tuple(nz[0])] != 1:
        raise ValueError("closure expects matrix-unit generators")
    return int(nz[0][0]), int(nz[0][1])


def _block_words(gens: list[np.ndarray], p: int, max_depth: int) -> list[np.ndarray]:
    """Distinct nonzero words of length <= max_depth in matrix-unit generators.

    Products of matrix units are matrix units or zero, so words are
    deduplicated by the position of their single nonzero entry. Each round
    multiplies only the words first reached in the previous round.
    """
    if not gens:
        return []
    G = np.stack([g.real for g in gens])
    seen: dict[tuple[int, int], np.ndarray] = {}
    frontier = []
    for g in G:
        pos = _unit_position(g)
        if pos is not None and pos not in seen:
            seen[pos] = g
            frontier.append(g)
    depth = 1
    chunk = max(1, 2_000_000 // max(1, len(G) * p * p))
    while frontier and depth < max_depth and len(seen) < p * p:
        F = np.stack(frontier)
        frontier = []
        for start in range(0, len(F), chunk):
            prods = np.matmul(F[start : start + chunk, None], G[None]).reshape(-1, p, p)
            for m in prods[np.any(prods != 0, axis=(1, 2))]:
                pos = _unit_position(m)
                if pos not in seen:
                    seen[pos] = m
                    frontier.append(m)
        depth += 1
    return list(seen.values())


def generated_dimension(g: GradedAlgebra, max_depth: int | None = None) -> int:
    """Dimension of the algebra generated by matrix units of degree 0 and +-1.

    Words up to length ``max_depth`` (default twice the largest block) are
    collected and the dimension of their span is certified by rank.
    """
    g = as_graded(g)
    if max_depth is None:
        max_depth = 2 * g.shape.max_size
    gens = homogeneous_units(g, 0) + homogeneous_units(g, 1) + homogeneous_units(g, -1)
    elements = []
    for i, p in enumerate(g.shape.sizes):
        block_gens = [e.blocks[i] for e in gens if np.any(e.blocks[i])]
        for w in _block_words(block_gens, p, max_depth):
            blocks = [np.zeros((q, q)) for q in g.shape.sizes]
            blocks[i] = w
            elements.append(BlockElement(g.shape, blocks))
    return span_dimension(elements)


def semi_saturated_check(g: GradedAlgebra) -> bool:
    """True iff A_0 and A_1 (with adjoints) generate the whole algebra."""
    g = as_graded(g)
    return generated_dimension(g) == g.shape.dimension
