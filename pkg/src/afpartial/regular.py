"""Shift partial isometry, the maps lambda/theta, and regularity certificates.

``s`` has ones on the first subdiagonal of every block. With it

    lambda(x*) = s x*          on A_1*
    theta(a)   = s a s*        on A_1* A_1

and the four regular-action identities are checked numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import AxiomViolation, DomainViolation, ShapeMismatch
from .grading import GradedAlgebra, spectral_project
from .matblock import (
    RANK_RTOL,
    BlockElement,
    BlockShape,
    as_shape,
    diagonal_units,
    distance,
    from_diagonals,
    op_norm,
    random_element,
)
from .report import CheckReport, trial_seeds

DOMAIN_TOL = 1e-12


def shift_block(p: int) -> np.ndarray:
    return np.eye(p, k=-1)


@dataclass(frozen=True)
class RegularityData:
    shape: BlockShape

    def __init__(self, shape):
        object.__setattr__(self, "shape", as_shape(shape))

    @cached_property
    def s(self) -> BlockElement:
        return BlockElement(self.shape, [shift_block(p) for p in self.shape.sizes])

    @cached_property
    def graded(self) -> GradedAlgebra:
        return GradedAlgebra(self.shape)

    @cached_property
    def domain_unit(self) -> BlockElement:
        """``s* s``: unit of A_1* A_1 (all diagonal units but the last per block)."""
        return self.s.H @ self.s

    @cached_property
    def range_unit(self) -> BlockElement:
        """``s s*``: unit of A_1 A_1* (all diagonal units but the first per block)."""
        return self.s @ self.s.H


def as_regular(d) -> RegularityData:
    return d if isinstance(d, RegularityData) else RegularityData(d)


def _residual_off(a: BlockElement, kept: BlockElement) -> float:
    off = distance(a, kept)
    return off / max(1.0, op_norm(a)) if off else 0.0


# Products with s and s*s move rows or columns by one position, so they are
# evaluated by slicing instead of dense matrix products.


def _shift_rows(a: BlockElement) -> BlockElement:
    """``s a``: row r of every block moves to row r + 1."""
    out = []
    for b in a.blocks:
        c = np.zeros_like(b)
        c[1:] = b[:-1]
        out.append(c)
    return BlockElement(a.shape, out)


def _shift_cols(a: BlockElement) -> BlockElement:
    """``a s*``: column c of every block moves to column c + 1."""
    out = []
    for b in a.blocks:
        c = np.zeros_like(b)
        c[:, 1:] = b[:, :-1]
        out.append(c)
    return BlockElement(a.shape, out)


def _cut_last_col(a: BlockElement) -> BlockElement:
    """``a s*s``: the last column of every block is cleared."""
    out = []
    for b in a.blocks:
        c = b.copy()
        c[:, -1:] = 0
        out.append(c)
    return BlockElement(a.shape, out)


def _check_degree(d: RegularityData, a: BlockElement, n: int, what: str) -> None:
    if a.shape != d.shape:
        raise ShapeMismatch(f"{a.shape} vs {d.shape}")
    res = _residual_off(a, spectral_project(d.graded, a, n))
    if res > DOMAIN_TOL:
        raise DomainViolation(f"{what}: element has components outside degree {n} ({res:.2e})")


def lambda_map(d: RegularityData, x_star: BlockElement) -> BlockElement:
    """``x* -> s x*`` on the degree -1 subspace."""
    d = as_regular(d)
    _check_degree(d, x_star, -1, "lambda")
    return _shift_rows(x_star)


def theta_map(d: RegularityData, a: BlockElement) -> BlockElement:
    """``a -> s a s*`` on the corner A_1* A_1."""
    d = as_regular(d)
    _check_degree(d, a, 0, "theta")
    res = _residual_off(a, _cut_last_col(a))
    if res > DOMAIN_TOL:
        raise DomainViolation(f"theta: element is not supported on s*s ({res:.2e})")
    return _shift_cols(_shift_rows(a))


# random inputs living in the required subspaces


def random_degree(d: RegularityData, n: int, seed: int) -> BlockElement:
    d = as_regular(d)
    return spectral_project(d.graded, random_element(d.shape, seed), n)


def random_domain(d: RegularityData, seed: int) -> BlockElement:
    """Random element of A_1* A_1."""
    d = as_regular(d)
    return random_degree(d, 0, seed) @ d.domain_unit


def random_range(d: RegularityData, seed: int) -> BlockElement:
    """Random element of A_1 A_1*."""
    d = as_regular(d)
    return random_degree(d, 0, seed) @ d.range_unit


def _fail(report: CheckReport, exc_type, key: str, residual: float, witness: dict):
    report.passed = False
    report.witness = {"identity": key, **witness}
    raise exc_type(f"{report.check}:{key}", residual, report.witness)


def verify_regular_axioms(
    d: RegularityData, trials: int = 100, tol: float = 1e-10, seed: int = 0
) -> CheckReport:
    """Check (i) lambda(x*b) = lambda(x*)b, (ii) lambda(ax*) = theta(a)lambda(x*),
    (iii) lambda(x*)* lambda(y*) = x y*, (iv) lambda(x*) lambda(y*)* = theta(x*y).

    Raises AxiomViolation on the first trial exceeding ``tol``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    d = as_regular(d)
    report = CheckReport("regular_axioms", trials, {k: 0.0 for k in ("i", "ii", "iii", "iv")})
    for t, ts in enumerate(trial_seeds(seed, trials)):
        sub = trial_seeds(ts, 4)
        x = random_degree(d, 1, sub[0])
        y = random_degree(d, 1, sub[1])
        a = random_domain(d, sub[2])
        b = random_range(d, sub[3])
        lx = lambda_map(d, x.H)
        ly = lambda_map(d, y.H)
        residuals = {
            "i": distance(lambda_map(d, x.H @ b), lx @ b),
            "ii": distance(lambda_map(d, a @ x.H), theta_map(d, a) @ lx),
            "iii": distance(lx.H @ ly, x @ y.H),
            "iv": distance(lx @ ly.H, theta_map(d, x.H @ y)),
        }
        for key, r in residuals.items():
            report.bump(key, r)
            if r > tol:
                _fail(report, AxiomViolation, key, r, {"seed": seed, "trial": t, "trial_seed": ts})
    return report


def verify_theta_lemma(
    d: RegularityData, trials: int = 100, tol: float = 1e-10, seed: int = 0
) -> CheckReport:
    """Check theta(x* y) = y x* for random x, y of degree 1."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    d = as_regular(d)
    report = CheckReport("lemma_theta_yx", trials, {"theta(x*y)=yx*": 0.0})
    for t, ts in enumerate(trial_seeds(seed, trials)):
        sx, sy = trial_seeds(ts, 2)
        x = random_degree(d, 1, sx)
        y = random_degree(d, 1, sy)
        r = distance(theta_map(d, x.H @ y), y @ x.H)
        report.bump("theta(x*y)=yx*", r)
        if r > tol:
            _fail(report, AxiomViolation, "theta(x*y)=yx*", r, {"seed": seed, "trial": t, "trial_seed": ts})
    return report


def _commutator_rows(b: np.ndarray) -> np.ndarray:
    # row-major vec: vec(x b) = (I kron b^T) vec(x), vec(b x) = (b kron I) vec(x)
    eye = np.eye(b.shape[0])
    return np.kron(eye, b.T) - np.kron(b, eye)


def commutant_dimension(shape, basis: list[BlockElement]) -> int:
    """Dimension of ``{x in A : x b = b x for every b in basis}``.

    The commutator equations decouple by block. Per block the stacked
    commutator operator is folded into a square triangular factor with
    successive QR steps, which keeps its singular values.
    """
    shape = as_shape(shape)
    for b in basis:
        if b.shape != shape:
            raise ShapeMismatch(f"{b.shape} vs {shape}")
    total = 0
    for i, p in enumerate(shape.sizes):
        blocks = [b.blocks[i] for b in basis if np.any(b.blocks[i])]
        if all(not np.any(b.imag) for b in blocks):
            # real equations have the same complex null space dimension
            blocks = [b.real for b in blocks]
        r = np.zeros((0, p * p), dtype=blocks[0].dtype if blocks else float)
        for b in blocks:
            stacked = np.vstack([r, _commutator_rows(b)])
            r = np.linalg.qr(stacked, mode="r")
        sv = np.linalg.svd(r, compute_uv=False) if r.size else np.zeros(0)
        top = sv.max() if sv.size else 0.0
        rank = int(np.count_nonzero(sv > RANK_RTOL * top)) if top > 0 else 0
        total += p * p - rank
    return total


def masa_check(shape) -> bool:
    """True iff the diagonal (fixed-point) subalgebra is its own commutant."""
    shape = as_shape(shape)
    return commutant_dimension(shape, diagonal_units(shape)) == shape.trace_dimension


def shift_structure_ok(d: RegularityData) -> bool:
    """Exact checks: s s* s = s, s has degree 1, and the two corner units."""
    d = as_regular(d)
    s = d.s
    expected_dom = from_diagonals(d.shape, [[1.0] * (p - 1) + [0.0] for p in d.shape.sizes])
    expected_rng = from_diagonals(d.shape, [[0.0] + [1.0] * (p - 1) for p in d.shape.sizes])
    return (
        (s @ s.H @ s).equals(s)
        and spectral_project(d.graded, s, 1).equals(s)
        and d.domain_unit.equals(expected_dom)
        and d.range_unit.equals(expected_rng)
    )
