"""Standard homomorphisms and finite towers of direct sums of matrix algebras.

A standard homomorphism places copies of source blocks along the diagonal
of each target block, padding the remainder with zeros. Placement indices
are 0-based here; spec files use 1-based indices (see ``from_one_based``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BadLevels,
    CapExceeded,
    CovarianceViolation,
    PlacementError,
    RegularityViolation,
    ShapeMismatch,
)
from .grading import GradedAlgebra, act, spectral_project
from .matblock import BlockElement, BlockShape, as_shape, distance, max_block_size, random_element
from .regular import (
    RegularityData,
    lambda_map,
    random_degree,
    random_domain,
    theta_map,
)
from .report import CheckReport, trial_seeds


@dataclass(frozen=True)
class StandardHomSpec:
    """Placement data of a standard homomorphism.

    ``placement[k]`` lists the source blocks stacked in target block ``k``;
    ``offsets[k]`` gives the diagonal position of each copy. When offsets are
    omitted the copies are packed from the top-left corner, which is the
    usual form. Composites of padded maps may leave gaps between copies and
    carry explicit offsets.
    """

    source: BlockShape
    target: BlockShape
    placement: tuple[tuple[int, ...], ...]
    offsets: tuple[tuple[int, ...], ...]

    def __init__(self, source, target, placement, offsets=None):
        source = as_shape(source)
        target = as_shape(target)
        placement = tuple(tuple(int(i) for i in row) for row in placement)
        if len(placement) != len(target):
            raise PlacementError(
                f"{len(placement)} placement lists for {len(target)} target blocks"
            )
        for k, row in enumerate(placement):
            for i in row:
                if not 0 <= i < len(source):
                    raise PlacementError(
                        f"target block {k + 1}: source index {i + 1} out of range 1..{len(source)}"
                    )
        if offsets is None:
            offsets = []
            for row in placement:
                pos, offs = 0, []
                for i in row:
                    offs.append(pos)
                    pos += source.sizes[i]
                offsets.append(tuple(offs))
        offsets = tuple(tuple(int(o) for o in row) for row in offsets)
        if [len(r) for r in offsets] != [len(r) for r in placement]:
            raise PlacementError("offsets do not match placement lists")
        for k, (row, offs, q) in enumerate(zip(placement, offsets, target.sizes)):
            spans = sorted((o, o + source.sizes[i]) for i, o in zip(row, offs))
            end = 0
            for lo, hi in spans:
                if lo < end:
                    raise PlacementError(f"target block {k + 1}: overlapping copies")
                end = hi
            if end > q:
                raise PlacementError(
                    f"target block {k + 1}: placed blocks need size {end} but the block has size {q}"
                )
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "placement", placement)
        object.__setattr__(self, "offsets", offsets)

    @classmethod
    def from_one_based(cls, source, target, placement) -> "StandardHomSpec":
        return cls(source, target, [[i - 1 for i in row] for row in placement])

    def used(self, k: int) -> int:
        """Number of diagonal positions of target block ``k`` covered by copies."""
        return sum(self.source.sizes[i] for i in self.placement[k])

    def padding(self, k: int) -> int:
        return self.target.sizes[k] - self.used(k)

    @property
    def is_unital(self) -> bool:
        return all(self.padding(k) == 0 for k in range(len(self.target)))

    @property
    def is_packed(self) -> bool:
        """True when every target block is ``diag(a_i1, ..., a_ir, 0, ..., 0)``."""
        return self == StandardHomSpec(self.source, self.target, self.placement)

    @property
    def multiplicities(self) -> np.ndarray:
        """Bratteli multiplicity matrix, target blocks by source blocks."""
        m = np.zeros((len(self.target), len(self.source)), dtype=int)
        for k, row in enumerate(self.placement):
            for i in row:
                m[k, i] += 1
        return m


def identity_hom(shape) -> StandardHomSpec:
    shape = as_shape(shape)
    return StandardHomSpec(shape, shape, [[i] for i in range(len(shape))])


def apply_hom(h: StandardHomSpec, a: BlockElement) -> BlockElement:
    if a.shape != h.source:
        raise ShapeMismatch(f"element of shape {a.shape} given to a map from {h.source}")
    out = []
    for q, row, offs in zip(h.target.sizes, h.placement, h.offsets):
        block = np.zeros((q, q), dtype=np.complex128)
        for i, o in zip(row, offs):
            p = h.source.sizes[i]
            block[o : o + p, o : o + p] = a.blocks[i]
        out.append(block)
    return BlockElement(h.target, out)


def compose(first: StandardHomSpec, second: StandardHomSpec) -> StandardHomSpec:
    """The standard hom ``second o first``, obtained by flattening placements."""
    if first.target != second.source:
        raise ShapeMismatch(f"cannot compose: {first.target} vs {second.source}")
    placement, offsets = [], []
    for row2, offs2 in zip(second.placement, second.offsets):
        row, offs = [], []
        for j, o2 in zip(row2, offs2):
            for i, o1 in zip(first.placement[j], first.offsets[j]):
                row.append(i)
                offs.append(o2 + o1)
        placement.append(row)
        offsets.append(offs)
    return StandardHomSpec(first.source, second.target, placement, offsets)


def check_injective(h: StandardHomSpec) -> bool:
    seen = {i for row in h.placement for i in row}
    return seen == set(range(len(h.source)))


def _random_phases(seed: int, count: int) -> list[complex]:
    rng = np.random.default_rng(seed)
    return [complex(np.exp(2j * np.pi * t)) for t in rng.uniform(0.0, 1.0, size=count)]


def check_covariant(
    h: StandardHomSpec, trials: int = 100, tol: float = 1e-10, seed: int = 0, phases: int = 16
) -> CheckReport:
    """phi(alpha_z(a)) = beta_z(phi(a)) for random a and z, and phi(P_n a) = P_n phi(a)."""
    ga, gb = GradedAlgebra(h.source), GradedAlgebra(h.target)
    report = CheckReport("covariant", trials, {"action": 0.0, "degree": 0.0})
    top = max(ga.max_degree, gb.max_degree)
    for t, ts in enumerate(trial_seeds(seed, trials)):
        sa, sz = trial_seeds(ts, 2)
        a = random_element(h.source, sa)
        image = apply_hom(h, a)
        for z in _random_phases(sz, phases):
            r = distance(apply_hom(h, act(ga, z, a)), act(gb, z, image))
            report.bump("action", r)
            if r > tol:
                report.passed = False
                report.witness = {"seed": seed, "trial": t, "trial_seed": ts, "z": repr(z)}
                raise CovarianceViolation("covariant:action", r, report.witness)
        for n in range(-top, top + 1):
            r = distance(apply_hom(h, spectral_project(ga, a, n)), spectral_project(gb, image, n))
            report.bump("degree", r)
            if r > tol:
                report.passed = False
                report.witness = {"seed": seed, "trial": t, "trial_seed": ts, "degree": n}
                raise CovarianceViolation("covariant:degree", r, report.witness)
    return report


def check_regular_hom(
    h: StandardHomSpec, trials: int = 100, tol: float = 1e-10, seed: int = 0
) -> CheckReport:
    """phi(lambda_A(x*)) = lambda_B(phi(x*)) and phi(theta_A(a)) = theta_B(phi(a))."""
    da, db = RegularityData(h.source), RegularityData(h.target)
    gb = db.graded
    report = CheckReport("regular_hom", trials, {"lambda": 0.0, "theta": 0.0})
    for t, ts in enumerate(trial_seeds(seed, trials)):
        sx, sa = trial_seeds(ts, 2)
        x_star = random_degree(da, -1, sx)
        a = random_domain(da, sa)
        fx, fa = apply_hom(h, x_star), apply_hom(h, a)
        # the images must stay inside the target's domains before lambda_B, theta_B apply
        leak = max(
            distance(fx, spectral_project(gb, fx, -1)),
            distance(fa, spectral_project(gb, fa, 0) @ db.domain_unit),
        )
        if leak > tol:
            report.passed = False
            report.witness = {"identity": "domain", "seed": seed, "trial": t, "trial_seed": ts}
            raise RegularityViolation("regular_hom:domain", leak, report.witness)
        residuals = {
            "lambda": distance(apply_hom(h, lambda_map(da, x_star)), lambda_map(db, fx)),
            "theta": distance(apply_hom(h, theta_map(da, a)), theta_map(db, fa)),
        }
        for key, r in residuals.items():
            report.bump(key, r)
            if r > tol:
                report.passed = False
                report.witness = {"identity": key, "seed": seed, "trial": t, "trial_seed": ts}
                raise RegularityViolation(f"regular_hom:{key}", r, report.witness)
    return report


def check_shift_restriction(h: StandardHomSpec) -> bool:
    """Exact test of ``s_B phi(s_A)* phi(s_A) = phi(s_A)``."""
    sa = RegularityData(h.source).s
    sb = RegularityData(h.target).s
    image = apply_hom(h, sa)
    return (sb @ image.H @ image).equals(image)


# towers


@dataclass(frozen=True)
class TowerSpec:
    levels: tuple[BlockShape, ...]
    homs: tuple[StandardHomSpec, ...]

    def __init__(self, levels: Sequence, homs: Sequence[StandardHomSpec]):
        levels = tuple(as_shape(s) for s in levels)
        homs = tuple(homs)
        if not levels:
            raise BadLevels("a tower needs at least one level")
        if len(homs) != len(levels) - 1:
            raise BadLevels(f"{len(levels)} levels need {len(levels) - 1} maps, got {len(homs)}")
        for k, h in enumerate(homs):
            if h.source != levels[k] or h.target != levels[k + 1]:
                raise BadLevels(
                    f"map {k} goes {h.source} -> {h.target}, expected {levels[k]} -> {levels[k + 1]}"
                )
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "homs", homs)

    @property
    def depth(self) -> int:
        """Index of the top level."""
        return len(self.levels) - 1


def _check_levels(t: TowerSpec, frm: int, to: int) -> None:
    if not (0 <= frm <= to <= t.depth):
        raise BadLevels(f"need 0 <= from <= to <= {t.depth}, got {frm}, {to}")


def composite(t: TowerSpec, frm: int, to: int) -> StandardHomSpec:
    """The connecting map from level ``frm`` to level ``to`` as one standard hom."""
    _check_levels(t, frm, to)
    h = identity_hom(t.levels[frm])
    for k in range(frm, to):
        h = compose(h, t.homs[k])
    return h


def push(t: TowerSpec, a: BlockElement, frm: int, to: int) -> BlockElement:
    """Image of ``a`` under the connecting maps from level ``frm`` up to ``to``."""
    _check_levels(t, frm, to)
    if a.shape != t.levels[frm]:
        raise ShapeMismatch(f"element of shape {a.shape} at level {frm} of shape {t.levels[frm]}")
    for k in range(frm, to):
        a = apply_hom(t.homs[k], a)
    return a


@dataclass(frozen=True)
class UhfSpec:
    """UHF tower data. The factor list repeats periodically when ``levels``
    exceeds its length, so ``(2, 3)`` describes 2, 3, 2, 3, ...
    """

    factors: tuple[int, ...]
    levels: int

    def __init__(self, factors: Sequence[int], levels: int, allow_unit: bool = False):
        factors = tuple(int(n) for n in factors)
        if not factors:
            raise ValueError("need at least one factor")
        low = 1 if allow_unit else 2
        if any(n < low for n in factors):
            raise ValueError(f"factors must be >= {low}, got {factors}")
        if levels < 1:
            raise ValueError("levels must be >= 1")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "levels", int(levels))

    def factor(self, i: int) -> int:
        return self.factors[i % len(self.factors)]

    def size(self, k: int) -> int:
        return math.prod(self.factor(i) for i in range(k))

    def sizes(self) -> list[int]:
        return [self.size(k) for k in range(self.levels + 1)]


def uhf_tower(u: UhfSpec) -> TowerSpec:
    top = u.size(u.levels)
    cap = max_block_size()
    if top > cap:
        raise CapExceeded(f"top level p_{u.levels} = {top} exceeds the block-size cap {cap}")
    sizes = u.sizes()
    levels = [BlockShape([p]) for p in sizes]
    homs = [
        StandardHomSpec(levels[k], levels[k + 1], [[0] * u.factor(k)]) for k in range(u.levels)
    ]
    return TowerSpec(levels, homs)
