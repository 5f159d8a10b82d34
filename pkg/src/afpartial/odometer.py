"""Digit words, the mixed-radix index, and the odometer partial map.

Words are little-endian: digit 0 is the least significant and carries move
towards higher positions. At level ``k`` a word has ``k`` digits with
``0 <= beta_i < n_i`` and indexes the diagonal matrix unit ``e_beta`` of
``M_{p_k}`` at position ``j(beta) = sum beta_i p_i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    AxiomViolation,
    CapExceeded,
    DomainViolation,
    InvalidDigit,
    OutOfDomain,
    OutOfRange,
)
from .matblock import BlockElement, BlockShape, distance, max_block_size
from .regular import RegularityData, theta_map
from .report import CheckReport
from .tower import StandardHomSpec, apply_hom


@dataclass(frozen=True)
class FactorSeq:
    """Factor sequence n_0, n_1, ..., repeated periodically past its end."""

    factors: tuple[int, ...]

    def __init__(self, factors: Sequence[int], allow_unit: bool = False):
        factors = tuple(int(n) for n in factors)
        if not factors:
            raise ValueError("need at least one factor")
        low = 1 if allow_unit else 2
        if any(n < low for n in factors):
            raise ValueError(f"factors must be >= {low}, got {factors}")
        object.__setattr__(self, "factors", factors)

    def n(self, i: int) -> int:
        return self.factors[i % len(self.factors)]

    def p(self, k: int) -> int:
        """p_k = n_0 n_1 ... n_{k-1}, with p_0 = 1."""
        if k < 0:
            raise OutOfRange(f"negative level {k}")
        return math.prod(self.n(i) for i in range(k))

    def checked_p(self, k: int) -> int:
        pk = self.p(k)
        cap = max_block_size()
        if pk > cap:
            raise CapExceeded(f"p_{k} = {pk} exceeds the block-size cap {cap}")
        return pk


@dataclass(frozen=True)
class Word:
    digits: tuple[int, ...]

    def __init__(self, digits: Sequence[int]):
        object.__setattr__(self, "digits", tuple(int(b) for b in digits))

    @property
    def level(self) -> int:
        return len(self.digits)

    def __len__(self) -> int:
        return len(self.digits)

    def __str__(self) -> str:
        return ".".join(map(str, self.digits))

    def append(self, digit: int) -> "Word":
        return Word(self.digits + (digit,))


def validate(f: FactorSeq, w: Word) -> None:
    for i, b in enumerate(w.digits):
        if not 0 <= b < f.n(i):
            raise InvalidDigit(f"digit {i} of {w.digits} is {b}, must lie in [0, {f.n(i)})")


def index_j(f: FactorSeq, w: Word) -> int:
    validate(f, w)
    return sum(b * f.p(i) for i, b in enumerate(w.digits))


def word_of_index(f: FactorSeq, j: int, k: int) -> Word:
    if not 0 <= j < f.p(k):
        raise OutOfRange(f"index {j} outside [0, {f.p(k)}) at level {k}")
    digits = []
    for i in range(k):
        j, b = divmod(j, f.n(i))
        digits.append(b)
    return Word(digits)


def beta_max(f: FactorSeq, k: int) -> Word:
    return Word([f.n(i) - 1 for i in range(k)])


def zero_word(k: int) -> Word:
    return Word([0] * k)


def is_beta_max(f: FactorSeq, w: Word) -> bool:
    validate(f, w)
    return all(b == f.n(i) - 1 for i, b in enumerate(w.digits))


def is_zero(w: Word) -> bool:
    return all(b == 0 for b in w.digits)


def words(f: FactorSeq, k: int) -> Iterator[Word]:
    """All words of level ``k`` in index order."""
    ranges = [range(f.n(i)) for i in range(k)]
    # itertools.product varies the last factor fastest; reverse for little-endian order
    for digits in itertools.product(*reversed(ranges)):
        yield Word(digits[::-1])


def e_of_word(f: FactorSeq, w: Word) -> BlockElement:
    """The diagonal matrix unit e_{j, j} of M_{p_k} with j = j(w)."""
    j = index_j(f, w)
    pk = f.checked_p(w.level)
    block = np.zeros((pk, pk))
    block[j, j] = 1.0
    return BlockElement(BlockShape([pk]), [block])


def carry_length(f: FactorSeq, w: Word) -> int:
    """Number of leading digits sitting at their maximum."""
    validate(f, w)
    count = 0
    for i, b in enumerate(w.digits):
        if b != f.n(i) - 1:
            break
        count += 1
    return count


def odometer_step(f: FactorSeq, w: Word) -> Word:
    """Add one to the least significant digit and carry to the right."""
    validate(f, w)
    digits = list(w.digits)
    for i in range(len(digits)):
        if digits[i] + 1 < f.n(i):
            digits[i] += 1
            return Word(digits)
        digits[i] = 0
    raise OutOfDomain(f"{w.digits} is the maximal word; the odometer is undefined there")


def odometer_inverse_step(f: FactorSeq, w: Word) -> Word:
    """Subtract one with borrow; undefined at the zero word."""
    validate(f, w)
    digits = list(w.digits)
    for i in range(len(digits)):
        if digits[i] > 0:
            digits[i] -= 1
            return Word(digits)
        digits[i] = f.n(i) - 1
    raise OutOfDomain(f"{w.digits} is the zero word; the inverse odometer is undefined there")


def orbit(f: FactorSeq, start: Word, steps: int) -> list[Word]:
    """``start`` followed by up to ``steps`` odometer iterates.

    Stops early at the maximal word; a result shorter than ``steps + 1``
    signals that truncation.
    """
    validate(f, start)
    out = [start]
    w = start
    for _ in range(steps):
        try:
            w = odometer_step(f, w)
        except OutOfDomain:
            break
        out.append(w)
    return out


# exhaustive certificates


def verify_theta_odometer(f: FactorSeq, k: int, tol: float = 1e-10) -> CheckReport:
    """theta(e_beta) = e_{step(beta)} for every non-maximal word at level ``k``,
    and theta refuses e_{beta_max}."""
    pk = f.checked_p(k)
    d = RegularityData(BlockShape([pk]))
    report = CheckReport("theta_odometer", pk - 1, {"theta(e_b)=e_b'": 0.0})
    top = beta_max(f, k)
    for w in words(f, k):
        if w == top:
            continue
        r = distance(theta_map(d, e_of_word(f, w)), e_of_word(f, odometer_step(f, w)))
        report.bump("theta(e_b)=e_b'", r)
        if r > tol:
            report.passed = False
            report.witness = {"word": str(w)}
            raise AxiomViolation("theta_odometer", r, report.witness)
    try:
        theta_map(d, e_of_word(f, top))
    except DomainViolation:
        pass
    else:
        report.passed = False
        report.witness = {"word": str(top)}
        raise AxiomViolation("theta_odometer", 1.0, report.witness, "theta accepted e_beta_max")
    return report


def verify_odometer_bijection(f: FactorSeq, k: int) -> CheckReport:
    """Exhaustive integer checks on the level-``k`` odometer.

    The carry implementation is compared with ``word_of_index(j + 1)``; the
    image of the non-maximal words must be exactly the non-zero words, the
    inverse step must undo the step, and the carry must touch exactly the
    leading maximal digits.
    """
    pk = f.checked_p(k)
    report = CheckReport("odometer_bijection", pk, {"mismatches": 0.0})
    top = beta_max(f, k)
    images = set()
    bad = None
    for w in words(f, k):
        if w == top:
            continue
        v = odometer_step(f, w)
        j = index_j(f, w)
        changed = [i for i in range(k) if v.digits[i] != w.digits[i]]
        if (
            v != word_of_index(f, j + 1, k)
            or index_j(f, v) != j + 1
            or odometer_inverse_step(f, v) != w
            or len(changed) != carry_length(f, w) + 1
        ):
            bad = w
            break
        images.add(v)
    expected = {w for w in words(f, k) if not is_zero(w)}
    if bad is None and images != expected:
        bad = next(iter(images.symmetric_difference(expected)))
    if bad is not None:
        report.passed = False
        report.residuals["mismatches"] = 1.0
        report.witness = {"word": str(bad)}
        raise AxiomViolation("odometer_bijection", 1.0, report.witness)
    return report


def _level_hom(f: FactorSeq, k: int) -> StandardHomSpec:
    src = BlockShape([f.checked_p(k)])
    dst = BlockShape([f.checked_p(k + 1)])
    return StandardHomSpec(src, dst, [[0] * f.n(k)])


def verify_ideal_identification(f: FactorSeq, k: int) -> CheckReport:
    """s*s = sum of e_beta over beta != beta_max and s s* = sum over beta != 0."""
    pk = f.checked_p(k)
    d = RegularityData(BlockShape([pk]))
    report = CheckReport("ideal_identification", 1, {"s*s": 0.0, "ss*": 0.0})
    dom = np.zeros((pk, pk))
    rng = np.zeros((pk, pk))
    for w in words(f, k):
        j = index_j(f, w)
        if not is_beta_max(f, w):
            dom[j, j] = 1.0
        if not is_zero(w):
            rng[j, j] = 1.0
    shape = BlockShape([pk])
    for key, got, want in (
        ("s*s", d.domain_unit, BlockElement(shape, [dom])),
        ("ss*", d.range_unit, BlockElement(shape, [rng])),
    ):
        if not got.equals(want):
            r = distance(got, want)
            report.residuals[key] = r
            report.passed = False
            report.witness = {"level": k, "unit": key}
            raise AxiomViolation("ideal_identification", r, report.witness)
    return report


def cylinder_refinement_check(f: FactorSeq, k: int) -> CheckReport:
    """Image of e_beta one level up equals the sum of e_{beta t} over last digits t."""
    h = _level_hom(f, k)
    p_next = h.target.sizes[0]
    report = CheckReport("cylinder_refinement", f.p(k), {"mismatches": 0.0})
    for w in words(f, k):
        image = apply_hom(h, e_of_word(f, w))
        block = np.zeros((p_next, p_next))
        for t in range(f.n(k)):
            j = index_j(f, w.append(t))
            block[j, j] = 1.0
        if not image.equals(BlockElement(h.target, [block])):
            report.passed = False
            report.residuals["mismatches"] = 1.0
            report.witness = {"word": str(w)}
            raise AxiomViolation("cylinder_refinement", 1.0, report.witness)
    return report


def verify_level_consistency(f: FactorSeq, k: int) -> CheckReport:
    """Stepping then appending a digit equals appending then stepping."""
    f.checked_p(k + 1)
    report = CheckReport("level_consistency", f.p(k), {"mismatches": 0.0})
    top = beta_max(f, k)
    for w in words(f, k):
        if w == top:
            continue
        stepped = odometer_step(f, w)
        for t in range(f.n(k)):
            if odometer_step(f, w.append(t)) != stepped.append(t):
                report.passed = False
                report.residuals["mismatches"] = 1.0
                report.witness = {"word": str(w), "digit": t}
                raise AxiomViolation("level_consistency", 1.0, report.witness)
    return report
