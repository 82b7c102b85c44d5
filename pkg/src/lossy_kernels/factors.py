"""Approximate kernel for Disjoint Factors parameterized by alphabet size.

A factor is a substring of length at least two that starts and ends with
the same letter.  A solution is a set of pairwise disjoint factors with
pairwise distinct letters, given as 1-based inclusive ``(start, end)``
position pairs.  The kernel deletes every position that is not an endpoint
of a marked factor interval, keeping a map from surviving positions back to
the original string.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .framework import INF, KernelOutput, ParameterizedInstance, alpha_from_accuracy
from .ulic import LabelledIntervalInstance, build_ulic

Factor = tuple[int, int]


def alphabet(text: str) -> list[str]:
    return sorted(set(text))


def is_valid_factor_set(text: str, factors: Iterable[Factor]) -> bool:
    factors = list(factors)
    letters = set()
    for i, j in factors:
        if not (1 <= i < j <= len(text)) or text[i - 1] != text[j - 1]:
            return False
        if text[i - 1] in letters:
            return False
        letters.add(text[i - 1])
    spans = sorted(factors)
    return all(a[1] < b[0] for a, b in zip(spans, spans[1:]))


def df_value(text: str, k: int, factors: Iterable[Factor]) -> float | int:
    factors = list(factors)
    return len(factors) if is_valid_factor_set(text, factors) else -INF


def build_factor_graph(text: str) -> LabelledIntervalInstance:
    """One interval per pair of consecutive occurrences of the same letter."""
    letters = {c: i for i, c in enumerate(alphabet(text))}
    last: dict[str, int] = {}
    intervals = []
    for pos, c in enumerate(text, 1):
        if c in last:
            intervals.append((last[c], pos, letters[c]))
        last[c] = pos
    return LabelledIntervalInstance(tuple(intervals), max(1, len(letters)))


@dataclass(frozen=True)
class PositionMap:
    """Strictly increasing map from reduced positions (1-based) to original ones."""

    targets: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(a >= b for a, b in zip(self.targets, self.targets[1:])):
            raise ValueError("position map must be strictly increasing")

    def __call__(self, pos: int) -> int:
        return self.targets[pos - 1]

    def __len__(self) -> int:
        return len(self.targets)

    def then(self, outer: PositionMap) -> PositionMap:
        """Compose: first map through ``self``, then through ``outer``."""
        return PositionMap(tuple(outer(p) for p in self.targets))

    def apply(self, text: str) -> str:
        return "".join(text[p - 1] for p in self.targets)


def lift_factors(pmap: PositionMap, factors: Iterable[Factor]) -> list[Factor]:
    factors = list(factors)
    spans = sorted(factors)
    if any(a[1] >= b[0] for a, b in zip(spans, spans[1:])):
        raise ValueError("input factors overlap")
    return [(pmap(i), pmap(j)) for i, j in factors]


@dataclass
class DfKernel:
    reduced: str
    positions: PositionMap
    marked: frozenset[int]
    intervals: LabelledIntervalInstance


def reduce_string(text: str, eps: float, depth: int | None = None) -> DfKernel:
    inst = build_factor_graph(text)
    ulic = build_ulic(inst, eps, depth)
    keep = sorted({p for i in ulic.marked for p in inst.intervals[i][:2]})
    pmap = PositionMap(tuple(keep))
    return DfKernel(pmap.apply(text), pmap, ulic.marked, inst)


def size_bound(sigma: int, eps: float) -> int:
    """Endpoints of at most T(d) marked intervals, never more than the text."""
    from .ulic import depth_for, mark_size_bound

    return 2 * mark_size_bound(sigma * 2 * sigma, depth_for(eps))


def df_kernelize(text: str, k: int | None, eps: float, depth: int | None = None) -> KernelOutput:
    alpha = alpha_from_accuracy("max", "eps", eps)
    sigma = len(alphabet(text))
    ker = reduce_string(text, eps, depth)

    def lifter(factors: Sequence[Factor]) -> list[Factor]:
        factors = list(factors)
        if not is_valid_factor_set(ker.reduced, factors):
            return []
        return lift_factors(ker.positions, factors)

    return KernelOutput(
        reduced=ParameterizedInstance(ker.reduced, sigma if k is None else k),
        lifter=lifter,
        alpha=alpha,
        strict=True,
        size_bound=size_bound(sigma, eps),
        info={"positions": ker.positions, "marked": len(ker.marked), "intervals": len(ker.intervals)},
    )


def required_fraction(eps: float, opt: int) -> int:
    """ceil((1 - eps) * opt) computed exactly."""
    return math.ceil((1 - Fraction(repr(eps))) * opt)
