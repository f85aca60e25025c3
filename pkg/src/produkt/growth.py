"""Growth measurements: tripling iteration, growth exponents, the
triple-product density threshold, and generation by few conjugates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadDensity,
    BudgetExhausted,
    GrowthStall,
    IdentityElement,
    NoNonSaturatedSteps,
    NotGenerating,
    SoundnessAlarm,
    StepLimitExceeded,
)
from .groups import Family, GroupContext, GroupSpec
from .rng import derive_seed, stream
from .subsets import Subset, closure_generates, subgroup_generated, subset_product

# minimal nontrivial representation degrees for the concrete small groups;
# used only to derive the default density-threshold exponent
_MIN_DEGREE_EXCEPTIONS = {
    ("PSL2", 4): 3,
    ("PSL2", 5): 3,
    ("PSL2", 9): 5,
    ("PSL3", 2): 3,
    ("A", 5): 3,
    ("A", 6): 5,
}


def minimal_degree(spec: GroupSpec) -> int:
    key = ("A" if spec.family is Family.ALTERNATING else spec.family.value, spec.parameter)
    if key in _MIN_DEGREE_EXCEPTIONS:
        return _MIN_DEGREE_EXCEPTIONS[key]
    n = spec.parameter
    if spec.family is Family.ALTERNATING:
        return n - 1
    if spec.family is Family.PSL2:
        return (n - 1) // 2 if n % 2 else n - 1
    return n * n + n


def default_delta(spec: GroupSpec) -> float:
    """Exponent d with (minimal representation degree) = |G|^d."""
    from .groups import group_order

    return math.log(minimal_degree(spec)) / math.log(group_order(spec))


def rank_of(spec: GroupSpec) -> int:
    """Lie rank for PSL families; the n-1 convention for alternating
    contexts is reported for information only, never asserted."""
    if spec.family is Family.PSL2:
        return 1
    if spec.family is Family.PSL3:
        return 2
    return spec.parameter - 1


def conjugate_generation_bound(rank: int) -> int:
    return 8 * (2 * rank + 1)


@dataclass
class GrowthParams:
    delta: float | None = None
    epsilon_floor: float = 0.01
    max_steps: int = 32

    def resolved_delta(self, spec: GroupSpec) -> float:
        return self.delta if self.delta is not None else default_delta(spec)


@dataclass
class GrowthTrace:
    """Sizes along the tripling iteration with per-step growth exponents."""

    sizes: list[tuple[int, int]]
    reached_full: bool
    epsilons: list[float] = field(default_factory=list)


def tripling_iteration(x: Subset, params: GrowthParams | None = None) -> GrowthTrace:
    """Cube the set repeatedly until the whole group or the step cap.

    Each step records |Y^3|; the growth exponent log|Y^3|/log|Y| - 1 is
    recorded for steps whose cube stays below |G|.
    """
    params = params or GrowthParams()
    ctx = x.ctx
    if not closure_generates(x):
        raise NotGenerating("set does not generate the group")
    sizes = [(0, x.size)]
    epsilons: list[float] = []
    current = x
    step = 0
    while current.size < ctx.order:
        if step >= params.max_steps:
            raise StepLimitExceeded(
                f"no saturation within {params.max_steps} steps",
                trace=GrowthTrace(sizes, False, epsilons),
            )
        cube = subset_product(subset_product(current, current), current)
        step += 1
        if cube.size < ctx.order:
            epsilons.append(math.log(cube.size) / math.log(current.size) - 1.0)
            if cube.size <= current.size:
                raise GrowthStall(
                    f"cube did not grow at step {step} "
                    f"({current.size} -> {cube.size})"
                )
        sizes.append((step, cube.size))
        current = cube
    return GrowthTrace(sizes, True, epsilons)


def epsilon_estimate(trace: GrowthTrace) -> float:
    """Minimum per-step growth exponent over non-saturated steps."""
    if not trace.epsilons:
        raise NoNonSaturatedSteps("trace has no non-saturated step")
    return min(trace.epsilons)


@dataclass
class ScanRow:
    density: float
    size: int
    success_fraction: float


def np_threshold_scan(
    ctx: GroupContext,
    densities: list[float],
    trials: int,
    seed: int,
) -> list[ScanRow]:
    """For each density d, the fraction of uniform random subsets of size
    ceil(|G|^d) whose cube is the whole group."""
    for d in densities:
        if not 0 < d <= 1:
            raise BadDensity(f"density {d} outside (0, 1]")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rows = []
    for di, d in enumerate(densities):
        size = min(ctx.order, math.ceil(ctx.order**d))
        hits = 0
        for t in range(trials):
            rng = stream(derive_seed(seed, f"np-scan:{di}:{t}"))
            members = rng.permutation(ctx.order)[:size]
            sample = Subset.from_indices(ctx, members)
            square = subset_product(sample, sample)
            cube = subset_product(square, sample)
            hits += cube.is_full()
        rows.append(ScanRow(d, size, hits / trials))
    return rows


def majority_smooth(values: list[float]) -> list[float]:
    """Median-of-three smoothing (clamped at the ends)."""
    n = len(values)
    out = []
    for i in range(n):
        window = sorted(
            [values[max(0, i - 1)], values[i], values[min(n - 1, i + 1)]]
        )
        out.append(window[1])
    return out


@dataclass
class GenerationCertificate:
    """Conjugates of one element that jointly generate the group."""

    base_element: int
    conjugators: list[int]
    rank: int
    bound: int
    rank_asserted: bool

    @property
    def count(self) -> int:
        return len(self.conjugators)


def generating_conjugates(
    ctx: GroupContext,
    x: int,
    budget: int = 4096,
    seed: int = 0,
) -> GenerationCertificate:
    """Greedily accumulate random conjugates of x until they generate G.

    Conjugates are kept only when they strictly enlarge the closure.  For the
    PSL families the count is asserted against the reference bound 8(2r+1);
    for alternating contexts the bound is reported only.
    """
    x = ctx._check(x)
    if x == 0:
        raise IdentityElement("need a non-identity element")
    rng = stream(seed, "gen-conj")
    rank = rank_of(ctx.spec)
    bound = conjugate_generation_bound(rank)
    lie = ctx.spec.family in (Family.PSL2, Family.PSL3)
    gens: list[int] = []
    closure: Subset | None = None
    for _ in range(budget):
        g = int(rng.integers(ctx.order))
        c = ctx.conjugate(x, g)
        if closure is not None and closure.contains(c):
            continue
        gens.append(g)
        closure = subgroup_generated(ctx, [ctx.conjugate(x, h) for h in gens])
        if closure.is_full():
            cert = GenerationCertificate(x, gens, rank, bound, lie)
            if lie and cert.count > bound:
                raise SoundnessAlarm(
                    f"needed {cert.count} conjugates, above the bound {bound}"
                )
            return cert
    raise BudgetExhausted(f"no generating set within {budget} random conjugates")


def symmetrized_generating_set(
    ctx: GroupContext,
    seed: int,
    members: int = 2,
    attempts: int = 1000,
) -> Subset:
    """Seeded random generating tuple, closed up to {1} u S u S^-1.

    This is the Cayley-graph sense of symmetrization; the reduction
    `symmetrize` in the subset engine serves a different purpose (it does not
    preserve generation).
    """
    rng = stream(seed, "sym-gen")
    for _ in range(attempts):
        picks = rng.integers(1, ctx.order, size=members)
        if len(set(int(p) for p in picks)) < members:
            continue
        idx = {0}
        for p in picks:
            idx.add(int(p))
            idx.add(int(ctx.inv(int(p))))
        candidate = Subset.from_indices(ctx, sorted(idx))
        if closure_generates(candidate):
            return candidate
    raise BudgetExhausted(f"no generating {members}-set within {attempts} draws")
