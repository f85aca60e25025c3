"""Dense subsets of an enumerated group and the product-set primitives.

Subsets are immutable values: a context reference, a dense boolean membership
array indexed by element index, and a cached cardinality.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import ContextMismatch, EmptySet, IdentityMissing, TooSmall
from .groups import GroupContext

# chunk size (in index pairs) for the direct pairwise product path
_PAIR_CHUNK = 4_000_000


class Subset:
    """Dense index-keyed subset of a group."""

    __slots__ = ("ctx", "mask", "size", "_indices")

    def __init__(self, ctx: GroupContext, mask: np.ndarray):
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (ctx.order,):
            raise ValueError(f"membership array must have length {ctx.order}")
        self.ctx = ctx
        self.mask = mask.copy()
        self.mask.setflags(write=False)
        self.size = int(np.count_nonzero(mask))
        self._indices: np.ndarray | None = None

    @classmethod
    def from_indices(cls, ctx: GroupContext, indices: Iterable[int]) -> "Subset":
        mask = np.zeros(ctx.order, dtype=bool)
        idx = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices)
        if idx.size:
            if idx.min() < 0 or idx.max() >= ctx.order:
                raise IndexError("element index out of range")
            mask[idx] = True
        return cls(ctx, mask)

    @classmethod
    def full(cls, ctx: GroupContext) -> "Subset":
        return cls(ctx, np.ones(ctx.order, dtype=bool))

    @classmethod
    def empty(cls, ctx: GroupContext) -> "Subset":
        return cls(ctx, np.zeros(ctx.order, dtype=bool))

    def indices(self) -> np.ndarray:
        if self._indices is None:
            self._indices = np.nonzero(self.mask)[0].astype(np.int32)
        return self._indices

    def contains(self, i: int) -> bool:
        return bool(self.mask[i])

    def is_full(self) -> bool:
        return self.size == self.ctx.order

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subset):
            return NotImplemented
        return self.ctx.spec == other.ctx.spec and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash((self.ctx.spec, self.mask.tobytes()))

    def __repr__(self) -> str:
        return f"Subset({self.ctx.spec}, size={self.size})"


def _same_ctx(*subsets: Subset) -> GroupContext:
    ctx = subsets[0].ctx
    for s in subsets[1:]:
        if s.ctx is not ctx and s.ctx.spec != ctx.spec:
            raise ContextMismatch("subsets live over different group contexts")
    return ctx


def _require_nonempty(*subsets: Subset) -> None:
    for s in subsets:
        if s.size == 0:
            raise EmptySet("operation requires a nonempty subset")


def subset_product(p: Subset, q: Subset) -> Subset:
    """The product set {a*b : a in p, b in q}."""
    ctx = _same_ctx(p, q)
    _require_nonempty(p, q)
    pi, qi = p.indices(), q.indices()
    out = np.zeros(ctx.order, dtype=bool)
    pairs = p.size * q.size
    small = min(p.size, q.size)
    # direct pairwise composition beats row translation while the pair count
    # stays below (smaller side) * |G|
    if pairs <= small * ctx.order // 2:
        if p.size <= q.size:
            block = max(1, _PAIR_CHUNK // q.size)
            for lo in range(0, p.size, block):
                out[ctx.compose_outer(pi[lo : lo + block], qi)] = True
        else:
            block = max(1, _PAIR_CHUNK // p.size)
            for lo in range(0, q.size, block):
                out[ctx.compose_outer(pi, qi[lo : lo + block])] = True
    elif p.size <= q.size:
        for a in pi:
            out[ctx.mul_row(int(a))[qi]] = True
    else:
        for b in qi:
            out[ctx.rmul_row(int(b))[pi]] = True
    return Subset(ctx, out)


def subset_conjugate(a: Subset, g: int) -> Subset:
    """The conjugate g^-1 a g; cardinality is preserved."""
    _require_nonempty(a)
    g = a.ctx._check(g)
    if g == 0:
        return a
    conj = a.ctx.conjugate_set(a.indices(), g)
    return Subset.from_indices(a.ctx, conj)


def left_translate(a: Subset, g: int) -> Subset:
    """The set g*a."""
    _require_nonempty(a)
    row = a.ctx.mul_row(a.ctx._check(g))
    return Subset.from_indices(a.ctx, row[a.indices()])


def normalize_to_identity(a: Subset) -> tuple[Subset, int]:
    """Translate a into a set containing the identity.

    Returns (b, m) with b = m^-1 a for the least-index member m; any
    decomposition of the group into conjugates of b pulls back to one of a
    (see undo_normalize).
    """
    _require_nonempty(a)
    m = int(a.indices()[0])
    if m == 0:
        return a, 0
    return left_translate(a, a.ctx.inv(m)), m


def symmetrize(a: Subset) -> tuple[Subset, int]:
    """Build x^-1 * (a*a), which contains x^-1, 1 and x.

    x is the least-index non-identity member.  Requires 1 in a and |a| >= 2.
    """
    _require_nonempty(a)
    if not a.contains(0):
        raise IdentityMissing("symmetrize requires the identity as a member")
    if a.size < 2:
        raise TooSmall("symmetrize requires at least two members")
    x = int(a.indices()[1])
    square = subset_product(a, a)
    return left_translate(square, a.ctx.inv(x)), x


def subset_power(a: Subset, k: int) -> Subset:
    """The k-fold product set a^k, by repeated squaring."""
    _require_nonempty(a)
    if k < 1:
        raise ValueError(f"power must be >= 1, got {k}")
    result: Subset | None = None
    base = a
    while True:
        if k & 1:
            result = base if result is None else subset_product(result, base)
        k >>= 1
        if not k:
            return result
        base = subset_product(base, base)


def subgroup_generated(ctx: GroupContext, generators: Sequence[int]) -> Subset:
    """Subgroup generated by the given element indices (BFS closure)."""
    gens = sorted({int(g) for g in generators} | {int(ctx.inv(g)) for g in generators})
    if not gens:
        raise EmptySet("no generators given")
    visited = np.zeros(ctx.order, dtype=bool)
    visited[0] = True
    frontier = np.array([0], dtype=np.int32)
    rows = [ctx.rmul_row(g) for g in gens]
    while frontier.size:
        cand = np.unique(np.concatenate([row[frontier] for row in rows]))
        fresh = cand[~visited[cand]]
        visited[fresh] = True
        frontier = fresh.astype(np.int32)
    return Subset(ctx, visited)


def closure_generates(a: Subset) -> bool:
    """True iff the subgroup generated by a is the whole group."""
    _require_nonempty(a)
    return subgroup_generated(a.ctx, a.indices()).is_full()


def is_subgroup(h: Subset) -> bool:
    """Closed under product and inverse, containing the identity."""
    if h.size == 0 or not h.contains(0):
        return False
    idx = h.indices()
    if not h.mask[h.ctx.inv_table[idx]].all():
        return False
    return subset_product(h, h) == h


def is_normal_subset(c: Subset) -> bool:
    """Fixed setwise by conjugation (checked on the stored generators)."""
    if c.size == 0:
        return False
    idx = c.indices()
    for g in c.ctx.generators:
        conj = c.ctx.conjugate_set(idx, g)
        if not c.mask[conj].all():
            return False
    return True


# ---------------------------------------------------------------------------
# pulling decompositions back through the two reductions


def undo_normalize(ctx: GroupContext, conjugators: Sequence[int], member: int) -> list[int]:
    """Rewrite conjugators for b = m^-1 a into conjugators for a.

    If b^{g_1} ... b^{g_N} = G then a^{h_1} ... a^{h_N} = G with
    h_i = g_i * z_{i+1} * ... * z_N where z_j = (m^-1)^{g_j}.
    """
    m_inv = ctx.inv(member)
    zs = [ctx.conjugate(m_inv, int(g)) for g in conjugators]
    out = [0] * len(conjugators)
    suffix = 0
    for i in range(len(conjugators) - 1, -1, -1):
        out[i] = ctx.mul(int(conjugators[i]), suffix)
        suffix = ctx.mul(zs[i], suffix)
    return out


def undo_symmetrize(ctx: GroupContext, conjugators: Sequence[int], x: int) -> list[int]:
    """Rewrite conjugators for s = x^-1 a^2 into 2N conjugators for a."""
    x_inv = ctx.inv(x)
    zs = [ctx.conjugate(x_inv, int(g)) for g in conjugators]
    out: list[int] = []
    rewritten = [0] * len(conjugators)
    suffix = 0
    for i in range(len(conjugators) - 1, -1, -1):
        rewritten[i] = ctx.mul(int(conjugators[i]), suffix)
        suffix = ctx.mul(zs[i], suffix)
    for h in rewritten:
        out.extend((h, h))
    return out
