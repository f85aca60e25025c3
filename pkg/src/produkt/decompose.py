"""Decomposition search: greedy conjugate selection plus an exact oracle.

A decomposition of G is a base subset A and conjugators g_1..g_N with
A^{g_1} ... A^{g_N} = G.  Every constructor here replays its result through
the subset engine before returning, and checks the counting lower bound
|A|^N >= |G| in exact integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CapExceeded,
    GrowthStall,
    Incomplete,
    InstanceTooLarge,
    NotNormal,
    NotSubgroup,
    SoundnessAlarm,
    TooSmall,
    TrivialSet,
    TrivialSubgroup,
)
from .subsets import (
    Subset,
    is_normal_subset,
    is_subgroup,
    subset_conjugate,
    subset_product,
)

ORACLE_MAX_ORDER = 10_000
ORACLE_MAX_N = 8
ORACLE_NODE_BUDGET = 10_000_000


@dataclass
class ConjugateDecomposition:
    """Certified product decomposition with a replayable conjugator tuple."""

    base: Subset
    conjugators: list[int]
    complete: bool
    sizes: list[int] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.conjugators)

    @property
    def ratio(self) -> float:
        return conjecture_ratio(self)


def conjecture_ratio(dec: ConjugateDecomposition) -> float:
    """N log|A| / log|G|; at least 1 for any complete decomposition."""
    if not dec.complete:
        raise Incomplete("ratio is only defined for complete decompositions")
    return dec.n * math.log(dec.base.size) / math.log(dec.base.ctx.order)


def product_of_conjugates(base: Subset, conjugators) -> tuple[Subset, list[int]]:
    """Multiply out base^{g_1} ... base^{g_N}, recording |P| after each factor.

    Once P is the whole group the remaining factors are skipped, since
    G * X = G for any nonempty X.
    """
    current = subset_conjugate(base, int(conjugators[0]))
    sizes = [current.size]
    for g in conjugators[1:]:
        if not current.is_full():
            current = subset_product(current, subset_conjugate(base, int(g)))
        sizes.append(current.size)
    return current, sizes


def replay(dec: ConjugateDecomposition) -> Subset:
    """Recompute the product set; raises SoundnessAlarm on any mismatch."""
    final, sizes = product_of_conjugates(dec.base, dec.conjugators)
    if sizes != dec.sizes or final.is_full() != dec.complete:
        raise SoundnessAlarm("decomposition does not replay to its recorded state")
    return final


def _check_lower_bound(dec: ConjugateDecomposition) -> None:
    if dec.complete and dec.base.size**dec.n < dec.base.ctx.order:
        raise SoundnessAlarm(
            "complete decomposition violates the counting bound |A|^N >= |G|"
        )


def _parse_pool(pool: str | None, order: int) -> tuple[str, int]:
    if pool is None or pool == "auto":
        return ("full", 0) if order <= 10_000 else ("sample", 256)
    if pool == "full":
        return ("full", 0)
    if pool.startswith("sample:"):
        m = int(pool.split(":", 1)[1])
        if m < 1:
            raise ValueError(f"sample pool size must be positive, got {m}")
        return ("sample", m)
    raise ValueError(f"unknown pool policy {pool!r}")


def greedy_decompose(
    a: Subset,
    pool: str | None = None,
    cap: int = 64,
    seed: int | None = None,
    target: Subset | None = None,
) -> ConjugateDecomposition:
    """Greedy decomposition: repeatedly append the conjugator maximizing |P * A^g|.

    The first conjugator is always the identity (a global conjugate of a
    decomposition is again one).  Ties are broken to the least element index.
    With `pool="sample:m"` each step scores m seeded random conjugators;
    a seed is then required.
    """
    ctx = a.ctx
    if a.size < 2:
        raise TooSmall("greedy decomposition requires |A| >= 2")
    kind, m = _parse_pool(pool, ctx.order)
    rng = None
    if kind == "sample":
        if seed is None:
            raise ValueError("sampled pools require a seed")
        rng = np.random.Generator(np.random.PCG64(int(seed)))

    goal = target if target is not None else Subset.full(ctx)
    goal_size = goal.size
    conjugators = [0]
    p_mask = a.mask.copy()
    p_idx = a.indices()
    p_size = a.size
    sizes = [p_size]
    a_rows = np.stack([ctx.rmul_row(int(x)) for x in a.indices()])
    buf = np.empty(ctx.order, dtype=bool)

    def score_of(g: int) -> tuple[int, np.ndarray]:
        x_idx = ctx.rmul_row(int(ctx.inv_table[g]))[p_idx]
        buf.fill(False)
        buf[a_rows[:, x_idx].ravel()] = True
        return int(np.count_nonzero(buf)), buf

    while p_size < goal_size:
        if len(conjugators) >= cap:
            partial = ConjugateDecomposition(a, conjugators, False, sizes)
            raise CapExceeded(
                f"no complete decomposition within cap={cap}", partial=partial
            )
        upper = min(goal_size, p_size * a.size)
        best_g, best_size = -1, p_size
        attempts = 8 if kind == "sample" else 1
        for _ in range(attempts):
            if kind == "full":
                batch = np.arange(ctx.order)
            else:
                batch = np.sort(rng.permutation(ctx.order)[:m])
            hit_upper = False
            for g in batch:
                g = int(g)
                s, _ = score_of(g)
                if s > best_size:
                    best_g, best_size = g, s
                    if s >= upper:
                        hit_upper = True
                        break
            if best_size > p_size or hit_upper:
                break
        if best_g < 0:
            raise GrowthStall(
                "no candidate conjugate strictly grows the product set"
            )
        # rebuild the winning product and translate it back by g
        _, winning = score_of(best_g)
        new_idx = ctx.rmul_row(best_g)[np.nonzero(winning)[0]]
        p_mask = np.zeros(ctx.order, dtype=bool)
        p_mask[new_idx] = True
        if target is not None and np.any(p_mask & ~goal.mask):
            raise SoundnessAlarm("product escaped the target subgroup")
        p_idx = np.nonzero(p_mask)[0].astype(np.int32)
        p_size = int(p_idx.size)
        conjugators.append(best_g)
        sizes.append(p_size)

    dec = ConjugateDecomposition(a, conjugators, p_size == goal_size, sizes)
    if target is None:
        _check_lower_bound(dec)
    return dec


def minimal_n_oracle(
    a: Subset,
    n_max: int = ORACLE_MAX_N,
    max_group_order: int = ORACLE_MAX_ORDER,
) -> int | None:
    """Exact minimum N such that some conjugator tuple of length N works.

    Level-by-level breadth-first search over product-set states with three
    exact reductions: the base is translated to contain the identity (the
    rewrite in undo_normalize is a bijection on conjugator tuples, so the
    minimum is unchanged); states are identified up to simultaneous
    conjugation, whose orbits have isomorphic search trees; and states
    dominated by a superset at the same depth are dropped.  The counting
    prune |P| * |A|^remaining >= |G| runs in exact integer arithmetic.
    Returns None when no tuple of length <= n_max exists.
    """
    from .subsets import normalize_to_identity

    ctx = a.ctx
    if ctx.order > max_group_order:
        raise InstanceTooLarge(f"oracle limited to |G| <= {max_group_order}")
    if n_max < 1 or n_max > ORACLE_MAX_N:
        raise InstanceTooLarge(f"oracle limited to n_max <= {ORACLE_MAX_N}")
    if a.size < 2:
        raise TooSmall("oracle requires |A| >= 2")
    order = ctx.order
    size = a.size

    lower = 1
    while size**lower < order:
        lower += 1
    if lower > n_max:
        return None
    base, _ = normalize_to_identity(a)
    if base.is_full():
        return 1

    # distinct conjugate sets of the base, in first-occurrence order of g
    seen: set[bytes] = set()
    members: list[np.ndarray] = []
    for g in range(order):
        idx = np.sort(ctx.conjugate_set(base.indices(), g))
        key = idx.tobytes()
        if key not in seen:
            seen.add(key)
            members.append(idx)
    n_conj = len(members)
    # translation tables: row (g, k) maps mask(P) to mask(P * member_k of set g)
    trans = np.empty((n_conj * size, order), dtype=np.int32)
    for g, mem in enumerate(members):
        for k, el in enumerate(mem):
            trans[g * size + k] = ctx.rmul_row(int(ctx.inv(int(el))))

    canonical = order <= 64
    if canonical:
        conj_tab = np.stack(
            [ctx.conjugate_set(np.arange(order), ctx.inv(h)) for h in range(order)]
        ).astype(np.intp)

    def level_keys(masks: np.ndarray) -> np.ndarray:
        """One key row per state: the orbit-minimal packed form if the
        canonical reduction applies, else the packed form itself."""
        if not canonical:
            return _pack_rows(masks)
        out = np.empty((masks.shape[0], 1), dtype=np.uint64)
        chunk = max(1, 40_000_000 // (order * order))
        for lo in range(0, masks.shape[0], chunk):
            part = masks[lo : lo + chunk]
            orbit = part[:, conj_tab]
            packed = _pack_rows(orbit.reshape(-1, order))
            out[lo : lo + chunk, 0] = packed.reshape(part.shape[0], order).min(axis=1)
        return out

    frontier = base.mask[None, :].copy()
    visited: set[bytes] = {level_keys(frontier)[0].tobytes()}
    processed = 0
    for depth in range(1, n_max):
        remaining = n_max - depth - 1  # steps left after taking one more
        threshold = -(-order // size**remaining) if remaining else order
        blocks = []
        chunk = max(1, 64_000_000 // (n_conj * size * order))
        for lo in range(0, frontier.shape[0], chunk):
            part = frontier[lo : lo + chunk]
            kids = part[:, trans].reshape(part.shape[0], n_conj, size, order)
            kids = kids.any(axis=2).reshape(-1, order)
            counts = kids.sum(axis=1)
            if int(counts.max(initial=0)) == order:
                return depth + 1
            blocks.append(kids[counts >= threshold])
            processed += kids.shape[0]
            if processed > ORACLE_NODE_BUDGET:
                raise InstanceTooLarge("oracle exceeded its node budget")
        if depth + 1 == n_max:
            return None  # final level only needed the saturation check
        cand = np.vstack(blocks) if blocks else np.zeros((0, order), dtype=bool)
        if cand.shape[0] == 0:
            return None
        # dedupe raw states cheaply before the orbit reduction
        packed = _pack_rows(cand)
        void = packed.view([("", packed.dtype)] * packed.shape[1]).ravel()
        _, first = np.unique(void, return_index=True)
        cand = cand[np.sort(first)]
        # dedupe up to conjugation, also against earlier depths
        keys = level_keys(cand)
        keep: list[int] = []
        for i in range(cand.shape[0]):
            kb = keys[i].tobytes()
            if kb not in visited:
                visited.add(kb)
                keep.append(i)
        if not keep:
            return None
        cand = cand[keep]
        # dominance: keep only subset-maximal representatives
        packed = _pack_rows(cand)
        by_size = np.argsort(-cand.sum(axis=1), kind="stable")
        acc = np.empty_like(packed)
        kept = 0
        rowsel: list[int] = []
        for i in by_size:
            p = packed[i]
            if kept and bool(((acc[:kept] & p) == p).all(axis=1).any()):
                continue
            acc[kept] = p
            kept += 1
            rowsel.append(int(i))
        frontier = cand[rowsel]
    return None


def _pack_rows(rows_bool: np.ndarray) -> np.ndarray:
    """Pack bool rows into uint64 words for fast subset tests."""
    m, order = rows_bool.shape
    words = (order + 63) // 64
    padded = np.zeros((m, words * 64), dtype=bool)
    padded[:, :order] = rows_bool
    bits = np.packbits(padded, axis=1, bitorder="little")
    return bits.view(np.uint64)


def normal_subset_decompose(c: Subset, cap: int | None = None) -> int:
    """Minimal k with C^k = G for a normal subset C.

    Conjugation fixes C, so no conjugators are needed.  Powers of a normal
    set without the identity need not be nested, so each power is tested
    independently as it is built up.
    """
    if c.size == 0 or (c.size == 1 and c.contains(0)):
        raise TrivialSet("need a normal subset other than {} and {1}")
    if not is_normal_subset(c):
        raise NotNormal("subset is not closed under conjugation")
    ctx = c.ctx
    if cap is None:
        cap = max(16, 3 * math.ceil(math.log(ctx.order) / math.log(max(c.size, 2))) + 8)
    power = c
    for k in range(1, cap + 1):
        if power.is_full():
            return k
        power = subset_product(power, c)
    raise SoundnessAlarm(f"normal subset did not cover the group within {cap} powers")


def subgroup_cover(
    h: Subset,
    pool: str | None = None,
    cap: int = 64,
    seed: int | None = None,
) -> ConjugateDecomposition:
    """Cover G by conjugates of a subgroup H (greedy, verified)."""
    if not is_subgroup(h):
        raise NotSubgroup("cover base must be closed under product and inverse")
    if h.size == 1:
        raise TrivialSubgroup("cover base must have |H| > 1")
    return greedy_decompose(h, pool=pool, cap=cap, seed=seed)
