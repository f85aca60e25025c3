"""Fully enumerated finite simple groups with index-based arithmetic.

Supported families: alternating groups A_n (n >= 5) and the projective
special linear groups PSL_2(q) (prime power q >= 4) and PSL_3(q) (prime
power q >= 2).  Elements are stored in canonical encodings, sorted
lexicographically with the identity swapped to index 0, so two builds of the
same spec produce identical tables.

Composition convention, fixed globally: permutations act on the right and
compose left to right, (p*q)(i) = q(p(i)); matrices multiply left to right,
mul(a, b) = M_a M_b.  Conjugation is x^g = g^-1 x g, so (x^g)^h = x^(gh).
"""

from __future__ import annotations

import itertools
import json
import math
import os
import re
from collections import OrderedDict
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import (
    IndexOutOfRange,
    NotPrimePower,
    NotSimpleParameters,
    ParseError,
    SoundnessAlarm,
    TooLarge,
    WrongFamily,
)
from .fields import GF, factor_prime_power, get_field

DEFAULT_MAX_ORDER = 20_000_000
MAX_ORDER_ENV = "PRODUKT_MAX_ORDER"

# full multiplication table is only cached for groups at most this large,
# and only when it also fits the byte cap
TABLE_MAX_ORDER = 10_000
TABLE_CAP_BYTES = 200_000_000
ROW_CACHE_BYTES = 128_000_000


class Family(Enum):
    ALTERNATING = "A"
    PSL2 = "PSL2"
    PSL3 = "PSL3"


@dataclass(frozen=True)
class GroupSpec:
    """Family plus parameter: n for alternating, q for PSL families."""

    family: Family
    parameter: int

    def __str__(self) -> str:
        if self.family is Family.ALTERNATING:
            return f"A:{self.parameter}"
        dim = 2 if self.family is Family.PSL2 else 3
        return f"PSL:{dim}:{self.parameter}"


_SPEC_RE = re.compile(r"^(A:(\d+)|PSL:([23]):(\d+))$")


def parse_group_spec(text: str) -> GroupSpec:
    """Parse the `A:<n>` / `PSL:2:<q>` / `PSL:3:<q>` grammar."""
    m = _SPEC_RE.match(text.strip())
    if not m:
        raise ParseError(f"bad group spec {text!r} (expected A:<n> or PSL:<d>:<q>)")
    if m.group(2) is not None:
        return GroupSpec(Family.ALTERNATING, int(m.group(2)))
    fam = Family.PSL2 if m.group(3) == "2" else Family.PSL3
    return GroupSpec(fam, int(m.group(4)))


def validate_spec(spec: GroupSpec) -> None:
    n = spec.parameter
    if spec.family is Family.ALTERNATING:
        if n < 5:
            raise NotSimpleParameters(f"A_{n} is not simple (need n >= 5)")
        return
    p, _ = factor_prime_power(n)  # raises NotPrimePower
    del p
    if spec.family is Family.PSL2 and n < 4:
        raise NotSimpleParameters(f"PSL_2({n}) is not simple (need q >= 4)")
    if spec.family is Family.PSL3 and n < 2:
        raise NotSimpleParameters(f"PSL_3({n}) needs q >= 2")


def group_order(spec: GroupSpec) -> int:
    n = spec.parameter
    if spec.family is Family.ALTERNATING:
        return math.factorial(n) // 2
    q = n
    if spec.family is Family.PSL2:
        return q * (q * q - 1) // math.gcd(2, q - 1)
    return q**3 * (q**3 - 1) * (q**2 - 1) // math.gcd(3, q - 1)


def max_order_cap() -> int:
    raw = os.environ.get(MAX_ORDER_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise ParseError(f"{MAX_ORDER_ENV} must be an integer, got {raw!r}")
    return DEFAULT_MAX_ORDER


# ---------------------------------------------------------------------------
# permutation helpers (image arrays are 0-based internally, printed 1-based)


def _all_permutations(n: int) -> np.ndarray:
    """All n! image arrays in lexicographic order, dtype int8."""
    perms = np.zeros((1, 1), dtype=np.int8)
    for k in range(2, n + 1):
        blocks = []
        for v in range(k):
            alphabet = np.array([x for x in range(k) if x != v], dtype=np.int8)
            block = np.empty((perms.shape[0], k), dtype=np.int8)
            block[:, 0] = v
            block[:, 1:] = alphabet[perms]
            blocks.append(block)
        perms = np.vstack(blocks)
    return perms


def _parity_even(perms: np.ndarray) -> np.ndarray:
    n = perms.shape[1]
    inv = np.zeros(perms.shape[0], dtype=np.int32)
    for i in range(n):
        for j in range(i + 1, n):
            inv += perms[:, i] > perms[:, j]
    return inv % 2 == 0


def perm_parity_even(img) -> bool:
    img = np.asarray(img)
    inv = 0
    n = len(img)
    for i in range(n):
        inv += int(np.count_nonzero(img[i + 1 :] < img[i]))
    return inv % 2 == 0


def image_to_cycles(img) -> list[tuple[int, ...]]:
    """Disjoint cycles (1-based, each rotated to start at its least point)."""
    n = len(img)
    seen = [False] * n
    cycles = []
    for start in range(n):
        if seen[start] or img[start] == start:
            seen[start] = True
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i + 1)
            i = int(img[i])
        cycles.append(tuple(cyc))
    return cycles


def format_cycles(img) -> str:
    cycles = image_to_cycles(img)
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(p) for p in c) + ")" for c in cycles)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, n: int) -> np.ndarray:
    """Parse cycle notation like "(1 2 3)(4 5)" into a 0-based image array."""
    s = text.strip()
    if s in ("()", "1", "id", "e"):
        return np.arange(n, dtype=np.int8)
    body = _CYCLE_RE.sub("", s).strip()
    if body or not s.startswith("("):
        raise ParseError(f"bad cycle notation {text!r}")
    img = np.arange(n, dtype=np.int8)
    used: set[int] = set()
    for match in _CYCLE_RE.finditer(s):
        pts = [int(t) for t in re.split(r"[,\s]+", match.group(1).strip()) if t]
        if len(pts) < 2:
            raise ParseError(f"cycle {match.group(0)!r} needs at least 2 points")
        for p in pts:
            if not 1 <= p <= n:
                raise ParseError(f"point {p} outside 1..{n} in {text!r}")
            if p in used:
                raise ParseError(f"point {p} repeated in {text!r}")
            used.add(p)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            img[a - 1] = b - 1
    return img


def cycle_type(img) -> tuple[int, ...]:
    """Sorted multiset of cycle lengths >= 2."""
    return tuple(sorted(len(c) for c in image_to_cycles(img)))


# ---------------------------------------------------------------------------


class GroupContext:
    """Immutable enumerated group with vectorized multiplication oracles.

    Do not construct directly; use build_context().  All public methods are
    pure functions of the context, safe for concurrent reads (internal row
    caches are filled idempotently).
    """

    def __init__(self, spec: GroupSpec, *, max_order: int | None = None):
        validate_spec(spec)
        order = group_order(spec)
        cap = max_order if max_order is not None else max_order_cap()
        if order > cap:
            raise TooLarge(f"|{spec}| = {order} exceeds the order cap {cap}")
        self.spec = spec
        self.order = order
        if spec.family is Family.ALTERNATING:
            self.degree = spec.parameter
            self.gf: GF | None = None
            self.dim = 0
            enc = _all_permutations(self.degree)
            enc = enc[_parity_even(enc)]
            self._radix = self.degree
            self._width = self.degree
            self.imgs = enc
            self.mats = None
        else:
            self.degree = 0
            d = 2 if spec.family is Family.PSL2 else 3
            self.dim = d
            self.gf = get_field(spec.parameter)
            mats = self._enumerate_psl()
            self._radix = spec.parameter
            self._width = d * d
            self.mats = mats
            self.imgs = None
        flat = self._flat_encodings()
        codes = self._encode(flat)
        order_ix = np.argsort(codes, kind="stable")
        self._permute_elements(order_ix)
        # force identity to index 0 by a single swap
        ident = self._identity_encoding()
        pos = int(self._raw_lookup(self._encode(ident[None]))[0])
        if pos != 0:
            swap = np.arange(self.order)
            swap[0], swap[pos] = pos, 0
            self._permute_elements(swap)
        if self.order != len(self._codes):
            raise SoundnessAlarm("enumeration does not match the order formula")
        self.inv_table = self._build_inverses()
        self.generators = self._standard_generators()
        # multiplication caches
        self._table: np.ndarray | None = None
        self._table_done: np.ndarray | None = None
        if order <= TABLE_MAX_ORDER and order * order * 4 <= TABLE_CAP_BYTES:
            self._table = np.zeros((order, order), dtype=np.int32)
            self._table_done = np.zeros(order, dtype=bool)
        entries = max(8, ROW_CACHE_BYTES // max(order * 4, 1))
        self._lrows: OrderedDict[int, np.ndarray] = OrderedDict()
        self._rrows: OrderedDict[int, np.ndarray] = OrderedDict()
        self._row_cache_entries = entries

    # -- construction internals --

    def _flat_encodings(self) -> np.ndarray:
        if self.imgs is not None:
            return self.imgs
        return self.mats.reshape(self.order_guess(), -1)

    def order_guess(self) -> int:
        return self.imgs.shape[0] if self.imgs is not None else self.mats.shape[0]

    def _encode(self, flat: np.ndarray) -> np.ndarray:
        w = flat.shape[1]
        weights = (self._radix ** np.arange(w - 1, -1, -1)).astype(np.int64)
        return flat.astype(np.int64) @ weights

    def _identity_encoding(self) -> np.ndarray:
        if self.imgs is not None:
            return np.arange(self.degree, dtype=np.int8)
        return np.eye(self.dim, dtype=np.int16).reshape(-1)

    def _permute_elements(self, perm: np.ndarray) -> None:
        if self.imgs is not None:
            self.imgs = np.ascontiguousarray(self.imgs[perm])
            flat = self.imgs
        else:
            self.mats = np.ascontiguousarray(self.mats[perm])
            flat = self.mats.reshape(self.mats.shape[0], -1)
        self._codes = self._encode(flat)
        self._sort_ix = np.argsort(self._codes, kind="stable").astype(np.int32)
        self._sorted_codes = self._codes[self._sort_ix]

    def _raw_lookup(self, codes: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self._sorted_codes, codes)
        return self._sort_ix[pos]

    def _canonicalize(self, mats: np.ndarray) -> np.ndarray:
        """Scale each matrix so its first nonzero entry in row-major order is 1."""
        flat = mats.reshape(mats.shape[0], -1)
        first = np.argmax(flat != 0, axis=1)
        scale = self.gf.inv(flat[np.arange(flat.shape[0]), first])
        out = self.gf.mul(flat, scale[:, None]).astype(np.int16)
        return out.reshape(mats.shape)

    def _enumerate_psl(self) -> np.ndarray:
        d, gf = self.dim, self.gf
        q = self.spec.parameter
        gens = []
        for i in range(d):
            for j in range(d):
                if i == j:
                    continue
                for t in range(1, q):
                    m = np.eye(d, dtype=np.int16)
                    m[i, j] = t
                    gens.append(m)
        gens = np.stack(gens)
        self._gen_mats = gens
        w = d * d
        weights = (q ** np.arange(w - 1, -1, -1)).astype(np.int64)

        def codes_of(ms):
            return ms.reshape(ms.shape[0], -1).astype(np.int64) @ weights

        ident = np.eye(d, dtype=np.int16)[None]
        visited = codes_of(ident)
        blocks = [ident]
        frontier = ident
        chunk = max(1, 400_000 // max(len(gens), 1))
        while frontier.shape[0]:
            new_blocks = []
            for lo in range(0, frontier.shape[0], chunk):
                part = frontier[lo : lo + chunk]
                prods = gf.mat_mul(part[:, None], gens[None, :])
                prods = self._canonicalize(prods.reshape(-1, d, d))
                codes = codes_of(prods)
                ucodes, uidx = np.unique(codes, return_index=True)
                fresh = ~np.isin(ucodes, visited)
                if fresh.any():
                    added = prods[uidx[fresh]]
                    visited = np.union1d(visited, ucodes[fresh])
                    new_blocks.append(added)
            if not new_blocks:
                break
            frontier = np.vstack(new_blocks)
            blocks.append(frontier)
        return np.vstack(blocks)

    def _build_inverses(self) -> np.ndarray:
        if self.imgs is not None:
            inv_imgs = np.empty_like(self.imgs)
            rows = np.arange(self.order)[:, None]
            inv_imgs[rows, self.imgs.astype(np.intp)] = np.arange(
                self.degree, dtype=np.int8
            )[None, :]
            flat = inv_imgs
        else:
            adj = self.gf.mat_adjugate(self.mats)
            flat = self._canonicalize(adj)
        table = self._raw_lookup(self._encode(flat.reshape(self.order, -1)))
        return table.astype(np.int32)

    def _standard_generators(self) -> list[int]:
        if self.imgs is not None:
            n = self.degree
            three = np.arange(n, dtype=np.int8)
            three[[0, 1, 2]] = [1, 2, 0]
            big = np.arange(n, dtype=np.int8)
            if n % 2 == 1:
                big = np.roll(np.arange(n, dtype=np.int8), -1)
            else:
                big[1:] = np.roll(np.arange(1, n, dtype=np.int8), -1)
            return [self.index_of_image(three), self.index_of_image(big)]
        codes = self._encode(self._gen_mats.reshape(self._gen_mats.shape[0], -1))
        idx = sorted(set(int(i) for i in self._raw_lookup(codes)))
        return idx

    # -- index checks --

    def _check(self, i: int) -> int:
        i = int(i)
        if not 0 <= i < self.order:
            raise IndexOutOfRange(f"index {i} outside 0..{self.order - 1}")
        return i

    # -- scalar operations --

    @property
    def identity(self) -> int:
        return 0

    def mul(self, a: int, b: int) -> int:
        a, b = self._check(a), self._check(b)
        if self._table is not None and self._table_done[a]:
            return int(self._table[a, b])
        row = self._lrows.get(a)
        if row is not None:
            return int(row[b])
        if self.imgs is not None:
            img = self.imgs[b][self.imgs[a].astype(np.intp)]
            return int(self._raw_lookup(self._encode(img[None]))[0])
        prod = self._canonicalize(self.gf.mat_mul(self.mats[a], self.mats[b])[None])
        return int(self._raw_lookup(self._encode(prod.reshape(1, -1)))[0])

    def inv(self, a: int) -> int:
        return int(self.inv_table[self._check(a)])

    def conjugate(self, a: int, g: int) -> int:
        return self.mul(self.mul(self.inv(g), a), g)

    def element_order(self, a: int) -> int:
        a = self._check(a)
        k, x = 1, a
        while x != 0:
            x = self.mul(x, a)
            k += 1
        return k

    # -- vectorized kernels --

    def lookup_images(self, imgs: np.ndarray) -> np.ndarray:
        return self._raw_lookup(self._encode(imgs))

    def lookup_matrices(self, mats: np.ndarray) -> np.ndarray:
        canon = self._canonicalize(mats)
        return self._raw_lookup(self._encode(canon.reshape(mats.shape[0], -1)))

    def mul_row(self, a: int) -> np.ndarray:
        """Row of products a*x for every x, cached."""
        a = self._check(a)
        if self._table is not None:
            if not self._table_done[a]:
                self._table[a] = self._compute_lrow(a)
                self._table_done[a] = True
            return self._table[a]
        row = self._lrows.get(a)
        if row is None:
            row = self._compute_lrow(a)
            self._lrows[a] = row
            if len(self._lrows) > self._row_cache_entries:
                self._lrows.popitem(last=False)
        else:
            self._lrows.move_to_end(a)
        return row

    def rmul_row(self, b: int) -> np.ndarray:
        """Row of products x*b for every x, cached."""
        b = self._check(b)
        row = self._rrows.get(b)
        if row is None:
            row = self._compute_rrow(b)
            self._rrows[b] = row
            if len(self._rrows) > self._row_cache_entries:
                self._rrows.popitem(last=False)
        else:
            self._rrows.move_to_end(b)
        return row

    def _compute_lrow(self, a: int) -> np.ndarray:
        if self.imgs is not None:
            composed = self.imgs[:, self.imgs[a].astype(np.intp)]
            return self.lookup_images(composed).astype(np.int32)
        prods = self.gf.mat_mul(self.mats[a][None], self.mats)
        return self.lookup_matrices(prods).astype(np.int32)

    def _compute_rrow(self, b: int) -> np.ndarray:
        if self.imgs is not None:
            composed = self.imgs[b][self.imgs.astype(np.intp)]
            return self.lookup_images(composed).astype(np.int32)
        prods = self.gf.mat_mul(self.mats, self.mats[b][None])
        return self.lookup_matrices(prods).astype(np.int32)

    def compose_outer(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """All pairwise products left_i * right_j as a flat index array."""
        left = np.asarray(left, dtype=np.intp)
        right = np.asarray(right, dtype=np.intp)
        if self.imgs is not None:
            composed = self.imgs[right][:, self.imgs[left].astype(np.intp)]
            flat = composed.reshape(-1, self._width)
            return self.lookup_images(flat)
        prods = self.gf.mat_mul(self.mats[left][:, None], self.mats[right][None, :])
        return self.lookup_matrices(prods.reshape(-1, self.dim, self.dim))

    def conjugate_one_by_many(self, x: int, gs: np.ndarray) -> np.ndarray:
        """Indices of g^-1 x g for each g in gs."""
        x = self._check(x)
        gs = np.asarray(gs, dtype=np.intp)
        invs = self.inv_table[gs].astype(np.intp)
        if self.imgs is not None:
            part = self.imgs[x][self.imgs[invs].astype(np.intp)]
            full = np.take_along_axis(self.imgs[gs], part.astype(np.intp), axis=1)
            return self.lookup_images(full)
        part = self.gf.mat_mul(self.mats[invs], self.mats[x][None])
        full = self.gf.mat_mul(part, self.mats[gs])
        return self.lookup_matrices(full)

    def conjugate_set(self, members: np.ndarray, g: int) -> np.ndarray:
        """Indices of g^-1 a g for each member a."""
        g = self._check(g)
        members = np.asarray(members, dtype=np.intp)
        ginv = int(self.inv_table[g])
        if self.imgs is not None:
            part = self.imgs[members][:, self.imgs[ginv].astype(np.intp)]
            full = self.imgs[g][part.astype(np.intp)]
            return self.lookup_images(full)
        part = self.gf.mat_mul(self.mats[ginv][None], self.mats[members])
        full = self.gf.mat_mul(part, self.mats[g][None])
        return self.lookup_matrices(full)

    # -- element formatting and parsing --

    def repr_element(self, i: int) -> str:
        i = self._check(i)
        if self.imgs is not None:
            return format_cycles(self.imgs[i])
        return json.dumps(self.mats[i].tolist(), separators=(",", ""))

    def parse_element(self, text: str) -> int:
        if self.imgs is not None:
            img = parse_cycles(text, self.degree)
            if not perm_parity_even(img):
                raise ParseError(f"{text!r} is an odd permutation, not in A_{self.degree}")
            return int(self.lookup_images(img[None])[0])
        try:
            rows = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad matrix literal {text!r}") from exc
        mat = np.asarray(rows)
        if mat.shape != (self.dim, self.dim) or mat.dtype.kind not in "iu":
            raise ParseError(
                f"matrix literal {text!r} must be {self.dim}x{self.dim} integers"
            )
        q, p = self.gf.q, self.gf.p
        out = np.where((mat >= 0) & (mat < q), mat, mat % p).astype(np.int16)
        if int(self.gf.mat_det(out[None])[0]) == 0:
            raise ParseError(f"matrix {text!r} is singular over F_{q}")
        canon = self._canonicalize(out[None])
        code = self._encode(canon.reshape(1, -1))
        pos = np.searchsorted(self._sorted_codes, code)
        if pos[0] >= self.order or self._sorted_codes[pos[0]] != code[0]:
            raise ParseError(f"matrix {text!r} does not represent an element of {self.spec}")
        return int(self._sort_ix[pos[0]])

    def index_of_image(self, img: np.ndarray) -> int:
        return int(self.lookup_images(np.asarray(img, dtype=np.int8)[None])[0])

    def cycle_type(self, i: int) -> tuple[int, ...]:
        if self.imgs is None:
            raise WrongFamily("cycle type is only defined for permutation contexts")
        return cycle_type(self.imgs[self._check(i)])

    def __repr__(self) -> str:
        return f"GroupContext({self.spec}, order={self.order})"


# ---------------------------------------------------------------------------
# public operations (spec surface)


def build_context(spec: GroupSpec | str, *, max_order: int | None = None) -> GroupContext:
    """Enumerate the group named by spec.

    Deterministic: element tables depend only on the spec.  Raises
    NotSimpleParameters / NotPrimePower / TooLarge on bad parameters.
    """
    if isinstance(spec, str):
        spec = parse_group_spec(spec)
    return GroupContext(spec, max_order=max_order)


@lru_cache(maxsize=32)
def _cached_context(spec: GroupSpec) -> GroupContext:
    return GroupContext(spec)


def get_context(spec: GroupSpec | str) -> GroupContext:
    """Shared cache of contexts (contexts are immutable)."""
    if isinstance(spec, str):
        spec = parse_group_spec(spec)
    return _cached_context(spec)


def mul(ctx: GroupContext, a: int, b: int) -> int:
    return ctx.mul(a, b)


def inv(ctx: GroupContext, a: int) -> int:
    return ctx.inv(a)


def conjugate_element(ctx: GroupContext, a: int, g: int) -> int:
    return ctx.conjugate(a, g)


@dataclass(frozen=True)
class ConjClass:
    """A conjugacy class: least-index representative, members, size."""

    representative: int
    members: "object"  # produkt.subsets.Subset
    size: int


def conjugacy_class(ctx: GroupContext, x: int) -> ConjClass:
    """Orbit of x under conjugation by every group element."""
    from .subsets import Subset

    x = ctx._check(x)
    conj = ctx.conjugate_one_by_many(x, np.arange(ctx.order))
    mask = np.zeros(ctx.order, dtype=bool)
    mask[conj] = True
    members = Subset(ctx, mask)
    return ConjClass(int(np.nonzero(mask)[0][0]), members, members.size)


def support(ctx: GroupContext, x: int) -> frozenset[int]:
    """Moved points of a permutation, 1-based."""
    if ctx.imgs is None:
        raise WrongFamily("support is only defined for alternating contexts")
    x = ctx._check(x)
    moved = np.nonzero(ctx.imgs[x] != np.arange(ctx.degree))[0]
    return frozenset(int(p) + 1 for p in moved)


def centralizer(ctx: GroupContext, x: int):
    """Subset of all g commuting with x."""
    from .subsets import Subset

    x = ctx._check(x)
    mask = np.asarray(ctx.mul_row(x)) == np.asarray(ctx.rmul_row(x))
    return Subset(ctx, mask.copy())


def generators_check(ctx: GroupContext) -> bool:
    """The stored standard generators actually generate (self-test hook)."""
    from .subsets import subgroup_generated

    return subgroup_generated(ctx, ctx.generators).size == ctx.order
