"""Arithmetic for small finite fields F_q via dense lookup tables.

Field elements are integers 0..q-1.  For q = p^k with k > 1 the integer's
base-p digits are the coefficients of a polynomial in the generator, reduced
modulo a fixed irreducible polynomial (see IRREDUCIBLE_POLYS, also documented
in the README).  All operations accept scalars or numpy arrays and broadcast.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import NotPrimePower

# Monic irreducible polynomials over F_p used for F_{p^k}, k >= 2, given as
# the low coefficient tuple (a0, ..., a_{k-1}) of x^k + a_{k-1}x^{k-1}+...+a0.
# These are the standard (Conway) choices; irreducibility is re-checked when
# the tables are built.
IRREDUCIBLE_POLYS: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1),
    (2, 3): (1, 1, 0),
    (2, 4): (1, 1, 0, 0),
    (2, 5): (1, 0, 1, 0, 0),
    (2, 6): (1, 1, 0, 1, 1, 0),
    (2, 7): (1, 1, 0, 0, 0, 0, 0),
    (3, 2): (2, 2),
    (3, 3): (1, 2, 0),
    (3, 4): (2, 0, 0, 2),
    (5, 2): (2, 4),
    (5, 3): (3, 3, 0),
    (7, 2): (3, 6),
    (7, 3): (4, 0, 6),
    (11, 2): (2, 7),
    (13, 2): (2, 12),
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, k) with q = p^k, or raise NotPrimePower."""
    if q < 2:
        raise NotPrimePower(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if p * p > q:
            break
        if q % p == 0:
            k = 0
            m = q
            while m % p == 0:
                m //= p
                k += 1
            if m != 1:
                raise NotPrimePower(f"{q} is not a prime power")
            return p, k
    # q itself is prime
    return q, 1


def _digits(value: int, p: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        out.append(value % p)
        value //= p
    return out


def _undigits(coeffs: list[int], p: int) -> int:
    value = 0
    for c in reversed(coeffs):
        value = value * p + c
    return value


def _poly_mul_mod(a: int, b: int, p: int, k: int, red: list[list[int]]) -> int:
    """Multiply field elements given the reduction table for x^k..x^{2k-2}."""
    da, db = _digits(a, p, k), _digits(b, p, k)
    prod = [0] * (2 * k - 1)
    for i, ca in enumerate(da):
        if ca == 0:
            continue
        for j, cb in enumerate(db):
            prod[i + j] = (prod[i + j] + ca * cb) % p
    # fold powers >= k down using the reduction table
    coeffs = prod[:k]
    for e in range(k, 2 * k - 1):
        c = prod[e]
        if c == 0:
            continue
        for i, r in enumerate(red[e - k]):
            coeffs[i] = (coeffs[i] + c * r) % p
    return _undigits(coeffs, p)


class GF:
    """Finite field F_q with table-driven, numpy-friendly arithmetic."""

    def __init__(self, q: int):
        p, k = factor_prime_power(q)
        self.q = q
        self.p = p
        self.k = k
        if k == 1:
            add = (np.arange(q)[:, None] + np.arange(q)[None, :]) % q
            mul = (np.arange(q)[:, None] * np.arange(q)[None, :]) % q
        else:
            poly = IRREDUCIBLE_POLYS.get((p, k))
            if poly is None:
                raise NotPrimePower(
                    f"no irreducible polynomial on file for q = {p}^{k}"
                )
            # reduction table: x^(k+e) as a coefficient vector, e = 0..k-2
            red = [[(-c) % p for c in poly]]
            for _ in range(k - 2):
                prev = red[-1]
                nxt = [0] + prev[:-1]
                carry = prev[-1]
                for i in range(k):
                    nxt[i] = (nxt[i] + carry * ((-poly[i]) % p)) % p
                red.append(nxt)
            add = np.zeros((q, q), dtype=np.int64)
            mul = np.zeros((q, q), dtype=np.int64)
            for a in range(q):
                da = _digits(a, p, k)
                for b in range(q):
                    db = _digits(b, p, k)
                    add[a, b] = _undigits(
                        [(x + y) % p for x, y in zip(da, db)], p
                    )
                    mul[a, b] = _poly_mul_mod(a, b, p, k, red)
        self.add_t = add.astype(np.int16)
        self.mul_t = mul.astype(np.int16)
        # irreducibility check: the nonzero elements must be closed under
        # multiplication without zero divisors
        if np.any(self.mul_t[1:, 1:] == 0):
            raise NotPrimePower(
                f"polynomial on file for q = {p}^{k} is not irreducible"
            )
        neg = np.zeros(q, dtype=np.int16)
        inv = np.zeros(q, dtype=np.int16)
        for a in range(q):
            neg[a] = int(np.nonzero(self.add_t[a] == 0)[0][0])
            if a:
                inv[a] = int(np.nonzero(self.mul_t[a] == 1)[0][0])
        self.neg_t = neg
        self.inv_t = inv

    # all of these accept ints or integer ndarrays and broadcast

    def add(self, a, b):
        return self.add_t[a, b]

    def sub(self, a, b):
        return self.add_t[a, self.neg_t[b]]

    def mul(self, a, b):
        return self.mul_t[a, b]

    def neg(self, a):
        return self.neg_t[a]

    def inv(self, a):
        return self.inv_t[a]

    def mat_mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Matrix product over F_q for stacks of square matrices.

        Shapes broadcast like numpy matmul: (..., d, d) x (..., d, d).
        """
        if self.k == 1:
            prod = np.matmul(a.astype(np.int64), b.astype(np.int64)) % self.p
            return prod.astype(np.int16)
        d = a.shape[-1]
        out = None
        for t in range(d):
            term = self.mul_t[a[..., :, t, None], b[..., None, t, :]]
            out = term if out is None else self.add_t[out, term]
        return out.astype(np.int16)

    def mat_det(self, m: np.ndarray) -> np.ndarray:
        """Determinant for stacks of 2x2 or 3x3 matrices over F_q."""
        d = m.shape[-1]
        if d == 2:
            return self.sub(
                self.mul(m[..., 0, 0], m[..., 1, 1]),
                self.mul(m[..., 0, 1], m[..., 1, 0]),
            )
        if d == 3:
            def minor(r1, c1, r2, c2):
                return self.sub(
                    self.mul(m[..., r1, c1], m[..., r2, c2]),
                    self.mul(m[..., r1, c2], m[..., r2, c1]),
                )

            t0 = self.mul(m[..., 0, 0], minor(1, 1, 2, 2))
            t1 = self.mul(m[..., 0, 1], minor(1, 0, 2, 2))
            t2 = self.mul(m[..., 0, 2], minor(1, 0, 2, 1))
            return self.add(self.sub(t0, t1), t2)
        raise ValueError(f"determinant only implemented for d <= 3, got {d}")

    def mat_adjugate(self, m: np.ndarray) -> np.ndarray:
        """Adjugate (cofactor transpose) for stacks of 2x2/3x3 matrices."""
        d = m.shape[-1]
        out = np.empty_like(m)
        if d == 2:
            out[..., 0, 0] = m[..., 1, 1]
            out[..., 1, 1] = m[..., 0, 0]
            out[..., 0, 1] = self.neg(m[..., 0, 1])
            out[..., 1, 0] = self.neg(m[..., 1, 0])
            return out
        if d == 3:
            idx = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
            for i in range(3):
                for j in range(3):
                    _, r1, r2 = idx[j]
                    _, c1, c2 = idx[i]
                    out[..., i, j] = self.sub(
                        self.mul(m[..., r1, c1], m[..., r2, c2]),
                        self.mul(m[..., r1, c2], m[..., r2, c1]),
                    )
            return out
        raise ValueError(f"adjugate only implemented for d <= 3, got {d}")


@lru_cache(maxsize=None)
def get_field(q: int) -> GF:
    return GF(q)
