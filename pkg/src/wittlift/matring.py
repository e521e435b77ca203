"""Batched matrix arithmetic over W_s(F_{p^m}).

A matrix is a numpy int64 array of shape (..., n, n, m): coefficient planes
in the power basis of the ring's defining polynomial, entries reduced mod
p^s.  All operations broadcast over leading batch axes; int64 never
overflows at these sizes (entries < 343, inner dimensions <= 21).
"""

from __future__ import annotations

import numpy as np

from .linalg import FqSpace
from .ring import GaloisRingElement, WittRingContext, get_witt


class MatRing:
    def __init__(self, witt: WittRingContext, n: int):
        self.witt = witt
        self.n = n
        self.m = witt.r
        self.mod = witt.modulus
        self.p = witt.p
        # reduction rows: x^t = sum_j RED[t, j] x^j for t < 2m-1
        red = np.zeros((2 * self.m - 1, self.m), dtype=np.int64)
        for t in range(2 * self.m - 1):
            if t < self.m:
                red[t, t] = 1
            else:
                # x^t = x^(t-m) * x^m, with x^m = -poly
                prev = red[t - 1]
                shifted = np.zeros(self.m + 1, dtype=np.int64)
                shifted[1:] = prev
                carry = shifted[self.m]
                vec = shifted[: self.m].copy()
                if carry:
                    vec = vec - carry * np.array(witt.poly, dtype=np.int64)
                red[t] = vec % self.mod
        self.RED = red
        self._fq: FqSpace | None = None
        self._frob_pows: dict[int, np.ndarray] = {}

    # -- constructors ---------------------------------------------------------

    def identity(self, batch=()) -> np.ndarray:
        out = np.zeros(batch + (self.n, self.n, self.m), dtype=np.int64)
        idx = np.arange(self.n)
        out[..., idx, idx, 0] = 1
        return out

    def zero(self, batch=()) -> np.ndarray:
        return np.zeros(batch + (self.n, self.n, self.m), dtype=np.int64)

    def from_int_matrix(self, M) -> np.ndarray:
        out = self.zero()
        out[..., 0] = np.asarray(M, dtype=np.int64) % self.mod
        return out

    def scalar(self, u) -> np.ndarray:
        """Scalar matrix u * I for u a ring element or int."""
        out = self.zero()
        idx = np.arange(self.n)
        if isinstance(u, GaloisRingElement):
            out[idx, idx, :] = np.array(u.coeffs, dtype=np.int64)
        else:
            out[idx, idx, 0] = int(u) % self.mod
        return out

    def entry(self, A, i, j) -> GaloisRingElement:
        return self.witt.elem(tuple(int(c) for c in A[i, j]))

    def set_entry(self, A, i, j, u: GaloisRingElement):
        A[i, j, :] = np.array(u.coeffs, dtype=np.int64)

    # -- arithmetic -------------------------------------------------------------

    def mul(self, A, B) -> np.ndarray:
        A = np.asarray(A)
        B = np.asarray(B)
        m = self.m
        acc = np.zeros(np.broadcast_shapes(A.shape[:-3], B.shape[:-3]) + (self.n, self.n, 2 * m - 1), dtype=np.int64)
        for a in range(m):
            Aa = A[..., a]
            if not Aa.any():
                continue
            for b in range(m):
                Bb = B[..., b]
                if not Bb.any():
                    continue
                acc[..., a + b] += np.matmul(Aa, Bb)
                acc[..., a + b] %= self.mod
        return np.tensordot(acc, self.RED, axes=([-1], [0])) % self.mod

    def add(self, A, B):
        return (A + B) % self.mod

    def sub(self, A, B):
        return (A - B) % self.mod

    def smul_int(self, c, A):
        return (int(c) * A) % self.mod

    def transpose(self, A):
        return np.swapaxes(A, -3, -2)

    def elem_mul(self, u, v) -> np.ndarray:
        """Ring multiplication on coefficient vectors (..., m)."""
        m = self.m
        shape = np.broadcast_shapes(u.shape[:-1], v.shape[:-1])
        acc = np.zeros(shape + (2 * m - 1,), dtype=np.int64)
        for a in range(m):
            for b in range(m):
                acc[..., a + b] += u[..., a] * v[..., b]
        return np.tensordot(acc % self.mod, self.RED, axes=([-1], [0])) % self.mod

    def elem_inv_batched(self, u) -> np.ndarray:
        """Inverses of unit coefficient vectors (..., m)."""
        fq = self.fq()
        red = u % self.p
        pows = self.p ** np.arange(self.m, dtype=np.int64)
        idx = (red * pows).sum(axis=-1)
        inv_idx = fq.INV[idx]
        x = fq.COEFF[inv_idx].astype(np.int64)
        two = np.zeros(self.m, dtype=np.int64)
        two[0] = 2
        for _ in range(3):
            x = self.elem_mul(x, (two - self.elem_mul(u, x)) % self.mod)
        return x

    def fq(self) -> FqSpace:
        if self._fq is None:
            self._fq = FqSpace(self.witt.field)
        return self._fq

    def sigma(self, A, power: int = 1) -> np.ndarray:
        """Entrywise canonical Frobenius lift, iterated `power` times."""
        if self.m == 1 or power % self.m == 0:
            return A % self.mod
        FM = self._frob_power_matrix(power)
        return np.tensordot(A, FM.T, axes=([-1], [0])) % self.mod

    def _frob_power_matrix(self, power: int) -> np.ndarray:
        power = power % self.m
        if power not in self._frob_pows:
            FM = self.witt._frobenius_matrix() % self.mod
            out = np.eye(self.m, dtype=np.int64)
            for _ in range(power):
                out = (FM @ out) % self.mod
            self._frob_pows[power] = out
        return self._frob_pows[power]

    def reduce(self, A, s2: int) -> np.ndarray:
        return A % (self.p**s2)

    def lower(self, s2: int) -> "MatRing":
        return MatRing(get_witt(self.p, self.witt.r, s2), self.n)

    # -- inversion / determinant -------------------------------------------------

    def inv(self, A) -> np.ndarray:
        """Inverse of a single (or batched) invertible matrix via Hensel."""
        from .ring import DomainError

        fq = self.fq()
        single = A.ndim == 3
        B = A[None] if single else A
        pows = self.p ** np.arange(self.m, dtype=np.int64)
        idx = ((B % self.p) * pows).sum(axis=-1).astype(np.int16)
        try:
            inv_field = np.stack([fq.mat_inv(M) for M in idx]).astype(np.int64)
        except ValueError as exc:
            raise DomainError("matrix not invertible") from exc
        X = fq.COEFF[inv_field].astype(np.int64) % self.mod
        I2 = self.identity(batch=(len(B),))
        for _ in range(3):
            X = self.mul(X, (2 * I2 - self.mul(B, X)) % self.mod)
        assert (self.mul(B, X) == I2).all(), "Hensel inversion failed"
        return X[0] if single else X

    def det(self, A) -> GaloisRingElement:
        n = self.n
        import itertools

        total = np.zeros(self.m, dtype=np.int64)
        for perm in itertools.permutations(range(n)):
            sign = _perm_sign(perm)
            term = np.zeros(self.m, dtype=np.int64)
            term[0] = 1
            for i in range(n):
                term = self.elem_mul(term, A[i, perm[i]])
            total = (total + sign * term) % self.mod
        return self.witt.elem(tuple(int(c) for c in total))

    # -- canonical forms -----------------------------------------------------------

    def canonical_bytes(self, A) -> bytes:
        return np.ascontiguousarray(A % self.mod, dtype=np.int64).tobytes()

    def canonicalize_projective(self, A) -> np.ndarray:
        """Scale by the inverse of the first unit entry in row-major order."""
        single = A.ndim == 3
        B = (A[None] if single else A) % self.mod
        k = len(B)
        flat = B.reshape(k, self.n * self.n, self.m)
        unit = (flat % self.p).any(axis=-1)
        assert unit.any(axis=-1).all(), "matrix has no unit entry"
        first = np.argmax(unit, axis=-1)
        lead = flat[np.arange(k), first]
        inv = self.elem_inv_batched(lead)
        out = np.zeros_like(flat)
        m = self.m
        acc = np.zeros((k, self.n * self.n, 2 * m - 1), dtype=np.int64)
        for a in range(m):
            for b in range(m):
                acc[..., a + b] += flat[..., a] * inv[:, None, b]
        out = np.tensordot(acc % self.mod, self.RED, axes=([-1], [0])) % self.mod
        out = out.reshape(B.shape)
        return out[0] if single else out

    # -- field-index views (level 1) ----------------------------------------------

    def to_field_idx(self, A) -> np.ndarray:
        assert self.witt.s == 1
        pows = self.p ** np.arange(self.m, dtype=np.int64)
        return (A * pows).sum(axis=-1).astype(np.int16)

    def from_field_idx(self, idx) -> np.ndarray:
        assert self.witt.s == 1
        fq = self.fq()
        return fq.COEFF[np.asarray(idx, dtype=np.int64)].astype(np.int64)


def _perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign
