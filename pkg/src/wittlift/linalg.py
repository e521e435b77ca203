"""Dense linear algebra over F_p (solver-scale) and F_q (table-scale).

The mod-p side backs the section-splitting solver: an incremental reduced
echelon basis where whole blocks of rows are reduced in one float32 matmul
(entries stay far below 2^24, so the products are exact).

The F_q side works on vectors of field indices with the context's lookup
tables; dimensions there are tiny (Lie algebras up to dim 21) but batches of
vectors can be large (line orbits), so the primitives are vectorized over the
batch axis.
"""

from __future__ import annotations

import numpy as np

from .ring import FieldContext


# ---------------------------------------------------------------------------
# F_p block-elimination
# ---------------------------------------------------------------------------


class ModpEchelon:
    """Reduced row-echelon basis over F_p, grown row-by-row or in blocks.

    Stored rows are normalized (pivot entry 1) and mutually reduced, so a
    whole block reduces against the basis in one matmul.
    """

    def __init__(self, p: int, ncols: int):
        self.p = p
        self.ncols = ncols
        cap = ncols + 1
        self._store = np.zeros((cap, ncols), dtype=np.int64)
        self._pivcol = np.zeros(cap, dtype=np.int64)
        self.k = 0
        self.pivot_of: dict[int, int] = {}

    @property
    def rank(self) -> int:
        return self.k

    def reduce_block(self, block: np.ndarray) -> np.ndarray:
        block = np.asarray(block, dtype=np.int64) % self.p
        if not self.k or not len(block):
            return block
        coef = block[:, self._pivcol[: self.k]].astype(np.float32)
        prod = coef @ self._store[: self.k].astype(np.float32)
        return (block - prod.astype(np.int64)) % self.p

    def reduce_row(self, row: np.ndarray) -> np.ndarray:
        """Full reduction of a single row (one pass suffices: basis is RREF)."""
        return self.reduce_block(row[None, :])[0]

    def insert(self, row: np.ndarray) -> int:
        """Insert a row already fully reduced against the basis; returns pivot."""
        nz = np.nonzero(row)[0]
        piv = int(nz[0])
        inv = pow(int(row[piv]), self.p - 2, self.p)
        row = (row * inv) % self.p
        if self.k:
            coef = self._store[: self.k, piv]
            if coef.any():
                self._store[: self.k] = (self._store[: self.k] - np.outer(coef, row)) % self.p
        self._store[self.k] = row
        self._pivcol[self.k] = piv
        self.pivot_of[piv] = self.k
        self.k += 1
        return piv

    def rows(self) -> np.ndarray:
        return self._store[: self.k]

    def pivots(self) -> list[int]:
        return [int(c) for c in self._pivcol[: self.k]]


def solve_affine_mod_p(p: int, row_blocks, n_unknowns: int):
    """Solve a large affine system over F_p fed as blocks of augmented rows.

    `row_blocks` yields (block, tags): block of shape (m, n_unknowns + 1)
    with the RHS in the last column, tags a per-row identifier sequence.
    Returns ("solution", x, rank) with x a particular solution (free
    variables 0), or ("inconsistent", tag, rank) for the first row that
    reduced to 0 = nonzero.
    """
    ech = ModpEchelon(p, n_unknowns + 1)
    rhs_col = n_unknowns
    for block, tags in row_blocks:
        red = ech.reduce_block(block)
        live = np.nonzero(red.any(axis=1))[0]
        dirty = False
        for i in live:
            row = red[i] if not dirty else ech.reduce_row(red[i])
            nz = np.nonzero(row)[0]
            if not len(nz):
                continue
            if int(nz[0]) == rhs_col:
                return "inconsistent", tags[int(i)], ech.rank
            ech.insert(row)
            dirty = True
    x = np.zeros(n_unknowns, dtype=np.int64)
    for piv, row in zip(ech.pivots(), ech.rows()):
        if piv < n_unknowns:
            x[piv] = row[rhs_col] % p
    return "solution", x, ech.rank


def rref_mod_p(M: np.ndarray, p: int):
    """Plain RREF over F_p for small matrices; returns (R, pivots)."""
    R = np.array(M, dtype=np.int64) % p
    m, n = R.shape
    pivots = []
    r = 0
    for c in range(n):
        pr = None
        for i in range(r, m):
            if R[i, c] % p:
                pr = i
                break
        if pr is None:
            continue
        R[[r, pr]] = R[[pr, r]]
        R[r] = (R[r] * pow(int(R[r, c]), p - 2, p)) % p
        for i in range(m):
            if i != r and R[i, c]:
                R[i] = (R[i] - R[i, c] * R[r]) % p
        pivots.append(c)
        r += 1
        if r == m:
            break
    return R[:r], pivots


def nullspace_mod_p(M: np.ndarray, p: int) -> np.ndarray:
    """Basis (rows) of the right nullspace of M over F_p."""
    M = np.asarray(M, dtype=np.int64) % p
    m, n = M.shape
    R, pivots = rref_mod_p(M, p)
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-R[i, fc]) % p
    return basis


# ---------------------------------------------------------------------------
# F_q vector spaces on index arrays
# ---------------------------------------------------------------------------


class FqSpace:
    """Vector operations over F_q with lookup tables; vectors are int16
    index arrays, batches along the leading axis."""

    def __init__(self, field: FieldContext):
        self.field = field
        self.q = field.q
        self.MUL = field.table("mul")
        self.ADD = field.table("add")
        self.NEG = field.table("neg")
        self.INV = field.table("inv")
        self.REPR = field.table("repr")
        # index -> coefficient vector over F_p
        self.COEFF = np.zeros((self.q, field.r), dtype=np.int64)
        for i in range(self.q):
            self.COEFF[i] = field.from_index(i).coeffs
        self.FROM_COEFF = None

    def vec(self, coords) -> np.ndarray:
        return np.asarray(coords, dtype=np.int16)

    def add(self, u, v):
        return self.ADD[u, v]

    def smul(self, c, v):
        return self.MUL[np.int16(c), v]

    def axpy(self, dst, c, src):
        return self.ADD[dst, self.MUL[np.int16(c), src]]

    def matvec(self, A, v):
        """A (e, d), v (..., d) -> (..., e)."""
        v = np.asarray(v)
        e, d = A.shape
        out = np.zeros(v.shape[:-1] + (e,), dtype=np.int16)
        for i in range(e):
            acc = np.zeros(v.shape[:-1], dtype=np.int16)
            for j in range(d):
                a = A[i, j]
                if a:
                    acc = self.ADD[acc, self.MUL[a, v[..., j]]]
            out[..., i] = acc
        return out

    def matmul(self, A, B):
        d, m = A.shape
        m2, e = B.shape
        assert m == m2
        out = np.zeros((d, e), dtype=np.int16)
        for i in range(d):
            acc = np.zeros(e, dtype=np.int16)
            for j in range(m):
                a = A[i, j]
                if a:
                    acc = self.ADD[acc, self.MUL[a, B[j]]]
            out[i] = acc
        return out

    def rref(self, M):
        """RREF of M (rows of F_q vectors); returns (R, pivots)."""
        R = np.array(M, dtype=np.int16)
        m, n = R.shape
        pivots = []
        r = 0
        for c in range(n):
            pr = None
            for i in range(r, m):
                if R[i, c]:
                    pr = i
                    break
            if pr is None:
                continue
            R[[r, pr]] = R[[pr, r]]
            R[r] = self.smul(self.INV[R[r, c]], R[r])
            for i in range(m):
                if i != r and R[i, c]:
                    R[i] = self.ADD[R[i], self.MUL[self.NEG[R[i, c]], R[r]]]
            pivots.append(c)
            r += 1
            if r == m:
                break
        return R[:r], pivots

    def in_span(self, R, pivots, v) -> bool:
        v = np.array(v, dtype=np.int16)
        for i, c in enumerate(pivots):
            if v[c]:
                v = self.ADD[v, self.MUL[self.NEG[v[c]], R[i]]]
        return not v.any()

    def reduce_vec(self, R, pivots, v):
        v = np.array(v, dtype=np.int16)
        for i, c in enumerate(pivots):
            if v[c]:
                v = self.ADD[v, self.MUL[self.NEG[v[c]], R[i]]]
        return v

    def solve(self, A, b):
        """One solution of A x = b over F_q, or None."""
        A = np.asarray(A, dtype=np.int16)
        b = np.asarray(b, dtype=np.int16)
        m, n = A.shape
        aug = np.zeros((m, n + 1), dtype=np.int16)
        aug[:, :n] = A
        aug[:, n] = b
        R, piv = self.rref(aug)
        x = np.zeros(n, dtype=np.int16)
        for i, c in enumerate(piv):
            if c == n:
                return None
            x[c] = R[i, n]
        return x

    def nullspace(self, A):
        """Rows spanning the right nullspace of A over F_q."""
        A = np.asarray(A, dtype=np.int16)
        m, n = A.shape
        R, pivots = self.rref(A)
        free = [c for c in range(n) if c not in pivots]
        out = np.zeros((len(free), n), dtype=np.int16)
        for k, fc in enumerate(free):
            out[k, fc] = 1
            for i, pc in enumerate(pivots):
                out[k, pc] = self.NEG[R[i, fc]]
        return out

    def mat_inv(self, A):
        A = np.asarray(A, dtype=np.int16)
        d = A.shape[0]
        aug = np.zeros((d, 2 * d), dtype=np.int16)
        aug[:, :d] = A
        for i in range(d):
            aug[i, d + i] = 1
        R, piv = self.rref(aug)
        if piv[:d] != list(range(d)):
            raise ValueError("singular matrix")
        return R[:, d:]

    def canonicalize_lines(self, V):
        """Scale each row so its first nonzero entry is 1; drop zero rows."""
        V = np.asarray(V, dtype=np.int16)
        nz = V != 0
        keep = nz.any(axis=1)
        V = V[keep]
        if not len(V):
            return V
        first = np.argmax(V != 0, axis=1)
        lead = V[np.arange(len(V)), first]
        return self.MUL[self.INV[lead][:, None], V]

    # -- F_p flattening -------------------------------------------------------

    def flatten_vec(self, v) -> np.ndarray:
        """k-vector (d,) -> F_p vector (d*r,), entry coefficients contiguous."""
        v = np.asarray(v, dtype=np.int64)
        return self.COEFF[v].reshape(v.shape[:-1] + (v.shape[-1] * self.field.r,))

    def unflatten_vec(self, w) -> np.ndarray:
        r = self.field.r
        w = np.asarray(w, dtype=np.int64) % self.field.p
        d = w.shape[-1] // r
        coeffs = w.reshape(w.shape[:-1] + (d, r))
        pows = self.field.p ** np.arange(r, dtype=np.int64)
        return (coeffs * pows).sum(axis=-1).astype(np.int16)

    def flatten_mat(self, A) -> np.ndarray:
        """k-linear map (d,d) -> F_p matrix (d*r, d*r) in the same coords."""
        A = np.asarray(A, dtype=np.int64)
        d = A.shape[0]
        r = self.field.r
        out = np.zeros((d * r, d * r), dtype=np.int64)
        for i in range(d):
            for j in range(d):
                if A[i, j]:
                    out[i * r : (i + 1) * r, j * r : (j + 1) * r] = self.REPR[A[i, j]]
        return out
