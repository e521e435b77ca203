"""Integral Chevalley bases from characteristic-0 realizations.

Each supported type is realized concretely: A_n inside sl_{n+1}, C_n inside
sp_{2n} for the anti-diagonal alternating form, G2 as the derivation algebra
of the split octonions (Zorn vector matrices).  Root vectors are computed as
weight spaces of a diagonal Cartan, normalized so that [e_a, e_{-a}] is the
coroot, and the resulting structure constants are asserted to be integers
with |N_{a,b}| = m+1 against the root strings.

The commutator constants of the group identity

    x_a(s) x_b(t) x_a(s)^{-1} x_b(t)^{-1} = prod x_{ia+jb}(m_{a,b;i,j} s^i t^j)

are obtained by an oracle: evaluate the left side at several integer points
in a faithful characteristic-0 representation, peel the right side by exact
Newton sweeps on the nilpotent group, and fit/verify the monomials over the
point set.
"""

from __future__ import annotations

import functools
import itertools
from fractions import Fraction

import numpy as np

from .roots import RootDatum, build_root_system

F0 = Fraction(0)
F1 = Fraction(1)


# ---------------------------------------------------------------------------
# fraction-matrix helpers (lists of lists)
# ---------------------------------------------------------------------------


def fmat(rows):
    return [[Fraction(x) for x in row] for row in rows]


def feye(n):
    return [[F1 if i == j else F0 for j in range(n)] for i in range(n)]


def fzeros(n, m=None):
    m = n if m is None else m
    return [[F0] * m for _ in range(n)]


def fmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = fzeros(n, m)
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            c = ai[t]
            if c:
                bt = b[t]
                for j in range(m):
                    if bt[j]:
                        oi[j] += c * bt[j]
    return out

def fadd(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def fsub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def fscale(c, a):
    c = Fraction(c)
    return [[c * x for x in row] for row in a]


def fbracket(a, b):
    return fsub(fmul(a, b), fmul(b, a))


def fiszero(a):
    return all(x == 0 for row in a for x in row)


def fflat(a):
    return [x for row in a for x in row]


def frref(rows):
    """RREF over Q; returns (rref_rows, pivot_cols)."""
    mat = [row[:] for row in rows]
    nr = len(mat)
    nc = len(mat[0]) if nr else 0
    pivots = []
    r = 0
    for c in range(nc):
        pr = next((i for i in range(r, nr) if mat[i][c] != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = F1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(nr):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return mat[:r], pivots


def fnullspace(rows):
    """Basis of the right nullspace over Q (vectors as lists)."""
    nc = len(rows[0])
    rref, pivots = frref(rows)
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for fc in free:
        v = [F0] * nc
        v[fc] = F1
        for i, pc in enumerate(pivots):
            v[pc] = -rref[i][fc]
        basis.append(v)
    return basis


class FCoords:
    """Exact coordinates with respect to a fixed list of basis vectors."""

    def __init__(self, basis_vectors):
        self.basis = basis_vectors
        self.d = len(basis_vectors)
        n = len(basis_vectors[0])
        aug = [[basis_vectors[j][i] for j in range(self.d)] for i in range(n)]
        rref, pivots = frref([row[:] + [F1 if k == i else F0 for k in range(n)] for i, row in enumerate(aug)])
        # (A | I) -> rref gives solver rows; keep pivot structure
        self._rref = rref
        self._pivots = pivots
        self._n = n

    def coords(self, vec):
        """Solve basis * x = vec; raises if vec is outside the span."""
        # back-substitute using stored rref of (A | I): rref rows are
        # [row of reduced A | transform T] with A_red = T A, so the system
        # A x = v becomes A_red x = T v.
        n, d = self._n, self.d
        tv = []
        red = []
        for row in self._rref:
            red.append(row[:d])
            tv.append(sum(row[d + k] * vec[k] for k in range(n)))
        x = [F0] * d
        for i in reversed(range(len(red))):
            piv = next((j for j in range(d) if red[i][j] != 0), None)
            if piv is None:
                if tv[i] != 0:
                    raise ValueError("vector outside span")
                continue
            s = tv[i]
            for j in range(piv + 1, d):
                s -= red[i][j] * x[j]
            x[piv] = s / red[i][piv]
        # verify (guards against rank deficiency)
        chk = [sum(self.basis[j][k] * x[j] for j in range(d)) for k in range(n)]
        if chk != [Fraction(v) for v in vec]:
            raise ValueError("vector outside span")
        return x


def primitive_integer(vec):
    """Scale a rational vector to a primitive integer vector, first nonzero > 0."""
    from math import gcd, lcm

    dens = [x.denominator for x in vec if x != 0]
    if not dens:
        return [0 for _ in vec]
    m = lcm(*dens) if len(dens) > 1 else dens[0]
    ints = [int(x * m) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    ints = [x // g for x in ints]
    first = next(x for x in ints if x != 0)
    if first < 0:
        ints = [-x for x in ints]
    return ints


# ---------------------------------------------------------------------------
# realizations
# ---------------------------------------------------------------------------


def _sl_realization(datum: RootDatum):
    n = int(datum.label[1]) + 1
    vecs = {}
    for root in datum.roots:
        i = root.index(1)
        j = root.index(-1)
        m = fzeros(n)
        m[i][j] = F1
        vecs[root] = m
    return n, vecs


def _sp_form(n):
    """Anti-diagonal alternating form on 2n coordinates."""
    N = 2 * n
    J = fzeros(N)
    for i in range(n):
        J[i][N - 1 - i] = F1
        J[N - 1 - i][i] = -F1
    return J


def _sp_realization(datum: RootDatum):
    n = int(datum.label[1])
    N = 2 * n
    J = _sp_form(n)
    # basis of sp: solve X^T J + J X = 0
    rows = []
    for a in range(N):
        for b in range(N):
            row = [F0] * (N * N)
            for x in range(N):
                for y in range(N):
                    coef = F0
                    # (X^T J)[a][b] = sum_k X[k][a] J[k][b]
                    if y == a:
                        coef += J[x][b]
                    # (J X)[a][b] = sum_k J[a][k] X[k][b]
                    if y == b:
                        coef += J[a][x]
                    if coef:
                        row[x * N + y] = coef
            rows.append(row)
    basis_vecs = fnullspace(rows)
    assert len(basis_vecs) == n * (2 * n + 1)
    sp_basis = [[v[i * N : (i + 1) * N] for i in range(N)] for v in basis_vecs]
    coords = FCoords([fflat(m) for m in sp_basis])

    def diag_cartan(k):
        m = fzeros(N)
        m[k][k] = F1
        m[N - 1 - k][N - 1 - k] = -F1
        return m

    cartans = [diag_cartan(k) for k in range(n)]
    ad_ops = []
    for D in cartans:
        op = [coords.coords(fflat(fbracket(D, m))) for m in sp_basis]
        ad_ops.append([[op[j][i] for j in range(len(sp_basis))] for i in range(len(sp_basis))])

    vecs = {}
    for root in datum.roots:
        rows = []
        for k in range(n):
            for i in range(len(sp_basis)):
                row = [ad_ops[k][i][j] for j in range(len(sp_basis))]
                row[i] -= Fraction(root[k])
                rows.append(row)
        null = fnullspace(rows)
        assert len(null) == 1, f"root space not 1-dimensional for {root}"
        c = primitive_integer(null[0])
        m = fzeros(N)
        for j, cj in enumerate(c):
            if cj:
                m = fadd(m, fscale(cj, sp_basis[j]))
        vecs[root] = m
    return N, vecs


def _zorn_multiplication():
    """Structure constants of split octonions as Zorn vector matrices.

    Basis order: e1, e2, u1, u2, u3, w1, w2, w3 where a generic element is
    (a, v; w, b) = a*e1 + b*e2 + sum v_i u_i + sum w_i w_i.  The two cross
    product signs are searched and certified by norm multiplicativity.
    """

    def cross(u, v):
        return [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]

    def make_mul(sv, sw):
        def mul(x, y):
            a1, b1, v1, w1 = x[0], x[1], x[2:5], x[5:8]
            a2, b2, v2, w2 = y[0], y[1], y[2:5], y[5:8]
            a = a1 * a2 + sum(p * q for p, q in zip(v1, w2))
            b = b1 * b2 + sum(p * q for p, q in zip(w1, v2))
            cv = cross(w1, w2)
            cw = cross(v1, v2)
            v = [a1 * p + b2 * q + sv * r for p, q, r in zip(v2, v1, cv)]
            w = [b1 * p + a2 * q + sw * r for p, q, r in zip(w2, w1, cw)]
            return [a, b] + v + w

        return mul

    def norm(x):
        return x[0] * x[1] - sum(p * q for p, q in zip(x[2:5], x[5:8]))

    import random

    rng = random.Random(11)
    for sv in (1, -1):
        for sw in (1, -1):
            mul = make_mul(Fraction(sv), Fraction(sw))
            ok = True
            for _ in range(40):
                x = [Fraction(rng.randrange(-3, 4)) for _ in range(8)]
                y = [Fraction(rng.randrange(-3, 4)) for _ in range(8)]
                if norm(mul(x, y)) != norm(x) * norm(y):
                    ok = False
                    break
                xx = mul(x, x)
                if mul(x, mul(x, y)) != mul(xx, y):
                    ok = False
                    break
            if ok:
                return mul
    raise AssertionError("no composition-algebra sign choice found")


def _g2_realization(datum: RootDatum):
    mul = _zorn_multiplication()
    basis8 = [[F1 if i == j else F0 for j in range(8)] for i in range(8)]
    # multiplication tensor
    table = [[mul(basis8[i], basis8[j]) for j in range(8)] for i in range(8)]

    # derivations: D (8x8, D[i][j] = coefficient of basis i in D(basis j))
    rows = []
    for i in range(8):
        for j in range(8):
            prod = table[i][j]
            for k in range(8):
                row = [F0] * 64
                # D(x_i x_j)_k = sum_t prod_t D[k][t]
                for t in range(8):
                    if prod[t]:
                        row[k * 8 + t] += prod[t]
                # (D(x_i) x_j)_k = sum_t D[t][i] (x_t x_j)_k
                for t in range(8):
                    if table[t][j][k]:
                        row[t * 8 + i] -= table[t][j][k]
                # (x_i D(x_j))_k = sum_t D[t][j] (x_i x_t)_k
                for t in range(8):
                    if table[i][t][k]:
                        row[t * 8 + j] -= table[i][t][k]
                rows.append(row)
    null = fnullspace(rows)
    assert len(null) == 14, f"Der(O) has dimension {len(null)}, expected 14"
    der_basis = [[v[i * 8 : (i + 1) * 8] for i in range(8)] for v in null]
    coords = FCoords([fflat(m) for m in der_basis])

    def diag_der(l1, l2, l3):
        m = fzeros(8)
        for idx, lam in ((2, l1), (3, l2), (4, l3)):
            m[idx][idx] = Fraction(lam)
        for idx, lam in ((5, l1), (6, l2), (7, l3)):
            m[idx][idx] = Fraction(-lam)
        return m

    C1 = diag_der(1, -1, 0)
    C2 = diag_der(0, 1, -1)
    for C in (C1, C2):
        coords.coords(fflat(C))  # asserts membership in Der

    d = len(der_basis)
    ops = []
    for C in (C1, C2):
        op = [coords.coords(fflat(fbracket(C, m))) for m in der_basis]
        ops.append([[op[j][i] for j in range(d)] for i in range(d)])

    # weight spaces over a small integer box
    weight_spaces = {}
    for w1 in range(-3, 4):
        for w2 in range(-3, 4):
            rows = []
            for k, wk in ((0, w1), (1, w2)):
                for i in range(d):
                    row = [ops[k][i][j] for j in range(d)]
                    row[i] -= Fraction(wk)
                    rows.append(row)
            null2 = fnullspace(rows)
            if null2:
                weight_spaces[(w1, w2)] = null2
    zero = weight_spaces.pop((0, 0))
    assert len(zero) == 2
    assert len(weight_spaces) == 12 and all(len(v) == 1 for v in weight_spaces.values())

    # identify internal weights with Bourbaki roots via the simple roots
    weights = sorted(weight_spaces)
    f = lambda w: 1000 * w[0] + 999 * w[1]
    positives = [w for w in weights if f(w) > 0]
    assert len(positives) == 6
    pos_set = set(positives)
    simples = [
        w
        for w in positives
        if not any(
            tuple(a + b for a, b in zip(u, v)) == w for u in positives for v in positives
        )
    ]
    assert len(simples) == 2

    def string_pairing(beta, alpha):
        allw = set(weights)
        s = 0
        cur = tuple(b - a for b, a in zip(beta, alpha))
        while cur in allw:
            s += 1
            cur = tuple(c - a for c, a in zip(cur, alpha))
        t = 0
        cur = tuple(b + a for b, a in zip(beta, alpha))
        while cur in allw:
            t += 1
            cur = tuple(c + a for c, a in zip(cur, alpha))
        return s - t

    s1, s2 = simples
    if string_pairing(s2, s1) == -3:
        short_simple, long_simple = s1, s2
    else:
        assert string_pairing(s1, s2) == -3
        short_simple, long_simple = s2, s1
    assert string_pairing(long_simple, short_simple) == -3
    assert string_pairing(short_simple, long_simple) == -1

    b1, b2 = datum.simple  # Bourbaki alpha1 (short), alpha2 (long)
    mapping = {}
    det = short_simple[0] * long_simple[1] - short_simple[1] * long_simple[0]
    assert det != 0
    for w in weights:
        # solve w = c1*short_simple + c2*long_simple over Q
        c1 = Fraction(w[0] * long_simple[1] - w[1] * long_simple[0], det)
        c2 = Fraction(short_simple[0] * w[1] - short_simple[1] * w[0], det)
        assert c1.denominator == 1 and c2.denominator == 1
        target = tuple(int(c1) * x + int(c2) * y for x, y in zip(b1, b2))
        assert datum.is_root(target)
        mapping[w] = target
    assert set(mapping.values()) == set(datum.roots)

    vecs = {}
    for w, root in mapping.items():
        c = primitive_integer(weight_spaces[w][0])
        m = fzeros(8)
        for j, cj in enumerate(c):
            if cj:
                m = fadd(m, fscale(cj, der_basis[j]))
        vecs[root] = m
    return 8, vecs


# ---------------------------------------------------------------------------
# Chevalley data
# ---------------------------------------------------------------------------


class ChevalleyData:
    """Integral Chevalley basis of one type: bracket table, adjoint matrices,
    divided powers, defining-representation root matrices, and the
    commutator-constant oracle."""

    def __init__(self, label: str):
        self.datum = build_root_system(label)
        datum = self.datum
        if label.startswith("A"):
            rep_dim, vecs = _sl_realization(datum)
        elif label.startswith("C"):
            rep_dim, vecs = _sp_realization(datum)
        else:
            rep_dim, vecs = _g2_realization(datum)
        self.rep_dim = rep_dim

        # normalize pairs: [e_a, e_{-a}] must act on e_a with eigenvalue 2
        self.e = {}
        for alpha in datum.positive:
            e = vecs[alpha]
            fneg = vecs[datum.neg(alpha)]
            h = fbracket(e, fneg)
            he = fbracket(h, e)
            c = _proportionality(he, e)
            assert c != 0
            fneg = fscale(Fraction(2) / c, fneg)
            self.e[alpha] = e
            self.e[datum.neg(alpha)] = fneg
        self.h = {alpha: fbracket(self.e[alpha], self.e[datum.neg(alpha)]) for alpha in datum.positive}

        # fixed basis order: coroots of simples, then e over ordered roots
        self.root_order = list(datum.positive) + [datum.neg(a) for a in datum.positive]
        self.basis_labels = [f"h{i+1}" for i in range(datum.rank)] + [
            f"e{list(a)}" for a in self.root_order
        ]
        basis_mats = [self.h[a] for a in datum.simple] + [self.e[a] for a in self.root_order]
        self.dim = len(basis_mats)
        coords = FCoords([fflat(m) for m in basis_mats])

        table = np.zeros((self.dim, self.dim, self.dim), dtype=np.int64)
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                br = fbracket(basis_mats[i], basis_mats[j])
                if fiszero(br):
                    continue
                cc = coords.coords(fflat(br))
                for k, v in enumerate(cc):
                    assert v.denominator == 1, "non-integral structure constant"
                    table[i, j, k] = int(v)
                    table[j, i, k] = -int(v)
        self.bracket_table = table

        self._index = {lbl: i for i, lbl in enumerate(self.basis_labels)}
        self._root_index = {a: datum.rank + i for i, a in enumerate(self.root_order)}

        # adjoint matrices: ad(b_i)[k, j] = c_{i j k}
        self.ad = [table[i].T.copy() for i in range(self.dim)]

        # structure constants and certification |N| = m+1
        self.N = {}
        for a in datum.roots:
            for b in datum.roots:
                s = datum.add(a, b)
                if not datum.is_root(s) or a == datum.neg(b):
                    continue
                k = self._root_index[s]
                val = int(table[self._root_index[a], self._root_index[b], k])
                self.N[(a, b)] = val
                m = datum.string_down(a, b)
                assert abs(val) == m + 1, f"|N|={abs(val)} vs m+1={m+1} for {a},{b}"
        for (a, b), v in self.N.items():
            assert self.N[(b, a)] == -v

        # divided powers of ad(e_a) and nilpotency bounds
        self.divided_powers = {}
        self.nilpotency = {}
        for a in datum.roots:
            A = self.ad[self._root_index[a]]
            self.divided_powers[a] = _divided_powers(A)
            self.nilpotency[a] = len(self.divided_powers[a])
            assert self.nilpotency[a] <= 5

        # defining-representation matrices for the commutator oracle and for
        # the classical matrix groups
        self.rep = {}
        for a in datum.roots:
            m = self.e[a]
            ints = []
            for row in m:
                r = []
                for x in row:
                    assert x.denominator == 1, "defining rep not integral"
                    r.append(int(x))
                ints.append(r)
            self.rep[a] = np.array(ints, dtype=np.int64)
        self.h_rep = {}
        for a in datum.positive:
            hm = self.h[a]
            self.h_rep[a] = np.array([[int(x) for x in row] for row in hm], dtype=np.int64)

        # coroot coefficients: h_alpha = sum_i c_i h_{alpha_i}
        self.coroot_coeffs = {}
        hc = FCoords([fflat(self.h[a]) for a in datum.simple])
        for a in datum.positive:
            cc = hc.coords(fflat(self.h[a]))
            assert all(c.denominator == 1 for c in cc)
            self.coroot_coeffs[a] = tuple(int(c) for c in cc)

        self._mtable_cache: dict[tuple, tuple] = {}

        if label.startswith(("A", "C")):
            for a in datum.roots:
                sq = self.rep[a] @ self.rep[a]
                assert not sq.any(), "defining rep root matrices must square to zero"
            for a in datum.positive:
                assert _is_strictly_upper(self.rep[a]), "positive roots must be upper triangular"

    # -- oracle roots ---------------------------------------------------------

    def oracle_one_param(self, a):
        """x_a(t) in the oracle rep as a list of integer coefficient matrices
        [M_0 = I, M_1, ...] with x_a(t) = sum t^k M_k."""
        if self.datum.label == "G2":
            return self.divided_powers[tuple(a)]
        return [np.eye(self.rep_dim, dtype=np.int64), self.rep[tuple(a)]]

    def x_of(self, a, t: Fraction):
        """x_a(t) as a Fraction matrix in the oracle representation."""
        mats = self.oracle_one_param(a)
        n = mats[0].shape[0]
        out = fzeros(n)
        tp = F1
        for M in mats:
            out = fadd(out, fscale(tp, fmat(M.tolist())))
            tp = tp * t
        return out

    def structure_constant(self, a, b) -> int:
        a, b = tuple(a), tuple(b)
        return self.N.get((a, b), 0)

    # -- commutator constants ---------------------------------------------------

    def kappa(self, a, b):
        """Roots of the form i*a + j*b with i, j >= 1, in the fixed order."""
        out = []
        for i in range(1, 5):
            for j in range(1, 5):
                cand = tuple(i * x + j * y for x, y in zip(a, b))
                if self.datum.is_root(cand):
                    out.append(((i, j), cand))
        out.sort(key=lambda it: (it[0][0] + it[0][1], it[0][0]))
        return out

    def commutator_constants(self, a, b):
        """Table {(i,j): m_{a,b;i,j}} for the fixed (i+j, i) product order."""
        a, b = tuple(a), tuple(b)
        key = (a, b)
        if key in self._mtable_cache:
            return self._mtable_cache[key]
        if b in (a, self.datum.neg(a)):
            raise ValueError("commutator constants need b outside {a, -a}")
        kap = self.kappa(a, b)
        if not kap:
            self._mtable_cache[key] = ((), {})
            return self._mtable_cache[key]
        points = [(1, 1), (2, 1), (1, 2), (2, 3), (3, 2)]
        fits: dict[tuple, set] = {ij: set() for ij, _ in kap}
        for (s, t) in points:
            cs = self._normal_form(a, b, kap, Fraction(s), Fraction(t))
            for ((i, j), _), c in zip(kap, cs):
                mono = Fraction(s) ** i * Fraction(t) ** j
                val = c / mono
                assert val.denominator == 1, "constant fit is not integral"
                fits[(i, j)].add(int(val))
        table = {}
        for ij, vals in fits.items():
            assert len(vals) == 1, f"inconsistent monomial fit at {ij}: {vals}"
            v = vals.pop()
            if v:
                table[ij] = v
        order = tuple(ij for ij, _ in kap)
        self._mtable_cache[key] = (order, table)
        return self._mtable_cache[key]

    def _normal_form(self, a, b, kap, s: Fraction, t: Fraction):
        """Coefficients c_u with prod_u x_{delta_u}(c_u) equal to the commutator
        of x_a(s), x_b(t), solved by exact Newton sweeps."""
        P = _commutator_matrix(self, a, b, s, t)
        rep_mats = [self._oracle_root_matrix(root) for _, root in kap]
        proj = _SpanProjector(rep_mats)
        cs = [F0] * len(kap)
        n = len(P)
        for _ in range(12):
            F = feye(n)
            for c, (_, root) in zip(cs, kap):
                F = fmul(F, self.x_of(root, c))
            Finv = feye(n)
            for c, (_, root) in zip(reversed(cs), reversed(kap)):
                Finv = fmul(Finv, self.x_of(root, -c))
            R = fmul(Finv, P)
            if fiszero(fsub(R, feye(n))):
                return cs
            D = _unipotent_log(R)
            upd = proj.coefficients(D)
            cs = [c + u for c, u in zip(cs, upd)]
        raise AssertionError("normal-form iteration did not converge")

    def _oracle_root_matrix(self, root):
        mats = self.oracle_one_param(root)
        return fmat(mats[1].tolist())


def _commutator_matrix(cd: ChevalleyData, a, b, s: Fraction, t: Fraction):
    xa = cd.x_of(a, s)
    xb = cd.x_of(b, t)
    xai = cd.x_of(a, -s)
    xbi = cd.x_of(b, -t)
    return fmul(fmul(xa, xb), fmul(xai, xbi))


def _unipotent_log(P):
    n = len(P)
    M = fsub(P, feye(n))
    out = fzeros(n)
    term = [row[:] for row in M]
    k = 1
    while not fiszero(term):
        sign = F1 if k % 2 == 1 else -F1
        out = fadd(out, fscale(sign / k, term))
        term = fmul(term, M)
        k += 1
        assert k <= n + 1
    return out


class _SpanProjector:
    """Exact coefficient extraction against a list of independent matrices."""

    def __init__(self, mats):
        self.mats = mats
        self.flat = [fflat(m) for m in mats]
        _, pivots = frref(self.flat)
        self.pivots = pivots
        self.small = [[self.flat[r][c] for r in range(len(mats))] for c in pivots]

    def coefficients(self, M):
        vec = fflat(M)
        rhs = [vec[c] for c in self.pivots]
        rows = [self.small[i][:] + [rhs[i]] for i in range(len(self.pivots))]
        rref, piv = frref(rows)
        k = len(self.mats)
        out = [F0] * k
        for i, c in enumerate(piv):
            assert c < k, "matrix not in span"
            out[c] = rref[i][k]
        # certify exact membership in the span
        for pos in range(len(vec)):
            acc = sum(out[r] * self.flat[r][pos] for r in range(k))
            assert acc == vec[pos], "matrix not in span"
        return out


def _proportionality(m1, m2):
    """c with m1 = c * m2 (m2 nonzero)."""
    for i, row in enumerate(m2):
        for j, x in enumerate(row):
            if x != 0:
                c = m1[i][j] / x
                assert fiszero(fsub(m1, fscale(c, m2)))
                return c
    raise ValueError("zero matrix")


def _divided_powers(A: np.ndarray):
    """[I, A, A^2/2!, ...] until zero; asserts integrality."""
    out = [np.eye(A.shape[0], dtype=np.int64)]
    cur = A.copy()
    fact = 1
    k = 1
    while cur.any():
        assert (cur % fact == 0).all(), "divided power not integral"
        out.append(cur // fact)
        k += 1
        fact *= k
        cur = cur @ A
        assert k <= 10
    return out


def _is_strictly_upper(M: np.ndarray) -> bool:
    n = M.shape[0]
    return all(M[i, j] == 0 for i in range(n) for j in range(n) if j <= i)


@functools.lru_cache(maxsize=None)
def chevalley_data(label: str) -> ChevalleyData:
    return ChevalleyData(label)
