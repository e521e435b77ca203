"""Lie algebras of the catalog groups with their G(k)-action: derived
algebras and centers, images of the simply-connected Lie algebra, short-root
ideals, submodule spinning and lattice queries, and equivariant splitting of
module extensions.

Submodules are k-subspaces.  Enumeration of minimal submodules does not scan
every line: a p-group acting on a nonzero F_p-module has nonzero fixed
vectors, so every minimal G(k)-submodule meets the fixed space of the
unipotent Sylow subgroup and is the spin of a line there; the same argument
through Engel's theorem (annihilator of the positive nilpotent part) covers
bracket ideals.  The literal all-line scan is kept as a cross-check mode.
"""

from __future__ import annotations

import numpy as np

from .linalg import FqSpace
from .ring import DomainError
from .groups import GroupContext, GroupSpec, UNITARY_FAMILIES, get_group

LINE_GUARD = 2 * 10**6


class Submodule:
    """A k-subspace in row-reduced form; rows are vectors of field indices."""

    def __init__(self, fq: FqSpace, rows):
        rows = np.asarray(rows, dtype=np.int16)
        if rows.ndim == 1:
            rows = rows[None, :]
        R, piv = fq.rref(rows)
        self.fq = fq
        self.rows = R
        self.pivots = piv

    @property
    def dim(self) -> int:
        return len(self.rows)

    def key(self) -> bytes:
        return self.rows.astype(np.int16).tobytes()

    def contains(self, vec) -> bool:
        return self.fq.in_span(self.rows, self.pivots, vec)

    def contains_module(self, other: "Submodule") -> bool:
        return all(self.contains(v) for v in other.rows)

    def __eq__(self, other):
        return isinstance(other, Submodule) and self.key() == other.key() and self.rows.shape == other.rows.shape

    def __hash__(self):
        return hash(self.key())


class LieModule:
    def __init__(self, field, dim, labels, bracket_table, generators, u_elements, nplus, nminus, root_vectors, provenance):
        self.fq = FqSpace(field)
        self.field = field
        self.dim = dim
        self.labels = labels
        self.table = bracket_table  # (d, d, d) int16 field indices
        self.generators = generators  # list of (name, matrix, sc_flag)
        self.u_elements = u_elements  # action matrices of all of U(k)
        self.nplus = nplus  # rows spanning Lie(U_1)
        self.nminus = nminus
        self.root_vectors = root_vectors  # dict root -> vector, split only
        self.provenance = provenance
        self._validate()

    # -- construction-time invariants ------------------------------------------

    def _validate(self):
        fq = self.fq
        d = self.dim
        p = self.field.p
        from .linalg import rref_mod_p

        for name, g, _ in self.generators:
            F = fq.flatten_mat(g)
            _, piv = rref_mod_p(F, p)
            assert len(piv) == d * self.field.r, f"action generator {name} not invertible"
        # alternating bracket on basis and random vectors
        for a in range(d):
            assert not self.table[a, a].any()
        rng = np.random.RandomState(3)
        for _ in range(5):
            v = rng.randint(0, self.field.q, size=d).astype(np.int16)
            assert not self.bracket(v, v).any()
        # Jacobi on all basis triples, via ad matrices over F_p flats
        TF = self._flat_table()
        dr = d * self.field.r
        ads = [TF[i].T % p for i in range(dr)]
        for i in range(dr):
            for j in range(i + 1, dr):
                lhs = (ads[i] @ ads[j] - ads[j] @ ads[i]) % p
                rhs = np.zeros((dr, dr), dtype=np.int64)
                coeffs = TF[i, j]
                for k in range(dr):
                    if coeffs[k]:
                        rhs = (rhs + int(coeffs[k]) * ads[k]) % p
                assert (lhs == rhs).all(), "Jacobi identity fails"
        # generators preserve the bracket
        for name, g, _ in self.generators:
            for a in range(d):
                ga = self.fq.matvec(g, _unit(d, a))
                for b in range(a + 1, d):
                    gb = self.fq.matvec(g, _unit(d, b))
                    lhs = self.bracket(ga, gb)
                    rhs = self.fq.matvec(g, self.table[a, b])
                    assert (lhs == rhs).all(), f"{name} does not preserve the bracket"

    _tf_cache = None

    def _flat_table(self):
        if self._tf_cache is not None:
            return self._tf_cache
        d, r, p = self.dim, self.field.r, self.field.p
        dr = d * r
        TF = np.zeros((dr, dr, dr), dtype=np.int64)
        xs = [self.field.from_index(self.field.p**i) if i else self.field.one() for i in range(r)]
        for a in range(d):
            for i in range(r):
                for b in range(d):
                    for j in range(r):
                        vec = self.table[a, b]
                        scal = self.fq.field.index(xs[i] * xs[j])
                        scaled = self.fq.smul(scal, vec)
                        TF[a * r + i, b * r + j] = self.fq.flatten_vec(scaled)
        self._tf_cache = TF % p
        return self._tf_cache

    # -- bracket ------------------------------------------------------------------

    def bracket(self, u, v) -> np.ndarray:
        fq = self.fq
        out = np.zeros(self.dim, dtype=np.int16)
        for a in np.nonzero(u)[0]:
            ua = u[a]
            row = self.table[a]
            for b in np.nonzero(v)[0]:
                coef = fq.MUL[ua, v[b]]
                if coef:
                    out = fq.add(out, fq.smul(coef, row[b]))
        return out

    # -- spinning -------------------------------------------------------------------

    def action_mats(self, which: str = "all"):
        if which == "all":
            return [g for _, g, _ in self.generators]
        if which == "sc":
            return [g for _, g, sc in self.generators if sc]
        raise ValueError(which)

    def spin(self, seeds, which: str = "all") -> Submodule:
        mats = self.action_mats(which)
        return self._spin_mats(seeds, mats)

    def _spin_mats(self, seeds, mats) -> Submodule:
        fq = self.fq
        seeds = np.asarray(seeds, dtype=np.int16).reshape(-1, self.dim)
        span, piv = fq.rref(seeds)
        frontier = list(span)
        while frontier:
            vec = frontier.pop()
            for g in mats:
                img = fq.reduce_vec(span, piv, fq.matvec(g, vec))
                if img.any():
                    span = np.vstack([span, img[None, :]])
                    span, piv = fq.rref(span)
                    frontier.append(img)
        return Submodule(fq, span if len(span) else np.zeros((0, self.dim), dtype=np.int16))

    def bracket_spin(self, seeds) -> Submodule:
        """Smallest ideal containing the seeds (closure under [., basis])."""
        fq = self.fq
        seeds = np.asarray(seeds, dtype=np.int16).reshape(-1, self.dim)
        span, piv = fq.rref(seeds)
        frontier = list(span)
        units = [_unit(self.dim, a) for a in range(self.dim)]
        while frontier:
            vec = frontier.pop()
            for e in units:
                img = fq.reduce_vec(span, piv, self.bracket(e, vec))
                if img.any():
                    span = np.vstack([span, img[None, :]])
                    span, piv = fq.rref(span)
                    frontier.append(img)
        return Submodule(fq, span if len(span) else np.zeros((0, self.dim), dtype=np.int16))

    # -- structural subspaces -----------------------------------------------------

    def derived_subalgebra(self) -> Submodule:
        rows = [self.table[a, b] for a in range(self.dim) for b in range(a + 1, self.dim)]
        sub = Submodule(self.fq, np.array(rows, dtype=np.int16))
        assert self._stable(sub, "all")
        return sub

    def lie_center(self) -> Submodule:
        # v with [v, e_b] = 0 for all b: stack the maps v -> [v, e_b]
        rows = []
        for b in range(self.dim):
            # matrix M_b with M_b[:, a] = [e_a, e_b]
            Mb = self.table[:, b, :].T  # (d out, d in)? table[a,b] is vec of [e_a,e_b]
            rows.append(np.array(Mb, dtype=np.int16))
        stacked = np.concatenate(rows, axis=0)
        null = self.fq.nullspace(stacked)
        sub = Submodule(self.fq, null)
        assert self._stable(sub, "all")
        return sub

    def fixed_space(self, mats) -> Submodule:
        fq = self.fq
        rows = []
        for g in mats:
            m = np.array(g, dtype=np.int16)
            for i in range(self.dim):
                m[i, i] = fq.ADD[m[i, i], fq.NEG[np.int16(1)]]
            rows.append(m)
        null = fq.nullspace(np.concatenate(rows, axis=0)) if rows else np.eye(self.dim, dtype=np.int16)
        return Submodule(fq, null)

    def lambda_image(self) -> Submodule:
        """Subalgebra generated by the nilpotent positive and negative parts."""
        seeds = np.concatenate([self.nplus, self.nminus], axis=0)
        fq = self.fq
        span, piv = fq.rref(seeds)
        changed = True
        while changed:
            changed = False
            cur = list(span)
            for i in range(len(cur)):
                for j in range(i + 1, len(cur)):
                    img = fq.reduce_vec(span, piv, self.bracket(cur[i], cur[j]))
                    if img.any():
                        span = np.vstack([span, img[None, :]])
                        span, piv = fq.rref(span)
                        changed = True
            if changed:
                continue
        sub = Submodule(fq, span)
        assert self._stable(sub, "all")
        der = self.derived_subalgebra()
        assert sub.contains_module(der)
        return sub

    def exceptional_ideal(self, datum) -> Submodule:
        shorts = [tuple(a) for a in datum.roots if datum.is_short(a)]
        if not shorts or self.root_vectors is None:
            raise DomainError("no short-root data for this module")
        seeds = np.array([self.root_vectors[a] for a in shorts], dtype=np.int16)
        sub = self.bracket_spin(seeds)
        assert self._stable(sub, "all")
        return sub

    def _stable(self, sub: Submodule, which) -> bool:
        for g in self.action_mats(which):
            for v in sub.rows:
                if not sub.contains(self.fq.matvec(g, v)):
                    return False
        return True

    # -- lattice queries -------------------------------------------------------------

    def _line_reps(self, space_rows):
        """Canonical representatives of the k-lines of a row-space."""
        fq = self.fq
        k = len(space_rows)
        q = self.field.q
        total = (q**k - 1) // (q - 1)
        if total > LINE_GUARD:
            raise DomainError("line guard exceeded")
        out = []
        # canonical: first nonzero coefficient (in the row basis) equals 1
        for lead in range(k):
            tail = k - lead - 1
            for code in range(q**tail):
                coeffs = np.zeros(k, dtype=np.int16)
                coeffs[lead] = 1
                c = code
                for t in range(tail):
                    coeffs[lead + 1 + t] = c % q
                    c //= q
                vec = np.zeros(self.dim, dtype=np.int16)
                for i, ci in enumerate(coeffs):
                    if ci:
                        vec = fq.add(vec, fq.smul(ci, space_rows[i]))
                out.append(vec)
        return out

    def minimal_submodules(self, which: str = "all", method: str = "fixed") -> list[Submodule]:
        mats = self.action_mats(which)
        if method == "fixed":
            fixed = self.fixed_space(self.u_elements)
            assert fixed.dim > 0
            candidates = self._line_reps(fixed.rows)
        elif method == "lines":
            full = np.eye(self.dim, dtype=np.int16)
            candidates = self._line_reps(full)
        else:
            raise ValueError(method)
        spins = {}
        for vec in candidates:
            sub = self._spin_mats(vec[None, :], mats)
            spins[sub.key()] = sub
        subs = list(spins.values())
        return [s for s in subs if not any(t.dim < s.dim and s.contains_module(t) for t in subs)]

    def minimal_ideals(self, method: str = "fixed") -> list[Submodule]:
        if method == "fixed":
            # Engel: every nonzero ideal meets the annihilator of n+
            rows = []
            for x in self.nplus:
                M = np.zeros((self.dim, self.dim), dtype=np.int16)
                for a in range(self.dim):
                    M[:, a] = self.bracket(x, _unit(self.dim, a))
                rows.append(M.astype(np.int16))
            ann = self.fq.nullspace(np.concatenate(rows, axis=0))
            assert len(ann) > 0
            candidates = self._line_reps(ann)
        elif method == "lines":
            candidates = self._line_reps(np.eye(self.dim, dtype=np.int16))
        else:
            raise ValueError(method)
        spins = {}
        for vec in candidates:
            sub = self.bracket_spin(vec[None, :])
            spins[sub.key()] = sub
        subs = list(spins.values())
        return [s for s in subs if not any(t.dim < s.dim and s.contains_module(t) for t in subs)]

    def is_simple_algebra(self, method: str = "fixed") -> bool:
        mins = self.minimal_ideals(method=method)
        return len(mins) == 1 and mins[0].dim == self.dim

    def maximal_submodules(self, which: str = "all") -> list[Submodule]:
        """Annihilator duals of the minimal submodules of the contragredient."""
        fq = self.fq
        dual_gens = [fq.mat_inv(g).T.copy() for g in self.action_mats(which)]
        dual_u = [fq.mat_inv(g).T.copy() for g in self.u_elements]
        dual = object.__new__(LieModule)
        dual.fq = fq
        dual.field = self.field
        dual.dim = self.dim
        dual.labels = self.labels
        dual.table = self.table  # unused for module spins
        dual.generators = [("dual", g, True) for g in dual_gens]
        dual.u_elements = dual_u
        mins = LieModule.minimal_submodules(dual, which="all", method="fixed")
        out = []
        for m in mins:
            ann = fq.nullspace(m.rows) if m.dim else np.eye(self.dim, dtype=np.int16)
            sub = Submodule(fq, ann)
            assert self._stable(sub, which)
            out.append(sub)
        return out

    def invariant_lines(self, which: str = "sc", method: str = "fixed") -> list[np.ndarray]:
        mats = self.action_mats(which)
        if method == "fixed":
            fixed = self.fixed_space(self.u_elements)
            candidates = self._line_reps(fixed.rows)
        else:
            candidates = self._line_reps(np.eye(self.dim, dtype=np.int16))
        out = []
        for vec in candidates:
            sub = Submodule(self.fq, vec[None, :])
            if all(sub.contains(self.fq.matvec(g, vec)) for g in mats):
                out.append(vec)
        return out

    def supplement_check(self, Z: Submodule, which: str = "sc") -> bool:
        """Is there a proper stable V with V + Z = everything?"""
        assert self._stable(Z, which)
        if Z.dim == self.dim:
            return False  # no proper V needed; vacuous
        for M in self.maximal_submodules(which=which):
            joined = Submodule(self.fq, np.concatenate([M.rows, Z.rows], axis=0))
            if joined.dim == self.dim:
                return True
        return False

    # -- quotients and restrictions ----------------------------------------------------

    def quotient_data(self, N: Submodule):
        """(projection matrix (dq, d), complement positions) for L/N."""
        fq = self.fq
        d = self.dim
        comp = [c for c in range(d) if c not in N.pivots]
        # projection: v -> coefficients on complement coordinates of v reduced mod N
        proj = np.zeros((len(comp), d), dtype=np.int16)
        for a in range(d):
            red = fq.reduce_vec(N.rows, N.pivots, _unit(d, a))
            for i, c in enumerate(comp):
                proj[i, a] = red[c]
        return proj, comp

    def quotient_module(self, N: Submodule) -> "LieModule":
        assert self._stable(N, "all")
        proj, comp = self.quotient_data(N)
        fq = self.fq
        d = self.dim
        dq = len(comp)
        lift = np.zeros((d, dq), dtype=np.int16)
        for i, c in enumerate(comp):
            lift[c, i] = 1
        gens = []
        for name, g, sc in self.generators:
            gq = fq.matmul(proj, fq.matmul(g, lift))
            gens.append((name, gq, sc))
        uq = [fq.matmul(proj, fq.matmul(g, lift)) for g in self.u_elements]
        table = np.zeros((dq, dq, dq), dtype=np.int16)
        for a in range(dq):
            for b in range(dq):
                br = self.bracket(lift[:, a].copy(), lift[:, b].copy())
                table[a, b] = fq.matvec(proj, br)
        out = object.__new__(LieModule)
        out.fq = fq
        out.field = self.field
        out.dim = dq
        out.labels = [f"q{c}" for c in comp]
        out.table = table
        out.generators = gens
        out.u_elements = uq
        out.nplus = np.array([fq.matvec(proj, v) for v in self.nplus], dtype=np.int16)
        out.nminus = np.array([fq.matvec(proj, v) for v in self.nminus], dtype=np.int16)
        out.root_vectors = None
        if self.root_vectors is not None:
            out.root_vectors = {a: fq.matvec(proj, v) for a, v in self.root_vectors.items()}
        out.provenance = self.provenance + f"/mod-{N.dim}"
        out._tf_cache = None
        return out

    def restrict_module(self, W: Submodule, which: str = "all") -> "LieModule":
        assert self._stable(W, which)
        fq = self.fq
        rows = W.rows
        dq = W.dim
        # coordinates: solve v = sum c_i rows_i via pivot reading
        def coords(v):
            out = np.zeros(dq, dtype=np.int16)
            v = v.copy()
            for i, c in enumerate(W.pivots):
                out[i] = v[c]
                if v[c]:
                    v = fq.add(v, fq.smul(fq.NEG[v[c]], rows[i]))
            assert not v.any(), "vector outside the submodule"
            return out

        gens = []
        for name, g, sc in self.generators:
            if not sc and which == "sc":
                continue
            cols = [coords(fq.matvec(g, rows[i])) for i in range(dq)]
            gens.append((name, np.array(cols, dtype=np.int16).T, sc))
        uq = []
        for g in self.u_elements:
            cols = [coords(fq.matvec(g, rows[i])) for i in range(dq)]
            uq.append(np.array(cols, dtype=np.int16).T)
        table = np.zeros((dq, dq, dq), dtype=np.int16)
        for a in range(dq):
            for b in range(dq):
                table[a, b] = coords(self.bracket(rows[a], rows[b]))
        out = object.__new__(LieModule)
        out.fq = fq
        out.field = self.field
        out.dim = dq
        out.labels = [f"r{i}" for i in range(dq)]
        out.table = table
        out.generators = gens
        out.u_elements = uq
        out.nplus = np.zeros((0, dq), dtype=np.int16)
        out.nminus = np.zeros((0, dq), dtype=np.int16)
        out.root_vectors = None
        out.provenance = self.provenance + f"/sub-{dq}"
        out._tf_cache = None
        return out

    # -- extension splitting ---------------------------------------------------------

    def module_extension_splits(self, N: Submodule, which: str = "all") -> bool:
        """Does 0 -> N -> L -> L/N -> 0 split equivariantly over k?"""
        assert self._stable(N, which)
        if N.dim == 0 or N.dim == self.dim:
            return True
        fq = self.fq
        d = self.dim
        proj, comp = self.quotient_data(N)
        dq = len(comp)
        mats = self.action_mats(which)
        gquots = [fq.matmul(proj, fq.matmul(g, _lift_mat(d, comp))) for g in mats]
        # unknowns T (d x dq) over k with proj T = id and g T = T g_quot
        rows_k = []
        rhs_k = []
        nunk = d * dq

        def unk(a, b):
            return a * dq + b

        for g, gq in zip(mats, gquots):
            for i in range(d):
                for j in range(dq):
                    row = np.zeros(nunk, dtype=np.int16)
                    for a in range(d):
                        if g[i, a]:
                            row[unk(a, j)] = fq.ADD[row[unk(a, j)], g[i, a]]
                    for b in range(dq):
                        if gq[b, j]:
                            row[unk(i, b)] = fq.ADD[row[unk(i, b)], fq.NEG[gq[b, j]]]
                    if row.any():
                        rows_k.append(row)
                        rhs_k.append(0)
        for i in range(dq):
            for j in range(dq):
                row = np.zeros(nunk, dtype=np.int16)
                for a in range(d):
                    if proj[i, a]:
                        row[unk(a, j)] = proj[i, a]
                rows_k.append(row)
                rhs_k.append(1 if i == j else 0)
        A = np.array(rows_k, dtype=np.int16)
        b = np.array(rhs_k, dtype=np.int16)
        x = fq.solve(A, b)
        if x is None:
            return False
        # verify the section
        T = x.reshape(d, dq)
        for g, gq in zip(mats, gquots):
            assert (fq.matmul(np.array(g, dtype=np.int16), T) == fq.matmul(T, gq)).all()
        assert (fq.matmul(proj, T) == np.eye(dq, dtype=np.int16)).all()
        return True


def _unit(d, a):
    v = np.zeros(d, dtype=np.int16)
    v[a] = 1
    return v


def _lift_mat(d, comp):
    lift = np.zeros((d, len(comp)), dtype=np.int16)
    for i, c in enumerate(comp):
        lift[c, i] = 1
    return lift


# ---------------------------------------------------------------------------
# module construction from group contexts
# ---------------------------------------------------------------------------


def lie_module_of(spec: GroupSpec, provenance: str | None = None) -> LieModule:
    """The level-1 Lie algebra of the family with its G(k)-action."""
    assert spec.s == 1
    ctx2 = get_group(spec.at_level(2))
    ctx1 = get_group(spec)
    ld = ctx2.lie_data()
    field = ctx1.field
    fq = FqSpace(field)
    d = ld.kdim
    r = field.r

    def to_kvec(flat):
        return fq.unflatten_vec(np.asarray(flat, dtype=np.int64))

    def kernel_kvec(arr1):
        # coordinates of a level-1 Lie matrix
        from .groups import _normalize_kernel_batch

        W = _normalize_kernel_batch(ctx2, arr1[None])[0]
        w = W.reshape(-1) % spec.p
        x = (ld.K @ w[ld.pivots]) % spec.p
        assert ((x @ ld.flats) % spec.p == w).all()
        return to_kvec(x)

    def ad_kmat(g1arr):
        F = ld.ad_matrix(g1arr)
        cols = []
        for b in range(d):
            col = F[:, b * r]
            cols.append(to_kvec(col))
        M = np.array(cols, dtype=np.int16).T
        return M

    # bracket table: matrix commutators of the k-basis (gauge-normalized)
    R1 = ctx2.R1
    table = np.zeros((d, d, d), dtype=np.int16)
    if spec.family == "G2adjoint":
        cd = ctx2.cd
        table_int = cd.bracket_table % spec.p
        for a in range(d):
            for b in range(d):
                table[a, b] = to_kvec(np.concatenate([_coeff_embed(int(c), r) for c in table_int[a, b]]))
    else:
        for a in range(d):
            for b in range(a + 1, d):
                Da, Db = ld.kbasis[a], ld.kbasis[b]
                br = (R1.mul(Da, Db) - R1.mul(Db, Da)) % R1.mod
                vec = kernel_kvec(br)
                table[a, b] = vec
                table[b, a] = fq.NEG[vec]

    # generators: sc part from the cover family, extras from the family itself
    cover = {"PGL": "SL", "GL": "SL", "PGSp": "Sp", "GSp": "Sp", "PGU": "SU", "GU": "SU"}.get(spec.family)
    gens = []
    seen = set()
    if cover:
        cov_ctx = get_group(GroupSpec(cover, spec.n, spec.p, spec.r, 1, spec.form))
        for name, g in cov_ctx.generators():
            M = ad_kmat(g.arr)
            gens.append((f"sc:{name}", M, True))
            seen.add(name)
        for name, g in ctx1.generators():
            if name in ("torus", "similitude") or name.startswith(("t", "w")) and spec.family in UNITARY_FAMILIES:
                M = ad_kmat(g.arr)
                gens.append((name, M, False))
    else:
        for name, g in ctx1.generators():
            M = ad_kmat(g.arr)
            gens.append((name, M, True))

    # all of U(k) acting (for fixed-space computations)
    u_mats = [ad_kmat(el.arr) for _, el in ctx1.unipotent_sylow()]

    # nilpotent parts
    if spec.family in UNITARY_FAMILIES:
        nplus = _triangular_part(ld, fq, d, r, upper=True)
        nminus = _triangular_part(ld, fq, d, r, upper=False)
        root_vectors = None
    elif spec.family == "G2adjoint":
        datum = ctx1.datum
        root_vectors = {}
        nplus_rows, nminus_rows = [], []
        for i, a in enumerate(ctx2.cd.root_order):
            vec = np.zeros(d, dtype=np.int16)
            vec[ctx1.datum.rank + i] = 1
            root_vectors[a] = vec
            (nplus_rows if datum.is_positive(a) else nminus_rows).append(vec)
        nplus = np.array(nplus_rows, dtype=np.int16)
        nminus = np.array(nminus_rows, dtype=np.int16)
    else:
        datum = ctx1.datum
        root_vectors = {}
        nplus_rows, nminus_rows = [], []
        for a in datum.roots:
            arr = R1.from_int_matrix(ctx1.cd.rep[a])
            vec = kernel_kvec(arr)
            root_vectors[a] = vec
            (nplus_rows if datum.is_positive(a) else nminus_rows).append(vec)
        nplus = np.array(nplus_rows, dtype=np.int16)
        nminus = np.array(nminus_rows, dtype=np.int16)

    labels = [f"b{i}" for i in range(d)]
    return LieModule(
        field, d, labels, table, gens, u_mats, nplus, nminus, root_vectors, provenance or spec.key()
    )


def _coeff_embed(c, r):
    out = np.zeros(r, dtype=np.int64)
    out[0] = c
    return out


def _triangular_part(ld, fq, d, r, upper: bool):
    """Basis of the strictly upper (or lower) triangular Lie vectors."""
    rows_conditions = []
    n = ld.mats[0].shape[0]
    m = ld.mats[0].shape[-1]
    mask = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            if (j <= i) if upper else (j >= i):
                mask[i, j] = True
    # solve over F_p for flats combinations vanishing on masked positions
    A = []
    for flat, mat in zip(ld.flats, ld.mats):
        A.append(mat[mask].reshape(-1))
    A = np.array(A, dtype=np.int64).T % ld.p
    from .linalg import nullspace_mod_p

    null = nullspace_mod_p(A, ld.p)
    out = []
    span = None
    for v in null:
        kv = fq.unflatten_vec(v)
        out.append(kv)
    if not out:
        return np.zeros((0, d), dtype=np.int16)
    sub, _ = fq.rref(np.array(out, dtype=np.int16))
    return sub
