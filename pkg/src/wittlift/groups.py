"""Matrix groups over W_s(F_q): split families SL/GL/Sp/GSp and the adjoint
G2 Chevalley group, quasi-split unitary SU/GU over the quadratic extension,
and their projective quotients as matrix classes modulo unit scalars.

A group element is a matrix over the entry ring (the quadratic extension
ring for unitary families); projective elements are stored as the canonical
representative whose first unit entry in row-major order is 1.  The kernel
of reduction to the residue field is identified with the Lie algebra through
I + p*X, and all Lie-level plumbing (coordinates, adjoint action) lives here.
"""

from __future__ import annotations

import functools
import itertools
import os
import pickle
from dataclasses import dataclass, replace

import numpy as np

from .chevalley import chevalley_data
from .linalg import rref_mod_p
from .matring import MatRing
from .ring import DomainError, embed_field, get_field, get_witt

SPLIT_FAMILIES = ("SL", "GL", "PGL", "Sp", "GSp", "PGSp", "G2adjoint")
UNITARY_FAMILIES = ("SU", "GU", "PGU")
PROJECTIVE = ("PGL", "PGSp", "PGU")
FAMILIES = SPLIT_FAMILIES + UNITARY_FAMILIES

BFS_GUARD = 10**6

CATALOG = {
    ("SL", 2), ("SL", 3), ("SL", 4),
    ("GL", 2), ("GL", 3), ("GL", 4),
    ("PGL", 2), ("PGL", 3), ("PGL", 4),
    ("Sp", 4), ("GSp", 4), ("PGSp", 4), ("Sp", 6), ("GSp", 6), ("PGSp", 6),
    ("SU", 3), ("SU", 4), ("GU", 3), ("GU", 4), ("PGU", 3), ("PGU", 4),
    ("G2adjoint", 14),
}


@dataclass(frozen=True)
class GroupSpec:
    family: str
    n: int
    p: int
    r: int
    s: int
    form: str = "antidiag"

    @property
    def q(self) -> int:
        return self.p**self.r

    def key(self) -> str:
        tag = f"{self.family}{self.n if self.family != 'G2adjoint' else ''}"
        base = f"w{self.s}(f{self.q})"
        suffix = "" if self.form == "antidiag" else f"-{self.form}"
        return f"{tag}/{base}{suffix}"

    def at_level(self, s: int) -> "GroupSpec":
        return replace(self, s=s)


def root_type(spec: GroupSpec) -> str:
    if spec.family == "G2adjoint":
        return "G2"
    if spec.family in ("Sp", "GSp", "PGSp"):
        return f"C{spec.n // 2}"
    return f"A{spec.n - 1}"


class GroupElement:
    __slots__ = ("ctx", "arr", "_bytes")

    def __init__(self, ctx: "GroupContext", arr: np.ndarray):
        self.ctx = ctx
        self.arr = arr
        self._bytes: bytes | None = None

    @property
    def key(self) -> bytes:
        if self._bytes is None:
            self._bytes = self.ctx.R.canonical_bytes(self.arr)
        return self._bytes

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.ctx is other.ctx and self.key == other.key

    def __hash__(self):
        return hash((id(self.ctx), self.key))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        assert self.ctx is other.ctx, "context mismatch"
        return self.ctx.make(self.ctx.R.mul(self.arr, other.arr))

    def inv(self) -> "GroupElement":
        return self.ctx.make(self.ctx.R.inv(self.arr))

    def encode(self):
        """Row-major nested list of ring-element encodings."""
        n = self.ctx.R.n
        return [[self.ctx.R.entry(self.arr, i, j).encode() for j in range(n)] for i in range(n)]

    def __repr__(self):
        return f"<{self.ctx.spec.key()} element>"


class GroupContext:
    def __init__(self, spec: GroupSpec):
        if (spec.family, spec.n) not in CATALOG:
            raise ValueError(f"unsupported family {spec.family}_{spec.n}")
        if spec.form != "antidiag" and (spec.family, spec.n) not in {("Sp", 4), ("GSp", 4), ("PGSp", 4)}:
            raise ValueError("alternative form only supported for the 4-dimensional symplectic families")
        self.spec = spec
        self.base = get_witt(spec.p, spec.r, spec.s)
        self.field = self.base.field
        entry_deg = 2 * spec.r if spec.family in UNITARY_FAMILIES else spec.r
        self.entry_ring = get_witt(spec.p, entry_deg, spec.s)
        self.entry_field = self.entry_ring.field
        self.R = MatRing(self.entry_ring, spec.n)
        self.R1 = MatRing(get_witt(spec.p, entry_deg, 1), spec.n)
        self.sigma_power = spec.r if spec.family in UNITARY_FAMILIES else 0
        self.projective = spec.family in PROJECTIVE
        self.cd = chevalley_data(root_type(spec))
        self.datum = self.cd.datum
        self.J = self._gram_matrix()
        self._lie = None
        self._unipotent = None
        self._generators = None
        self._bfs = None

    # -- plumbing ----------------------------------------------------------------

    def make(self, arr: np.ndarray) -> GroupElement:
        if self.projective:
            arr = self.R.canonicalize_projective(arr)
        return GroupElement(self, arr % self.R.mod)

    def identity(self) -> GroupElement:
        return self.make(self.R.identity())

    def _gram_matrix(self):
        n = self.spec.n
        fam = self.spec.family
        if fam in ("Sp", "GSp", "PGSp"):
            if self.spec.form == "shift2":
                J = np.zeros((n, n), dtype=np.int64)
                for i in range(n):
                    if i + 2 < n:
                        J[i, i + 2] = 1
                        J[i + 2, i] = -1
                return self.R.from_int_matrix(J)
            J = np.zeros((n, n), dtype=np.int64)
            for i in range(n // 2):
                J[i, n - 1 - i] = 1
                J[n - 1 - i, i] = -1
            return self.R.from_int_matrix(J)
        if fam in UNITARY_FAMILIES:
            J = np.zeros((n, n), dtype=np.int64)
            for i in range(n):
                J[i, n - 1 - i] = 1
            return self.R.from_int_matrix(J)
        return None

    # -- membership ----------------------------------------------------------------

    def similitude(self, arr) -> tuple[bool, object]:
        """(member, mu) for the Gram identity sigma(A)^T J A = mu J."""
        R = self.R
        A = arr
        left = R.mul(R.transpose(R.sigma(A, self.sigma_power)), R.mul(self.J, A))
        n = self.spec.n
        i0, j0 = next((i, j) for i in range(n) for j in range(n) if self.J[i, j].any())
        j_el = R.entry(self.J, i0, j0)
        val = R.entry(left, i0, j0)
        if not j_el.is_unit():
            return False, None
        mu = val * j_el.inv()
        if not mu.is_unit():
            return False, None
        target = R.mul(R.scalar(mu), self.J)
        return (left == target).all(), mu

    def is_member(self, arr) -> bool:
        fam = self.spec.family
        R = self.R
        if self.projective:
            # class membership: unit scalars preserve the cover equations
            arr = R.canonicalize_projective(arr)
        if fam == "G2adjoint":
            return True  # word-generated family; bracket preservation is spot-checked in tests
        if fam in ("SL", "GL", "PGL"):
            d = R.det(arr)
            return d == self.entry_ring.one() if fam == "SL" else d.is_unit()
        ok, mu = self.similitude(arr)
        if not ok:
            return False
        if fam in ("Sp", "SU"):
            if mu != self.entry_ring.one():
                return False
            if fam == "SU" and R.det(arr) != self.entry_ring.one():
                return False
            return True
        if fam in ("GSp", "PGSp"):
            return True
        if fam in ("GU", "PGU"):
            return self.entry_ring.frobenius(mu, self.sigma_power) == mu
        raise AssertionError(fam)

    # -- root elements and generators ------------------------------------------------

    def root_element(self, alpha, t) -> GroupElement:
        """x_alpha(t) for split families; t is a base-ring element."""
        if self.spec.family in UNITARY_FAMILIES:
            raise DomainError("root elements are only defined for split families")
        alpha = tuple(alpha)
        arr = self.R.identity()
        if self.spec.family == "G2adjoint":
            dps = self.cd.divided_powers[alpha]
            tp = self.base.one()
            for k in range(1, len(dps)):
                tp = tp * t
                arr = (arr + np.tensordot(dps[k] % self.R.mod, np.array(tp.coeffs, dtype=np.int64), axes=0)) % self.R.mod
        else:
            mat = self.cd.rep[alpha]
            arr = (arr + np.tensordot(mat % self.R.mod, np.array(t.coeffs, dtype=np.int64), axes=0)) % self.R.mod
        return self.make(arr)

    def field_basis(self):
        return [self.field.from_index(self.field.p**i) for i in range(self.field.r)]

    def generators(self) -> list[tuple[str, GroupElement]]:
        if self._generators is not None:
            return self._generators
        fam = self.spec.family
        gens: list[tuple[str, GroupElement]] = []
        if fam in UNITARY_FAMILIES:
            gens = self._unitary_generators()
        else:
            for alpha in self.datum.simple + [self.datum.neg(a) for a in self.datum.simple]:
                for b in self.field_basis():
                    t = self.base.lift_field(b)
                    gens.append((f"x{list(alpha)}({b.encode()})", self.root_element(alpha, t)))
            if fam in ("GL", "PGL"):
                u = self.base.teichmuller(self.field.gen)
                arr = self.R.identity()
                self.R.set_entry(arr, 0, 0, _embed_ring(u, self.entry_ring))
                gens.append(("torus", self.make(arr)))
            if fam in ("GSp", "PGSp"):
                u = self.base.teichmuller(self.field.gen)
                arr = self.R.identity()
                ue = _embed_ring(u, self.entry_ring)
                for i in range(self.spec.n // 2):
                    self.R.set_entry(arr, i, i, ue)
                gens.append(("similitude", self.make(arr)))
        self._generators = gens
        for name, g in gens:
            assert self.is_member(g.arr), f"generator {name} fails membership"
        return gens

    def _unitary_generators(self):
        gens = []
        ident = self.identity()
        for i, (coords, el) in enumerate(self.unipotent_sylow()):
            if el != ident:
                gens.append((f"u+{i}", el))
        for i, (coords, el) in enumerate(self._unitriangular(lower=True)):
            if el != ident:
                gens.append((f"u-{i}", el))
        for i, el in enumerate(self._unitary_diagonals()):
            if el != ident:
                gens.append((f"t{i}", el))
        w = self._unitary_weyl()
        if w is not None:
            gens.append(("w", w))
        return gens

    def _unitary_diagonals(self):
        """All diagonal members (the torus is small at these field sizes)."""
        n = self.spec.n
        out = []
        units = [e for e in self.entry_ring.field.elements() if e]
        for combo in itertools.product(units, repeat=n):
            arr = self.R1.identity()
            for i, u in enumerate(combo):
                self.R1.set_entry(arr, i, i, get_witt(self.entry_ring.p, self.entry_ring.r, 1).lift_field(u))
            if self._member_level1(arr):
                lifted = self._lift_diag_level(combo)
                out.append(self.make(lifted))
        return out

    def _lift_diag_level(self, combo):
        arr = self.R.identity()
        for i, u in enumerate(combo):
            self.R.set_entry(arr, i, i, self.entry_ring.teichmuller(u))
        return arr

    def _member_level1(self, arr) -> bool:
        ctx1 = get_group(self.spec.at_level(1))
        return ctx1.is_member(arr)

    def _unitary_weyl(self):
        """A monomial member supported on the anti-diagonal, if any."""
        n = self.spec.n
        units = [e for e in self.entry_ring.field.elements() if e]
        for combo in itertools.product(units, repeat=n):
            arr = self.R.zero()
            for i, u in enumerate(combo):
                self.R.set_entry(arr, i, n - 1 - i, self.entry_ring.teichmuller(u))
            if self.is_member(arr):
                return self.make(arr)
        return None

    # -- reduction and kernel ---------------------------------------------------------

    def reduced_context(self) -> "GroupContext":
        assert self.spec.s >= 2
        return get_group(self.spec.at_level(self.spec.s - 1))

    def reduce_element(self, g: GroupElement) -> GroupElement:
        low = self.reduced_context()
        return low.make(g.arr % low.R.mod)

    # Lie data ----------------------------------------------------------------

    def lie_data(self) -> "LieData":
        if self._lie is None:
            self._lie = LieData(self)
        return self._lie

    def kernel_vector(self, g: GroupElement) -> np.ndarray:
        return self.lie_data().kernel_vector(g.arr)

    def lie_lift(self, vec) -> GroupElement:
        return self.make(self.lie_data().lift(vec))

    def adjoint_action(self, gbar: GroupElement, vec) -> np.ndarray:
        """AD of a level-1 element on F_p-flattened Lie coordinates."""
        assert self.spec.s == 1
        ld = get_group(self.spec.at_level(2)).lie_data()
        return ld.ad_matrix(gbar.arr) @ np.asarray(vec) % self.spec.p

    # -- unipotent subgroups ----------------------------------------------------------

    def unipotent_sylow(self):
        """List of (coords, element) for U(k) in the fixed normal form, at
        this context's level.  Coordinates are field elements per positive
        root (split) or per strictly-upper entry (unitary)."""
        if self._unipotent is None:
            if self.spec.family in UNITARY_FAMILIES:
                self._unipotent = self._unitriangular(lower=False)
            else:
                self._unipotent = self._split_unipotent()
            expected = self.field.q ** len(self.datum.positive)
            assert len(self._unipotent) == expected, "unipotent order mismatch"
            keys = {el.key for _, el in self._unipotent}
            assert len(keys) == expected, "normal form is not injective"
        return self._unipotent

    def _split_unipotent(self):
        roots = self.datum.positive
        out = [((), self.identity())]
        for alpha in roots:
            nxt = []
            for coords, el in out:
                for t in self.field.elements():
                    te = self.base.teichmuller(t) if self.spec.s > 1 else self.base.lift_field(t)
                    nxt.append((coords + (t,), el * self.root_element(alpha, te)))
            out = nxt
        return out

    def _unitriangular(self, lower: bool):
        n = self.spec.n
        positions = [(i, j) for i in range(n) for j in range(i + 1, n)]
        if lower:
            positions = [(j, i) for (i, j) in positions]
        kf = self.entry_ring.field
        lvl1 = get_witt(self.entry_ring.p, self.entry_ring.r, 1)
        ctx1 = get_group(self.spec.at_level(1)) if self.spec.s > 1 else self
        out = []
        for combo in itertools.product(list(kf.elements()), repeat=len(positions)):
            arr1 = ctx1.R.identity()
            for (i, j), u in zip(positions, combo):
                ctx1.R.set_entry(arr1, i, j, lvl1.lift_field(u))
            if ctx1.is_member(arr1):
                if self.spec.s == 1:
                    out.append((combo, self.make(arr1)))
                else:
                    out.append((combo, self.make(self._unitary_lift(arr1))))
        return out

    def _unitary_lift(self, arr1) -> np.ndarray:
        """Entrywise Teichmuller lift corrected inside the kernel coset so the
        membership equations hold at the full level."""
        R = self.R
        n = self.spec.n
        lvl1 = get_witt(self.entry_ring.p, self.entry_ring.r, 1)
        a0 = R.zero()
        for i in range(n):
            for j in range(n):
                u = lvl1.elem(tuple(int(c) for c in arr1[i, j]))
                a0[i, j, :] = np.array(self.entry_ring.teichmuller(lvl1.to_field(u)).coeffs, dtype=np.int64)
        if self.is_member(a0):
            return a0
        corrected = _gram_correction(self, a0)
        assert self.is_member(corrected), "kernel-coset correction failed"
        return corrected

    def some_lift(self, g1: GroupElement) -> GroupElement:
        """Some member of this level reducing to the given level-(s-1)
        element: entrywise Teichmuller lift plus a linear correction."""
        assert self.spec.s >= 2
        fam = self.spec.family
        if fam == "G2adjoint":
            raise DomainError("general lifts for the word-generated family are not supported")
        base = (g1.arr % g1.ctx.R.mod).astype(np.int64) % self.R.mod
        if fam in ("GL", "PGL"):
            out = self.make(base)
        elif fam == "SL":
            d = self.R.det(base)
            dd = (np.array(d.coeffs, dtype=np.int64) - np.array(self.entry_ring.one().coeffs, dtype=np.int64)) % self.R.mod
            low = self.spec.p ** (self.spec.s - 1)
            assert (dd % low == 0).all()
            corr = self.R.identity()
            corr[0, 0, :] = (corr[0, 0, :] - dd) % self.R.mod
            out = self.make(self.R.mul(base, corr))
        else:
            out = self.make(_gram_correction(self, base))
        assert self.is_member(out.arr)
        assert self.reduce_element(out) == g1
        return out

    def lift_unipotent(self, coords, roots=None) -> GroupElement:
        """Teichmuller-coordinate lift of a level-1 unipotent normal form.

        `coords` are the normal-form coordinates (per positive root for split
        families, per strictly-upper entry for unitary ones); `roots` selects
        a sub-product for restricted subgroups (split families only).
        """
        assert self.spec.s >= 2
        if self.spec.family in UNITARY_FAMILIES:
            n = self.spec.n
            positions = [(i, j) for i in range(n) for j in range(i + 1, n)]
            lvl1 = get_witt(self.entry_ring.p, self.entry_ring.r, 1)
            ctx1 = get_group(self.spec.at_level(1))
            arr1 = ctx1.R.identity()
            for (i, j), u in zip(positions, coords):
                ctx1.R.set_entry(arr1, i, j, lvl1.lift_field(u))
            return self.make(self._unitary_lift(arr1))
        roots = list(roots) if roots is not None else self.datum.positive
        el = self.identity()
        for alpha, t in zip(roots, coords):
            el = el * self.root_element(alpha, self.base.teichmuller(t))
        return el

    def subgroup_unipotent(self, pos_subset):
        """Sub-Sylow for an addition-closed symmetric root subset.

        For split families pos_subset is a list of positive roots; for
        unitary families a list of absolute positive roots of A_{n-1},
        selecting strictly-upper entry positions."""
        if self.spec.family in UNITARY_FAMILIES:
            positions = set()
            n = self.spec.n
            for root in pos_subset:
                root = tuple(root)
                i = root.index(1)
                j = root.index(-1)
                assert i < j
                positions.add((i, j))
            _check_subset_closed(self.datum, pos_subset)
            poslist = [(i, j) for i in range(n) for j in range(i + 1, n)]
            out = []
            for coords, el in self.unipotent_sylow():
                support = {poslist[k] for k, c in enumerate(coords) if c}
                if support <= positions:
                    out.append((coords, el))
            _check_closed_under_mult(out)
            return out
        pos_subset = [tuple(a) for a in pos_subset]
        _check_subset_closed(self.datum, pos_subset)
        sub = [a for a in self.datum.positive if a in _positive_closure(self.datum, pos_subset)]
        out = [((), self.identity())]
        for alpha in sub:
            nxt = []
            for coords, el in out:
                for t in self.field.elements():
                    te = self.base.teichmuller(t) if self.spec.s > 1 else self.base.lift_field(t)
                    nxt.append((coords + (t,), el * self.root_element(alpha, te)))
            out = nxt
        _check_closed_under_mult(out)
        return out

    # -- enumeration --------------------------------------------------------------

    def order_polynomial(self) -> int:
        return order_polynomial(self.spec.family, self.spec.n, self.field.q)

    def sylow_order(self) -> int:
        return self.field.q ** len(self.datum.positive)

    def bfs_enumerate(self, guard: int = BFS_GUARD):
        """Complete level-1 enumeration; returns (order, index dict)."""
        assert self.spec.s == 1, "enumeration is a level-1 operation"
        if self._bfs is not None:
            return self._bfs
        expected = self.order_polynomial()
        if expected > guard:
            raise DomainError(f"order guard exceeded: {expected} > {guard}")
        cached = _bfs_cache_load(self.spec)
        if cached is not None:
            self._bfs = cached
            return cached
        gens = [g.arr for _, g in self.generators()]
        index: dict[bytes, int] = {}
        ident = self.identity().arr
        index[self.R.canonical_bytes(ident)] = 0
        frontier = ident[None, :]
        while len(frontier):
            new = []
            for g in gens:
                batch = self.R.mul(frontier, g[None, :])
                if self.projective:
                    batch = self.R.canonicalize_projective(batch)
                new.append(batch)
            fresh = []
            for batch in new:
                for mat in batch:
                    key = self.R.canonical_bytes(mat)
                    if key not in index:
                        index[key] = len(index)
                        fresh.append(mat)
            frontier = np.array(fresh) if fresh else np.zeros((0,) + ident.shape, dtype=np.int64)
            if len(index) > guard:
                raise DomainError("order guard exceeded during enumeration")
        assert len(index) == expected, f"BFS order {len(index)} != polynomial {expected}"
        self._bfs = (len(index), index)
        _bfs_cache_store(self.spec, self._bfs)
        return self._bfs


# ---------------------------------------------------------------------------
# Lie data: kernel coordinates, lifts, adjoint action
# ---------------------------------------------------------------------------


class LieData:
    """Level-1 Lie algebra of the family, as kernel coordinates for the
    reduction G(W_s) -> G(W_{s-1}) at s = 2 (and coordinate plumbing for any
    level)."""

    def __init__(self, ctx: GroupContext):
        self.ctx = ctx
        self.p = ctx.spec.p
        self.kdim, self.kbasis = _lie_basis(ctx)
        self.r = ctx.field.r
        self.dim_fp = self.kdim * self.r
        # F_p flats: rows (b, i) = flatten(x^i * D_b)
        flats = []
        self.mats = []
        for D in self.kbasis:
            for i in range(self.r):
                xi = self.ctx.field.from_index(self.ctx.field.p**i) if i else self.ctx.field.one()
                scaled = _entry_scale(ctx, D, xi)
                flats.append(scaled.reshape(-1))
                self.mats.append(scaled)
        B = np.array(flats, dtype=np.int64) % self.p
        self.flats = B
        R, piv = rref_mod_p(B, self.p)
        assert len(piv) == self.dim_fp, "Lie basis is linearly dependent"
        self.pivots = piv
        sub = B[:, piv]
        self.K = _inv_mod_p(sub.T, self.p)

    def kernel_vector(self, arr) -> np.ndarray:
        R = self.ctx.R
        if self.ctx.projective:
            arr = R.canonicalize_projective(arr)
        p = self.p
        low = p ** (self.ctx.spec.s - 1)
        ident = R.identity()
        assert ((arr - ident) % low == 0).all(), "element is not in the reduction kernel"
        W = ((arr - ident) % R.mod) // low
        w = W.reshape(-1) % p
        x = (self.K @ w[self.pivots]) % p
        assert ((x @ self.flats) % p == w).all(), "kernel element outside the Lie space"
        return x

    def kernel_vectors_batch(self, arrs) -> np.ndarray:
        R = self.ctx.R
        if self.ctx.projective:
            arrs = R.canonicalize_projective(arrs)
        p = self.p
        low = p ** (self.ctx.spec.s - 1)
        ident = R.identity()
        diff = (arrs - ident[None]) % R.mod
        assert (diff % low == 0).all(), "element is not in the reduction kernel"
        W = (diff // low).reshape(len(arrs), -1) % p
        X = (W[:, self.pivots] @ self.K.T) % p
        assert ((X @ self.flats) % p == W).all(), "kernel element outside the Lie space"
        return X

    def lift(self, vec) -> np.ndarray:
        vec = np.asarray(vec, dtype=np.int64) % self.p
        W = (vec @ self.flats.reshape(self.dim_fp, -1)) % self.p
        W = W.reshape(self.mats[0].shape)
        low = self.p ** (self.ctx.spec.s - 1)
        return (self.ctx.R.identity() + low * W) % self.ctx.R.mod

    def ad_matrix(self, gbar_arr) -> np.ndarray:
        """AD of a level-(s-1) (or level-1) element as an F_p matrix on the
        flattened coordinates; conjugation happens at level 1."""
        R1 = self.ctx.R1
        g1 = gbar_arr % R1.mod
        gi = R1.inv(g1)
        batch = np.array(self.mats, dtype=np.int64)
        conj = R1.mul(g1[None], R1.mul(batch, gi[None]))
        conj = _normalize_kernel_batch(self.ctx, conj)
        W = conj.reshape(len(self.mats), -1) % self.p
        X = (W[:, self.pivots] @ self.K.T) % self.p
        assert ((X @ self.flats) % self.p == W).all(), "adjoint image left the Lie space"
        return X.T % self.p


def _normalize_kernel_batch(ctx: GroupContext, mats):
    """Project conjugated Lie matrices back into the coordinate gauge."""
    fam = ctx.spec.family
    if fam in PROJECTIVE:
        # subtract entry(0,0) * I: the scalar direction is the quotient gauge
        n = ctx.spec.n
        scal = mats[..., 0, 0, :].copy()
        idx = np.arange(n)
        out = mats.copy()
        out[..., idx, idx, :] = (out[..., idx, idx, :] - scal[..., None, :]) % ctx.R1.mod
        return out
    return mats % ctx.R1.mod


def _entry_scale(ctx: GroupContext, D, scalar_field_elem):
    """Multiply a level-1 matrix by a base-field scalar (embedded if the
    entry field is the quadratic extension)."""
    ef = ctx.entry_field
    if scalar_field_elem.ctx is not ef:
        scalar_field_elem = embed_field(scalar_field_elem, ef)
    R1 = ctx.R1
    vec = np.array(scalar_field_elem.coeffs, dtype=np.int64)
    m = R1.m
    acc = np.zeros(D.shape[:-1] + (2 * m - 1,), dtype=np.int64)
    for a in range(m):
        for b in range(m):
            acc[..., a + b] += D[..., a] * vec[b]
    return np.tensordot(acc % R1.mod, R1.RED, axes=([-1], [0])) % R1.mod


def _inv_mod_p(M, p):
    n = M.shape[0]
    aug = np.concatenate([M % p, np.eye(n, dtype=np.int64)], axis=1)
    R, piv = rref_mod_p(aug, p)
    assert piv[:n] == list(range(n)), "singular coordinate matrix"
    return R[:, n:]


# ---------------------------------------------------------------------------
# Lie bases per family (level-1 solves)
# ---------------------------------------------------------------------------


def _lie_basis(ctx: GroupContext):
    """(dim_k, [level-1 matrices]) spanning the reduction kernel directions."""
    fam = ctx.spec.family
    n = ctx.spec.n
    R1 = ctx.R1
    p = ctx.spec.p
    if fam == "G2adjoint":
        mats = [R1.from_int_matrix(ctx.cd.ad[i] % p) for i in range(ctx.cd.dim)]
        return ctx.cd.dim, mats

    m = R1.m
    nun = n * n * m  # F_p unknowns

    def unflat(vec):
        return vec.reshape(n, n, m) % p

    conditions = _lie_conditions(ctx)
    if not conditions:
        null = np.eye(nun, dtype=np.int64)
    else:
        cols = []
        for t in range(nun):
            v = np.zeros(nun, dtype=np.int64)
            v[t] = 1
            X = unflat(v)
            img = np.concatenate([np.atleast_1d(c(X)).reshape(-1) for c in conditions])
            cols.append(img)
        Mcond = np.array(cols, dtype=np.int64).T % p
        from .linalg import nullspace_mod_p

        null = nullspace_mod_p(Mcond, p)
    dim_fp = len(null)
    r = ctx.field.r
    assert dim_fp % r == 0
    # organize into a k-basis: greedily take vectors, close under x-scaling
    gen = ctx.field.from_index(ctx.field.p) if r > 1 else ctx.field.one()
    span = np.zeros((0, nun), dtype=np.int64)
    piv: list[int] = []
    kbasis = []
    for v in null:
        red = _reduce_against(span, piv, v % p, p)
        if not red.any():
            continue
        D = unflat(red)
        kbasis.append(D)
        vecs = [red]
        cur = D
        for _ in range(r - 1):
            cur = _entry_scale(ctx, cur, gen)
            vecs.append(cur.reshape(-1) % p)
        for w in vecs:
            w = _reduce_against(span, piv, w, p)
            assert w.any()
            lead = int(np.nonzero(w)[0][0])
            w = (w * pow(int(w[lead]), p - 2, p)) % p
            if len(span):
                coef = span[:, lead].copy()
                span = (span - np.outer(coef, w)) % p
            span = np.vstack([span, w[None]])
            piv.append(lead)
    assert len(kbasis) * r == dim_fp
    return len(kbasis), kbasis


def _lie_conditions(ctx: GroupContext):
    """List of F_p-linear maps X -> matrix/scalar arrays that must vanish."""
    fam = ctx.spec.family
    n = ctx.spec.n
    R1 = ctx.R1
    p = ctx.spec.p
    J = ctx.J % R1.mod if ctx.J is not None else None

    def trace(X):
        return sum(X[i, i] for i in range(n)) % p

    def gram_sim(X):
        # eliminate the similitude slack c at a reference position; J has
        # integer 0/±1 entries so the division is a sign
        G = _gram_lin(R1, J, X, ctx.sigma_power)
        i0, j0 = next((i, j) for i in range(n) for j in range(n) if J[i, j].any())
        sgn = int(J[i0, j0, 0]) % p
        inv = pow(sgn, p - 2, p)
        c = (G[i0, j0] * inv) % p
        return (G - np.einsum("ij,a->ija", J[..., 0], c)) % p

    def sim_fixed(X):
        # similitude scalar must be sigma-fixed (only matters for GU/PGU)
        G = _gram_lin(R1, J, X, ctx.sigma_power)
        i0, j0 = next((i, j) for i in range(n) for j in range(n) if J[i, j].any())
        sgn = int(J[i0, j0, 0]) % p
        inv = pow(sgn, p - 2, p)
        c = (G[i0, j0] * inv) % p
        cs = R1.sigma(c[None, None, :], ctx.sigma_power)[0, 0]
        return (c - cs) % p

    def corner(X):
        return X[0, 0] % p

    if fam == "SL":
        return [trace]
    if fam == "GL":
        return []
    if fam == "PGL":
        return [corner]
    if fam == "Sp":
        return [lambda X: _gram_lin(R1, J, X, 0)]
    if fam == "GSp":
        return [gram_sim]
    if fam == "PGSp":
        return [gram_sim, corner]
    if fam == "SU":
        return [lambda X: _gram_lin(R1, J, X, ctx.sigma_power), trace]
    if fam == "GU":
        return [gram_sim, sim_fixed]
    if fam == "PGU":
        return [gram_sim, sim_fixed, corner]
    raise AssertionError(fam)


def _gram_lin(R1: MatRing, J, X, sigma_power):
    """sigma(X)^T J + J X at level 1 (the linearized Gram condition)."""
    S = R1.sigma(X[None], sigma_power)[0]
    St = np.swapaxes(S, 0, 1)
    m = R1.m
    acc = np.zeros(X.shape[:-1] + (2 * m - 1,), dtype=np.int64)
    for a in range(m):
        for b in range(m):
            acc[..., a + b] += St[..., a] @ J[..., b] + J[..., a] @ X[..., b]
    return np.tensordot(acc % R1.mod, R1.RED, axes=([-1], [0])) % R1.mod


# ---------------------------------------------------------------------------
# unitary level lifting
# ---------------------------------------------------------------------------


def _gram_correction(ctx: GroupContext, a0):
    """Solve B = A0 (1 + p^{s-1} X) for the Gram/determinant equations."""
    R = ctx.R
    fam = ctx.spec.family
    n = ctx.spec.n
    p = ctx.spec.p
    low = p ** (ctx.spec.s - 1)
    left = R.mul(R.transpose(R.sigma(a0, ctx.sigma_power)), R.mul(ctx.J, a0))
    if fam in ("GU", "PGU"):
        i0, j0 = next((i, j) for i in range(n) for j in range(n) if ctx.J[i, j].any())
        mu0 = R.entry(left, i0, j0) * R.entry(ctx.J, i0, j0).inv()
    else:
        mu0 = ctx.entry_ring.one()
    target = R.mul(R.scalar(mu0), ctx.J)
    defect = (left - target) % R.mod
    assert (defect % low == 0).all()
    E1 = (defect // low) % ctx.R1.mod

    R1 = ctx.R1
    m = R1.m
    nun = n * n * m

    want_det = fam == "SU"
    want_mu_slack = fam in ("GU", "PGU")

    cols = []
    for t in range(nun):
        v = np.zeros(nun, dtype=np.int64)
        v[t] = 1
        X = v.reshape(n, n, m)
        G = _gram_lin_scaled(ctx, X, mu0)
        img = [G.reshape(-1)]
        if want_det:
            img.append(np.array([(sum(X[i, i, a] for i in range(n)) % p) for a in range(m)]).reshape(-1))
        cols.append(np.concatenate(img))
    M = np.array(cols, dtype=np.int64).T % p

    rhs_parts = [(-E1.reshape(-1)) % p]
    if want_det:
        d0 = R.det(a0)
        dd = (np.array(d0.coeffs, dtype=np.int64) - np.array(ctx.entry_ring.one().coeffs, dtype=np.int64)) % R.mod
        assert (dd % low == 0).all()
        rhs_parts.append(((-(dd // low)) % p).reshape(-1))
    rhs = np.concatenate(rhs_parts)

    if want_mu_slack:
        # allow the similitude to move: columns for nu in the sigma-fixed line
        slack_cols = [(-_scalar_times_J(ctx, w)).reshape(-1) % p for w in _sigma_fixed_directions(ctx)]
        M = np.concatenate([M, np.array(slack_cols, dtype=np.int64).T % p], axis=1)

    from .linalg import rref_mod_p as _rref

    aug = np.concatenate([M, rhs[:, None]], axis=1) % p
    Rr, piv = _rref(aug, p)
    ncols = M.shape[1]
    assert all(c < ncols for c in piv), "correction system inconsistent"
    x = np.zeros(ncols, dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = Rr[i, ncols]
    Xsol = x[:nun].reshape(n, n, m)
    corr = (R.identity() + low * Xsol) % R.mod
    return R.mul(a0, corr)


def _gram_lin_scaled(ctx: GroupContext, X, mu0):
    """Linearization sigma(X)^T (mu0 J) + (mu0 J) X reduced mod p."""
    R1 = ctx.R1
    mu_red = np.array(mu0.coeffs, dtype=np.int64) % R1.mod
    Jm = _scalar_times_J(ctx, mu_red)
    return _gram_lin(R1, Jm, X, ctx.sigma_power)


def _scalar_times_J(ctx: GroupContext, coeffs):
    R1 = ctx.R1
    m = R1.m
    J = ctx.J % R1.mod
    acc = np.zeros(J.shape[:-1] + (2 * m - 1,), dtype=np.int64)
    for a in range(m):
        for b in range(m):
            acc[..., a + b] += J[..., a] * coeffs[b]
    return np.tensordot(acc % R1.mod, R1.RED, axes=([-1], [0])) % R1.mod


def _sigma_fixed_directions(ctx: GroupContext):
    """F_p-basis of sigma-fixed level-1 ring elements (the base field)."""
    R1 = ctx.R1
    m = R1.m
    p = ctx.spec.p
    dirs = []
    span = np.zeros((0, m), dtype=np.int64)
    piv: list[int] = []
    for idx in range(ctx.R1.witt.size):
        v = np.array(ctx.R1.witt.from_index(idx).coeffs, dtype=np.int64) % p
        if not v.any():
            continue
        s = R1.sigma(v[None, None, :], ctx.sigma_power)[0, 0]
        if ((s - v) % p).any():
            continue
        red = _reduce_against(span, piv, v % p, p)
        if red.any():
            lead = int(np.nonzero(red)[0][0])
            red = (red * pow(int(red[lead]), p - 2, p)) % p
            span = np.vstack([span, red[None]])
            piv.append(lead)
            dirs.append(v % p)
    return dirs


def _reduce_against(span, piv, v, p):
    v = v.copy() % p
    for row, c in zip(span, piv):
        if v[c]:
            v = (v - v[c] * row) % p
    return v


# ---------------------------------------------------------------------------
# subset closure checks
# ---------------------------------------------------------------------------


def _positive_closure(datum, pos_subset):
    closure = set(tuple(a) for a in pos_subset)
    changed = True
    while changed:
        changed = False
        for a in list(closure):
            for b in list(closure):
                s = datum.add(a, b)
                if datum.is_root(s) and s not in closure:
                    closure.add(s)
                    changed = True
    return closure


def _check_subset_closed(datum, pos_subset):
    full = set()
    for a in pos_subset:
        full.add(tuple(a))
        full.add(datum.neg(a))
    for a in full:
        for b in full:
            s = datum.add(a, b)
            if datum.is_root(s) and s not in full:
                raise DomainError(f"root subset not closed under addition: {a} + {b}")


def _check_closed_under_mult(elements):
    keys = {el.key for _, el in elements}
    import random

    rng = random.Random(17)
    els = [el for _, el in elements]
    pairs = [(a, b) for a in els for b in els]
    if len(pairs) > 400:
        pairs = [rng.choice(pairs) for _ in range(400)]
    for a, b in pairs:
        assert (a * b).key in keys, "subset product left the subgroup"


# ---------------------------------------------------------------------------
# orders
# ---------------------------------------------------------------------------


def order_polynomial(family: str, n: int, q: int) -> int:
    if family == "G2adjoint":
        return q**6 * (q**6 - 1) * (q**2 - 1)
    if family in ("SL", "PGL"):
        return q ** (n * (n - 1) // 2) * _prod(q**i - 1 for i in range(2, n + 1))
    if family == "GL":
        return order_polynomial("SL", n, q) * (q - 1)
    if family in ("Sp", "PGSp"):
        m = n // 2
        return q ** (m * m) * _prod(q ** (2 * i) - 1 for i in range(1, m + 1))
    if family == "GSp":
        return order_polynomial("Sp", n, q) * (q - 1)
    u = q ** (n * (n - 1) // 2) * _prod(q**i - (-1) ** i for i in range(1, n + 1))
    if family == "SU":
        return u // (q + 1)
    if family == "GU":
        return u * (q - 1)
    if family == "PGU":
        return u // (q + 1)
    raise ValueError(family)


def _prod(it):
    out = 1
    for x in it:
        out *= x
    return out


def p_part(order: int, p: int) -> int:
    out = 1
    while order % p == 0:
        out *= p
        order //= p
    return out


# ---------------------------------------------------------------------------
# context cache and BFS cache
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def get_group(spec: GroupSpec) -> GroupContext:
    return GroupContext(spec)


def construct_group(spec: GroupSpec) -> GroupContext:
    return get_group(spec)


def _bfs_cache_path(spec: GroupSpec):
    root = os.environ.get("WITTLIFT_BFS_CACHE")
    if not root:
        return None
    os.makedirs(root, exist_ok=True)
    safe = spec.key().replace("/", "_")
    return os.path.join(root, f"bfs-{safe}.pkl")


def _bfs_cache_load(spec):
    path = _bfs_cache_path(spec)
    if path and os.path.exists(path):
        with open(path, "rb") as fh:
            return pickle.load(fh)
    return None


def _bfs_cache_store(spec, data):
    path = _bfs_cache_path(spec)
    if path:
        with open(path, "wb") as fh:
            pickle.dump(data, fh)


def _embed_ring(u, target_ring):
    """Embed a base Witt-ring element into a larger entry ring by peeling
    Teichmuller digits: u = sum_k p^k teich(a_k)."""
    if u.ctx is target_ring:
        return u
    src = u.ctx
    p, s = src.p, src.s
    total = target_ring.zero()
    rem = u
    for k in range(s):
        res = src.to_field(rem)
        digit = src.teichmuller(res)
        big = target_ring.teichmuller(embed_field(res, target_ring.field))
        total = total + target_ring.scalar(p**k) * big
        rem = rem - digit
        if not rem:
            break
        rem = src.elem(tuple(c // p for c in rem.coeffs))
    return total
