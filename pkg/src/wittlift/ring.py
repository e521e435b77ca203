"""Arithmetic in F_q and in the truncated Witt rings W_s(F_q) = GR(p^s, r).

Elements are plain coefficient tuples in the power basis of a fixed defining
polynomial; the polynomial for W_s(F_q) is the field polynomial read mod p^s,
so reduction maps are coefficient-wise.  Contexts are interned singletons, so
identity comparison is enough to reject mixed-context operations.
"""

from __future__ import annotations

import functools
from typing import Iterator

import numpy as np

SUPPORTED_P = (2, 3, 5, 7)


class ContextError(ValueError):
    """Mixed-context operation or unsupported parameters."""


class DomainError(ValueError):
    """Operation outside its domain (inverse of zero / non-unit, etc.)."""


def _poly_candidates(p: int, r: int) -> Iterator[tuple[int, ...]]:
    # all monic degree-r polys as low-first coefficient tuples (c_0,...,c_{r-1})
    for code in range(p**r):
        coeffs = []
        v = code
        for _ in range(r):
            coeffs.append(v % p)
            v //= p
        yield tuple(coeffs)


def _eval_poly(poly: tuple[int, ...], x: int, p: int) -> int:
    # poly = low coeffs, monic of degree r implied
    acc = 1  # x^r coefficient
    for c in reversed(poly):
        acc = (acc * x + c) % p
    return acc


def _has_root(poly: tuple[int, ...], p: int) -> bool:
    return any(_eval_poly(poly, x, p) == 0 for x in range(p))


def _poly_mul_mod(a, b, mod_poly, p):
    # multiply two coeff lists and reduce mod (monic mod_poly, p)
    r = len(mod_poly)
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for k in range(len(prod) - 1, r - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for j in range(r):
                prod[k - r + j] = (prod[k - r + j] - c * mod_poly[j]) % p
    return tuple(prod[:r])


def _is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    r = len(poly)
    if r == 1:
        return True
    if _has_root(poly, p):
        return False
    if r <= 3:
        return True
    if r == 4:
        # no linear factors; exclude monic quadratic ones by trial division
        for code in range(p * p):
            q0, q1 = code % p, code // p
            rem = _poly_divrem_monic(poly, (q0, q1), p)
            if rem == (0, 0):
                return False
        return True
    raise ContextError(f"degree {r} not supported")


def _poly_divrem_monic(poly: tuple[int, ...], div: tuple[int, ...], p: int):
    # remainder of monic deg-r poly modulo monic deg-d divisor (coeffs low-first)
    r, d = len(poly), len(div)
    work = list(poly) + [1]  # include leading 1
    for k in range(r, d - 1, -1):
        c = work[k]
        if c:
            work[k] = 0
            for j in range(d):
                work[k - d + j] = (work[k - d + j] - c * div[j]) % p
            # subtract c * x^(k-d) * leading term handled by work[k]=0
    return tuple(work[:d])


def minimal_polynomial(p: int, r: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree r over F_p, by lex order on
    (c_{r-1}, ..., c_0)."""
    best = None
    for cand in sorted(_poly_candidates(p, r), key=lambda t: tuple(reversed(t))):
        if _is_irreducible(cand, p):
            best = cand
            break
    if best is None:
        raise ContextError(f"no irreducible polynomial found for p={p}, r={r}")
    return best


class FieldElement:
    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: "FieldContext", coeffs: tuple[int, ...]):
        self.ctx = ctx
        self.coeffs = coeffs

    def _check(self, other: "FieldElement"):
        if self.ctx is not other.ctx:
            raise ContextError("mixed field contexts")

    def __add__(self, other):
        self._check(other)
        return self.ctx.add(self, other)

    def __sub__(self, other):
        self._check(other)
        return self.ctx.sub(self, other)

    def __mul__(self, other):
        self._check(other)
        return self.ctx.mul(self, other)

    def __neg__(self):
        return self.ctx.neg(self)

    def __eq__(self, other):
        return isinstance(other, FieldElement) and self.ctx is other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((id(self.ctx), self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def inv(self):
        return self.ctx.inv(self)

    @property
    def index(self) -> int:
        return self.ctx.index(self)

    def encode(self) -> str:
        return ",".join(str(c) for c in self.coeffs)

    def __repr__(self):
        return f"F{self.ctx.q}({self.encode()})"


class FieldContext:
    """F_q with q = p^r, fixed defining polynomial, cyclic-group certificate."""

    def __init__(self, p: int, r: int):
        if p not in SUPPORTED_P:
            raise ContextError(f"unsupported characteristic {p}")
        if not (1 <= r <= 4):
            raise ContextError(f"unsupported degree {r}")
        self.p = p
        self.r = r
        self.q = p**r
        self.poly = minimal_polynomial(p, r)
        if not _is_irreducible(self.poly, p):  # defensive; construction implies it
            raise ContextError("defining polynomial reducible")
        self._frob_images: list[tuple[int, ...]] | None = None
        self._tables: dict[str, np.ndarray] = {}
        self.gen = self._find_generator()

    # -- element plumbing ---------------------------------------------------

    def elem(self, coeffs) -> FieldElement:
        t = tuple(int(c) % self.p for c in coeffs)
        if len(t) != self.r:
            raise ContextError("coefficient length mismatch")
        return FieldElement(self, t)

    def zero(self) -> FieldElement:
        return FieldElement(self, (0,) * self.r)

    def one(self) -> FieldElement:
        return FieldElement(self, (1,) + (0,) * (self.r - 1))

    def scalar(self, c: int) -> FieldElement:
        return FieldElement(self, (c % self.p,) + (0,) * (self.r - 1))

    def x(self) -> FieldElement:
        """Power-basis generator (the class of x)."""
        if self.r == 1:
            return self.one()
        return FieldElement(self, (0, 1) + (0,) * (self.r - 2))

    def index(self, a: FieldElement) -> int:
        idx = 0
        for c in reversed(a.coeffs):
            idx = idx * self.p + c
        return idx

    def from_index(self, idx: int) -> FieldElement:
        coeffs = []
        for _ in range(self.r):
            coeffs.append(idx % self.p)
            idx //= self.p
        return FieldElement(self, tuple(coeffs))

    def elements(self) -> Iterator[FieldElement]:
        for idx in range(self.q):
            yield self.from_index(idx)

    # -- arithmetic ---------------------------------------------------------

    def add(self, a, b) -> FieldElement:
        return FieldElement(self, tuple((x + y) % self.p for x, y in zip(a.coeffs, b.coeffs)))

    def sub(self, a, b) -> FieldElement:
        return FieldElement(self, tuple((x - y) % self.p for x, y in zip(a.coeffs, b.coeffs)))

    def neg(self, a) -> FieldElement:
        return FieldElement(self, tuple((-x) % self.p for x in a.coeffs))

    def mul(self, a, b) -> FieldElement:
        return FieldElement(self, _poly_mul_mod(a.coeffs, b.coeffs, self.poly, self.p))

    def pow(self, a, e: int) -> FieldElement:
        if e < 0:
            return self.pow(self.inv(a), -e)
        acc = self.one()
        base = a
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def inv(self, a) -> FieldElement:
        if not a:
            raise DomainError("inverse of zero")
        return self.pow(a, self.q - 2)

    def frobenius(self, a, power: int = 1) -> FieldElement:
        """x -> x^(p^power); an automorphism of order r."""
        return self.pow(a, self.p ** (power % self.r))

    def _find_generator(self) -> FieldElement:
        order = self.q - 1
        for idx in range(1, self.q):
            g = self.from_index(idx)
            seen = self.one()
            n = 0
            for n in range(1, order + 1):
                seen = self.mul(seen, g)
                if seen == self.one():
                    break
            if n == order:
                return g
        raise ContextError("multiplicative group not cyclic (impossible)")

    # -- numpy tables for batched work ---------------------------------------

    def table(self, kind: str) -> np.ndarray:
        if kind in self._tables:
            return self._tables[kind]
        q = self.q
        if kind in ("mul", "add"):
            tab = np.zeros((q, q), dtype=np.int16)
            els = [self.from_index(i) for i in range(q)]
            op = self.mul if kind == "mul" else self.add
            for i in range(q):
                for j in range(q):
                    tab[i, j] = self.index(op(els[i], els[j]))
        elif kind == "neg":
            tab = np.array([self.index(self.neg(self.from_index(i))) for i in range(q)], dtype=np.int16)
        elif kind == "inv":
            tab = np.zeros(q, dtype=np.int16)
            for i in range(1, q):
                tab[i] = self.index(self.inv(self.from_index(i)))
        elif kind == "repr":
            # index -> r x r matrix over F_p of multiplication by the element
            tab = np.zeros((q, self.r, self.r), dtype=np.int16)
            for i in range(q):
                a = self.from_index(i)
                for j in range(self.r):
                    basis = self.elem(tuple(1 if t == j else 0 for t in range(self.r)))
                    tab[i, :, j] = self.mul(a, basis).coeffs
        else:
            raise ContextError(f"unknown table {kind}")
        self._tables[kind] = tab
        return tab


class GaloisRingElement:
    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: "WittRingContext", coeffs: tuple[int, ...]):
        self.ctx = ctx
        self.coeffs = coeffs

    def _check(self, other):
        if self.ctx is not other.ctx:
            raise ContextError("mixed ring contexts")

    def __add__(self, other):
        self._check(other)
        return self.ctx.add(self, other)

    def __sub__(self, other):
        self._check(other)
        return self.ctx.sub(self, other)

    def __mul__(self, other):
        self._check(other)
        return self.ctx.mul(self, other)

    def __neg__(self):
        return self.ctx.neg(self)

    def __eq__(self, other):
        return isinstance(other, GaloisRingElement) and self.ctx is other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((id(self.ctx), self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def inv(self):
        return self.ctx.inv(self)

    def is_unit(self) -> bool:
        return self.ctx.is_unit(self)

    @property
    def index(self) -> int:
        return self.ctx.index(self)

    def encode(self) -> str:
        return ",".join(str(c) for c in self.coeffs)

    def __repr__(self):
        return f"GR({self.ctx.modulus},{self.ctx.r})({self.encode()})"


class WittRingContext:
    """W_s(F_q) = GR(p^s, r): the field polynomial read mod p^s.

    Units are exactly the elements with nonzero reduction mod p; the kernel
    1 + pR of reduction to the field has exponent dividing p^(s-1), which is
    what makes the closed-form Teichmuller lift below exact.
    """

    def __init__(self, p: int, r: int, s: int):
        if s not in (1, 2, 3):
            raise ContextError(f"unsupported level {s}")
        self.p = p
        self.r = r
        self.s = s
        self.modulus = p**s
        self.field = get_field(p, r)
        self.q = self.field.q
        self.poly = self.field.poly  # integer coefficients, read mod p^s
        self.size = self.modulus**r
        self._frob_matrix: np.ndarray | None = None

    # -- element plumbing ---------------------------------------------------

    def elem(self, coeffs) -> GaloisRingElement:
        t = tuple(int(c) % self.modulus for c in coeffs)
        if len(t) != self.r:
            raise ContextError("coefficient length mismatch")
        return GaloisRingElement(self, t)

    def zero(self) -> GaloisRingElement:
        return GaloisRingElement(self, (0,) * self.r)

    def one(self) -> GaloisRingElement:
        return GaloisRingElement(self, (1,) + (0,) * (self.r - 1))

    def scalar(self, c: int) -> GaloisRingElement:
        return GaloisRingElement(self, (c % self.modulus,) + (0,) * (self.r - 1))

    def index(self, a: GaloisRingElement) -> int:
        idx = 0
        for c in reversed(a.coeffs):
            idx = idx * self.modulus + c
        return idx

    def from_index(self, idx: int) -> GaloisRingElement:
        coeffs = []
        for _ in range(self.r):
            coeffs.append(idx % self.modulus)
            idx //= self.modulus
        return GaloisRingElement(self, tuple(coeffs))

    def elements(self) -> Iterator[GaloisRingElement]:
        for idx in range(self.size):
            yield self.from_index(idx)

    # -- arithmetic ---------------------------------------------------------

    def add(self, a, b):
        return GaloisRingElement(self, tuple((x + y) % self.modulus for x, y in zip(a.coeffs, b.coeffs)))

    def sub(self, a, b):
        return GaloisRingElement(self, tuple((x - y) % self.modulus for x, y in zip(a.coeffs, b.coeffs)))

    def neg(self, a):
        return GaloisRingElement(self, tuple((-x) % self.modulus for x in a.coeffs))

    def mul(self, a, b):
        return GaloisRingElement(self, _poly_mul_mod(a.coeffs, b.coeffs, self.poly, self.modulus))

    def pow(self, a, e: int):
        acc = self.one()
        base = a
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def is_unit(self, a) -> bool:
        return bool(self.to_field(a))

    def inv(self, a):
        if not self.is_unit(a):
            raise DomainError("inverse of non-unit")
        # Hensel: start from the field inverse, two Newton steps cover s <= 4
        x = self.lift_field(self.field.inv(self.to_field(a)))
        for _ in range(3):
            err = self.sub(self.scalar(2), self.mul(a, x))
            x = self.mul(x, err)
        assert self.mul(a, x) == self.one()
        return x

    # -- level interplay ----------------------------------------------------

    def reduce_to_level(self, a, s2: int) -> GaloisRingElement:
        if s2 > self.s:
            raise ContextError("can only reduce downward")
        tgt = get_witt(self.p, self.r, s2)
        return tgt.elem(a.coeffs)

    def to_field(self, a) -> FieldElement:
        return self.field.elem(a.coeffs)

    def lift_field(self, fe: FieldElement) -> GaloisRingElement:
        return self.elem(fe.coeffs)

    def teichmuller(self, fe: FieldElement) -> GaloisRingElement:
        """Unique multiplicative lift: (any lift)^(q^(s-1))."""
        if fe.ctx is not self.field:
            raise ContextError("field context mismatch")
        return self.pow(self.lift_field(fe), self.q ** (self.s - 1))

    def lie_coordinate(self, a) -> FieldElement:
        """For a divisible by p^(s-1), the unique X with a = p^(s-1)*lift(X)."""
        step = self.p ** (self.s - 1)
        if any(c % step for c in a.coeffs):
            raise DomainError("element not divisible by p^(s-1)")
        return self.field.elem(tuple(c // step for c in a.coeffs))

    def lie_embed(self, fe: FieldElement) -> GaloisRingElement:
        step = self.p ** (self.s - 1)
        return self.elem(tuple(c * step for c in fe.coeffs))

    # -- Frobenius ------------------------------------------------------------

    def _frobenius_matrix(self) -> np.ndarray:
        """Matrix of the canonical Frobenius lift on the power basis."""
        if self._frob_matrix is not None:
            return self._frob_matrix
        if self.r == 1:
            self._frob_matrix = np.eye(1, dtype=np.int64)
            return self._frob_matrix
        # sigma(x) is the root of the defining polynomial lifting x^p:
        # Newton-iterate y <- y - f(y)/f'(y) starting at x^p.
        y = self.pow(self.elem((0, 1) + (0,) * (self.r - 2)), self.p)
        for _ in range(4):
            fy = self._eval_defpoly(y)
            dfy = self._eval_defpoly_deriv(y)
            y = self.sub(y, self.mul(fy, self.inv(dfy)))
        assert not self._eval_defpoly(y), "Frobenius root-finding failed"
        cols = []
        acc = self.one()
        for _ in range(self.r):
            cols.append(acc.coeffs)
            acc = self.mul(acc, y)
        self._frob_matrix = np.array(cols, dtype=np.int64).T % self.modulus
        return self._frob_matrix

    def _eval_defpoly(self, y):
        acc = self.one()
        out = self.zero()
        for c in self.poly:
            out = self.add(out, self.mul(self.scalar(c), acc))
            acc = self.mul(acc, y)
        return self.add(out, acc)  # monic leading term y^r

    def _eval_defpoly_deriv(self, y):
        # f'(y) = sum_k k*c_k y^(k-1) + r*y^(r-1)
        out = self.zero()
        ypow = self.one()
        for k in range(1, self.r):
            out = self.add(out, self.mul(self.scalar(k * self.poly[k]), ypow))
            ypow = self.mul(ypow, y)
        return self.add(out, self.mul(self.scalar(self.r), ypow))

    def frobenius(self, a, power: int = 1) -> GaloisRingElement:
        """Canonical lift of x -> x^p, iterated `power` times; fixes Z/p^s."""
        m = self._frobenius_matrix()
        v = np.array(a.coeffs, dtype=np.int64)
        for _ in range(power % self.r if self.r > 1 else 0):
            v = (m @ v) % self.modulus
        return self.elem(tuple(int(c) for c in v))


@functools.lru_cache(maxsize=None)
def get_field(p: int, r: int) -> FieldContext:
    return FieldContext(p, r)


@functools.lru_cache(maxsize=None)
def get_witt(p: int, r: int, s: int) -> WittRingContext:
    return WittRingContext(p, r, s)


@functools.lru_cache(maxsize=None)
def subfield_embedding(p: int, r_small: int, r_big: int):
    """Embedding F_{p^r_small} -> F_{p^r_big} as (image of power-basis x)."""
    small = get_field(p, r_small)
    big = get_field(p, r_big)
    if r_big % r_small:
        raise ContextError("no subfield embedding")
    for idx in range(big.q):
        z = big.from_index(idx)
        # evaluate small's defining polynomial at z
        acc = big.one()
        out = big.zero()
        for c in small.poly:
            out = out + big.scalar(c) * acc
            acc = acc * z
        out = out + acc
        if not out and (r_small == 1 or z != big.zero()):
            # exclude the trivial wrong root for r_small == 1 (poly = x + c)
            return z
    raise ContextError("embedding root not found")


def embed_field(a: FieldElement, big: FieldContext) -> FieldElement:
    """Map a in F_{p^r} into F_{p^R} along the canonical power-basis root."""
    small = a.ctx
    z = subfield_embedding(small.p, small.r, big.r)
    out = big.zero()
    acc = big.one()
    for c in a.coeffs:
        out = out + big.scalar(c) * acc
        acc = acc * z
    return out
