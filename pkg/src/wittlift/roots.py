"""Root systems A1-A3, C2, C3, G2 in their standard integer coordinate
realizations, with strings, pairings and the small-characteristic
exceptional-pair predicate."""

from __future__ import annotations

import json
from fractions import Fraction

SUPPORTED_TYPES = ("A1", "A2", "A3", "C2", "C3", "G2")

EXPECTED_POSITIVE_COUNT = {"A1": 1, "A2": 3, "A3": 6, "C2": 4, "C3": 9, "G2": 6}


class RootDatum:
    """Roots as integer tuples; positive roots, simple roots, pairings."""

    def __init__(self, label: str):
        if label not in SUPPORTED_TYPES:
            raise ValueError(f"unsupported root system {label}")
        self.label = label
        self.simple, self.roots = _build_roots(label)
        self.rank = len(self.simple)
        self._root_set = set(self.roots)
        self._expansion_cache: dict[tuple, tuple] = {}
        self.positive = sorted(
            (a for a in self.roots if self._is_positive(a)),
            key=lambda a: (self.height(a), a),
        )
        assert len(self.positive) == EXPECTED_POSITIVE_COUNT[label]
        assert set(self.roots) == set(self.positive) | {self.neg(a) for a in self.positive}
        self._check_weyl_invariance()

    # -- basic queries --------------------------------------------------------

    def is_root(self, a) -> bool:
        return tuple(a) in self._root_set

    @staticmethod
    def neg(a):
        return tuple(-x for x in a)

    @staticmethod
    def add(a, b):
        return tuple(x + y for x, y in zip(a, b))

    @staticmethod
    def dot(a, b) -> int:
        return sum(x * y for x, y in zip(a, b))

    def sq(self, a) -> int:
        return self.dot(a, a)

    def pairing(self, beta, alpha) -> int:
        """Cartan integer <beta, alpha^vee> = 2(beta,alpha)/(alpha,alpha)."""
        num = 2 * self.dot(beta, alpha)
        den = self.sq(alpha)
        assert num % den == 0
        return num // den

    def expansion(self, a) -> tuple:
        """Coefficients of a in the simple-root basis (exact rationals)."""
        a = tuple(a)
        if a in self._expansion_cache:
            return self._expansion_cache[a]
        # solve sum c_i * simple_i = a by Gram matrix (simples independent)
        g = [[Fraction(self.dot(si, sj)) for sj in self.simple] for si in self.simple]
        rhs = [Fraction(self.dot(si, a)) for si in self.simple]
        coeffs = _solve_fraction(g, rhs)
        self._expansion_cache[a] = tuple(coeffs)
        return self._expansion_cache[a]

    def _is_positive(self, a) -> bool:
        coeffs = self.expansion(a)
        return all(c >= 0 for c in coeffs) and any(c > 0 for c in coeffs)

    def is_positive(self, a) -> bool:
        return tuple(a) in set(self.positive)

    def height(self, a) -> int:
        coeffs = self.expansion(a)
        h = sum(coeffs)
        assert h.denominator == 1
        return int(h)

    def is_short(self, a) -> bool:
        sqs = {self.sq(r) for r in self.roots}
        return len(sqs) == 2 and self.sq(a) == min(sqs)

    def is_long(self, a) -> bool:
        return not self.is_short(a)

    # -- strings and constants -------------------------------------------------

    def root_string(self, alpha, beta):
        """The alpha-string through beta as (s, t): beta-s*alpha ... beta+t*alpha."""
        alpha, beta = tuple(alpha), tuple(beta)
        if beta == alpha or beta == self.neg(alpha):
            raise ValueError("string through +/-alpha is undefined")
        s = 0
        cur = self.add(beta, self.neg(alpha))
        while self.is_root(cur):
            s += 1
            cur = self.add(cur, self.neg(alpha))
        t = 0
        cur = self.add(beta, alpha)
        while self.is_root(cur):
            t += 1
            cur = self.add(cur, alpha)
        assert s + t <= 3
        assert s - t == self.pairing(beta, alpha)
        return s, t

    def string_down(self, alpha, beta) -> int:
        """Largest m with beta - m*alpha a root (the m of |N| = m+1)."""
        return self.root_string(alpha, beta)[0]

    def reflection(self, alpha, beta):
        return self.add(beta, tuple(-self.pairing(beta, alpha) * x for x in alpha))

    def _check_weyl_invariance(self):
        for a in self.simple:
            image = {self.reflection(a, b) for b in self.roots}
            assert image == self._root_set, "simple reflection must permute roots"

    def angle_class(self, a, b) -> str:
        """Coarse angle between roots of equal length: '60', '90', '120', 'other'."""
        d = self.dot(a, b)
        if d == 0:
            return "90"
        if self.sq(a) == self.sq(b):
            if 2 * d == self.sq(a):
                return "60"
            if 2 * d == -self.sq(a):
                return "120"
        return "other"

    def to_json(self) -> str:
        data = {
            "type": self.label,
            "rank": self.rank,
            "simple": [list(a) for a in self.simple],
            "positive": [list(a) for a in self.positive],
            "roots": [list(a) for a in sorted(self.roots)],
            "squared_lengths": {str(list(a)): self.sq(a) for a in sorted(self.roots)},
        }
        return json.dumps(data, sort_keys=True, indent=1)


def _build_roots(label: str):
    if label.startswith("A"):
        n = int(label[1])
        dim = n + 1
        simple = [_eij(i, i + 1, dim) for i in range(n)]
        roots = [_eij(i, j, dim) for i in range(dim) for j in range(dim) if i != j]
        return simple, roots
    if label.startswith("C"):
        n = int(label[1])
        simple = [_eij(i, i + 1, n) for i in range(n - 1)] + [_unit(n - 1, n, 2)]
        roots = []
        for i in range(n):
            for j in range(i + 1, n):
                for si in (1, -1):
                    for sj in (1, -1):
                        roots.append(_combine(i, si, j, sj, n))
            roots.append(_unit(i, n, 2))
            roots.append(_unit(i, n, -2))
        return simple, roots
    if label == "G2":
        simple = [(1, -1, 0), (-2, 1, 1)]
        short = [(1, -1, 0), (0, -1, 1), (-1, 0, 1)]
        long_ = [(-2, 1, 1), (1, 1, -2), (-1, 2, -1)]
        roots = []
        for a in short + long_:
            roots.append(a)
            roots.append(tuple(-x for x in a))
        return simple, roots
    raise ValueError(label)


def _eij(i, j, dim):
    v = [0] * dim
    v[i] = 1
    v[j] = -1
    return tuple(v)


def _unit(i, dim, c):
    v = [0] * dim
    v[i] = c
    return tuple(v)


def _combine(i, si, j, sj, dim):
    v = [0] * dim
    v[i] = si
    v[j] = sj
    return tuple(v)


def _solve_fraction(g, rhs):
    n = len(g)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(g)]
    for c in range(n):
        piv = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = Fraction(1, 1) / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [aug[i][n] for i in range(n)]


def build_root_system(label: str) -> RootDatum:
    return RootDatum(label)


def is_exceptional_pair(datum: RootDatum, p: int, alpha, beta) -> bool:
    """Pairs where [g_alpha, g_beta] drops below g_{alpha+beta} mod p.

    Exactly: (p=3, G2, short at 60 deg), (p=2, G2, short at 120 deg),
    (p=2, B/C/F4 type, both short, orthogonal, sum a root); equivalently
    p | N_{alpha,beta}.
    """
    alpha, beta = tuple(alpha), tuple(beta)
    if not datum.is_root(datum.add(alpha, beta)):
        return False
    if datum.label == "G2" and datum.is_short(alpha) and datum.is_short(beta):
        ang = datum.angle_class(alpha, beta)
        if p == 3 and ang == "60":
            return True
        if p == 2 and ang == "120":
            return True
    if (
        datum.label in ("C2", "C3")
        and p == 2
        and datum.is_short(alpha)
        and datum.is_short(beta)
        and datum.dot(alpha, beta) == 0
    ):
        return True
    return False
