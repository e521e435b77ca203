import numpy as np
import pytest

from wittlift.groups import GroupSpec, get_group
from wittlift.liemod import LieModule, Submodule, lie_module_of
from wittlift.ring import DomainError


def spec(family, n, p, r=1):
    return GroupSpec(family, n, p, r, 1)


def test_dimensions():
    assert lie_module_of(spec("SL", 2, 2)).dim == 3
    assert lie_module_of(spec("PGL", 3, 2)).dim == 8
    assert lie_module_of(spec("G2adjoint", 14, 3)).dim == 14
    assert lie_module_of(spec("PGU", 3, 2)).dim == 8
    assert lie_module_of(spec("Sp", 4, 2)).dim == 10
    assert lie_module_of(spec("PGSp", 4, 2)).dim == 10


def test_center_examples():
    # sl2/F2: center is the scalar line
    L = lie_module_of(spec("SL", 2, 2))
    assert L.lie_center().dim == 1
    # sl3/F2: derived is everything (p does not divide 3)
    L3 = lie_module_of(spec("SL", 3, 2))
    assert L3.derived_subalgebra().dim == 8
    assert L3.lie_center().dim == 0
    # sp4/F2: derived is a proper subalgebra
    Lsp = lie_module_of(spec("Sp", 4, 2))
    der = Lsp.derived_subalgebra()
    assert der.dim < 10
    assert der.dim == 6
    assert Lsp.lie_center().dim == 1


def test_lambda_images():
    # pgl2/F2: dim-2 ideal
    L = lie_module_of(spec("PGL", 2, 2))
    lam = L.lambda_image()
    assert lam.dim == 2
    # pgu3/F2: everything
    Lu = lie_module_of(spec("PGU", 3, 2))
    assert Lu.lambda_image().dim == 8
    assert Lu.derived_subalgebra().dim == 8
    # pgsp4/F2: lambda equals derived
    Lp = lie_module_of(spec("PGSp", 4, 2))
    assert Lp.lambda_image().key() == Lp.derived_subalgebra().key()
    # sp4/F2 (simply connected C2, p=2): lambda is everything, derived is not
    Ls = lie_module_of(spec("Sp", 4, 2))
    assert Ls.lambda_image().dim == 10
    assert Ls.derived_subalgebra().dim == 6


def test_lambda_equals_derived_except_p2_cn_nonadjoint():
    # the C_n exception at p=2 includes C_1 = A_1, i.e. the SL2 families
    cases = [
        ("SL", 2, 2, False), ("SL", 2, 3, True), ("SL", 3, 2, True),
        ("PGL", 2, 2, True), ("PGL", 3, 3, True),
        ("Sp", 4, 2, False),
        ("Sp", 4, 3, True),
        ("PGSp", 4, 2, True),
        ("SU", 3, 2, True), ("PGU", 3, 2, True),
        ("G2adjoint", 14, 2, True), ("G2adjoint", 14, 3, True),
    ]
    for fam, n, p, equal in cases:
        L = lie_module_of(spec(fam, n, p))
        same = L.lambda_image().key() == L.derived_subalgebra().key()
        assert same == equal, (fam, n, p)


def test_exceptional_ideals():
    g2_3 = lie_module_of(spec("G2adjoint", 14, 3))
    I = g2_3.exceptional_ideal(get_group(spec("G2adjoint", 14, 3)).datum)
    assert 0 < I.dim < 14
    assert I.dim == 7

    sp4 = lie_module_of(spec("Sp", 4, 2))
    I4 = sp4.exceptional_ideal(get_group(spec("Sp", 4, 2)).datum)
    assert 0 < I4.dim < 10
    # contains all short root vectors
    datum = get_group(spec("Sp", 4, 2)).datum
    for a in datum.roots:
        if datum.is_short(a):
            assert I4.contains(sp4.root_vectors[a])

    # in characteristic 2 the short-root vectors of G2 generate everything
    g2_2 = lie_module_of(spec("G2adjoint", 14, 2))
    I2 = g2_2.exceptional_ideal(get_group(spec("G2adjoint", 14, 2)).datum)
    assert I2.dim == 14


def test_simplicity_matches_structure_theory():
    # not simple iff isotypic A_{pn-1}, or p=2 with B/C/D/E7/F4 type, or p=3 G2
    cases = [
        ("SL", 2, 2, 1, False), ("SL", 2, 3, 1, True), ("SL", 2, 2, 2, False),
        ("PGL", 2, 2, 1, False), ("PGL", 2, 3, 1, True),
        ("SL", 3, 2, 1, True), ("SL", 3, 3, 1, False), ("PGL", 3, 3, 1, False),
        ("SL", 4, 2, 1, False), ("PGL", 4, 2, 1, False),
        ("Sp", 4, 2, 1, False), ("Sp", 4, 3, 1, True), ("PGSp", 4, 3, 1, True),
        ("SU", 3, 2, 1, True), ("PGU", 3, 2, 1, True),
        ("G2adjoint", 14, 2, 1, True), ("G2adjoint", 14, 3, 1, False),
    ]
    for fam, n, p, r, simple in cases:
        L = lie_module_of(GroupSpec(fam, n, p, r, 1))
        assert L.is_simple_algebra() == simple, (fam, n, p, r)


def test_minimal_ideal_methods_agree_small():
    for fam, n, p in [("SL", 2, 2), ("Sp", 4, 2), ("PGL", 3, 2), ("SU", 3, 2)]:
        L = lie_module_of(spec(fam, n, p))
        fast = {m.key() for m in L.minimal_ideals(method="fixed")}
        slow = {m.key() for m in L.minimal_ideals(method="lines")}
        assert fast == slow, (fam, n, p)


def test_minimal_submodule_methods_agree_small():
    for fam, n, p in [("SL", 2, 2), ("PGL", 2, 2), ("Sp", 4, 2), ("PGU", 3, 2), ("SL", 2, 3)]:
        L = lie_module_of(spec(fam, n, p))
        fast = {m.key() for m in L.minimal_submodules(method="fixed")}
        slow = {m.key() for m in L.minimal_submodules(method="lines")}
        assert fast == slow, (fam, n, p)


def test_spin_examples():
    g2 = lie_module_of(spec("G2adjoint", 14, 3))
    datum = get_group(spec("G2adjoint", 14, 3)).datum
    short = next(a for a in datum.roots if datum.is_short(a))
    I = g2.exceptional_ideal(datum)
    spun = g2.spin(g2.root_vectors[short][None, :])
    assert spun.key() == I.key()
    zero = g2.spin(np.zeros((1, 14), dtype=np.int16))
    assert zero.dim == 0
    full = g2.spin(np.eye(14, dtype=np.int16))
    assert full.dim == 14


def test_unique_simple_submodule_g2_f3():
    g2 = lie_module_of(spec("G2adjoint", 14, 3))
    datum = get_group(spec("G2adjoint", 14, 3)).datum
    mins = g2.minimal_submodules()
    assert len(mins) == 1
    assert mins[0].key() == g2.exceptional_ideal(datum).key()


def test_unique_simple_submodule_pgsp4_f2():
    L = lie_module_of(spec("PGSp", 4, 2))
    datum = get_group(spec("PGSp", 4, 2)).datum
    mins = L.minimal_submodules()
    assert len(mins) == 1
    I = L.exceptional_ideal(datum)
    assert mins[0].key() == I.key()


def test_invariant_lines():
    # gcd(p, o(H)) = 1 instances: no invariant line under the sc-image
    for fam, n, p, r in [("PGL", 2, 2, 2), ("G2adjoint", 14, 2, 1), ("SL", 3, 2, 1), ("SU", 3, 2, 1)]:
        L = lie_module_of(GroupSpec(fam, n, p, r, 1))
        assert L.invariant_lines(which="sc") == [], (fam, n, p)
    # SL2/F2 has p | o: the center line is invariant
    L = lie_module_of(spec("SL", 2, 2))
    lines = L.invariant_lines(which="sc")
    assert len(lines) >= 1
    c = L.lie_center()
    assert any(c.contains(v) for v in lines)


def test_invariant_lines_methods_agree():
    for fam, n, p in [("SL", 2, 2), ("PGL", 2, 3), ("Sp", 4, 2)]:
        L = lie_module_of(spec(fam, n, p))
        fast = {v.tobytes() for v in L.invariant_lines(method="fixed")}
        slow = {v.tobytes() for v in L.invariant_lines(method="lines")}
        assert fast == slow


def test_supplement_check():
    # 3.10 2): p | o(H), gcd(p, c) = 1: no proper V with V + Lie(Z) = Lie
    for fam, n, p in [("SL", 3, 3), ("Sp", 4, 2), ("SL", 4, 2), ("SL", 2, 4)]:
        if fam == "SL" and n == 2 and p == 4:
            continue
        L = lie_module_of(spec(fam, n, p))
        Z = L.lie_center()
        assert Z.dim >= 1, (fam, n, p)
        assert not L.supplement_check(Z, which="sc"), (fam, n, p)
    # SL2/F4 (q=4 allowed; only q=2 SL2 is excluded by the hypothesis)
    L = lie_module_of(GroupSpec("SL", 2, 2, 2, 1))
    Z = L.lie_center()
    assert Z.dim == 1
    assert not L.supplement_check(Z, which="sc")
    # trivial case: Z = L means no proper V is needed
    Lf = lie_module_of(spec("SL", 2, 3))
    full = Submodule(Lf.fq, np.eye(3, dtype=np.int16))
    assert Lf.supplement_check(full) is False


def test_module_extension_nonsplit_g2_f3():
    g2 = lie_module_of(spec("G2adjoint", 14, 3))
    datum = get_group(spec("G2adjoint", 14, 3)).datum
    I = g2.exceptional_ideal(datum)
    lam = g2.lambda_image()
    assert lam.dim == 14  # Lambda = Lie for G2 at p=3
    assert g2.module_extension_splits(I) is False
    # trivial cases
    zero = Submodule(g2.fq, np.zeros((1, 14), dtype=np.int16))
    assert g2.module_extension_splits(zero) is True
    full = Submodule(g2.fq, np.eye(14, dtype=np.int16))
    assert g2.module_extension_splits(full) is True


def test_unique_maximal_submodule_3_12():
    # Lambda of the adjoint family has a unique maximal submodule under the
    # simply-connected action, with nontrivial quotient action
    for fam, n, p, r in [
        ("PGL", 2, 2, 1), ("PGL", 2, 3, 1), ("PGL", 2, 2, 2),
        ("PGL", 3, 2, 1), ("PGL", 3, 3, 1), ("PGL", 4, 2, 1),
        ("PGSp", 4, 2, 1), ("PGSp", 4, 3, 1),
        ("PGU", 3, 2, 1),
        ("G2adjoint", 14, 2, 1), ("G2adjoint", 14, 3, 1),
    ]:
        L = lie_module_of(GroupSpec(fam, n, p, r, 1))
        lam = L.lambda_image()
        lam_mod = L.restrict_module(lam, which="sc")
        maxes = lam_mod.maximal_submodules(which="all")
        assert len(maxes) == 1, (fam, n, p, r)
        M = maxes[0]
        quot = lam_mod.quotient_module(M)
        nontrivial = any(
            (np.array(g) != np.eye(quot.dim, dtype=np.int16)).any() for _, g, _ in quot.generators
        )
        assert nontrivial, (fam, n, p, r)


def test_pgsp6_adjoint_c3_checks():
    """C3 at p=2: the short-root ideal is the unique simple submodule and
    0 -> I -> Lambda -> Lambda/I -> 0 does not split."""
    L = lie_module_of(GroupSpec("PGSp", 6, 2, 1, 1))
    assert L.dim == 21
    datum = get_group(GroupSpec("PGSp", 6, 2, 1, 1)).datum
    I = L.exceptional_ideal(datum)
    assert 0 < I.dim < 21
    lam = L.lambda_image()
    assert lam.contains_module(I)
    mins = L.minimal_submodules()
    assert len(mins) == 1 and mins[0].key() == I.key()
    # Lambda/I is simple and nontrivial; the sequence does not split
    lam_mod = L.restrict_module(lam)
    # I inside Lambda coordinates
    Icoords = _coords_in(lam, I, L)
    Isub = Submodule(L.fq, Icoords)
    assert lam_mod.module_extension_splits(Isub) is False
    quot = lam_mod.quotient_module(Isub)
    qmins = quot.minimal_submodules()
    assert len(qmins) == 1 and qmins[0].dim == quot.dim  # simple
    nontrivial = any((np.array(g) != np.eye(quot.dim, dtype=np.int16)).any() for _, g, _ in quot.generators)
    assert nontrivial


def _coords_in(big: Submodule, small: Submodule, L: LieModule):
    fq = L.fq
    rows = []
    for v in small.rows:
        out = np.zeros(big.dim, dtype=np.int16)
        w = v.copy()
        for i, c in enumerate(big.pivots):
            out[i] = w[c]
            if w[c]:
                w = fq.add(w, fq.smul(fq.NEG[w[c]], big.rows[i]))
        assert not w.any()
        rows.append(out)
    return np.array(rows, dtype=np.int16)


def test_sp6_partial_checks():
    L = lie_module_of(GroupSpec("Sp", 6, 2, 1, 1))
    assert L.dim == 21
    datum = get_group(GroupSpec("Sp", 6, 2, 1, 1)).datum
    I = L.exceptional_ideal(datum)
    assert 0 < I.dim < 21
    assert L.derived_subalgebra().dim < 21
    assert L.lie_center().dim >= 1
    # I is a simple module: every fixed line inside I spins back to I
    fixed = L.fixed_space(L.u_elements)
    for v in L._line_reps(fixed.rows):
        if I.contains(v):
            assert L.spin(v[None, :]).key() == I.key()


def test_exceptional_ideal_precondition():
    L = lie_module_of(spec("SL", 3, 2))
    datum = get_group(spec("SL", 3, 2)).datum
    with pytest.raises(DomainError):
        L.exceptional_ideal(datum)  # A-type has no short roots
