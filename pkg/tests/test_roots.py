import json

import pytest

from wittlift.roots import build_root_system, is_exceptional_pair


def test_counts():
    expected = {"A1": 1, "A2": 3, "A3": 6, "C2": 4, "C3": 9, "G2": 6}
    for label, npos in expected.items():
        d = build_root_system(label)
        assert len(d.positive) == npos
        assert len(d.roots) == 2 * npos


def test_a1_roots():
    d = build_root_system("A1")
    assert set(d.roots) == {(1, -1), (-1, 1)}


def test_g2_length_split():
    d = build_root_system("G2")
    short = [a for a in d.roots if d.is_short(a)]
    long_ = [a for a in d.roots if d.is_long(a)]
    assert len(short) == 6 and len(long_) == 6


def test_c2_positive_lengths():
    d = build_root_system("C2")
    short = [a for a in d.positive if d.is_short(a)]
    long_ = [a for a in d.positive if d.is_long(a)]
    assert len(short) == 2 and len(long_) == 2


def test_root_strings():
    a2 = build_root_system("A2")
    assert a2.root_string(a2.simple[0], a2.simple[1]) == (0, 1)
    g2 = build_root_system("G2")
    assert g2.is_short(g2.simple[0]) and g2.is_long(g2.simple[1])
    assert g2.root_string(g2.simple[0], g2.simple[1]) == (0, 3)
    c2 = build_root_system("C2")
    # two orthogonal long roots: 2e1 and -2e2
    assert c2.root_string((2, 0), (0, -2)) == (0, 0)
    with pytest.raises(ValueError):
        a2.root_string(a2.simple[0], a2.simple[0])


def test_string_identity_exhaustive():
    for label in ("A1", "A2", "A3", "C2", "C3", "G2"):
        d = build_root_system(label)
        for a in d.roots:
            for b in d.roots:
                if b in (a, d.neg(a)):
                    continue
                s, t = d.root_string(a, b)
                assert s + t <= 3
                assert s - t == d.pairing(b, a)


def test_positive_roots_are_nonneg_simple_combos():
    for label in ("A3", "C3", "G2"):
        d = build_root_system(label)
        for a in d.positive:
            coeffs = d.expansion(a)
            assert all(c.denominator == 1 and c >= 0 for c in coeffs)


def test_exceptional_pairs():
    g2 = build_root_system("G2")
    shorts = [a for a in g2.roots if g2.is_short(a)]
    found60 = found120 = 0
    for a in shorts:
        for b in shorts:
            if not g2.is_root(g2.add(a, b)):
                continue
            ang = g2.angle_class(a, b)
            if ang == "60":
                assert is_exceptional_pair(g2, 3, a, b)
                assert not is_exceptional_pair(g2, 2, a, b)
                found60 += 1
            if ang == "120":
                assert is_exceptional_pair(g2, 2, a, b)
                assert not is_exceptional_pair(g2, 3, a, b)
                found120 += 1
    assert found60 and found120

    a2 = build_root_system("A2")
    for a in a2.roots:
        for b in a2.roots:
            assert not is_exceptional_pair(a2, 2, a, b)
            assert not is_exceptional_pair(a2, 3, a, b)

    c2 = build_root_system("C2")
    hit = 0
    for a in c2.roots:
        for b in c2.roots:
            if c2.is_root(c2.add(a, b)) and c2.is_short(a) and c2.is_short(b) and c2.dot(a, b) == 0:
                assert is_exceptional_pair(c2, 2, a, b)
                hit += 1
    assert hit


def test_json_dump_deterministic():
    d = build_root_system("C2")
    j1 = d.to_json()
    j2 = build_root_system("C2").to_json()
    assert j1 == j2
    data = json.loads(j1)
    assert data["type"] == "C2"
    assert len(data["roots"]) == 8
