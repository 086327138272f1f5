"""Semantic versions and version ranges."""

import pytest

from updcheck.registry import ANY_VERSION, Version, VersionRange, parse_pin


def v(text):
    return Version.parse(text)


def test_parse_round_trip():
    for text in ("0.0.0", "1.2.3", "10.20.30", "2.0.0"):
        assert str(v(text)) == text


@pytest.mark.parametrize("bad", ["", "1", "1.2", "1.2.3.4", "1.2.x",
                                 "a.b.c", "1.2.-3", "1..3", " ", "v1.2.3"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ValueError):
        v(bad)


def test_ordering_is_numeric_not_lexicographic():
    assert v("1.2.3") < v("1.2.10")
    assert v("1.9.0") < v("1.10.0")
    assert v("2.0.0") > v("1.99.99")
    assert sorted([v("1.10.0"), v("1.2.0"), v("1.9.9")]) == \
        [v("1.2.0"), v("1.9.9"), v("1.10.0")]


def test_equality_and_hash():
    assert v("1.2.3") == v("1.2.3")
    assert v("1.2.3") != v("1.2.4")
    assert len({v("1.0.0"), v("1.0.0"), v("2.0.0")}) == 2


def test_range_half_open():
    r = VersionRange.parse(">=1.0.0 <2.0.0")
    assert r.satisfies(v("1.0.0"))
    assert r.satisfies(v("1.99.0"))
    assert not r.satisfies(v("2.0.0"))
    assert not r.satisfies(v("0.9.9"))


def test_range_exact_and_wildcard():
    assert VersionRange.parse("=1.2.3").satisfies(v("1.2.3"))
    assert not VersionRange.parse("=1.2.3").satisfies(v("1.2.4"))
    assert ANY_VERSION.satisfies(v("0.0.0"))
    assert VersionRange.parse("*").satisfies(v("9.9.9"))


def test_range_intersection_conjunction():
    a = VersionRange.parse(">=1.0.0 <2.0.0")
    b = VersionRange.parse(">=1.2.0")
    both = a.intersect(b)
    assert not both.satisfies(v("1.1.9"))
    assert both.satisfies(v("1.2.0"))
    assert not both.satisfies(v("2.0.0"))


@pytest.mark.parametrize("bad", ["", ">=", "~1.2.3", ">= 1.0.0", "1.0.0 -"])
def test_range_rejects_malformed(bad):
    with pytest.raises(ValueError):
        VersionRange.parse(bad)


def test_range_str_round_trip():
    for text in (">=1.0.0 <2.0.0", "=1.2.3", "*", ">0.1.0 <=0.2.0"):
        assert str(VersionRange.parse(text)) == text


def test_parse_pin():
    name, version = parse_pin("p1=2.0.0")
    assert name == "p1"
    assert version == v("2.0.0")
    for bad in ("p1", "=1.0.0", "p1=", "p1=nope", "p1=1.0.0=2.0.0"):
        with pytest.raises(ValueError):
            parse_pin(bad)
