import json
from fractions import Fraction

import mpmath
import pytest

from okv.exact import l1_ball_count
from okv.jsonio import atomic_write, canonical_json, content_hash, decode_rat, encode_rat, fmt_log, log_int


def test_rational_round_trip():
    for x in (Fraction(0), Fraction(-7, 3), Fraction(10 ** 30 + 1, 7)):
        assert decode_rat(encode_rat(x)) == x
    assert encode_rat(Fraction(4, 2)) == "2"
    with pytest.raises(ValueError):
        decode_rat(1.5)


def test_huge_counts_serialise():
    n = l1_ball_count(2, 2 ** 20000)
    text = canonical_json({"count": str(n)})
    assert int(json.loads(text)["count"]) == n
    assert abs(log_int(n) - (2 * 20000 * mpmath.log(2) + mpmath.log(2))) < 1e-5


def test_hash_is_key_order_independent():
    assert content_hash({"a": 1, "b": [1, 2]}) == content_hash({"b": [1, 2], "a": 1})
    assert content_hash({"a": 1}) != content_hash({"a": 2})


def test_fmt_log_has_twenty_digits():
    s = fmt_log(log_int(2))
    assert s == "0.69314718055994530942"


def test_atomic_write(tmp_path):
    path = tmp_path / "sub" / "x.txt"
    atomic_write(str(path), "hello")
    atomic_write(str(path), "world")
    assert path.read_text() == "world"
    assert [p.name for p in path.parent.iterdir()] == ["x.txt"]
