"""Serialization helpers shared by reports and the command line runner.

Rationals travel as ``"p/q"`` strings, integers as decimal strings, and
logarithms as 20 significant digit decimals so that runs are reproducible
bit for bit across implementations.
"""
from __future__ import annotations

import hashlib
import json
import os
import sys
import tempfile
from fractions import Fraction
from typing import Any, Sequence

import mpmath

LOG_DIGITS = 20
PREC_BITS = 128

# exact counts routinely have tens of thousands of digits
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)


def encode_rat(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decode_rat(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    if not isinstance(s, str):
        raise ValueError(f"expected a rational string, got {s!r}")
    return Fraction(s.strip())


def encode_rat_vector(v: Sequence) -> list[str]:
    return [encode_rat(x) for x in v]


def encode_int_vector(v: Sequence[int]) -> list[str]:
    return [str(int(x)) for x in v]


def decode_int_vector(v: Sequence) -> tuple[int, ...]:
    return tuple(int(x) for x in v)


def fmt_log(x) -> str:
    """A high precision real as a 20 significant digit decimal string."""
    with mpmath.workprec(PREC_BITS):
        return mpmath.nstr(mpmath.mpf(x), LOG_DIGITS, min_fixed=-5, max_fixed=25, strip_zeros=False)


def log_int(n: int) -> mpmath.mpf:
    """Natural log of a positive integer at the package precision."""
    with mpmath.workprec(PREC_BITS):
        return +mpmath.log(mpmath.mpf(n))


def log_rat(x) -> mpmath.mpf:
    x = Fraction(x)
    with mpmath.workprec(PREC_BITS):
        return mpmath.log(mpmath.mpf(x.numerator)) - mpmath.log(mpmath.mpf(x.denominator))


def _default(o: Any):
    if isinstance(o, Fraction):
        return encode_rat(o)
    if isinstance(o, mpmath.mpf):
        return fmt_log(o)
    if hasattr(o, "to_dict"):
        return o.to_dict()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_default)


def content_hash(obj: Any) -> str:
    """sha256 of the canonical JSON form (first 16 hex digits)."""
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:16]


def atomic_write(path: str, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
