
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tpsforge.linalg import DEFAULT_TOL
from tpsforge.report import Report, digest, parse_json, sanitize, to_json, to_text


def test_sanitize_types():
    out = sanitize({"a": np.float64(1 / 3), "b": np.int64(4), "c": (1, 2), "d": 1 + 2j, "e": np.bool_(True),
                    "f": np.array([[1.5]])})
    assert out == {"a": 0.333333333333333, "b": 4, "c": [1, 2], "d": {"re": 1.0, "im": 2.0}, "e": True, "f": [[1.5]]}
    assert sanitize(float("inf")) == "inf"
    with pytest.raises(TypeError):
        sanitize(object())


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fifteen_significant_digits(x):
    y = sanitize(x)
    assert y == float(f"{x:.15g}")
    assert sanitize(y) == y


def _report(**sections):
    return Report("demo", "0.0", digest({"k": 1}), 7, DEFAULT_TOL, sections, {"ok": True})


@given(st.recursive(st.floats(allow_nan=False, allow_infinity=False) | st.integers(-10**6, 10**6) | st.text(max_size=5),
                    lambda inner: st.lists(inner, max_size=3) | st.dictionaries(st.text(max_size=4), inner, max_size=3),
                    max_leaves=10))
def test_json_roundtrip(payload):
    rep = _report(payload=payload)
    text = to_json(rep)
    assert parse_json(text) == rep.as_dict()
    assert to_json(rep) == text


def test_report_echoes_seed_and_tolerances():
    d = _report().as_dict()
    assert d["seed"] == 7 and d["tolerances"] == DEFAULT_TOL.as_dict()
    assert d["passed"] is True and d["tool"] == "tpsforge"


def test_digest_is_order_independent():
    assert digest({"a": 1, "b": [1.0, 2]}) == digest({"b": [1.0, 2], "a": 1})
    assert digest({"a": 1}) != digest({"a": 2})


def test_text_rendering():
    text = to_text(_report(table={"pairs": [[1, 2], [3, 4]]}))
    assert "seed: 7" in text
    assert "pairs:" in text and "- [1, 2]" in text
