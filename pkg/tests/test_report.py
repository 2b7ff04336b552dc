import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bkcomplex.report import Detail, ReportBuilder, VerificationReport, jsonable, skipped

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(st.text(max_size=20), st.sampled_from(["pass", "fail", "undecided", "skipped"]),
       st.one_of(finite, st.just(math.inf)), finite, st.lists(finite, max_size=3))
def test_round_trip(name, status, err, tol, obs):
    r = VerificationReport(name, status, err, tol, (Detail("d", at=1.5, observed=obs, expected=None, ok=False),), "anchor")
    text = json.dumps(r.to_dict(), allow_nan=False)
    assert VerificationReport.from_dict(json.loads(text)) == r


def test_unknown_status():
    with pytest.raises(ValueError):
        VerificationReport("x", "maybe", 0.0, 0.0)


def test_builder_status_and_max_error():
    rb = ReportBuilder("c", 1e-6)
    rb.measure("small", 1e-9)
    assert rb.build().status == "pass"
    rb.measure("big", 1e-3)
    r = rb.build()
    assert r.status == "fail" and r.max_error == 1e-3


def test_pass_implies_error_within_tolerance():
    rb = ReportBuilder("c", 1e-6)
    rb.measure("loose", 1e-4, tol=1e-3)
    r = rb.build()
    # a per-entry tolerance above the report tolerance still counts
    assert r.status == "pass"
    rb2 = ReportBuilder("c", 1e-6)
    rb2.measure("x", 5e-7)
    assert rb2.build().max_error <= 1e-6


def test_nan_error_fails():
    rb = ReportBuilder("c", 1.0)
    rb.measure("nan", math.nan)
    assert rb.build().status == "fail"


def test_crash_and_notes():
    rb = ReportBuilder("c", 1.0)
    rb.note("info", observed=3)
    assert rb.build().status == "pass"
    rb.crash(RuntimeError("boom"))
    r = rb.build()
    assert r.status == "fail" and "boom" in r.details[-1].description


def test_skipped_counts_as_passed():
    r = skipped("elliptic", "needs k >= 2")
    assert r.status == "skipped" and r.passed


def test_jsonable():
    import numpy as np

    assert jsonable({"a": np.float64(1.5), "b": 2j, "c": (np.int64(3), None)}) == {"a": 1.5, "b": [0.0, 2.0], "c": [3, None]}
