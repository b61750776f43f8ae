import pytest

from sl2btree.field import field
from sl2btree.verify import SUITES, run_all, run_suite


def test_every_suite_passes_over_the_binary_field():
    results = run_all(field(2), seed=0)
    assert [r.name for r in results] == list(SUITES)
    for r in results:
        assert r.checks > 0
        assert r.passed, f"{r.name} failed: {r.failures}"


def test_results_are_deterministic_for_a_fixed_seed():
    first = run_all(field(2), seed=7, names=["distance-bfs"])
    second = run_all(field(2), seed=7, names=["distance-bfs"])
    assert [(r.name, r.checks, r.passed) for r in first] == [
        (r.name, r.checks, r.passed) for r in second
    ]


def test_unknown_suite_name():
    with pytest.raises(KeyError):
        run_suite(field(2), "no-such-suite", seed=0)


def test_spot_suites_over_larger_fields():
    assert run_suite(field(3), "busemann-cocycle", seed=1).passed
    assert run_suite(field(4), "action-compatibility", seed=1).passed


def test_result_string_form():
    r = run_suite(field(2), "busemann-cocycle", seed=0)
    assert str(r) == "busemann-cocycle: 36 checks, ok"
