import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from potts_stable.core import BIG_M, Instance
from potts_stable.instances import triangle_instance, random_instance
from potts_stable.io import (FormatError, dump_report, format_instance, format_labeling,
                             load_report, parse_instance, parse_labeling, read_instance,
                             write_instance)


def same(a: Instance, b: Instance) -> bool:
    return (np.array_equal(a.costs, b.costs) and np.array_equal(a.edges, b.edges)
            and np.array_equal(a.weights, b.weights))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_roundtrip_identity(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(int(rng.integers(1, 7)), int(rng.integers(1, 4)), rng)
    inst = inst.replace(costs=inst.costs * 10.0 ** rng.integers(-8, 8),
                        weights=inst.weights * np.pi)
    text = format_instance(inst)
    back = parse_instance(text)
    assert same(inst, back)
    assert format_instance(back) == text


def test_file_roundtrip(tmp_path):
    inst = triangle_instance()
    p = tmp_path / "f.txt"
    write_instance(p, inst, comment="triangle\nsecond line")
    assert same(read_instance(p), inst)
    assert p.read_text().startswith("POTTS 1\n# triangle\n# second line\n")


def test_comments_inf_and_one_indexing():
    text = """# leading comment
POTTS 1
2 1 2   # sizes
0 inf
INF 1.5
# an edge
1 2 0.25
"""
    inst = parse_instance(text)
    assert inst.costs[0, 1] == BIG_M and inst.costs[1, 0] == BIG_M
    assert inst.edges.tolist() == [[0, 1]] and inst.weights[0] == 0.25
    assert parse_instance(text, big_m=99.0).costs[0, 1] == 99.0


@pytest.mark.parametrize("text, msg", [
    ("POTTS 2\n1 0 1\n0\n", "header"),
    ("POTTS 1\n1 0\n0\n", "n m k"),
    ("POTTS 1\n2 0 1\n0\n", "cost lines"),
    ("POTTS 1\n1 0 2\n0\n", "expected 2 costs"),
    ("POTTS 1\n1 0 1\nabc\n", "cannot parse"),
    ("POTTS 1\n1 0 1\nnan\n", "non-finite"),
    ("POTTS 1\n2 1 1\n0\n0\n1 3 1\n", "out of range"),
    ("POTTS 1\n2 1 1\n0\n0\n1 2\n", "u v w"),
    ("POTTS 1\n2 1 1\n0\n0\n1 2 -1\n", "positive"),
])
def test_parse_errors(text, msg):
    with pytest.raises(FormatError, match=msg):
        parse_instance(text)


def test_labeling_files():
    assert parse_labeling("1 2\n3 # c\n").tolist() == [0, 1, 2]
    assert format_labeling([0, 1, 2]) == "1 2 3\n"
    with pytest.raises(FormatError):
        parse_labeling("1 2", n=3)
    with pytest.raises(FormatError):
        parse_labeling("0 1")
    with pytest.raises(FormatError):
        parse_labeling("1 4", k=3)


def test_report_json_deterministic():
    rep = {"b": np.float64(1.5), "a": np.arange(3), "flag": np.bool_(True), "inf": float("inf")}
    t1, t2 = dump_report(rep, "demo"), dump_report(dict(reversed(list(rep.items()))), "demo")
    assert t1 == t2
    d = load_report(t1)
    assert d["schema_version"] == 1 and d["kind"] == "demo" and d["a"] == [0, 1, 2]
    assert d["inf"] == "inf"
    with pytest.raises(FormatError):
        load_report(json.dumps({"schema_version": 99}))
