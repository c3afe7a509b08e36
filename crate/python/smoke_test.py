"""Smoke test for the m0n extension module.

Build and expose it with:
    cargo build --release -p m0n-py --features extension-module
    cp target/release/libm0n.so python/m0n.so
then run `python3 python/smoke_test.py` (or `pytest python/`).
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import m0n  # noqa: E402

TWO_VERTEX = {
    "markings": [1, 2, 3, 4, 5],
    "vertices": [
        {"id": 0, "marks": {"1": "0", "2": "1"}},
        {"id": 1, "marks": {"3": "0", "4": "1", "5": "2"}},
    ],
    "edges": [{"v": 0, "w": 1, "pos_v": "inf", "pos_w": "inf"}],
}


def evaluate(poly, value):
    return sum(int(t["coeff"]) * value ** len(t["subset"]) for t in poly["terms"])


def test_configurations():
    assert m0n.cross_ratio("0,1,inf,2") == "2"
    assert m0n.type_of("0,0,1,inf") == "1,2|3|4"
    form = m0n.orbit_form("0,1,inf,2")
    assert form["monomials"]


def test_trees():
    assert [len(m0n.enumerate_trees(n)) for n in (3, 4, 5, 6)] == [1, 4, 26, 236]
    s = m0n.stabilize(TWO_VERTEX, [1, 3, 4, 5])
    assert len(s["vertices"]) == 1
    assert m0n.separating_node_exists(TWO_VERTEX, [1, 2], [3, 4, 5])
    assert not m0n.separating_node_exists(TWO_VERTEX, [1, 3], [2, 4, 5])


def test_invariants():
    generic = m0n.hilbert_poly(n=5)
    assert m0n.hilbert_poly(tree=TWO_VERTEX) == generic
    assert evaluate(m0n.hilbert_poly(n=4), 1) == 15
    assert m0n.chow_class(tree=TWO_VERTEX) == m0n.chow_class(n=5)
    sig = m0n.signature(TWO_VERTEX)
    assert len(sig) == 5


def test_errors():
    try:
        m0n.hilbert_poly(type_="1,2|3")
    except m0n.M0nError as e:
        assert e.args[0] == "TooDegenerateType"
    else:
        raise AssertionError("expected M0nError")


def test_verify():
    assert m0n.verify_hilbert(n=4)["passed"]
    assert m0n.verify_chow(n=5)["passed"]
    assert m0n.verify_degeneration(n=5, samples=50)["passed"]
    assert m0n.verify_boundary(n=5, samples=50)["passed"]
    assert m0n.verify_operads(max_n=5)["passed"]


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"{name}: ok")
