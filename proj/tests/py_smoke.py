"""Smoke test for the python bindings.

Run with PYTHONPATH holding both the built _core extension and python/.
"""

import json
import tempfile
from pathlib import Path

import mareq

TINY = json.dumps({
    "kind": "network",
    "nodes": 2,
    "arcs": [
        {"tail": 0, "head": 1, "cost": {"form": "affine", "c0": 1.0, "c1": 1.0}},
        {"tail": 0, "head": 1, "cost": {"form": "affine", "c0": 2.0, "c1": 1.0}},
    ],
    "pairs": [
        {
            "origin": 0,
            "dest": 1,
            "paths": [[0], [1]],
            "buyers": [
                {"disutility": {"form": "affine", "c0": 10.0, "c1": -1.0}, "cap": 10.0}
            ],
        }
    ],
})


def expect_raises(kind, fn):
    try:
        fn()
    except kind:
        return
    raise AssertionError(f"expected {kind.__name__}")


def main():
    assert mareq.__version__

    # generation is deterministic and round-trips through json
    gen = mareq.generate_network(seed=5)
    assert gen.kind == "network" and "network" in repr(gen)
    text = gen.to_json()
    assert mareq.generate_network(seed=5).to_json() == text
    assert mareq.parse_instance(text).to_json() == text

    with tempfile.TemporaryDirectory(prefix="mareq_py_") as tmp:
        path = str(Path(tmp) / "inst.json")
        mareq.save_instance(gen, path)
        assert mareq.load_instance(path).to_json() == text

    res = mareq.solve(gen, method="pl", accuracy=1e-3)
    assert res["status"] == "converged" and res["delta"] <= 1e-3, res

    # tiny parallel-arc instance: x=(10/3, 7/3), y=17/3
    tiny = mareq.parse_instance(TINY)
    for method in ("pl", "cpl"):
        res = mareq.solve(tiny, method=method, accuracy=1e-6)
        assert res["status"] == "converged", res
        x, y = res["x"], res["y"]
        assert abs(x[0] - 10.0 / 3.0) < 1e-2 and abs(x[1] - 7.0 / 3.0) < 1e-2, res
        assert abs(y[0] - 17.0 / 3.0) < 1e-2, res
        assert abs(res["objective"] - mareq.objective(tiny, x, y)) < 1e-12

        for form in ("kkt", "complementarity", "implication"):
            rep = mareq.verify(tiny, x, y, form=form, tol=1e-2)
            assert rep["passed"], (form, rep["detail"])
    assert not mareq.verify(tiny, [5.0, 0.0], [5.0], tol=1e-2)["passed"]

    # parallel arcs: path flows are the arc flows, costs are affine in them
    flows = mareq.arc_flows(tiny, x, y)
    assert flows == x
    costs = mareq.path_costs(tiny, flows)
    assert abs(costs[0] - (1.0 + x[0])) < 1e-12
    assert abs(costs[1] - (2.0 + x[1])) < 1e-12

    # wireless: plain solve ignores provider caps, the penalty loop needs them
    wgen = mareq.generate_wireless(seed=2, providers=3, classes=2)
    assert wgen.kind == "wireless"
    assert mareq.solve(wgen, accuracy=1e-3)["status"] == "converged"
    expect_raises(ValueError, lambda: mareq.solve_penalized(wgen))

    wdoc = json.loads(wgen.to_json())
    for p in wdoc["providers"]:
        p["cap"] = 1.0  # tight enough to bind, so every penalty stage runs
    capped = mareq.parse_instance(json.dumps(wdoc))
    res = mareq.solve_penalized(capped, accuracy=1e-3, tau0=10.0, stages=2)
    stages = res["stages"]
    assert len(stages) == 2 and stages[1]["tau"] == 100.0, stages
    assert stages[1]["violation"] <= stages[0]["violation"] + 1e-12, stages

    # experiment: csv table plus per-method crossings
    out = mareq.run_experiment(json.dumps({
        "instance": json.loads(TINY),
        "methods": ["pl", "cpl"],
        "thresholds": [10.0, 1.0, 0.1],
    }))
    assert out["table"].splitlines()[0] == "accuracy,pl,cpl", out["table"]
    for o in out["outcomes"]:
        assert o["method"] in ("pl", "cpl") and len(o["crossings"]) == 3
        assert all(c is not None for c in o["crossings"]), o

    # error mapping: std::invalid_argument surfaces as ValueError
    expect_raises(ValueError, lambda: mareq.solve(tiny, method="sgd"))
    expect_raises(ValueError, lambda: mareq.parse_instance("{nope"))
    expect_raises(ValueError,
                  lambda: mareq.verify(wgen, [0.0] * 3, [0.0] * 2,
                                       form="complementarity"))
    expect_raises(ValueError, lambda: mareq.arc_flows(wgen, [0.0] * 3, [0.0] * 2))

    print("python smoke: all checks passed")


if __name__ == "__main__":
    main()
