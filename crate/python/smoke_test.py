"""Loads the compiled extension from target/ and runs a few commands.

    cargo build -p weighted-rht-py
    python3 python/smoke_test.py
"""
import importlib.util
import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent

CP2 = """
cdga M { gen x : deg 2, wt 2; gen y : deg 5, wt 6; d y = x^3; window 0..14; }
"""


def load():
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libweighted_rht_py.so"
        if lib.exists():
            spec = importlib.util.spec_from_file_location("weighted_rht_py", lib)
            mod = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(mod)
            return mod
    sys.exit("build the extension first: cargo build -p weighted-rht-py")


def main():
    w = load()
    assert len(w.COMMANDS) == 12
    rep = json.loads(w.run("cohomology", CP2, window="0..10"))
    assert rep["passed"], rep
    assert rep["result"]["betti"]["4"] == 1
    rep = json.loads(w.run("aut-model", CP2, window="-6..0"))
    assert rep["result"]["weights"] == "negative", rep
    assert "gen x" in w.normalize(CP2)
    try:
        w.run("check", "cdga M { gen x }")
    except ValueError as e:
        print("parse error reported:", e)
    else:
        raise AssertionError("expected a parse error")
    print("ok")


if __name__ == "__main__":
    main()
