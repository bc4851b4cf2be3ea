"""Smoke test for the psu3 extension module.

Build first:
    cargo build -p psu3-python --features extension-module
then run:
    python3 crates/python/python/smoke_test.py
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys
from fractions import Fraction


def load():
    try:
        import psu3

        return psu3
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parents[3]
    for profile in ("debug", "release"):
        lib = root / "target" / profile / "libpsu3.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("psu3", str(lib))
            spec = importlib.util.spec_from_loader("psu3", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            sys.modules["psu3"] = module
            return module
    sys.exit("psu3 extension not found; build it with --features extension-module")


def main():
    psu3 = load()

    f = psu3.Field(4)
    assert f.size == 16
    for a in range(1, 16):
        assert f.mul(a, f.inv(a)) == 1
    assert f.pow(7, 16) == 7

    assert psu3.gaussian_binomial(4, 2, 2) == 35
    assert [psu3.telescoping_sum(n) for n in (1, 2, 3)] == [-1, -1, -1]
    assert psu3.prime_case(4, 13) == ("div_q2_q_1", 13)
    assert psu3.brown_check(65, 64) and psu3.brown_check(-624, 25)
    assert psu3.published_chi(4, "div_q2_q_1") == (-1600, -1600)

    # Boolean lattice on two atoms: top 0, atoms 1 and 2, bottom 3.
    assert psu3.mobius([[], [0], [0], [0, 1, 2]]) == [1, -1, -1, 1]

    cfg = psu3.RunConfig(n=1, tasks=["mu"], seed=1)
    assert "maximals" in cfg.tasks
    report = psu3.run(cfg)
    assert report.exit_code == 0, report.errors
    doc = report.to_dict()
    assert Fraction(doc["results"]["mu"]["generation_probability"]["exact"]) == Fraction(5089, 5200)
    assert report.csv() == psu3.run(cfg).csv()
    assert json.loads(report.json())["summary"]["fail"] == 0

    g = psu3.Group(1)
    assert (g.q, g.order) == (4, 62400)
    chi = g.chi(5)
    assert chi["chi"] == -624 and chi["methods_agree"]

    try:
        psu3.RunConfig(n=2, tasks=["mu"])
    except ValueError as e:
        assert "node budget" in str(e)
    else:
        raise AssertionError("mu accepted at n = 2")

    print("smoke test ok:", report.summary)


if __name__ == "__main__":
    main()
