import math
import random

import pytest

import qqmlab
from qqmlab import Quaternion


def q(*c):
    return Quaternion(*c)


def close(a, b, tol=1e-12):
    return all(abs(x - y) <= tol for x, y in zip(a.components(), b.components()))


def test_hamilton_units():
    i, j, k = q(0, 1, 0, 0), q(0, 0, 1, 0), q(0, 0, 0, 1)
    assert i * j == k
    assert j * i == -1.0 * k
    assert i * j * k == q(-1)


def test_random_axioms():
    rng = random.Random(3)
    for _ in range(500):
        a, b, c = (q(*[rng.uniform(-1, 1) for _ in range(4)]) for _ in range(3))
        assert close((a * b) * c, a * (b * c))
        assert close((a * b).conj(), b.conj() * a.conj())
        assert math.isclose(abs(a * b), abs(a) * abs(b), rel_tol=1e-13)
        assert close(a * a.inverse(), q(1))


def test_qcross_counterexample():
    z = q(0)
    kx = [q(0, 0, 0, 1), z, z]
    jy = [z, q(0, 0, 1, 0), z]
    want = [z, z, q(0, -1, 0, 0)]
    assert qqmlab.qcross(kx, jy) == want
    assert qqmlab.qcross(jy, kx) == want


def test_parse_errors_carry_lines():
    r = qqmlab.parse_config("equation = sideways\n[grid]\nn = 2\n")
    assert r["canonical"] is None
    assert any("line 1" in e and "right, left" in e for e in r["errors"])
    assert any("line 3" in e for e in r["errors"])


def test_bundled_scenarios_parse():
    names = qqmlab.list_scenarios()
    assert "ho_ground_right" in names
    for n in names:
        r = qqmlab.parse_config(qqmlab.scenario_text(n))
        assert r["errors"] == [], n


def test_run_absorber():
    report, meta, csv = qqmlab.run_scenario("absorber")
    assert report["norm"]["decay_max_rel_error"] < 0.01
    assert meta["resolution"]["n"] == 128
    assert csv.splitlines()[0].startswith("t,norm")


def test_run_bad_text_raises():
    with pytest.raises(qqmlab.ConfigError):
        qqmlab.run_scenario("name = x\n[grid]\nn = 1\n")


def test_identities_small_1d():
    res = qqmlab.check_identities(dims=1, n1d=128, min_order=1.6)
    assert {r["status"] for r in res if r["gauge"] == "-"} <= {"pass", "exact"}
    assert all(r["status"] == "skipped" for r in res if r["gauge"] != "-")
