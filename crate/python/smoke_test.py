"""Smoke test for the `emergence` extension module.

Build and install first:

    pip install --no-build-isolation -e crates/python
    python python/smoke_test.py
"""

import json
import math
import tempfile

import emergence


def check(name, ok, detail=""):
    print(f"{'ok  ' if ok else 'FAIL'} {name} {detail}")
    if not ok:
        raise SystemExit(1)


def classical():
    ho = emergence.SystemModel.harmonic(1.0, 1.0)
    q0, q1, t = 0.3, -0.7, 1.1
    exact = ((q0 * q0 + q1 * q1) * math.cos(t) - 2 * q0 * q1) / (2 * math.sin(t))
    s = ho.action(q0, 0.0, q1, t)
    check("harmonic action", abs(s - exact) < 1e-5, f"{s:.6f} vs {exact:.6f}")
    times, q, p, energy = ho.trajectory(1.0, 0.0, 10.0, 1e-3)
    check("energy drift", max(abs(e - energy[0]) for e in energy) < 1e-6)
    coarse, fine = ho.hj_refinement(0.3, (-1.0, 1.0), (0.6, 2.0), 12, 12)
    check("hj refinement", coarse / fine > 3.5, f"ratio {coarse / fine:.2f}")


def stochastic():
    ens = emergence.Ensemble("linear", 1.0, 0.5, 0.0, 3.01, 1e-3, 4000, seed=1, km_window=1)
    last = ens.column(len(ens.times) - 1)
    var = sum(x * x for x in last) / len(last)
    check("ou variance", abs(var - 0.5) < 0.05, f"{var:.4f}")
    bins = ens.kramers_moyal(1, 10)
    z = max(abs(b[1] + b[0]) / b[2] for b in bins)
    check("km drift", z < 4.0, f"max z {z:.2f}")


def fokker_planck():
    op = emergence.FokkerPlanck(-5.0, 5.0, 200, "linear", 1.0, 0.5)
    rho = op.stationary()
    h = 10.0 / 200
    mass = sum(rho) * h
    var = sum(x * x * r for x, r in zip(op.centers, rho)) * h
    check("stationary mass", abs(mass - 1.0) < 1e-12)
    check("stationary variance", abs(var - 0.5) < 2e-3, f"{var:.5f}")


def path_measure():
    act = emergence.PathAction.harmonic(1.0, 1.0, 1.0, 0.5)
    ens = act.sample(16, 11000, chains=2, seed=3)
    q2, err = ens.q2()
    exact = act.exact_q2(16)
    check("path <q^2>", abs(q2 - exact) < 4 * err, f"{q2:.4f} +- {err:.4f} vs {exact:.4f}")
    check("acceptance", 0.2 <= ens.acceptance <= 0.8, f"{ens.acceptance:.3f}")
    check("constant path action", abs(act.action([0.0] * 8)) == 0.0)


def os_field():
    field = emergence.FreeField(16, 1.0)
    times = field.times
    spike = [1.0 if t == 1 else 0.0 for t in times]
    c = field.characteristic(spike)
    check("characteristic in (0, 1]", 0.0 < c <= 1.0, f"{c:.6f}")
    fs = [[0.5 if t == k else 0.0 for t in times] for k in (1, 2, 3)]
    min_eig, herm = field.gram(fs)
    check("gram positivity", min_eig >= -1e-10 and herm <= 1e-12, f"min eig {min_eig:.3e}")


def harness():
    with tempfile.TemporaryDirectory() as out:
        m = json.loads(emergence.run_experiment("fokker-planck", out, [("steps", "100")], seed=4))
        check("manifest", m["seed"] == 4 and m["config"]["steps"] == "100")
        check("manifest checks", all(c["passed"] for c in m["checks"]))
    try:
        emergence.run_experiment("langevin", "/tmp", [("foo", "1")])
    except ValueError as e:
        check("unknown key rejected", "foo" in str(e))
    else:
        check("unknown key rejected", False)


if __name__ == "__main__":
    classical()
    stochastic()
    fokker_planck()
    path_measure()
    os_field()
    harness()
    print("smoke test passed")
