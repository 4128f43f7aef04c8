"""Smoke test for the decentral_lqr extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`
or `pip install --no-build-isolation ./crates/python`.
"""

import json
import math

import decentral_lqr as dl


def close(a, b, tol):
    return all(abs(x - y) <= tol for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def main():
    prob = dl.LqrProblem(
        A=[[1.0, 2.0], [-3.0, 4.0]],
        B=[[1.0, 0.0], [0.0, 1.0]],
        Q=[[3.0, 0.0], [0.0, 8.0]],
        R=[[1.0, 0.0], [0.0, 1.0 / 6.0]],
    )
    sol = prob.solve()
    assert close(sol.P, [[3.0, 0.0], [0.0, 2.0]], 1e-8), sol.P
    assert close(sol.K, [[3.0, 0.0], [0.0, 12.0]], 1e-8), sol.K
    assert sol.residual <= 1e-10
    assert abs(sol.h2_squared - 5.0) <= 1e-8

    report = prob.oracle_check()
    assert report.oracle_decentralized
    assert report.offdiag_mass <= 1e-12

    verdict = dl.thm1_check(1.0, 2.0, -3.0, 4.0, 3.0, 8.0, 1.0, 6.0)
    assert verdict["holds"], verdict
    q0, gamma0 = dl.thm1_synthesize(1.0, 2.0, -3.0, 4.0, 8.0, 6.0)
    assert abs(q0 - 3.0) <= 1e-12 and abs(gamma0 - 1.0) <= 1e-12

    care = dl.solve_care([[1.0, 1.0], [-1.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]],
                         [[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]])
    c = 1.0 + math.sqrt(2.0)
    assert close(care["K"], [[c, 0.0], [0.0, c]], 1e-8)

    lap = dl.diffusion_operator(8, 1.0)
    assert lap.first_row == [-2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]
    assert abs(lap.eigenvalues()[4] - (-4.0)) <= 1e-12
    q_row = [(1.0 if i == 0 else 0.0) - 2.0 * v for i, v in enumerate(lap.first_row)]
    identity = [1.0] + [0.0] * 7
    assert abs(dl.thm2_find_c(lap.first_row, identity, q_row, identity) - 1.0) <= 1e-9

    holds, gain = dl.cor3_check([-2.0, -1.0], [2.0, 1.0], [1.0, 0.0], [1.0, 0.0])
    assert holds and abs(gain - (math.sqrt(2.0) - 1.0)) <= 1e-9

    d = dl.diffusion_operator(4, 1.0).materialize()
    eye = [[1.0 if i == j else 0.0 for j in range(4)] for i in range(4)]
    q0m = [[eye[i][j] - 2.0 * d[i][j] for j in range(4)] for i in range(4)]
    q2m = [[2.0 * eye[i][j] - 4.0 * d[i][j] for j in range(4)] for i in range(4)]
    so = dl.reduce_and_solve(d, d, eye, q0m, q2m, eye)
    assert so.agreement_residual <= 1e-7
    assert close(so.gain_vel, [[2.0 * v for v in row] for row in eye], 1e-6)
    assert so.check().oracle_decentralized

    ok, mass = dl.pattern_decentralized([[1.0, 0.5], [0.0, 1.0]])
    assert not ok and mass > 0.0
    ok, _ = dl.pattern_decentralized([[1.0, 0.5], [0.0, 1.0]], neighborhoods=[[0, 1], [1]])
    assert ok

    config = {
        "axis1": {"name": "q", "min": 0.5, "max": 2.0, "steps": 3},
        "axis2": {"name": "g", "min": 0.5, "max": 2.0, "steps": 3},
        "coupling": "qr_ratios",
    }
    csv, summary = dl.run_sweep(json.dumps(config))
    assert len(csv.strip().splitlines()) == 1 + 9
    assert json.loads(summary)["summary"]["points"] == 9

    system = {"kind": "dense", "A": [[1.0, 2.0], [-3.0, 4.0]], "B": [[1.0, 0.0], [0.0, 1.0]],
              "Q": [[3.0, 0.0], [0.0, 8.0]], "R": [[1.0, 0.0], [0.0, 1.0 / 6.0]]}
    checked = json.loads(dl.check_system(json.dumps(system), "thm1"))
    assert checked["oracle_decentralized"]

    try:
        dl.solve_care([[1.0, 0.0], [0.0, 1.0]], [[1.0], [0.0]], [[1.0, 0.0], [0.0, 1.0]], [[1.0]])
    except dl.SolverError:
        pass
    else:
        raise AssertionError("unstabilizable pair should raise SolverError")
    try:
        dl.LqrProblem(A=[[1.0, 2.0]], B=[[1.0]], Q=[[1.0]], R=[[1.0]])
    except ValueError:
        pass
    else:
        raise AssertionError("non-square A should raise ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
