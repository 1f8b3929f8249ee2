"""Smoke test for the Python bindings.

Build and install first:  pip install --no-build-isolation ./crates/python
"""

import math

import embedded_dirac as ed


def main():
    pot = ed.Potential.supercritical(1.0, 2.0, 0.3)
    v, phi = pot.eval(9.0)
    assert abs(v - 0.2) < 1e-15, v

    traj = ed.integrate(pot, 1.0, 0.3, (0.0, 1e3))
    assert abs(traj.ln_r_at(999.0) + 2.0 * math.log(1000.0)) < 1e-6
    alpha, _ = traj.decay_exponent((0.0, 1e3))
    assert abs(alpha - 2.0) < 0.01, alpha
    assert traj.l2_verdict() == "converging"

    # the raw oracle agrees on a short span
    for x, u, v in ed.integrate_direct(pot, 1.0, 0.3, (0.0, 20.0))[::200]:
        assert abs(math.hypot(u, v) / math.exp(traj.ln_r_at(x)) - 1.0) < 1e-6

    sub = ed.Potential.locked_coulomb(1.0, 0.3, 0.3)
    cert = ed.no_eigenvalue_bound(sub, 1.0, 0.3, (0.0, 1e4))
    assert cert["passed"], cert

    k = ed.k_gap(1.0, [-1.0, 3.0])
    multi = ed.Potential.multi([(1.0, 0.2), (-1.0, 1.4)], x_start=1.05 * k, k_gap=k)
    assert len(multi) > 4

    try:
        ed.Potential.supercritical(1.0, 0.4)
    except ValueError as e:
        assert "1/2" in str(e)
    else:
        raise AssertionError("A = 0.4 should be rejected")

    terms = ed.critical_series(1, 3)
    assert [t[0] for t in terms] == [1, 2, 3]
    print("smoke test passed")


if __name__ == "__main__":
    main()
