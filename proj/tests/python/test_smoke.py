"""Smoke tests for the python bindings. Run either under pytest or directly:

    PYTHONPATH=<builddir>/python python3 tests/python/test_smoke.py
"""

import math

import cvmdi


def test_symplectic_vacuum():
    nu = cvmdi.symplectic_eigenvalues(cvmdi.tmsv_covariance(1.0))
    assert abs(nu.nu1 - 1.0) < 1e-12
    assert abs(nu.nu2 - 1.0) < 1e-12


def test_entropy_anchors():
    assert cvmdi.entropy_g(1.0) == 0.0
    assert abs(cvmdi.entropy_g(3.0) - 2.0) < 1e-12


def test_fock_round_trip():
    state = cvmdi.build_tmsc(2.0, 0.0, 60, 60)
    assert abs(state.norm_sq - 1.0) < 1e-12
    sub, p = cvmdi.subtract_photon(state, 0.9)
    lam2 = 1.0 / 3.0
    closed = 0.1 * lam2 * (1 - lam2) / (1 - lam2 * 0.9) ** 2
    assert abs(p - closed) < 1e-10
    mean, cov = cvmdi.moments(sub)
    assert abs(cov.m[0][0] - 33.0 / 7.0) < 1e-9


def test_keyrate_tmsv():
    link = cvmdi.LinkBudget()
    link.L_AC_km = 50.0
    spec = cvmdi.StateSpec(cvmdi.StateFamily.TMSV, 6.0)
    r = cvmdi.secret_key_rate(spec, link)
    assert r.p_sps == 1.0
    assert abs(r.K - 5.116136523089149e-02) < 1e-12


def test_keyrate_sps():
    link = cvmdi.LinkBudget()
    link.L_AC_km = 50.0
    spec = cvmdi.StateSpec(cvmdi.StateFamily.SPS_TMSC, 6.0, 5.0, 0.99)
    r = cvmdi.secret_key_rate(spec, link)
    assert 0.0 < r.p_sps < 1.0
    assert abs(r.p_sps - 0.3459228639) < 1e-7
    assert r.K > 0.0


def test_postselection_error_maps_to_python():
    link = cvmdi.LinkBudget()
    link.L_AC_km = 50.0
    spec = cvmdi.StateSpec(cvmdi.StateFamily.SPS_TMSV, 6.0, 0.0, 1.0)
    try:
        cvmdi.secret_key_rate(spec, link)
    except cvmdi.CvmdiError:
        pass
    else:
        raise AssertionError("expected CvmdiError for Ts = 1")


def test_optimizer_smoke():
    link = cvmdi.LinkBudget()
    link.L_AC_km = 25.0
    res = cvmdi.optimize_key_rate(cvmdi.StateFamily.TMSV, link)
    assert abs(res.best.V - 15.0) < 1e-6
    assert res.best_K > 0.2
    assert res.at_boundary[0] == cvmdi.BoundarySide.UPPER


def test_scan_and_frontier():
    link = cvmdi.LinkBudget()
    link.L_AC_km = 80.0
    scan = cvmdi.scan_variance(cvmdi.StateFamily.TMSV, link,
                               [1.0, 4.0, 8.0, 12.0])
    assert scan.points[0].K <= 0.0
    assert scan.argmax_index in (1, 2)
    pts = cvmdi.frontier(cvmdi.StateFamily.TMSV, [1.0, 6.0], 1e-3,
                         cvmdi.LinkBudget(), 0.0, 0.0)
    assert pts[0].L_max is None
    assert pts[1].L_max > 100.0


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    main()
