import math

import pytest

import qsphere


def bec(dim, N, beta=0.5):
    return qsphere.build_bec_problem(qsphere.BecSpec(dim=dim, N=N, beta=beta))


def test_ground_state_1d():
    p = bec(1, 201)
    cfg = qsphere.AdmmConfig()
    cfg.rho = 100.0
    admm = qsphere.solve_admm(p, cfg)
    rn = qsphere.solve_rn(p)
    oracle = qsphere.solve_reform(p)
    for value in (admm.objective, rn.objective, oracle.value):
        assert value == pytest.approx(5.4492, abs=1e-3)
    assert rn.lambda_ == pytest.approx(5.8214, abs=1e-3)
    assert admm.converged and rn.converged


def test_certificate_and_flip():
    p = bec(2, 9)
    r = qsphere.solve_rn(p)
    c = qsphere.certify(p, r.x)
    assert c.verdict == qsphere.Verdict.GLOBAL
    assert qsphere.certify(p, [-v for v in r.x]).verdict == qsphere.Verdict.GLOBAL


def test_observer_sees_every_iteration():
    p = bec(2, 9)
    seen = []
    r = qsphere.solve_admm(p, observer=seen.append)
    assert len(seen) == r.iterations
    assert [rec.k for rec in seen] == list(range(1, r.iterations + 1))


def test_small_matrix_and_scf():
    B = qsphere.SparseSymmetricMatrix.from_triplets(
        3, [(0, 0, 2), (1, 1, 2), (2, 2, 2), (0, 1, -1), (1, 0, -1), (1, 2, -1), (2, 1, -1)]
    )
    p = qsphere.Problem(1.0, B)
    assert p.n == 3 and p.validated
    assert B.to_dense()[0] == [2.0, -1.0, 0.0]
    scf = qsphere.solve_scf(p)
    rn = qsphere.solve_rn(p)
    assert scf.objective == pytest.approx(rn.objective, abs=1e-8)
    found = qsphere.enumerate_stationary(p, 40)
    assert found[0].sign_uniform
    assert sum(sp.sign_uniform for sp in found) == 1
    assert found[0].lambda_ == pytest.approx(qsphere.rayleigh_lambda(p, rn.x), abs=1e-7)


def test_projection():
    assert qsphere.project_sphere_nonneg([3.0, -4.0]) == [1.0, 0.0]
    x = qsphere.project_sphere_nonneg([1.0, 1.0])
    assert math.isclose(x[0], 1 / math.sqrt(2))


def test_errors():
    with pytest.raises(ValueError):
        qsphere.Problem(1.0, qsphere.SparseSymmetricMatrix.identity(2))
    p = bec(1, 11)
    with pytest.raises(ValueError):
        qsphere.objective(p, [1.0])
    with pytest.raises(ValueError):
        qsphere.certify(p, [1.0] * p.n)
