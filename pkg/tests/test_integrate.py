import numpy as np
import pytest

from twotier import (CellMoments, Deployment, Integrator, Mode, Scenario, ap_power, cell_moments,
                     distortion, distortion_parallel_axis, gradient_residual, grid, sensor_power)
from twotier.integrate import gradients, moments_from_labels, partition, power_report, quadrature
from twotier.model import Density
from twotier.oracle import strip_scenario

from conftest import deployments


def test_quadrature_weights_sum_to_one(wsn1):
    for g in (grid(64), Integrator(Mode.MONTE_CARLO, 5000, seed=3)):
        q = quadrature(wsn1, g)
        assert q.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert q.points.shape == (len(q.weights), 2)


def test_integrator_rejects_tiny_resolution():
    with pytest.raises(ValueError):
        grid(4)


def test_single_cell_moments(wsn1):
    s = wsn1.replace(a=[1.0], b=[[1.0]], strong_aps=())
    m = cell_moments(s, Deployment([[1.0, 2.0]], [[3.0, 3.0]], [0]))
    np.testing.assert_allclose(m.v, [1.0])
    np.testing.assert_allclose(m.c, [[5.0, 5.0]], atol=1e-12)


def test_bisected_square(square):
    d = Deployment([[2.5, 5.0], [7.5, 5.0]], [[5.0, 5.0]], [0, 0])
    m = cell_moments(square, d)
    np.testing.assert_allclose(m.v, [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(m.c, [[2.5, 5.0], [7.5, 5.0]], atol=1e-12)
    assert not m.empty.any()


def test_empty_cell_has_nan_centroid():
    s = strip_scenario([1.0, 100.0], [[1.0], [100.0]], 1.0)
    y = 5e-4
    d = Deployment([[0.5, y], [0.0, y]], [[0.5, y]], [0, 0])
    m = cell_moments(s, d)
    assert m.v[1] == 0.0
    assert m.empty.tolist() == [False, True]


def test_sensor_power_unit_square(unit_square):
    d = Deployment([[0.5, 0.5]], [[0.5, 0.5]], [0])
    # midpoint error is h^2 / 6 for h = 1/512
    assert sensor_power(unit_square, d) == pytest.approx(1 / 6, abs=1e-6)


def test_strip_optimum_distortion():
    s = strip_scenario([1.0, 100.0], [[1.0], [100.0]], 1.0)
    y = 5e-4
    d = Deployment([[0.5, y], [0.0, y]], [[0.5, y]], [0, 0])
    rep = distortion(s, d)
    assert rep.ap_power == 0.0
    assert rep.distortion == pytest.approx(1 / 12, abs=1e-6)


def test_ap_power_hand_value(unit_square):
    d = Deployment([[0.5, 0.5]], [[0.5, 0.5 + 2.0]], [0])
    assert ap_power(unit_square, d) == pytest.approx(4.0, rel=1e-12)
    assert ap_power(unit_square, Deployment([[0.2, 0.7]], [[0.2, 0.7]], [0])) == 0.0


def test_beta_zero_distortion_is_sensor_power(wsn2, coarse):
    s = wsn2.replace(beta=0.0)
    d = deployments(s, 1, seed=1)[0]
    rep = distortion(s, d, coarse)
    assert rep.distortion == rep.sensor_power
    assert rep.per_cell.sum() == pytest.approx(rep.distortion, rel=1e-12)


def test_power_report_is_sum_of_tiers(wsn2, coarse):
    d = deployments(wsn2, 1, seed=2)[0]
    rep = distortion(wsn2, d, coarse)
    assert rep.distortion == pytest.approx(rep.sensor_power + wsn2.beta * rep.ap_power, rel=1e-14)


def test_parallel_axis_at_centroids(wsn1, coarse):
    s = wsn1.replace(beta=0.0)
    d = deployments(s, 1, seed=3)[0]
    m = cell_moments(s, d, coarse)
    at_c = d.replace(p=m.c)
    # with p = c the offset term vanishes
    assert distortion_parallel_axis(s, at_c, m) == pytest.approx(float(np.sum(s.a * m.inertia)),
                                                                rel=1e-12)


def test_parallel_axis_offset(unit_square):
    s = unit_square.replace(beta=0.0)
    m = cell_moments(s, Deployment([[0.5, 0.5]], [[0.5, 0.5]], [0]))
    base = distortion_parallel_axis(s, Deployment(m.c, [[0.5, 0.5]], [0]), m)
    shifted = distortion_parallel_axis(s, Deployment(m.c + [0.3, -0.4], [[0.5, 0.5]], [0]), m)
    assert shifted - base == pytest.approx(0.25, rel=1e-9)


def test_parallel_axis_matches_direct(wsn2, coarse):
    for d in deployments(wsn2, 10, seed=5):
        labels = partition(wsn2, d, coarse)
        direct = power_report(wsn2, d, labels, coarse).distortion
        m = moments_from_labels(wsn2, labels, coarse)
        assert distortion_parallel_axis(wsn2, d, m) == pytest.approx(direct, rel=1e-10)


def test_undefined_centroid_is_an_error(unit_square):
    m = CellMoments(v=np.array([1.0]), c=np.array([[np.nan, np.nan]]), inertia=np.zeros(1))
    with pytest.raises(RuntimeError, match="centroid"):
        distortion_parallel_axis(unit_square, Deployment([[0, 0]], [[0, 0]], [0]), m)


def test_residual_zero_at_fixed_point(unit_square):
    s = unit_square.replace(beta=0.7)
    m = cell_moments(s, Deployment([[0.5, 0.5]], [[0.5, 0.5]], [0]))
    d = Deployment(m.c, m.c, [0])
    ap_res, fc_res = gradient_residual(s, d, m)
    assert ap_res.max() < 1e-12 and fc_res.max() < 1e-12


def test_residual_vanishes_for_empty_cell():
    s = strip_scenario([1.0, 100.0], [[1.0], [100.0]], 1.0)
    y = 5e-4
    d = Deployment([[0.5, y], [0.0, y]], [[0.9, y]], [0, 0])
    m = cell_moments(s, d)
    ap_res, _ = gradient_residual(s, d, m)
    assert m.v[1] == 0 and ap_res[1] == 0.0


def test_gradient_matches_finite_differences(wsn2, coarse):
    d = deployments(wsn2, 1, seed=8)[0]
    labels = partition(wsn2, d, coarse)
    grad_p, grad_q = gradients(wsn2, d, moments_from_labels(wsn2, labels, coarse))
    h = 1e-4 * wsn2.diameter

    def f(p, q):
        return power_report(wsn2, Deployment(p, q, d.t), labels, coarse).distortion

    for n in (0, 11, 19):
        for k in range(2):
            e = np.zeros_like(d.p)
            e[n, k] = h
            fd = (f(d.p + e, d.q) - f(d.p - e, d.q)) / (2 * h)
            assert fd == pytest.approx(grad_p[n, k], abs=1e-8)
    for m_ in range(wsn2.n_fcs):
        e = np.zeros_like(d.q)
        e[m_, 0] = h
        fd = (f(d.p, d.q + e) - f(d.p, d.q - e)) / (2 * h)
        assert fd == pytest.approx(grad_q[m_, 0], abs=1e-8)


def test_monte_carlo_mode_is_seeded(unit_square):
    d = Deployment([[0.5, 0.5]], [[0.5, 0.5]], [0])
    g = Integrator(Mode.MONTE_CARLO, 200_000, seed=4)
    first = sensor_power(unit_square, d, g)
    assert first == sensor_power(unit_square, d, g)
    assert first == pytest.approx(1 / 6, abs=3e-3)
    assert first != sensor_power(unit_square, d, Integrator(Mode.MONTE_CARLO, 200_000, seed=5))


def test_table_density_shifts_mass():
    # all mass on the right half
    s = Scenario(omega=[[0, 0], [2, 0], [2, 1], [0, 1]], a=[1.0], b=[[1.0]], beta=0.0,
                 density=Density("table", 2, 1, (0.0, 1.0)))
    m = cell_moments(s, Deployment([[1.0, 0.5]], [[1.0, 0.5]], [0]), grid(128))
    np.testing.assert_allclose(m.c, [[1.5, 0.5]], atol=1e-12)
