import numpy as np
import pytest

from twotier import Deployment, RegionKind, Scenario, cell_cost, membership_agreement, owner, owners
from twotier.geometry import cell_membership, cost_matrix, pairwise_region, point_segment_distance
from twotier.oracle import strip_scenario

from conftest import deployments


def two_aps(a, beta=0.0, b=(1.0, 1.0)):
    return Scenario(omega=[[-10, -10], [10, -10], [10, 10], [-10, 10]], a=a,
                    b=np.reshape(b, (2, 1)), beta=beta)


def test_cell_cost_zero_at_own_position():
    s = Scenario(omega=[[0, 0], [10, 0], [10, 10], [0, 10]], a=[3.0], b=[[2.0]], beta=5.0)
    d = Deployment([[4.0, 4.0]], [[4.0, 4.0]], [0])
    assert cell_cost(0, [4.0, 4.0], s, d) == 0.0


def test_cell_cost_hand_value():
    s = Scenario(omega=[[-5, -5], [5, -5], [5, 5], [-5, 5]], a=[1.0], b=[[1.0]], beta=1.0)
    d = Deployment([[0.0, 0.0]], [[0.0, 0.0]], [0])
    assert cell_cost(0, [3.0, 4.0], s, d) == 25.0
    with pytest.raises(IndexError):
        cell_cost(1, [0.0, 0.0], s, d)


def test_identical_aps_tie_to_first():
    s = two_aps([2.0, 2.0], beta=1.0)
    d = Deployment([[1.0, 1.0], [1.0, 1.0]], [[0.0, 0.0]], [0, 0])
    pts = np.random.default_rng(3).uniform(-10, 10, (500, 2))
    assert np.all(owners(s, d, pts) == 0)


def test_nearer_ap_wins_with_equal_weights():
    s = two_aps([1.0, 1.0])
    d = Deployment([[0.0, 0.0], [10.0, 0.0]], [[0.0, 0.0]], [0, 0])
    assert owner([2.0, 0.0], s, d) == 0
    assert owner([8.0, 0.0], s, d) == 1


def test_strip_optimum_single_owner():
    s = strip_scenario([1.0, 100.0], [[1.0], [100.0]], 1.0)
    y = 5e-4
    d = Deployment([[0.5, y], [0.0, y]], [[0.5, y]], [0, 0])
    w = np.column_stack([np.linspace(0, 1, 1001), np.full(1001, y)])
    assert np.all(owners(s, d, w) == 0)


def test_cost_matrix_matches_cell_cost(wsn2):
    d = deployments(wsn2, 1, seed=4)[0]
    pts = np.random.default_rng(0).uniform(0, 10, (50, 2))
    cm = cost_matrix(wsn2, d, pts)
    for n in range(wsn2.n_aps):
        np.testing.assert_allclose(cm[n], cell_cost(n, pts, wsn2, d), rtol=1e-13)
    np.testing.assert_array_equal(owners(wsn2, d, pts), np.argmin(cm, axis=0))


def test_equal_weights_give_half_space():
    s = two_aps([1.5, 1.5], beta=0.3, b=(1.0, 2.0))
    d = Deployment([[0.0, 0.0], [3.0, 1.0]], [[1.0, 1.0]], [0, 0])
    assert pairwise_region(0, 1, s, d).kind is RegionKind.HALF_SPACE


def test_disk_center_hand_value():
    s = two_aps([2.0, 1.0])
    d = Deployment([[0.0, 0.0], [3.0, 0.0]], [[0.0, 0.0]], [0, 0])
    r = pairwise_region(0, 1, s, d)
    assert r.kind is RegionKind.DISK
    np.testing.assert_allclose(r.center, [-3.0, 0.0])
    # 2|w|^2 <= |w - (3, 0)|^2  <=>  |w - (-3, 0)|^2 <= 18
    assert r.L == pytest.approx(18.0)
    assert r.radius == pytest.approx(np.sqrt(18.0))
    assert r.contains([[-3 + 4.2, 0.0]])[0] and not r.contains([[-3 + 4.3, 0.0]])[0]
    mirror = pairwise_region(1, 0, s, d)
    assert mirror.kind is RegionKind.DISK_COMPLEMENT
    np.testing.assert_allclose(mirror.center, [-3.0, 0.0])


def test_large_link_cost_empties_the_stronger_ap():
    s = two_aps([2.0, 1.0], beta=10.0)
    # AP 1 sits far from its FC, AP 2 on it
    d = Deployment([[0.0, 0.0], [3.0, 0.0]], [[3.0, 0.0]], [0, 0])
    assert pairwise_region(0, 1, s, d).kind is RegionKind.EMPTY
    assert pairwise_region(1, 0, s, d).kind is RegionKind.WHOLE_PLANE


def test_same_index_rejected():
    s = two_aps([1.0, 1.0])
    d = Deployment([[0.0, 0.0], [3.0, 0.0]], [[0.0, 0.0]], [0, 0])
    with pytest.raises(ValueError):
        pairwise_region(1, 1, s, d)


def test_pairwise_region_matches_cost_comparison(wsn2):
    rng = np.random.default_rng(11)
    pts = rng.uniform(0, 10, (4000, 2))
    for d in deployments(wsn2, 3, seed=2):
        cm = cost_matrix(wsn2, d, pts)
        for i, j in [(0, 1), (0, 15), (15, 2), (7, 12)]:
            gap = cm[i] - cm[j]
            clear = np.abs(gap) > 1e-9 * np.abs(cm[i])
            inside = pairwise_region(i, j, wsn2, d).contains(pts)
            np.testing.assert_array_equal(inside[clear], gap[clear] < 0)


def test_membership_single_ap_is_everything(unit_square):
    d = Deployment([[0.3, 0.3]], [[0.5, 0.5]], [0])
    pts = np.random.default_rng(0).uniform(0, 1, (1000, 2))
    assert membership_agreement(unit_square, d, pts) == 1.0


def test_membership_off_boundary_agrees(wsn2):
    d = deployments(wsn2, 1, seed=9)[0]
    pts = np.random.default_rng(5).uniform(0, 10, (20000, 2))
    cm = np.sort(cost_matrix(wsn2, d, pts), axis=0)
    clear = (cm[1] - cm[0]) > 1e-6
    assert membership_agreement(wsn2, d, pts[clear]) == 1.0


def test_membership_empty_samples_rejected(unit_square):
    d = Deployment([[0.3, 0.3]], [[0.5, 0.5]], [0])
    with pytest.raises(ValueError):
        membership_agreement(unit_square, d, np.empty((0, 2)))


def test_cell_membership_respects_omega():
    s = two_aps([1.0, 1.0])
    d = Deployment([[0.0, 0.0], [3.0, 0.0]], [[0.0, 0.0]], [0, 0])
    assert not cell_membership(0, s, d, [[-20.0, 0.0]])[0]


def test_point_segment_distance():
    assert point_segment_distance([1, 1], [0, 0], [2, 0]) == 1.0
    assert point_segment_distance([3, 0], [0, 0], [2, 0]) == 1.0
    assert point_segment_distance([0, 2], [0, 0], [0, 0]) == 2.0
