import numpy as np
import pytest

from mmvsr.errors import InvalidInputError, NetTooLargeError
from mmvsr.model import derive_rng
from mmvsr.nets import build_net, covering_shortfall, sample_ball


def test_one_dimensional_unit_net():
    net = build_net(1, 1.0, 1.0)
    assert sorted(net.points.ravel().tolist()) == [-1.0, 0.0, 1.0]


def test_one_dimensional_sizes_grow_with_radius():
    sizes = [len(build_net(1, r, 1.0)) for r in (1.0, 2.0, 3.0)]
    assert sizes == [3, 5, 7]


def test_sizes_non_decreasing_in_radius_2d():
    sizes = [len(build_net(2, r, 0.5)) for r in (0.5, 1.0, 2.0)]
    assert sizes == sorted(sizes)


def test_points_stay_inside_ball():
    net = build_net(3, 1.2, 0.4)
    norms = np.linalg.norm(net.points, axis=1)
    assert norms.max() <= 1.2 + 1e-12


def test_covering_radius_monte_carlo():
    net = build_net(2, 1.0, 0.5)
    samples = sample_ball(2, 1.0, 10**4, derive_rng(3))
    assert covering_shortfall(net, samples) <= 1e-9


def test_degenerate_ball_smaller_than_cell():
    net = build_net(2, 0.25, 1.0)
    assert len(net) >= 1
    assert np.linalg.norm(net.points, axis=1).max() <= 0.25 + 1e-12


def test_zero_radius_net_is_origin():
    net = build_net(2, 0.0, 0.5)
    assert len(net) >= 1
    assert np.abs(net.points).max() == 0.0


def test_cap_raises_with_parameters_named():
    with pytest.raises(NetTooLargeError) as err:
        build_net(3, 50.0, 0.01)
    message = str(err.value)
    assert "k=3" in message and "r=50.0" in message


def test_invalid_parameters():
    with pytest.raises(InvalidInputError):
        build_net(0, 1.0, 1.0)
    with pytest.raises(InvalidInputError):
        build_net(2, -1.0, 1.0)
    with pytest.raises(InvalidInputError):
        build_net(2, 1.0, 0.0)
