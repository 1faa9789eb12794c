import numpy as np
import pytest

from potts_stable.cli import data_path
from potts_stable.io import parse_labeling
from potts_stable.locallp import INTEGRAL, solve_local_lp
from potts_stable.stereo import (PGMError, StereoConfig, bt_costs, build_stereo_instance,
                                 crop_slices, format_pgm, grid_weights, parse_pgm, read_pgm,
                                 shifted_pair, synthetic_pair)


def test_identical_images_zero_cost_at_d0():
    img = np.random.default_rng(0).integers(0, 256, (6, 7)).astype(np.uint8)
    c = bt_costs(img, img, 3)
    assert c.shape == (6, 7, 3)
    assert np.all(c[:, :, 0] == 0)


def test_bt_is_symmetric_and_sampling_insensitive():
    row = np.array([[10, 20, 30, 40]], dtype=np.uint8)
    shifted = np.array([[15, 25, 35, 45]], dtype=np.uint8)
    # a half-pixel shift of a linear ramp costs nothing in the interior
    c = bt_costs(row, shifted, 1)[0, :, 0]
    assert np.all(c[1:3] == 0)
    assert np.allclose(bt_costs(row, shifted, 1), bt_costs(shifted, row, 1))


def test_cap_and_out_of_range():
    img = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    c = bt_costs(img, img, 3, cap=7.0)
    assert np.all(c[:, 0, 1:] == 7.0) and np.all(c[:, 1, 2] == 7.0)
    assert c.max() <= 7.0
    with pytest.raises(ValueError):
        bt_costs(img, img[:, :3], 2)


def test_constant_image_weights():
    w = grid_weights(np.full((4, 5), 77))
    assert len(w) == 4 * 4 + 3 * 5 and np.all(w == 8.0)
    img = np.array([[0, 100]])
    assert grid_weights(img).tolist() == [4.0]
    assert grid_weights(img, T=200).tolist() == [8.0]


def test_shift_one_recovers_disparity():
    left, right = shifted_pair(8, 8, 1, seed=3)
    inst = build_stereo_instance(left, right, StereoConfig(k=3))
    sol = solve_local_lp(inst)
    assert sol.provenance == INTEGRAL           # integral LP optimum is a certified MAP
    disp = sol.labeling.reshape(8, 8)
    assert np.all(disp[1:-1, 1:-1] == 1)


def test_crop_uses_full_image_costs():
    left, right, _ = synthetic_pair(12, 12, seed=1)
    full = build_stereo_instance(left, right, StereoConfig(k=4))
    part = build_stereo_instance(left, right, StereoConfig(k=4, crop=(3, 2, 5, 4)))
    rs, cs = crop_slices(left.shape, (3, 2, 5, 4))
    assert np.array_equal(part.costs, full.costs.reshape(12, 12, 4)[rs, cs].reshape(-1, 4))
    assert part.n == 20
    with pytest.raises(ValueError):
        crop_slices(left.shape, (10, 10, 5, 5))


def test_config_validation():
    for kw in ({"k": 1}, {"P": 0}, {"T": -1}, {"crop": (0, 0, 0, 3)}):
        with pytest.raises(ValueError):
            StereoConfig(**kw)


def test_pgm_formats():
    img = np.array([[0, 255, 7], [3, 4, 5]], dtype=np.uint8)
    assert np.array_equal(parse_pgm(format_pgm(img)), img)
    assert np.array_equal(parse_pgm(format_pgm(img, binary=False)), img)
    text = b"P2\n# comment\n3 2\n# another\n15\n0 15 7\n3 4 5\n"
    assert parse_pgm(text).tolist() == [[0, 15, 7], [3, 4, 5]]


@pytest.mark.parametrize("data, msg", [
    (b"P6\n1 1\n255\n\x00\x00\x00", "magic"),
    (b"P2\n1 1\n65535\n0\n", "maxval"),
    (b"P5\n2 2\n255\n\x00", "raster"),
    (b"P2\n2 1\n255\n1\n", "raster"),
    (b"P2\n1 1\n10\n11\n", "exceeds"),
    (b"P2\n1", "truncated"),
])
def test_pgm_rejects(data, msg):
    with pytest.raises(PGMError, match=msg):
        parse_pgm(data)


def test_bundled_pair_matches_generator():
    left, right, disp = synthetic_pair()
    assert np.array_equal(read_pgm(data_path("synthetic_left.pgm")), left)
    assert np.array_equal(read_pgm(data_path("synthetic_right.pgm")), right)
    truth = parse_labeling(data_path("synthetic_disparity.txt").read_text()) + 1
    assert np.array_equal(truth.reshape(disp.shape), disp)
