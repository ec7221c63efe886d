"""Shifting transformations: identity first, bijectivity, group behavior."""

import numpy as np
import pytest

from dia.transforms.shifts import TILE_PERMUTATIONS, make_shift_set


def test_rotate_k4_is_quarter_turns(rng):
    shifts = make_shift_set("rotate", 4)
    x = rng.random((3, 8, 8)).astype(np.float32)
    np.testing.assert_array_equal(shifts.apply(x, 0), x)
    for k in range(4):
        np.testing.assert_array_equal(
            shifts.apply(x, k), np.rot90(x, k=k, axes=(1, 2))
        )


def test_rotate_90_four_times_is_identity(rng):
    shifts = make_shift_set("rotate", 4)
    x = rng.random((1, 6, 6)).astype(np.float32)
    out = x
    for _ in range(4):
        out = shifts.apply(out, 1)
    np.testing.assert_array_equal(out, x)


@pytest.mark.parametrize("kind,K", [("rotate", 1), ("rotate", 2), ("rotate", 4),
                                    ("perm", 1), ("perm", 4), ("perm", 8)])
def test_inverse_roundtrip_pixel_exact(rng, kind, K):
    shifts = make_shift_set(kind, K)
    x = rng.random((3, 8, 8)).astype(np.float32)
    for k in range(K):
        np.testing.assert_array_equal(
            shifts.invert(shifts.apply(x, k), k), x
        )
        np.testing.assert_array_equal(
            shifts.apply(shifts.invert(x, k), k), x
        )


def test_identity_always_first(rng):
    x = rng.random((1, 4, 4)).astype(np.float32)
    for kind, K in [("rotate", 2), ("perm", 4)]:
        shifts = make_shift_set(kind, K)
        np.testing.assert_array_equal(shifts.apply(x, 0), x)


def test_perm_moves_tiles(rng):
    shifts = make_shift_set("perm", 4)
    x = rng.random((1, 4, 4)).astype(np.float32)
    for k in range(1, 4):
        out = shifts.apply(x, k)
        assert not np.array_equal(out, x)
        # content preserved as a multiset of pixels
        np.testing.assert_array_equal(np.sort(out.ravel()), np.sort(x.ravel()))


def test_perm_list_identity_first_and_unique():
    assert TILE_PERMUTATIONS[0] == (0, 1, 2, 3)
    assert len(set(TILE_PERMUTATIONS)) == len(TILE_PERMUTATIONS)


@pytest.mark.parametrize("kind,K", [("rotate", 3), ("rotate", 0), ("perm", 9),
                                    ("mirror", 2)])
def test_unsupported_combinations_rejected(kind, K):
    with pytest.raises(ValueError):
        make_shift_set(kind, K)
