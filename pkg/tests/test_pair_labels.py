"""Pair-label matrices against golden fixtures and a brute-force enumerator."""

from pathlib import Path

import numpy as np
import pytest

from dia.contrastive.pairs import EXCL, NEG, POS, PairLabelMatrix, build_pair_labels

FIXTURES = Path(__file__).parent / "fixtures"


def brute_force_labels(B, K, design, n_branches=3):
    """Independent triple-loop enumerator over (branch, shift, image) pairs."""
    def idx(m, k, b):
        return m * K * B + k * B + b

    size = n_branches * K * B
    labels = np.full((size, size), NEG, dtype=np.int8)
    for m1 in range(n_branches):
        for k1 in range(K):
            for b1 in range(B):
                i = idx(m1, k1, b1)
                for m2 in range(n_branches):
                    for k2 in range(K):
                        for b2 in range(B):
                            j = idx(m2, k2, b2)
                            if i == j:
                                labels[i, j] = EXCL
                            elif {m1, m2} == {0, 1} and k1 == k2 and b1 == b2:
                                labels[i, j] = POS
                            elif (design == "b" and n_branches == 3
                                  and 2 in (m1, m2) and m1 != m2
                                  and k1 == k2 and b1 == b2):
                                labels[i, j] = EXCL
    return labels


@pytest.mark.parametrize("design", ["a", "b"])
def test_golden_fixture_B2K2(design):
    text = (FIXTURES / f"pair_labels_B2K2_design_{design}.txt").read_text()
    golden = PairLabelMatrix.labels_from_text(text)
    built = build_pair_labels(2, 2, design=design)
    assert built.labels.shape == (12, 12)
    np.testing.assert_array_equal(built.labels, golden)


def test_fixture_counts_match_contract():
    a = PairLabelMatrix.labels_from_text(
        (FIXTURES / "pair_labels_B2K2_design_a.txt").read_text())
    b = PairLabelMatrix.labels_from_text(
        (FIXTURES / "pair_labels_B2K2_design_b.txt").read_text())
    assert [(a == v).sum() for v in (EXCL, POS, NEG)] == [12, 8, 124]
    assert [(b == v).sum() for v in (EXCL, POS, NEG)] == [28, 8, 108]


@pytest.mark.parametrize("B", [1, 2, 3])
@pytest.mark.parametrize("K", [1, 2, 4])
@pytest.mark.parametrize("design", ["a", "b"])
def test_matches_brute_force_and_closed_form_counts(B, K, design):
    built = build_pair_labels(B, K, design=design)
    np.testing.assert_array_equal(built.labels, brute_force_labels(B, K, design))
    kb = K * B
    assert (built.labels == POS).sum() == 2 * kb
    expected_excl = 3 * kb if design == "a" else 3 * kb + 4 * kb
    assert (built.labels == EXCL).sum() == expected_excl
    assert (built.labels == NEG).sum() == (3 * kb) ** 2 - 2 * kb - expected_excl


@pytest.mark.parametrize("design", ["a", "b"])
def test_symmetry_and_diagonal(design):
    m = build_pair_labels(3, 4, design=design)
    np.testing.assert_array_equal(m.labels, m.labels.T)
    assert np.all(np.diag(m.labels) == EXCL)


def test_two_branch_matrix_is_top_left_block():
    full = build_pair_labels(2, 2, design="a", n_branches=3)
    plain = build_pair_labels(2, 2, design="a", n_branches=2)
    kb2 = 2 * 2 * 2
    np.testing.assert_array_equal(plain.labels, full.labels[:kb2, :kb2])


def test_smallest_case_B1K1():
    m = build_pair_labels(1, 1, design="a")
    expected = np.array([
        [EXCL, POS, NEG],
        [POS, EXCL, NEG],
        [NEG, NEG, EXCL],
    ], dtype=np.int8)
    np.testing.assert_array_equal(m.labels, expected)


def test_text_roundtrip():
    m = build_pair_labels(2, 4, design="b")
    np.testing.assert_array_equal(
        PairLabelMatrix.labels_from_text(m.to_text()), m.labels
    )


def test_invalid_arguments_rejected():
    with pytest.raises(ValueError):
        build_pair_labels(0, 2)
    with pytest.raises(ValueError):
        build_pair_labels(2, 2, design="c")
    with pytest.raises(ValueError):
        build_pair_labels(2, 2, n_branches=4)
