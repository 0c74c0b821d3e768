import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vermilion.errors import (
    HoseViolation,
    InvalidK,
    MatrixFormatError,
    NegativeEntry,
    NonzeroDiagonal,
)
from vermilion.matrix import (
    format_matrix_csv,
    max_line_sum,
    normalize,
    parse_matrix_text,
    random_derangement,
    random_saturated,
    read_matrix,
    ring,
    scale,
    validate_hose,
    write_matrix,
)


def test_validate_accepts_saturated_matrix():
    a = ring(5, rate=2e9)
    m = validate_hose(a, 1e9, 2)
    assert m.n == 5 and m.node_capacity == 2e9
    assert not m.entries.flags.writeable


@pytest.mark.parametrize(
    "raw, err",
    [
        ([[0, -1], [1, 0]], NegativeEntry),
        ([[1, 0], [0, 0]], NonzeroDiagonal),
        ([[0, 3], [1, 0]], HoseViolation),
        ([[0, 1, 0], [1, 0, 0]], MatrixFormatError),
        ([[0, np.nan], [1, 0]], MatrixFormatError),
    ],
)
def test_validate_rejects(raw, err):
    with pytest.raises(err):
        validate_hose(raw, 1.0, 2)


def test_hose_violation_names_the_node():
    with pytest.raises(HoseViolation) as e:
        validate_hose([[0, 0.5, 0.5], [0, 0, 0], [0.9, 0.9, 0]], 1.0, 1)
    assert e.value.node == 2 and e.value.axis == "row"


def test_hose_tolerance_absorbs_float_noise():
    a = np.array([[0, 0.1 + 0.2, 0.7], [0.7, 0, 0.3], [0.3, 0.7, 0]])
    validate_hose(a, 1.0, 1)


@given(st.integers(2, 20), st.integers(0, 10_000))
def test_random_saturated_is_saturated(n, seed):
    a = random_saturated(n, np.random.default_rng(seed), rate=3.0)
    assert np.allclose(a.sum(axis=0), 3.0) and np.allclose(a.sum(axis=1), 3.0)
    assert np.all(np.diag(a) == 0)


@given(st.integers(2, 30), st.integers(0, 10_000))
def test_derangement_has_no_fixed_point(n, seed):
    p = random_derangement(n, np.random.default_rng(seed))
    assert sorted(p) == list(range(n)) and np.all(p != np.arange(n))


@given(st.integers(2, 12), st.integers(2, 8), st.integers(0, 1000))
def test_normalize_then_scale_bounds_line_sums(n, k, seed):
    a = random_saturated(n, np.random.default_rng(seed)) * 0.37
    s = scale(normalize(validate_hose(a, 1.0, 1)), k)
    assert max_line_sum(s.entries) == pytest.approx((k - 1) * n)
    assert s.sum_bound == (k - 1) * n


def test_normalize_zero_matrix():
    z = normalize(validate_hose(np.zeros((3, 3)), 1.0, 1))
    assert not z.entries.any()


@pytest.mark.parametrize("k", [1, 0, 2.5])
def test_scale_rejects_bad_k(k):
    with pytest.raises(InvalidK):
        scale(normalize(validate_hose(ring(3), 1.0, 1)), k)


def test_csv_roundtrip(tmp_path):
    m = validate_hose(ring(4, 1.5e9), 1e9, 2)
    write_matrix(tmp_path / "m.csv", m)
    back = read_matrix(tmp_path / "m.csv")
    assert np.array_equal(back.entries, m.entries) and back.c == m.c and back.d_hat == 2


def test_csv_sidecar_units(tmp_path):
    (tmp_path / "m.csv").write_text(format_matrix_csv(ring(3)))
    (tmp_path / "m.json").write_text(json.dumps({"c": 1.0, "d": 1}))
    assert read_matrix(tmp_path / "m.csv").c == 1.0


def test_json_form():
    m = parse_matrix_text(json.dumps({"n": 2, "c": 1, "d": 1, "entries": [[0, 1], [1, 0]]}))
    assert m.entries[0, 1] == 1


@pytest.mark.parametrize(
    "text",
    ["0,1\n1,0\n", "# c=1\n# d=1\n0,1\n1\n", "# c=1\n# d=1\n0,x\n1,0\n", '{"n": 3, "c": 1, "d": 1, "entries": [[0]]}'],
)
def test_parse_rejects(text):
    with pytest.raises(MatrixFormatError):
        parse_matrix_text(text)
