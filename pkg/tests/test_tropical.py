import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxplusfem.tropical import (BandMatrix, ContractError, format_float, max_plus_matvec, oplus,
                                 otimes, read_matrix_csv, residual_apply, residual_matrix,
                                 residuate_scalar, sup_norm_distance, write_matrix_csv)

NEG = -np.inf
POS = np.inf

# dyadic values keep the laws exact in floating point
finite = st.integers(-80, 80).map(lambda k: k / 8.0)
entry = st.one_of(st.just(NEG), finite)


@st.composite
def kernel_and_vectors(draw, max_dim=5):
    q = draw(st.integers(1, max_dim))
    p = draw(st.integers(1, max_dim))
    A = np.array(draw(st.lists(entry, min_size=q * p, max_size=q * p))).reshape(q, p)
    lam = np.array(draw(st.lists(entry, min_size=p, max_size=p)))
    v = np.array(draw(st.lists(finite, min_size=q, max_size=q)))
    return A, lam, v


# --- scalars ------------------------------------------------------------------

def test_scalar_absorption():
    assert otimes(NEG, POS) == NEG
    assert otimes(2.0, 3.0) == 5.0
    assert oplus(2.0, 2.0) == 2.0
    assert residuate_scalar(NEG, NEG) == POS
    assert residuate_scalar(1.0, 3.0) == 2.0


# --- worked examples ----------------------------------------------------------

def test_matvec_identity():
    assert max_plus_matvec([[0.0]], [5.0]).tolist() == [5.0]


def test_matvec_empty_row():
    assert max_plus_matvec([[NEG, NEG]], [3.0, 7.0]).tolist() == [NEG]


def test_matvec_two_by_two():
    out = max_plus_matvec([[0.5, -1.0], [-1.0, 0.5]], [0.0, 0.0])
    assert out.tolist() == [0.5, 0.5]


def test_matvec_plus_infinity_against_minus_infinity():
    assert max_plus_matvec([[NEG, 0.0]], [POS, 1.0]).tolist() == [1.0]


def test_residual_examples():
    assert residual_apply([[2.0], [0.0]], [5.0, 1.0]).tolist() == [1.0]
    assert residual_apply([[NEG]], [3.0]).tolist() == [POS]
    assert residual_apply([[0.0]], [5.0]).tolist() == [5.0]


def test_dimension_mismatch():
    with pytest.raises(ContractError):
        max_plus_matvec(np.zeros((2, 3)), np.zeros(2))
    with pytest.raises(ContractError):
        residual_apply(np.zeros((2, 3)), np.zeros(3))
    with pytest.raises(ContractError):
        residual_matrix(np.zeros((2, 3)), np.zeros((3, 3)))


def test_sup_norm_examples():
    assert sup_norm_distance([1, 2, 3], [1, 2, 3]) == 0.0
    assert sup_norm_distance([0, 0], [1, -2]) == 2.0
    assert sup_norm_distance([NEG], [NEG]) == 0.0
    assert sup_norm_distance([NEG, 0.0], [1.0, 0.0]) == POS


def test_residual_matrix_matches_columnwise(rng):
    A = rng.normal(size=(7, 4))
    B = rng.normal(size=(7, 3))
    R = residual_matrix(A, B)
    for k in range(3):
        np.testing.assert_array_equal(R[:, k], residual_apply(A, B[:, k]))


# --- laws -----------------------------------------------------------------------

@settings(max_examples=300, deadline=None)
@given(kernel_and_vectors())
def test_galois_connection(data):
    A, lam, v = data
    res = residual_apply(A, v)
    assert np.all(max_plus_matvec(A, res) <= v)
    fits = bool(np.all(max_plus_matvec(A, lam) <= v))
    assert fits == bool(np.all(lam <= res))


@settings(max_examples=300, deadline=None)
@given(kernel_and_vectors())
def test_f_fsharp_f(data):
    A, lam, v = data
    Av = max_plus_matvec(A, lam)
    np.testing.assert_array_equal(max_plus_matvec(A, residual_apply(A, Av)), Av)
    r = residual_apply(A, v)
    np.testing.assert_array_equal(residual_apply(A, max_plus_matvec(A, r)), r)


@settings(max_examples=300, deadline=None)
@given(kernel_and_vectors(), st.lists(st.floats(-10, 10), min_size=5, max_size=5))
def test_nonexpansive(data, other):
    A, _, v = data
    q, p = A.shape
    lam = np.asarray(other[:p] + [0.0] * max(0, p - len(other)))[:p]
    mu = lam + np.linspace(-1, 1, p)
    d = sup_norm_distance(lam, mu)
    assert sup_norm_distance(max_plus_matvec(A, lam), max_plus_matvec(A, mu)) <= d + 1e-12
    w = v + np.linspace(-0.5, 0.5, q)
    assert sup_norm_distance(residual_apply(A, v), residual_apply(A, w)) <= sup_norm_distance(v, w) + 1e-12


# --- band storage ---------------------------------------------------------------

def _banded_instance(rng, q=30, p=25, cutoff=0.3):
    yc = rng.uniform(0, 1, size=(q, 2))
    xc = rng.uniform(0, 1, size=(p, 2))
    dist = np.linalg.norm(yc[:, None] - xc[None], axis=-1)
    dense = np.where(dist <= cutoff, rng.normal(size=(q, p)), NEG)
    return dense, yc, xc, cutoff


def test_band_equals_dense_inside_band(rng):
    for _ in range(20):
        dense, yc, xc, R = _banded_instance(rng)
        band = BandMatrix.from_dense(dense, yc, xc, R)
        assert band.truncated == 0
        lam = rng.normal(size=dense.shape[1])
        v = rng.normal(size=dense.shape[0])
        np.testing.assert_array_equal(max_plus_matvec(band, lam), max_plus_matvec(dense, lam))
        np.testing.assert_array_equal(residual_apply(band, v), residual_apply(dense, v))
        np.testing.assert_array_equal(band.todense(), dense)


def test_band_infinite_cutoff_equals_dense(rng):
    dense = rng.normal(size=(6, 4))
    band = BandMatrix.from_dense(dense)
    lam = rng.normal(size=4)
    np.testing.assert_array_equal(max_plus_matvec(band, lam), max_plus_matvec(dense, lam))


def test_band_truncation_counts(rng):
    dense = rng.normal(size=(5, 5))
    c = np.arange(5.0)[:, None]
    band = BandMatrix.from_dense(dense, c, c, 1.0)
    assert band.nnz == 13
    assert band.truncated == 12


def test_worker_count_does_not_change_results(rng):
    A = rng.normal(size=(300, 200))
    x = rng.normal(size=200)
    v = rng.normal(size=300)
    from maxplusfem import tropical
    old = tropical._BLOCK_ENTRIES
    tropical._BLOCK_ENTRIES = 1000
    try:
        a1 = max_plus_matvec(A, x, workers=1)
        a4 = max_plus_matvec(A, x, workers=4)
        r1 = residual_apply(A, v, workers=1)
        r4 = residual_apply(A, v, workers=4)
    finally:
        tropical._BLOCK_ENTRIES = old
    np.testing.assert_array_equal(a1, a4)
    np.testing.assert_array_equal(r1, r4)


# --- serialization --------------------------------------------------------------

def test_format_float():
    assert format_float(NEG) == "-inf"
    assert format_float(POS) == "inf"
    assert float(format_float(0.1)) == 0.1
    assert format_float(0.1) == "0.10000000000000001"


def test_matrix_csv_roundtrip(tmp_path, rng):
    A = rng.normal(size=(3, 4))
    A[1, 2] = NEG
    path = tmp_path / "k.csv"
    write_matrix_csv(A, path)
    text = path.read_text().splitlines()
    assert text[0] == "j,i,value"
    assert "1,2,-inf" in text
    np.testing.assert_array_equal(read_matrix_csv(path), A)
