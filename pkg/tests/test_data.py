import numpy as np
import pytest

from cstl.data import Dataset, validate_dataset


def test_valid_dataset_passes():
    ds = Dataset(design=np.ones((3, 2)), response=np.zeros(3))
    validate_dataset(ds)  # no raise
    assert ds.n == 3 and ds.dim == 2


def test_row_mismatch_names_dimensions():
    ds = Dataset(design=np.ones((3, 2)), response=np.zeros(2))
    with pytest.raises(ValueError, match="3 rows.*length 2"):
        validate_dataset(ds)


def test_non_finite_entry_names_row_and_column():
    design = np.ones((3, 2))
    design[1, 0] = np.nan
    ds = Dataset(design=design, response=np.zeros(3))
    with pytest.raises(ValueError, match="row 2, column 1"):
        validate_dataset(ds)

    ds = Dataset(design=np.ones((3, 2)), response=np.array([0.0, np.inf, 0.0]))
    with pytest.raises(ValueError, match="position 2"):
        validate_dataset(ds)


def test_bad_domain_tag_rejected():
    with pytest.raises(ValueError, match="domain_tag"):
        Dataset(design=np.ones((2, 2)), response=np.zeros(2), domain_tag="aux")


def test_non_2d_design_rejected():
    with pytest.raises(ValueError, match="2-d"):
        Dataset(design=np.ones(3), response=np.zeros(3))
