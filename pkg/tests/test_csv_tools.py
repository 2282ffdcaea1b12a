import numpy as np
import pytest

from errors import OutputError
from tools.csv_tools import read_csv, read_matrix_csv, write_csv, write_matrix_csv


def test_write_csv_when_complex_column_should_split_real_and_imaginary(tmp_path):
    path = write_csv(tmp_path / "spectrum.csv", {"omega": np.array([1.0, 2.0]), "chi": np.array([1 + 2j, 3 - 4j])},
                     {"command": "spectrum", "seed": 7})
    frame, metadata = read_csv(path)
    assert list(frame.columns) == ["omega", "chi_re", "chi_im"]
    assert frame["chi_im"].tolist() == [2.0, -4.0]
    assert metadata == {"command": "spectrum", "seed": "7"}


def test_write_csv_when_read_back_should_keep_full_precision(tmp_path):
    values = np.array([1 / 3, np.pi * 1e-21, -2.5e17])
    frame, _ = read_csv(write_csv(tmp_path / "values.csv", {"x": values}))
    assert np.array_equal(frame["x"].to_numpy(), values)


def test_write_matrix_csv_when_complex_matrix_should_read_back(tmp_path):
    matrix = np.array([[1.0, 0.5 + 0.25j], [0.5 - 0.25j, 2.0]])
    path = write_matrix_csv(tmp_path / "D.csv", "D", matrix)
    assert np.array_equal(read_matrix_csv(path, "D"), matrix)


def test_write_matrix_csv_when_real_matrix_should_read_back(tmp_path):
    matrix = np.arange(9.0).reshape(3, 3) / 7
    assert np.array_equal(read_matrix_csv(write_matrix_csv(tmp_path / "C.csv", "C", matrix), "C"), matrix)


def test_write_csv_when_directory_missing_should_raise_output_error(tmp_path):
    with pytest.raises(OutputError):
        write_csv(tmp_path / "missing" / "x.csv", {"x": np.zeros(2)})


def test_read_csv_when_file_missing_should_raise_output_error(tmp_path):
    with pytest.raises(OutputError):
        read_csv(tmp_path / "absent.csv")
