import numpy as np
import pytest

from cstl.data import Dataset
from cstl.io import (
    ResultRow,
    ResultsTable,
    load_csv,
    load_vector_csv,
    read_config_file,
    read_results,
    write_dataset_csv,
    write_manifest,
    write_matrix_csv,
    write_results,
    write_vector_csv,
)


class TestLoadCsv:
    def test_basic_parse_response_last(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,b,y\n1,2,3\n4,5,6\n7,8,9\n")
        ds = load_csv(p)
        np.testing.assert_array_equal(ds.design, [[1, 2], [4, 5], [7, 8]])
        np.testing.assert_array_equal(ds.response, [3, 6, 9])

    def test_named_response_column(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,b,y\n1,2,3\n4,5,6\n")
        ds = load_csv(p, response_column="a")
        np.testing.assert_array_equal(ds.design, [[2, 3], [5, 6]])
        np.testing.assert_array_equal(ds.response, [1, 4])

    def test_missing_response_column(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError, match="'z' not found"):
            load_csv(p, response_column="z")

    def test_non_numeric_cell_reports_position(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,b\n1,2\n1,oops\n")
        with pytest.raises(ValueError, match="row 2, column 'b'"):
            load_csv(p)

    def test_missing_value_is_an_error(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,b\n1,\n")
        with pytest.raises(ValueError, match="row 1, column 'b'"):
            load_csv(p)

    def test_ragged_row_rejected(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,b\n1,2\n3\n")
        with pytest.raises(ValueError, match="ragged row 2"):
            load_csv(p)

    def test_empty_file_rejected(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("")
        with pytest.raises(ValueError, match="empty"):
            load_csv(p)
        p.write_text("a,b\n")
        with pytest.raises(ValueError, match="no data rows"):
            load_csv(p)

    def test_non_finite_rejected(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,b\nnan,2\n")
        with pytest.raises(ValueError, match="non-finite"):
            load_csv(p)

    def test_roundtrip_dataset(self, tmp_path):
        rng = np.random.default_rng(0)
        ds = Dataset(rng.standard_normal((7, 3)), rng.standard_normal(7))
        p = tmp_path / "rt.csv"
        write_dataset_csv(ds, p)
        back = load_csv(p)
        np.testing.assert_array_equal(back.design, ds.design)
        np.testing.assert_array_equal(back.response, ds.response)


class TestResultsTable:
    def make_table(self):
        return ResultsTable(rows=[
            ResultRow(method="cstl", replicate=0, sse=0.1234567890123456789,
                      mse=1.0 / 3.0, lambda0=0.1, lambda1=0.25,
                      iterations=42, converged=True),
            ResultRow(method="lasso", replicate=1, sse=2.0, mse=3.0,
                      lambda0=0.5, lambda1=None, iterations=7, converged=False),
            ResultRow(method="cstl", replicate="mean", sse=1.0, mse=2.0),
        ])

    def test_write_read_roundtrip_full_precision(self, tmp_path):
        table = self.make_table()
        p = tmp_path / "results.csv"
        write_results(table, p)
        back = read_results(p)
        assert back == table

    def test_empty_table_is_header_only(self, tmp_path):
        p = tmp_path / "results.csv"
        write_results(ResultsTable(), p)
        assert p.read_text() == (
            "method,replicate,sse,mse,lambda0,lambda1,iterations,converged\n"
        )

    def test_single_row_two_lines(self, tmp_path):
        p = tmp_path / "results.csv"
        write_results(ResultsTable(rows=[ResultRow(method="m", replicate=0)]), p)
        lines = p.read_text().splitlines()
        assert len(lines) == 2
        assert lines[1] == "m,0,NA,NA,NA,NA,NA,NA"


class TestVectorAndMatrixCsv:
    def test_vector_roundtrip_one_based(self, tmp_path):
        p = tmp_path / "v.csv"
        write_vector_csv([1.5, -2.0, 0.0], p, "beta")
        text = p.read_text().splitlines()
        assert text[0] == "index,beta"
        assert text[1].startswith("1,")
        np.testing.assert_array_equal(load_vector_csv(p), [1.5, -2.0, 0.0])

    def test_matrix_labels(self, tmp_path):
        p = tmp_path / "m.csv"
        write_matrix_csv(np.arange(6.0).reshape(2, 3), p)
        lines = p.read_text().splitlines()
        assert lines[0] == ",s1,s2,s3"
        assert lines[1].startswith("t1,")
        assert lines[2].startswith("t2,")


class TestConfigFiles:
    def test_manifest_roundtrip(self, tmp_path):
        p = tmp_path / "manifest.txt"
        write_manifest({"command": "simulate", "seed": 7, "h": 0.25,
                        "skipped": None}, p)
        values = read_config_file(p)
        assert values == {"command": "simulate", "seed": "7", "h": "0.25"}

    def test_comments_and_blanks_ignored(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("# a comment\n\nseed = 3\n  command=fit\n")
        assert read_config_file(p) == {"seed": "3", "command": "fit"}

    def test_malformed_line_rejected(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("seed 3\n")
        with pytest.raises(ValueError, match="malformed config line 1"):
            read_config_file(p)
