"""
Unit tests for JSON / CSV exports
"""

import json
import math

import numpy as np
import pytest

from acoustic_psnr.exceptions import DataError
from acoustic_psnr.psychometric import LogisticFit, simulate_curve, summarize_curve
from acoustic_psnr.reporting import load_curve, load_fit, read_json, save_curve, to_jsonable, write_json


@pytest.fixture
def fitted_curve():
    fit = LogisticFit(x0=-8.0, k=0.5, v=2.0, nll=12.5)
    curve = simulate_curve(fit, np.arange(-20.0, 6.0, 5.0), n_trials=40, seed=0, label="wind")
    curve.fit = fit
    return summarize_curve(curve)


class TestToJsonable:
    """Test cases for to_jsonable"""

    def test_numpy_values(self):
        """Test numpy scalars and arrays become plain types"""
        payload = to_jsonable({"a": np.float32(1.5), "b": np.arange(3), "c": np.bool_(True)})
        assert payload == {"a": 1.5, "b": [0, 1, 2], "c": True}
        assert type(payload["b"][0]) is int

    def test_non_finite_become_null(self):
        """Test NaN and infinities are written as null"""
        assert to_jsonable([math.nan, math.inf, 1.0]) == [None, None, 1.0]

    def test_dataclasses_and_tuples(self):
        """Test objects with to_dict and tuples are flattened"""
        payload = to_jsonable({"fit": LogisticFit(0.0, 1.0, 1.0), "range": (1, 2)})
        assert payload == {"fit": {"x0": 0.0, "k": 1.0, "v": 1.0, "nll": None}, "range": [1, 2]}


class TestJsonFiles:
    """Test cases for write_json / read_json"""

    def test_sorted_and_stable(self, tmp_path):
        """Test keys are sorted so rewrites are byte-identical"""
        path = write_json(tmp_path / "a.json", {"b": 1, "a": 2})
        first = path.read_bytes()
        write_json(path, {"a": 2, "b": 1})
        assert path.read_bytes() == first
        assert list(json.loads(first)) == ["a", "b"]

    def test_missing(self, tmp_path):
        """Test a missing file is a data error"""
        with pytest.raises(DataError):
            read_json(tmp_path / "absent.json")

    def test_invalid(self, tmp_path):
        """Test malformed JSON is a data error"""
        (tmp_path / "bad.json").write_text("{not json")
        with pytest.raises(DataError):
            read_json(tmp_path / "bad.json")


class TestCurveFiles:
    """Test cases for save_curve / load_curve"""

    def test_save_and_load(self, fitted_curve, tmp_path):
        """Test points and fit survive the curve JSON"""
        paths = save_curve(fitted_curve, tmp_path, extra={"detector": {"name": "energy"}})
        assert paths["json"].name == "curve_wind.json"
        assert paths["csv"].exists()
        loaded = load_curve(paths["json"])
        assert loaded.label == "wind"
        np.testing.assert_array_equal(loaded.n_detected, fitted_curve.n_detected)
        assert loaded.fit == fitted_curve.fit
        stored = read_json(paths["json"])
        assert stored["detector"] == {"name": "energy"}
        assert stored["metrics"]["fit"]["snr_50"] == pytest.approx(fitted_curve.fit.snr_50)

    def test_load_fit_requires_fit(self, tmp_path):
        """Test curve files without a fit cannot supply one"""
        curve = simulate_curve(LogisticFit(0.0, 1.0, 1.0), [-1.0, 0.0, 1.0], 10, label="raw")
        paths = save_curve(curve, tmp_path)
        with pytest.raises(DataError):
            load_fit(paths["json"])

    def test_not_a_curve(self, tmp_path):
        """Test JSON without points is refused"""
        write_json(tmp_path / "other.json", {"name": "x"})
        with pytest.raises(DataError):
            load_curve(tmp_path / "other.json")


if __name__ == "__main__":
    pytest.main([__file__])
