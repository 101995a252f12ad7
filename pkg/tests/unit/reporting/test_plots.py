"""
Unit tests for SVG figures
"""

import numpy as np
import pytest

from acoustic_psnr.area import AreaModelParams, area_vs_noise_table
from acoustic_psnr.psychometric import LogisticFit, simulate_curve
from acoustic_psnr.reporting import plot_area, plot_curve


class TestPlots:
    """Test cases for plot_curve / plot_area"""

    def test_curve_svg_is_deterministic(self, tmp_path):
        """Test the same curve renders to identical bytes"""
        fit = LogisticFit(x0=-8.0, k=0.5, v=2.0)
        curve = simulate_curve(fit, np.arange(-20.0, 6.0, 1.0), 30, seed=0)
        curve.fit = fit
        a = plot_curve(curve, tmp_path / "a.svg").read_bytes()
        b = plot_curve(curve, tmp_path / "b.svg").read_bytes()
        assert a.startswith(b"<?xml")
        assert a == b

    def test_unfitted_curve(self, tmp_path):
        """Test a curve without a fit still plots its points"""
        curve = simulate_curve(LogisticFit(0.0, 1.0, 1.0), [-2.0, 0.0, 2.0], 10)
        assert plot_curve(curve, tmp_path / "raw.svg").stat().st_size > 0

    def test_area_plot(self, tmp_path):
        """Test one line per label"""
        params = AreaModelParams(fit=LogisticFit(-15.9, 0.4, 1.0), noise_level=45.0)
        tables = {"wind": area_vs_noise_table(0.5, params, [30.0, 40.0, 50.0])}
        path = plot_area(tables, tmp_path / "plots" / "area.svg")
        assert path.exists()
        assert b"wind" in path.read_bytes()


if __name__ == "__main__":
    pytest.main([__file__])
