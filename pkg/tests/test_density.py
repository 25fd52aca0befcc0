import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gabortraj import (density_scan, make_circles, make_parallel_lines, phi_regularity_check,
                       scan_grid)
from gabortraj.exceptions import PreconditionError
from gabortraj.trajectory import empty_trajectory, lattice_offsets

# brute-force scan of O_{0.5} (k_max 20), R = 1, grid half-width 4 step 0.25
O_HALF_M_EST = 5.467
O_HALF_M_MAX = 9.425


def test_origin_ball():
    rep = density_scan(make_circles(1, 5), 1.5, [(0, 0)])
    assert rep.m_est == pytest.approx(2 * math.pi, rel=1e-12)


def test_between_lines():
    lines = make_parallel_lines(0, lattice_offsets(1, -5, 5), (-6, 6, -6, 6))
    assert density_scan(lines, 0.4, [(0.5, 0.0)]).m_est == 0.0


def test_circles_dense():
    rep = density_scan(make_circles(0.5, 20), 1.0, scan_grid(half_width=4, step=0.25))
    assert 0 < rep.m_est <= rep.M_est
    assert rep.m_est == pytest.approx(O_HALF_M_EST, abs=1e-3)
    assert rep.M_est == pytest.approx(O_HALF_M_MAX, abs=1e-3)


def test_margin_violation():
    with pytest.raises(PreconditionError, match="faithful"):
        density_scan(make_circles(1, 3), 1.0, [(2.5, 0)])


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_translation_consistent(zx, zy, wx, wy):
    t = make_circles(0.5, 12)
    a = density_scan(t.translated((zx, zy)), 0.7, [(wx, wy)], check_margin=False).m_est
    b = density_scan(t, 0.7, [(wx - zx, wy - zy)], check_margin=False).m_est
    assert a == pytest.approx(b, abs=1e-12)


def test_square_shape():
    lines = make_parallel_lines(0, lattice_offsets(1, -5, 5), (-6, 6, -6, 6))
    rep = density_scan(lines, 0.5, [(0.2, 0.1)], shape="square")
    assert rep.m_est == pytest.approx(1.0)


def test_report_json():
    import json
    rep = density_scan(make_circles(1, 5), 1.0, scan_grid(half_width=1, step=0.5))
    d = json.loads(rep.to_json())
    assert d["R"] == 1.0 and d["m_est"] <= d["M_est"]


class TestRegularity:
    def test_single_line(self):
        line = make_parallel_lines(0, [0], (-5, 5, -5, 5))
        out = phi_regularity_check(line, lambda R: 1.0, [0.1, 0.5, 0.9], [(0, 0), (0, 1.3)])
        assert out["worst_ratio"] == pytest.approx(2 / math.pi)
        assert out["regular"]

    def test_sparse_circles(self):
        out = phi_regularity_check(make_circles(2, 5), lambda R: 1.0, [0.2, 0.5],
                                   scan_grid(half_width=4, step=0.5))
        assert out["worst_ratio"] < 1.0

    def test_empty(self):
        assert phi_regularity_check(empty_trajectory(), lambda R: 1.0, [0.5], [(0, 0)])["worst_ratio"] == 0

    def test_radius_range(self):
        with pytest.raises(PreconditionError):
            phi_regularity_check(make_circles(1, 2), lambda R: 1.0, [1.5], [(0, 0)])
