import json
import math

import numpy as np
import pytest

from gabortraj import (make_archimedes, make_circles, make_parallel_lines, make_point_path,
                       make_polygon_family, singular_directions, spiraling_validate)
from gabortraj.exceptions import PreconditionError
from gabortraj.spiraling import fit_equispacing, ray_profile
from gabortraj.trajectory import lattice_offsets

FIG_PATH = [(-1, 1), (1, 1), (1, -1), (-1, -1)]


def test_circles_equispaced():
    rep = spiraling_validate(make_circles(0.5, 40), betas=[0.0, 0.3], k_range=(4, 32))
    assert rep.ok and rep.singular == ()
    for b in rep.per_beta:
        assert np.allclose(b["eta"], 0.5, atol=1e-12)
        assert np.allclose(b["rho"], 0.0, atol=1e-9)
        assert max(b["fit_residual"]) < 1e-9
        for th, d in zip(b["thetas"], b["direction"]):
            psi = 2 * math.pi * (b["beta"] + th)
            np.testing.assert_allclose(d, (-math.sin(psi), math.cos(psi)), atol=1e-12)


def test_archimedes():
    rep = spiraling_validate(make_archimedes(1.0, 40), betas=[0.1, 0.6], k_range=(4, 32))
    assert rep.ok
    for b in rep.per_beta:
        assert np.allclose(b["eta"], 1.0, atol=1e-6)
        assert b["monotonicity_violations"] == 0
        assert b["curvature_trend"] < 0
        assert b["curvature_max"][-1] < 0.05
        # rho stays continuous across the cone
        assert np.max(np.abs(np.diff(b["rho"]))) < 0.5


def test_square_path_corners():
    t = make_point_path(FIG_PATH, 1.0, 40)
    assert singular_directions(t) == [0.125, 0.375, 0.625, 0.875]
    rep = spiraling_validate(t, betas=[0.125], k_range=(4, 32))
    b = rep.per_beta[0]
    assert b["singular"]
    np.testing.assert_allclose(b["d_minus"], (0, 1), atol=1e-9)
    np.testing.assert_allclose(b["d_plus"], (-1, 0), atol=1e-9)


def test_polygon_corners():
    t = make_polygon_family([(2, 0), (0, 1), (-1, 0), (0, -1)], 0.5, 40)
    assert singular_directions(t) == [0.0, 0.25, 0.5, 0.75]
    assert spiraling_validate(t, k_range=(4, 32)).ok


def test_unparametrisable_cone():
    lines = make_parallel_lines(0, lattice_offsets(1, -40, 40), (-41, 41, -41, 41))
    with pytest.raises(PreconditionError, match=r"\(A.i\)"):
        spiraling_validate(lines, betas=[0.25])


def test_bad_range():
    with pytest.raises(PreconditionError):
        spiraling_validate(make_circles(1, 10), k_range=(8, 4))


def test_ray_profile_circles():
    r, tang, curv = ray_profile(make_circles(2.0, 5), 0.0)
    np.testing.assert_allclose(r, 2.0 * np.arange(1, 6))
    np.testing.assert_allclose(curv, 1 / r)
    np.testing.assert_allclose(tang, np.tile([0, 1], (5, 1)), atol=1e-12)


def test_fit_exact():
    r = 0.7 * np.arange(1, 21) + 0.2
    eta, rho = fit_equispacing(r, np.arange(3, 21))
    assert eta == pytest.approx(0.7) and rho == pytest.approx(0.2)


def test_report_json():
    rep = spiraling_validate(make_circles(1, 20), betas=[0.0], k_range=(2, 16))
    d = json.loads(rep.to_json())
    assert d["ok"] is True and len(d["per_beta"]) == 1
