import math
from dataclasses import replace

import numpy as np
import pytest

from hardy_extremal.geometry import disk, wedge
from hardy_extremal.harmonic import MeasureEstimate, WosConfig
from hardy_extremal.profile import (ProfileConfig, load_profile_rows, nudge_radii, profile,
                                    save_profile, validate_profile)
from oracles import sector_level_measure

W0 = 0.5 + 0.25j
CFG = ProfileConfig(n_radii=10, wos=WosConfig(n_samples=20_000, rng_seed=9))


@pytest.fixture(scope="module")
def wedge_profile(tables):
    return profile(wedge(math.pi / 2, W0), CFG, tables=tables)


def test_wedge_profile_follows_sector_oracle(wedge_profile):
    for row in wedge_profile.rows:
        exact = sector_level_measure(W0, row.r, math.pi / 2)
        assert abs(row.omega_star.mean - exact) <= 4 * row.omega_star.std_err
        assert row.n_crosscuts == 1


def test_wedge_profile_has_no_violations(wedge_profile):
    assert validate_profile(wedge_profile) == []


def test_validation_catches_swapped_measures(wedge_profile):
    rows = [replace(x) for x in wedge_profile.rows]
    big = MeasureEstimate(0.5, 1e-4, 100)
    rows[3] = replace(rows[3], omega_star=big)
    bad = replace(wedge_profile, rows=rows)
    checks = {v.check for v in validate_profile(bad)}
    assert "extremal crosscut exceeds full level set" in checks
    assert "extremal measure increases" in checks


def test_validation_catches_table_mismatch(wedge_profile):
    rows = [replace(x) for x in wedge_profile.rows]
    rows[2] = replace(rows[2], lambda_star=rows[2].lambda_star + 1.0)
    checks = {v.check for v in validate_profile(replace(wedge_profile, rows=rows))}
    assert "slit-distance lower sandwich" in checks


def test_bounded_disk_profile_ends(tables):
    p = profile(disk(0j, 5.0, 0j), ProfileConfig(n_radii=6, wos=WosConfig(n_samples=2000)),
                tables=tables)
    inside = [x for x in p.rows if x.r < 5.0]
    outside = [x for x in p.rows if x.r > 5.0]
    assert all(x.omega_star.mean == 1.0 for x in inside)
    assert outside and all(x.n_crosscuts == 0 and x.omega_star.mean == 0 for x in outside)
    assert all(math.isinf(x.delta_star) for x in outside)


def test_radius_grid_checks(tables):
    D = wedge(math.pi / 2, W0)
    with pytest.raises(ValueError):
        profile(D, CFG, r_grid=[0.1, 1.0], tables=tables)
    with pytest.raises(ValueError):
        profile(D, CFG, r_grid=[3.0, 2.0], tables=tables)


def test_nudge_moves_radii_off_transitions():
    r = nudge_radii(np.array([1.0, 7.4, 10.0]), [7.38905609893065])
    assert r[1] == pytest.approx(7.38905609893065 * 1.02)
    assert r[0] == 1.0 and r[2] == 10.0


def test_profile_csv_roundtrip(tmp_path, wedge_profile):
    path = tmp_path / "profile.csv"
    save_profile(wedge_profile, path)
    rows = load_profile_rows(path)
    assert len(rows) == len(wedge_profile.rows)
    assert rows[4]["omega_star_mean"] == wedge_profile.rows[4].omega_star.mean
    text = path.read_text().replace("schema=1", "schema=9")
    path.write_text(text)
    with pytest.raises(ValueError):
        load_profile_rows(path)
