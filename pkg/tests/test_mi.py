"""Per-bit MI table: construction, interpolation, inversion."""

import numpy as np
import pytest

from oracles import ORACLE_MI_PER_BIT, ORACLE_POINTS_DB, bisection_mi_inverse
from lmsharq.errors import ConfigError
from lmsharq.mi import (
    MiTable,
    build_mi_table,
    db_to_linear,
    linear_to_db,
    load_mi_csv,
    mi_inverse,
    mi_of,
    save_mi_csv,
)


def test_table_rejects_malformed_grids():
    good = np.array([1.0, 2.0, 4.0])
    with pytest.raises(ValueError):
        MiTable(es_n0_linear=np.array([1.0, 1.0, 2.0]), mi_per_bit=np.array([0.1, 0.2, 0.3]))
    with pytest.raises(ValueError):
        MiTable(es_n0_linear=good, mi_per_bit=np.array([0.1, 0.3, 0.2]))
    with pytest.raises(ValueError):
        MiTable(es_n0_linear=good, mi_per_bit=np.array([0.1, 0.2, 1.2]))
    with pytest.raises(ValueError):
        MiTable(es_n0_linear=good, mi_per_bit=np.array([0.1, 0.2]))
    with pytest.raises(ValueError):
        MiTable(es_n0_linear=np.array([1.0]), mi_per_bit=np.array([0.1]))


def test_build_rejects_bad_configuration():
    with pytest.raises(ConfigError):
        build_mi_table(es_n0_min_db=5.0, es_n0_max_db=-5.0)
    with pytest.raises(ConfigError):
        build_mi_table(points=1)
    with pytest.raises(ConfigError):
        build_mi_table(samples=100)


def test_build_flags_insufficient_precision():
    # mid-curve points have high per-sample variance; 10k samples cannot
    # reach the 1e-3 standard error gate
    with pytest.raises(ConfigError, match="std error"):
        build_mi_table(es_n0_min_db=0.0, es_n0_max_db=1.0, points=3, samples=10_000)


def test_build_deterministic_for_fixed_seed():
    # saturated region, so the sample count stays small and cheap
    a = build_mi_table(es_n0_min_db=19.0, es_n0_max_db=20.0, points=5, samples=20_000, seed=11)
    b = build_mi_table(es_n0_min_db=19.0, es_n0_max_db=20.0, points=5, samples=20_000, seed=11)
    assert np.array_equal(a.es_n0_linear, b.es_n0_linear)
    assert np.array_equal(a.mi_per_bit, b.mi_per_bit)


def test_curve_limits(mi_table):
    assert mi_of(mi_table, float(db_to_linear(-30.0))) < 0.01
    assert mi_of(mi_table, float(db_to_linear(10.0))) >= 0.99


def test_eleven_point_oracle_agreement(mi_table):
    got = np.array([mi_of(mi_table, float(db_to_linear(d))) for d in ORACLE_POINTS_DB])
    assert np.max(np.abs(got - np.array(ORACLE_MI_PER_BIT))) < 3e-3


def test_query_at_grid_point_returns_grid_value(mi_table):
    for i in (0, 40, 120, 200):
        assert mi_of(mi_table, float(mi_table.es_n0_linear[i])) == mi_table.mi_per_bit[i]


def test_query_at_midpoint_is_arithmetic_mean(mi_table):
    x0, x1 = mi_table.es_n0_linear[100:102]
    y0, y1 = mi_table.mi_per_bit[100:102]
    got = mi_of(mi_table, 0.5 * (x0 + x1))
    assert got == pytest.approx(0.5 * (y0 + y1), rel=1e-12)


def test_unit_attenuation_changes_nothing(mi_table):
    es = float(db_to_linear(8.0))
    rho = 1.0
    assert mi_of(mi_table, rho * rho * es) == mi_of(mi_table, es)


def test_out_of_range_queries_clamp(mi_table):
    assert mi_of(mi_table, 1e-9) == mi_table.mi_per_bit[0]
    assert mi_of(mi_table, 1e9) == mi_table.mi_per_bit[-1]


def test_nonpositive_query_is_a_domain_error(mi_table):
    with pytest.raises(ValueError):
        mi_of(mi_table, 0.0)
    with pytest.raises(ValueError):
        mi_of(mi_table, -1.0)


def test_monotone_over_random_pairs(mi_table):
    rng = np.random.default_rng(8)
    x = db_to_linear(rng.uniform(-40.0, 30.0, size=(1000, 2)))
    lo = np.minimum(x[:, 0], x[:, 1])
    hi = np.maximum(x[:, 0], x[:, 1])
    assert np.all(mi_of(mi_table, lo) <= mi_of(mi_table, hi))


def test_bounded_for_any_positive_input(mi_table):
    rng = np.random.default_rng(9)
    x = db_to_linear(rng.uniform(-60.0, 60.0, size=1000))
    y = mi_of(mi_table, x)
    assert np.all(y >= 0.0) and np.all(y <= 1.0)


def test_inverse_round_trips_on_rising_grid_points(mi_table):
    # pick a window where the curve rises strictly, away from both tails
    grid_db = linear_to_db(mi_table.es_n0_linear)
    idx = np.where((grid_db > -10.0) & (grid_db < 5.0))[0]
    assert np.all(np.diff(mi_table.mi_per_bit[idx]) > 0)
    for i in idx[::10]:
        x = float(mi_table.es_n0_linear[i])
        assert mi_inverse(mi_table, mi_of(mi_table, x)) == pytest.approx(x, rel=1e-12)


def test_inverse_near_saturation_knee(mi_table):
    # the 0.99 crossing sits just below 9 dB on the measured curve
    knee_db = float(linear_to_db(mi_inverse(mi_table, 0.99)))
    assert 8.5 <= knee_db <= 11.0


def test_inverse_monotone_in_target(mi_table):
    rng = np.random.default_rng(10)
    lo = float(mi_table.mi_per_bit[0])
    hi = float(mi_table.mi_per_bit[-1])
    targets = np.sort(rng.uniform(lo + 1e-6, hi - 1e-6, size=200))
    xs = [mi_inverse(mi_table, float(t)) for t in targets]
    assert np.all(np.diff(xs) >= 0.0)


def test_inverse_rejects_unreachable_targets(mi_table):
    with pytest.raises(ValueError, match="achievable interval"):
        mi_inverse(mi_table, 0.0)
    with pytest.raises(ValueError, match="achievable interval"):
        mi_inverse(mi_table, 1.0)


def test_inverse_matches_bisection_oracle(mi_table):
    lo = float(mi_table.mi_per_bit[0])
    just_above_min = lo + 1e-5
    targets = [just_above_min, 0.1, 0.5, 0.9]
    for t in targets:
        direct = mi_inverse(mi_table, t)
        assert direct == pytest.approx(bisection_mi_inverse(mi_table, t), rel=1e-8)
    # a target barely above the floor must resolve inside the first segments
    assert mi_inverse(mi_table, just_above_min) < float(mi_table.es_n0_linear[3])


def test_csv_round_trip(tmp_path, mi_table):
    path = tmp_path / "mi.csv"
    save_mi_csv(mi_table, path)
    loaded = load_mi_csv(path)
    assert np.allclose(loaded.es_n0_linear, mi_table.es_n0_linear, rtol=1e-5)
    assert np.allclose(loaded.mi_per_bit, mi_table.mi_per_bit, atol=1e-6)


def test_csv_load_rejects_bad_files(tmp_path):
    bad_header = tmp_path / "bad.csv"
    bad_header.write_text("x,y\n0,0.1\n1,0.2\n")
    with pytest.raises(ValueError, match="header"):
        load_mi_csv(bad_header)
    short = tmp_path / "short.csv"
    short.write_text("es_n0_db,mi_per_bit\n0,0.5\n")
    with pytest.raises(ValueError, match="two rows"):
        load_mi_csv(short)


def test_shipped_table_reproducible_from_default_build(mi_table, fresh_mi_build, tmp_path):
    table, _ = fresh_mi_build
    from lmsharq import presets

    rebuilt = tmp_path / "rebuilt.csv"
    save_mi_csv(table, rebuilt)
    shipped = presets.assets_dir() / presets.MI_TABLE_ASSET
    assert rebuilt.read_bytes() == shipped.read_bytes()
