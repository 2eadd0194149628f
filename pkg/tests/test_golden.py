"""Reference-table plumbing tests (full regression lives in acceptance)."""

import pytest

from espd.dynamics import LevelConfig
from espd.golden import (
    FIGURES,
    TABLES,
    evaluate_table,
    figure_panels,
    schedule_label,
    series_trajectory,
)


def test_tables_cover_contracted_numbers():
    assert sorted(TABLES) == [2, 3, 4, 5, 6, 7]
    for table in TABLES.values():
        for series in table.series:
            assert len(series.schedule) == 8
            assert len(series.expected) == 8


def test_reference_table_two_fully_matches():
    report = evaluate_table(2)
    assert report.all_ok
    assert report.n_total == 24


def test_unknown_table_raises():
    with pytest.raises(KeyError):
        evaluate_table(9)


def test_unknown_variant_raises():
    with pytest.raises(ValueError):
        evaluate_table(2, variant="fancy")


def test_variants_differ_slightly():
    exact = series_trajectory(TABLES[2].series[0], "exact")
    approx = series_trajectory(TABLES[2].series[0], "approx")
    assert exact != approx
    assert exact[1].eta == pytest.approx(approx[1].eta, abs=5e-3)


def test_schedule_label_run_length():
    sched = (LevelConfig(4, 1),) + (LevelConfig(4, 2),) * 7
    assert schedule_label(sched) == "4:1+4:2x7"
    assert schedule_label((LevelConfig(3, 1),)) == "3:1"


def test_figure_panel_counts():
    assert {n: len(panels) for n, panels in FIGURES.items()} == {2: 4, 3: 2, 4: 4, 5: 2}
    for number in FIGURES:
        for stem, rows in figure_panels(number):
            assert rows  # every panel carries data
            levels = {r[0] for r in rows}
            assert levels == set(range(9))


def test_figure_three_series_are_transmission_sweep():
    panels = dict(figure_panels(3))
    labels = {label for _, label, _ in panels["fig3_de"]}
    assert labels == {"p=0.80", "p=0.84", "p=0.88", "p=0.92", "p=0.96"}


def test_figure_values_match_table_trajectories():
    panels = dict(figure_panels(2))
    table = TABLES[2]
    for si, series in enumerate(table.series):
        traj = series_trajectory(series)
        label = schedule_label(series.schedule)
        de_rows = [r for r in panels["fig2_seed59_de"] if r[1] == label]
        dcr_rows = [r for r in panels["fig2_seed59_dcr"] if r[1] == label]
        assert [v for _, _, v in de_rows] == [p.eta * 100.0 for p in traj]
        assert [v for _, _, v in dcr_rows] == [p.dcr for p in traj]
