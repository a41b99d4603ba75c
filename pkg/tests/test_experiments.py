import numpy as np
import pytest
from numpy.testing import assert_allclose

from patrain import (
    DimensionMismatchError,
    PilotSequence,
    build_design_matrix,
)
from patrain.experiments import (
    CsvTable,
    DEFAULT_SNR_SWEEP_DB,
    design_table,
    estimate_from_files,
    estimation_table,
    read_observation_csv,
    read_pilot_csv,
    run_fig1,
    run_fig2,
    run_fig3,
    run_fig4,
    snr_db_to_sigma2,
)

REFERENCE_FIG2_RATIOS = (1.0, 1.0, 1.17576, 1.62957, 2.54202, 4.48742, 9.10700, 20.7436)


def test_csv_table_rendering():
    table = CsvTable(("a", "b"), [[1.0, 0.123456789123]])
    assert table.to_csv() == "a,b\n1,0.123456789\n"


def test_csv_table_rejects_ragged_rows():
    with pytest.raises(DimensionMismatchError):
        CsvTable(("a", "b"), [[1.0, 2.0, 3.0]])


def test_fig1_reference_values():
    table = run_fig1()
    assert table.header[:3] == ("amplitude", "mse_uniform", "mse_optimal")
    assert table.rows.shape == (501, 5)
    assert table.column("mse_optimal").max() == pytest.approx(1.0, abs=1e-6)
    assert table.column("mse_uniform").max() == pytest.approx(2.54202, rel=1e-3)
    assert table.rows[0][1] == 0.0 and table.rows[0][2] == 0.0
    assert_allclose(table.column("pilot_uniform")[:5], [0.2, 0.4, 0.6, 0.8, 1.0])
    assert np.all(np.isnan(table.column("pilot_uniform")[5:]))
    assert table.column("pilot_optimal")[4] == 1.0


def test_fig2_reproduces_reference_ratios():
    table = run_fig2()
    assert tuple(table.column("order")) == tuple(range(1, 9))
    for ratio, expected in zip(table.column("gain_ratio"), REFERENCE_FIG2_RATIOS):
        assert ratio == pytest.approx(expected, rel=1e-3)


def test_fig3_reference_values():
    table = run_fig3(seed=0)
    grid = table.column("amplitude")
    assert grid.size == 25
    at_one = np.where(grid == 1.0)[0][0]
    assert table.column("nominal_rapp")[at_one] == pytest.approx(0.840896415, abs=1e-8)
    assert table.rows[0][4] == 0.0 and table.rows[0][5] == 0.0
    assert table.column("upper_band")[-1] == pytest.approx(1.140, abs=0.05)
    assert np.all(table.column("lower_band") <= table.column("mean"))


def test_fig3_poly_fit_tracks_nominal_curve():
    table = run_fig3(seed=1)
    assert np.abs(table.column("poly_fit") - table.column("nominal_rapp")).max() <= 1e-2


def test_fig4_ls_columns_follow_snr():
    table = run_fig4(seed=0)
    snr_lin = 10.0 ** (table.column("snr_db") / 10.0)
    assert_allclose(table.column("d_optimal_ls"), 1.0 / snr_lin, rtol=1e-6)
    ratio = table.column("d_uniform_ls") / table.column("d_optimal_ls")
    assert_allclose(ratio, 9.10700, rtol=1e-3)


def test_fig4_columns_decrease_with_snr():
    table = run_fig4(seed=0)
    for name in table.header[1:]:
        column = table.column(name)
        assert np.all(np.diff(column) < 0)


def test_fig4_lmmse_never_worse_than_ls():
    table = run_fig4(seed=3)
    for allocation in ("uniform", "optimal"):
        ls = table.column(f"d_{allocation}_ls")
        for estimator in ("lmmse_coh", "lmmse_noncoh"):
            assert np.all(table.column(f"d_{allocation}_{estimator}") <= ls + 1e-10)


def test_fig4_total_convention_scales_ls_columns():
    per_symbol = run_fig4(snr_db_list=[0.0, 20.0], convention="per-symbol", seed=0)
    total = run_fig4(snr_db_list=[0.0, 20.0], convention="total", seed=0)
    for name in ("d_uniform_ls", "d_optimal_ls"):
        assert_allclose(total.column(name), per_symbol.column(name) / 7.0, rtol=5e-15)
    # LMMSE columns scale nonlinearly, so the same relation must not hold.
    coh_ratio = total.column("d_optimal_lmmse_coh") / per_symbol.column("d_optimal_lmmse_coh")
    assert np.abs(coh_ratio - 1.0 / 7.0).max() > 1e-3


def test_fig4_deterministic_per_seed():
    first = run_fig4(snr_db_list=[0.0, 60.0], seed=5)
    second = run_fig4(snr_db_list=[0.0, 60.0], seed=5)
    assert first.to_csv() == second.to_csv()
    assert run_fig3(seed=5).to_csv() == run_fig3(seed=5).to_csv()


def test_snr_sweep_default_matches_reference_points():
    assert len(DEFAULT_SNR_SWEEP_DB) == 10
    assert DEFAULT_SNR_SWEEP_DB[0] == 0.0 and DEFAULT_SNR_SWEEP_DB[-1] == 60.0
    assert snr_db_to_sigma2(0.0, "per-symbol", 7) == 1.0
    assert snr_db_to_sigma2(0.0, "total", 7) == pytest.approx(1.0 / 7.0)


def test_design_table_reference_rows():
    table = design_table(2, 2)
    assert_allclose(table.rows, [[0, 0.5, 0.0], [1, 1.0, 0.0]])
    assert_allclose(design_table(1, 4).column("amp"), np.ones(4))
    assert_allclose(
        design_table(5, 5).column("amp"),
        [0.1174724, 0.3573843, 0.6426157, 0.8825276, 1.0],
        atol=1e-7,
    )


def test_estimate_round_trip_noiseless(tmp_path):
    table = design_table(3, 3)
    pilot_path = tmp_path / "pilots.csv"
    table.write(pilot_path)
    pilots = read_pilot_csv(pilot_path)
    coef = np.array([1.0 + 0.2j, -0.3, 0.05j])
    observations = build_design_matrix(pilots, 3) @ coef
    result = estimate_from_files(pilots, observations, 3, 1e-6)
    assert np.abs(result.estimate - coef).max() < 1e-10
    rendered = estimation_table(result)
    assert rendered.rows.shape == (3, 3 + 6)


def test_estimate_from_files_requires_matching_lengths():
    pilots = PilotSequence([0.5, 1.0])
    with pytest.raises(DimensionMismatchError):
        estimate_from_files(pilots, np.zeros(3, dtype=complex), 2, 1.0)


def test_pilot_csv_round_trip(tmp_path):
    path = tmp_path / "pilots.csv"
    design_table(2, 4, max_amplitude=2.0).write(path)
    pilots = read_pilot_csv(path)
    assert_allclose(np.abs(pilots.symbols), [1.0, 1.0, 2.0, 2.0])


def test_observation_csv_reader(tmp_path):
    path = tmp_path / "obs.csv"
    path.write_text("index,re,im\n0,1.5,-0.5\n1,0,2\n")
    assert np.array_equal(read_observation_csv(path), np.array([1.5 - 0.5j, 2j]))
