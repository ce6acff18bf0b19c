import os

import numpy as np
import pytest

import romgrid as rg
from romgrid.errors import AllSamplesSingularError

from conftest import random_system


def _breakdown(kind, total, part1=None, part2=0.0, aux=None):
    if part1 is None:
        part1 = total
    return rg.EstimateBreakdown(
        kind=rg.EstimatorKind.from_name(kind),
        total=total,
        part1=part1,
        part2=part2,
        aux=aux or {},
    )


# ---------------------------------------------------------------------------
# configuration and point selection


def test_config_validation():
    grid = [{"s": 1j}, {"s": 2j}]
    with pytest.raises(ValueError):
        rg.GreedyConfig(kind="delta2", training_set=grid, tolerance=-1.0)
    with pytest.raises(ValueError):
        rg.GreedyConfig(kind="delta2", training_set=grid, max_iterations=0)
    with pytest.raises(ValueError):
        rg.GreedyConfig(kind="delta3", training_set=grid, symmetric_variant=True)
    with pytest.raises(ValueError):
        rg.GreedyConfig(
            kind="delta2",
            training_set=grid,
            initial_points=rg.InitialPoints(main=5),
        )
    cfg = rg.GreedyConfig(kind="delta2", training_set=grid)
    assert cfg.kind is rg.EstimatorKind.DELTA_2


def test_select_points_main_is_argmax_total():
    bs = [_breakdown("delta1", t) for t in (0.1, 0.7, 0.3)]
    sel = rg.select_points("delta1", False, bs)
    assert sel.main == 1
    assert sel.alpha is None and sel.beta is None and sel.gamma is None


def test_select_points_tie_goes_to_lowest_index():
    bs = [_breakdown("delta1", 0.5), _breakdown("delta1", 0.5)]
    assert rg.select_points("delta1", False, bs).main == 0


def test_select_points_alpha_rules():
    bs = [
        _breakdown("delta2", 1.0, part1=0.9, part2=0.1),
        _breakdown("delta2", 0.5, part1=0.1, part2=0.4),
    ]
    sel = rg.select_points("delta2", False, bs)
    assert sel.main == 0 and sel.alpha == 1  # alpha chases part2

    bs = [
        _breakdown("delta1pr", 1.0, aux={"r_rpr_norm": 0.1}),
        _breakdown("delta1pr", 0.2, aux={"r_rpr_norm": 0.8}),
    ]
    sel = rg.select_points("delta1pr", False, bs)
    assert sel.main == 0 and sel.alpha == 1  # alpha chases the deep residual

    bs = [
        _breakdown("delta3", 1.0, part1=0.2, part2=0.8),
        _breakdown("delta3", 0.9, part1=0.7, part2=0.2),
    ]
    sel = rg.select_points("delta3", False, bs)
    assert sel.main == 0 and sel.alpha == 1  # alpha chases part1


def test_select_points_beta_and_gamma():
    bs = [
        _breakdown("delta3pr", 1.0, part1=0.9, part2=0.1),
        _breakdown("delta3pr", 0.8, part1=0.1, part2=0.7),
    ]
    sel = rg.select_points("delta3pr", False, bs)
    assert sel.main == 0 and sel.alpha == 0 and sel.beta == 1

    bs = [
        _breakdown("delta1", 1.0, aux={"r_du_norm": 0.1}),
        _breakdown("delta1", 0.5, aux={"r_du_norm": 0.9}),
    ]
    sel = rg.select_points("delta1", True, bs)
    assert sel.main == 0 and sel.gamma == 1

    bs = [
        _breakdown("delta2", 1.0, part1=0.2, part2=0.8),
        _breakdown("delta2", 0.9, part1=0.8, part2=0.1),
    ]
    sel = rg.select_points("delta2", True, bs)
    assert sel.main == 0 and sel.alpha == 0 and sel.gamma == 1


def test_select_points_skips_none_and_raises_when_empty():
    bs = [None, _breakdown("delta1", 0.2), None]
    assert rg.select_points("delta1", False, bs).main == 1
    with pytest.raises(AllSamplesSingularError):
        rg.select_points("delta1", False, [None, None])


# ---------------------------------------------------------------------------
# full runs


def _ladder_grid(count=30, lo=1e-4, hi=1e1):
    return rg.parse_grid([f"f:{lo}:{hi}:{count}:log"])


def test_greedy_converges_on_ladder():
    sys = rg.rc_ladder(150)
    cfg = rg.GreedyConfig(kind="delta2", training_set=_ladder_grid(), tolerance=1e-4)
    res = rg.run_greedy(sys, cfg)
    assert res.converged
    assert res.stop_reason is rg.StopReason.TOLERANCE_MET
    assert res.trace[-1].max_estimate <= 1e-4
    assert res.trace[-1].max_true_error <= 1e-3
    dims = [row.rom_dimension for row in res.trace]
    assert dims == sorted(dims) and dims[0] >= 1
    assert [row.iteration for row in res.trace] == list(range(1, len(res.trace) + 1))
    assert res.workspace.kind is rg.EstimatorKind.DELTA_2


def test_greedy_huge_tolerance_stops_after_one_iteration():
    sys = rg.rc_ladder(80)
    cfg = rg.GreedyConfig(kind="delta1pr", training_set=_ladder_grid(12), tolerance=1e6)
    res = rg.run_greedy(sys, cfg)
    assert res.converged and len(res.trace) == 1


def test_greedy_iteration_cap():
    sys = rg.rc_ladder(150)
    cfg = rg.GreedyConfig(
        kind="delta2", training_set=_ladder_grid(), tolerance=1e-14, max_iterations=2
    )
    res = rg.run_greedy(sys, cfg)
    assert not res.converged
    assert res.stop_reason is rg.StopReason.MAX_ITERATIONS
    assert len(res.trace) == 2


def test_greedy_stagnates_when_points_exhausted():
    # two training samples, unreachable tolerance: once both points'
    # blocks are absorbed nothing new can be added
    sys = rg.rc_ladder(40)
    grid = rg.parse_grid(["f=0.01,1.0"])
    cfg = rg.GreedyConfig(
        kind="delta2", training_set=grid, tolerance=1e-300, max_iterations=30
    )
    res = rg.run_greedy(sys, cfg)
    assert not res.converged
    assert res.stop_reason is rg.StopReason.STAGNATION_ALL_POINTS_USED
    assert len(res.trace) < 30


def test_greedy_true_error_recording_switch():
    sys = rg.rc_ladder(60)
    cfg = rg.GreedyConfig(
        kind="delta2",
        training_set=_ladder_grid(10),
        tolerance=1e-3,
        record_true_errors=False,
    )
    res = rg.run_greedy(sys, cfg)
    assert all(row.max_true_error is None for row in res.trace)


def test_greedy_bases_stay_orthonormal_and_nested():
    sys = rg.rc_ladder(120)
    cfg = rg.GreedyConfig(kind="delta3pr", training_set=_ladder_grid(20), tolerance=1e-5)
    res = rg.run_greedy(sys, cfg)
    ws = res.workspace
    V = ws.rom_primal.V
    assert V.orthonormality_deviation() <= 1e-10
    for rom in (ws.rom_primal_residual, ws.rom_primal_residual_residual):
        U = rom.V
        assert U.orthonormality_deviation() <= 1e-10
        # the primal span is contained in every downstream residual span
        proj = U.columns @ (U.columns.conj().T @ V.columns)
        assert np.linalg.norm(proj - V.columns) <= 1e-9


def test_greedy_interpolates_at_selected_points():
    sys = rg.random_stable(90, seed=4)
    cfg = rg.GreedyConfig(
        kind="delta2", training_set=_ladder_grid(20, 1e-3, 1e1), tolerance=1e-8, q=3
    )
    res = rg.run_greedy(sys, cfg)
    rom = res.workspace.rom_primal
    for row in res.trace:
        H = sys.transfer_function(row.main_point)
        Hr = rom.transfer_function(row.main_point)
        assert np.max(np.abs(H - Hr)) <= 1e-8 * max(1.0, np.max(np.abs(H)))


def test_symmetric_variant_records_gamma():
    sys = rg.rc_ladder(100)
    cfg = rg.GreedyConfig(
        kind="delta1",
        training_set=_ladder_grid(20),
        tolerance=1e-5,
        symmetric_variant=True,
        max_iterations=6,
    )
    res = rg.run_greedy(sys, cfg)
    assert all(row.gamma_point is not None for row in res.trace)
    # separate dual points keep the estimate from collapsing to zero
    assert res.trace[0].max_estimate > 1e-12


def test_plain_delta1_collapses_on_symmetric_systems():
    # same trial and dual spaces on a symmetric system: the estimate is
    # numerically zero while the true error is not
    sys = rg.rc_ladder(100)
    cfg = rg.GreedyConfig(kind="delta1", training_set=_ladder_grid(20), tolerance=1e-5)
    res = rg.run_greedy(sys, cfg)
    assert res.converged and len(res.trace) == 1
    assert res.trace[0].max_estimate <= 1e-12
    assert res.trace[0].max_true_error > 1e-3


def test_parametric_greedy_converges():
    sys = rg.symmetric_second_order(40, seed=1)
    svals = [complex(-0.05 * w, w) for w in np.geomspace(0.2, 5.0, 6)]
    grid = rg.parse_grid([
        "s=" + ",".join(f"{v.real:.17g}{v.imag:+.17g}i" for v in svals),
        "d=0.5,2.0",
        "alpha=0.02",
        "beta=0.05",
    ])
    cfg = rg.GreedyConfig(kind="delta2", training_set=grid, tolerance=1e-6, max_iterations=8)
    res = rg.run_greedy(sys, cfg)
    assert res.converged
    assert res.trace[-1].max_true_error <= 1e-5


# ---------------------------------------------------------------------------
# singular samples


def _resonant_system(n=12):
    # s I - diag(1..n) is exactly singular at integer frequencies
    A = np.diag(np.arange(1.0, n + 1.0))
    b = np.ones((n, 1))
    return rg.from_first_order(np.eye(n), A, b, b.T)


def test_singular_training_sample_is_skipped_with_warning():
    sys = _resonant_system()
    grid = [{"s": 1.0}] + [{"s": 0.5 + 1j * w} for w in np.linspace(0.3, 4.0, 8)]
    cfg = rg.GreedyConfig(kind="delta2", training_set=grid, tolerance=1e-6, max_iterations=6)
    with pytest.warns(RuntimeWarning):
        res = rg.run_greedy(sys, cfg)
    assert 0 in res.skipped_samples
    assert res.converged


def test_all_singular_samples_raise():
    sys = _resonant_system(4)
    grid = [{"s": 1.0}, {"s": 2.0}, {"s": 3.0}]
    cfg = rg.GreedyConfig(kind="delta1", training_set=grid, tolerance=1e-6)
    with pytest.warns(RuntimeWarning):
        with pytest.raises(AllSamplesSingularError):
            rg.run_greedy(sys, cfg)


# ---------------------------------------------------------------------------
# validation sweep


def test_validate_reports_effectivities():
    sys = rg.rc_ladder(150)
    train = _ladder_grid(25)
    cfg = rg.GreedyConfig(kind="delta2", training_set=train, tolerance=1e-4)
    res = rg.run_greedy(sys, cfg)
    check = rg.parse_grid(["f:2e-4:8e0:17:log"])
    report = rg.validate(sys, res, check)
    assert len(report.rows) == 17
    assert report.min_eff_filtered is not None
    assert 1e-2 <= report.min_eff_filtered <= report.max_eff_filtered <= 1e2
    assert report.skipped_singular == 0


def test_validate_flags_fully_converged_band():
    # an exact-width basis drives both estimate and error to roundoff,
    # which the report surfaces instead of dividing noise by noise
    sys = rg.rc_ladder(12)
    train = _ladder_grid(10)
    cfg = rg.GreedyConfig(kind="delta2", training_set=train, tolerance=1e-300, max_iterations=12)
    res = rg.run_greedy(sys, cfg)  # saturates at full order
    report = rg.validate(sys, res, _ladder_grid(6))
    assert report.all_below_threshold
    assert report.min_eff_filtered is None


def test_validate_counts_singular_validation_samples():
    sys = _resonant_system()
    train = [{"s": 0.5 + 1j * w} for w in np.linspace(0.3, 4.0, 8)]
    cfg = rg.GreedyConfig(kind="delta2", training_set=train, tolerance=1e-5, max_iterations=6)
    res = rg.run_greedy(sys, cfg)
    report = rg.validate(sys, res, [{"s": 2.0}, {"s": 0.5 + 1j}])
    assert report.skipped_singular == 1
    assert len(report.rows) == 1


def test_validate_accepts_workspace_or_result():
    sys = rg.rc_ladder(60)
    cfg = rg.GreedyConfig(kind="delta1pr", training_set=_ladder_grid(10), tolerance=1e-3)
    res = rg.run_greedy(sys, cfg)
    grid = _ladder_grid(5)
    a = rg.validate(sys, res, grid)
    b = rg.validate(sys, res.workspace, grid, kind="delta1pr")
    assert [r.estimate for r in a.rows] == [r.estimate for r in b.rows]


# ---------------------------------------------------------------------------
# threading


def test_threaded_sweep_matches_serial(monkeypatch):
    sys = rg.rc_ladder(100)
    cfg = rg.GreedyConfig(kind="delta2", training_set=_ladder_grid(16), tolerance=1e-4)
    serial = rg.run_greedy(sys, cfg)
    monkeypatch.setenv("ROMGRID_THREADS", "4")
    threaded = rg.run_greedy(sys, cfg)
    assert len(serial.trace) == len(threaded.trace)
    for a, b in zip(serial.trace, threaded.trace):
        assert a.max_estimate == b.max_estimate
        assert a.main_point == b.main_point
