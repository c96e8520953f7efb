import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qal.campaign import (
    STANDINS,
    AcquisitionConfig,
    CampaignConfig,
    Dataset,
    InitConstraint,
    PreprocessConfig,
    UncertaintyConfig,
    aggregate_runs,
    config_from_dict,
    config_to_dict,
    cycle_seed,
    cycles_to_optimum,
    emit_results,
    homotop_dataset,
    init_pool,
    kde,
    nn_local_minima,
    preprocess,
    read_dataset_csv,
    run_campaign,
    run_seed,
    run_single,
    silverman_bandwidth,
    standin_dataset,
    synthetic_dataset,
    write_dataset_csv,
)
from qal.errors import ConfigError, DataError, QalError
from qal.qsim import build_feature_map
from qal.regress import Surrogate


def bowl(n=40, dim=3, seed=0):
    return synthetic_dataset("smooth_bowl", n, dim, seed=seed)


def quick_config(**kw):
    base = dict(objective="minimize", n_init=8, n_selected=1, n_cycles=4, n_runs=3, master_seed=0,
                surrogate=Surrogate("svr", "rbf", C=10.0, rbf_gamma=1.0))
    base.update(kw)
    return CampaignConfig(**base)


def truth(ds):
    def estimator(obs_idx, virt_idx, X_obs, y_obs, X_virt, seed):
        return ds.y[virt_idx], np.zeros(len(virt_idx))
    return estimator


# --- datasets ---

def test_dataset_validation():
    with pytest.raises(DataError):
        Dataset(("a", "a"), np.zeros((2, 1)), np.zeros(2), ("x",))
    with pytest.raises(DataError):
        Dataset(("a", "b"), np.zeros((2, 1)), np.array([0.0, np.nan]), ("x",))


def test_dataset_csv_round_trip(tmp_path):
    ds = bowl(10, 2)
    path = tmp_path / "d.csv"
    write_dataset_csv(ds, path)
    again = read_dataset_csv(path)
    assert again.ids == ds.ids
    assert np.array_equal(again.X, ds.X) and np.array_equal(again.y, ds.y)
    assert b"\r\n" not in path.read_bytes()


def test_dataset_csv_missing_target(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("id,a,b\nr0,1,2\n")
    with pytest.raises(DataError, match="missing required column 'target'"):
        read_dataset_csv(path)


def test_optimum_index():
    ds = Dataset(("a", "b", "c"), np.zeros((3, 1)), np.array([2.0, -1.0, 5.0]), ("x",))
    assert ds.optimum_index("minimize") == 1 and ds.optimum_index("maximize") == 2


# --- synthetic generators ---

def test_synthetic_deterministic():
    a = synthetic_dataset("rough_multimodal", 50, 4, seed=7)
    b = synthetic_dataset("rough_multimodal", 50, 4, seed=7)
    assert np.array_equal(a.X, b.X) and np.array_equal(a.y, b.y)


def test_bowl_has_one_minimum_and_rough_has_several():
    b = bowl(80, 3)
    r = synthetic_dataset("rough_multimodal", 80, 3, seed=0)
    assert len(nn_local_minima(b.X, b.y)) >= 1
    assert len(nn_local_minima(r.X, r.y)) >= 2


@pytest.mark.parametrize("dim", [7, 34, 64])
def test_perovskite_like_shapes(dim):
    ds = synthetic_dataset("perovskite_like", 30, dim, seed=0)
    assert ds.X.shape == (30, dim)
    assert 0 <= ds.y.min() and ds.y.max() <= 1


def test_unknown_kind():
    with pytest.raises(ValueError):
        synthetic_dataset("spiky", 10, 2)


def test_homotops_layout():
    ds, structures = homotop_dataset(4, (2, 4, 6), seed=0)
    assert len(ds) == 12 and set(structures) == set(ds.ids)
    assert list(ds.feature_names[-4:]) == ["spin_2S+1", "spin_S", "spin_moment", "spin_unpaired"]
    assert structures["h000_m4"].multiplicity == 4


@pytest.mark.parametrize("system", ["system_1", "system_2", "system_3"])
def test_standins_match_spec(system):
    spec = STANDINS[system]
    ds, _ = standin_dataset(system)
    assert ds.X.shape == (spec.n_records, spec.dim)


# --- config ---

def test_config_round_trip():
    cfg = quick_config(surrogate=Surrogate("svr", "fqk", feature_map=build_feature_map("ZZ", 3, 2, "circular")),
                       init_constraint=InitConstraint(">=", 0.5))
    again = config_from_dict(config_to_dict(cfg))
    assert again == cfg and again.digest() == cfg.digest()


def test_config_unknown_key():
    with pytest.raises(ConfigError, match="unknown key 'n_cycle'"):
        config_from_dict({"n_cycle": 3})
    with pytest.raises(ConfigError, match="surrogate"):
        config_from_dict({"surrogate": {"gama": 1.0}})


def test_config_type_errors():
    with pytest.raises(ConfigError):
        config_from_dict({"n_init": "ten"})
    with pytest.raises(ConfigError):
        config_from_dict({"preprocessing": {"scale": "yes"}})


@pytest.mark.parametrize("kw", [
    {"n_init": 0}, {"n_cycles": 0}, {"objective": "median"}, {"master_seed": -1},
    {"n_init": 3},  # below the 5-fold CV minimum
    {"uncertainty": UncertaintyConfig("gpr_analytic")},
])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        quick_config(**kw)


def test_constraint_mask():
    y = np.array([1.0, 2.0, 3.0])
    assert list(InitConstraint("<=", 2.0).mask(y)) == [True, True, False]
    assert list(InitConstraint().mask(y)) == [True] * 3
    with pytest.raises(ConfigError):
        InitConstraint("==", 1.0)


# --- seeding and the initial pool ---

def test_run_seeds_distinct_and_stable():
    seeds = [run_seed(0, r) for r in range(50)]
    assert len(set(seeds)) == 50
    assert seeds == [run_seed(0, r) for r in range(50)]
    assert run_seed(1, 0) != run_seed(0, 0)
    assert all(0 <= s < 2**63 for s in seeds)


def test_cycle_seed_streams_differ():
    a = np.random.default_rng(cycle_seed(5, 1)).random()
    b = np.random.default_rng(cycle_seed(5, 2)).random()
    assert a != b


def test_init_pool_respects_constraint():
    ds = bowl()
    c = InitConstraint(">=", float(np.quantile(ds.y, 0.5)))
    obs, virt = init_pool(ds, c, 10, seed=3)
    assert np.all(ds.y[obs] >= c.value)
    assert len(set(obs) | set(virt)) == len(ds) and not set(obs) & set(virt)


def test_init_pool_infeasible():
    ds = bowl()
    with pytest.raises(DataError):
        init_pool(ds, InitConstraint("<", ds.y.min()), 1, seed=0)


# --- preprocessing ---

def test_preprocess_fits_on_observed_only():
    rng = np.random.default_rng(0)
    X_obs, X_virt = rng.normal(size=(10, 3)), rng.normal(size=(5, 3)) + 100
    Zo, Zv = preprocess(quick_config(), X_obs, X_virt)
    assert np.allclose(Zo.mean(axis=0), 0, atol=1e-12)
    assert np.all(Zv > 10)


def test_preprocess_pca_too_large():
    cfg = quick_config(preprocessing=PreprocessConfig(True, 5))
    with pytest.raises(ConfigError):
        preprocess(cfg, np.random.default_rng(0).normal(size=(4, 6)), np.zeros((1, 6)))


def test_qubit_count_must_match_features():
    cfg = quick_config(surrogate=Surrogate("svr", "fqk", feature_map=build_feature_map("Z", 4, 1)))
    with pytest.raises(ConfigError, match="qubits"):
        run_single(cfg, bowl(dim=3), seed=0)


# --- the loop ---

@pytest.mark.parametrize("n_selected", [1, 3])
def test_truth_estimator_finds_optimum_immediately(n_selected):
    ds = bowl(60, 3, seed=4)
    opt = ds.ids[ds.optimum_index("minimize")]
    cfg = quick_config(n_selected=n_selected, acquisition=AcquisitionConfig("exploit"),
                       init_constraint=InitConstraint(">", float(ds.y.min())))
    for r in range(3):
        run = run_single(cfg, ds, run_seed(0, r), r, estimator=truth(ds))
        assert cycles_to_optimum(run, opt) == math.ceil(1 / n_selected)


def test_runs_monotone_and_without_repeats():
    ds = bowl()
    res = run_campaign(quick_config(n_selected=2, n_cycles=5), ds)
    for run in res.runs:
        b = run.best_so_far
        assert len(b) == 6
        assert np.all(np.diff(b) <= 0)
        assert len(run.observed_ids) == len(set(run.observed_ids)) == 8 + 10
        assert not set(run.initial_ids) & set(run.selected_ids)


def test_maximize_monotone():
    res = run_campaign(quick_config(objective="maximize", n_runs=2), bowl())
    for run in res.runs:
        assert np.all(np.diff(run.best_so_far) >= 0)


def test_pool_exhaustion_pads():
    ds = bowl(12, 2)
    res = run_campaign(quick_config(n_selected=3, n_cycles=4, n_runs=1, acquisition=AcquisitionConfig("random")), ds)
    run = res.runs[0]
    assert [len(c.selected_ids) for c in run.cycles] == [3, 1, 0, 0]
    assert len(run.best_so_far) == 5 and run.best_so_far[-1] == ds.y.min()


def test_random_mode_reproducible_and_model_free():
    ds = bowl()
    cfg = quick_config(acquisition=AcquisitionConfig("random"), n_init=2)
    a, b = run_campaign(cfg, ds), run_campaign(cfg, ds)
    assert [r.selected_ids for r in a.runs] == [r.selected_ids for r in b.runs]


def test_gpr_analytic_campaign():
    ds, _ = homotop_dataset(8, (2, 4), seed=0)
    cfg = CampaignConfig(
        objective="minimize", n_init=6, n_selected=2, n_cycles=3, n_runs=2,
        surrogate=Surrogate("gpr", "pqk", feature_map=build_feature_map("HighDim", 3, 1), sigma_reg=1e-3),
        uncertainty=UncertaintyConfig("gpr_analytic"), acquisition=AcquisitionConfig("exploit"),
        preprocessing=PreprocessConfig(True, 3),
    )
    res = run_campaign(cfg, ds)
    assert all(len(r.cycles) == 3 for r in res.runs)


def test_errors_carry_run_and_cycle():
    def broken(*args):
        raise DataError("boom")
    with pytest.raises(DataError, match="run 0 cycle 1: boom"):
        run_single(quick_config(), bowl(), 0, 0, estimator=broken)


def test_threads_do_not_change_results():
    ds = bowl()
    cfg = quick_config(n_runs=4)
    a, b = run_campaign(cfg, ds, threads=1), run_campaign(cfg, ds, threads=3)
    assert a.runs == b.runs


def test_threads_validated():
    with pytest.raises(ConfigError):
        run_campaign(quick_config(), bowl(), threads=0)


# --- analysis and results ---

def test_aggregate():
    res = run_campaign(quick_config(), bowl())
    agg = aggregate_runs(res)
    stack = np.array([r.best_so_far for r in res.runs])
    assert np.array_equal(agg.mean, stack.mean(axis=0))
    assert np.array_equal(agg.min, stack.min(axis=0)) and np.array_equal(agg.max, stack.max(axis=0))


def test_silverman_and_kde_normalized():
    v = np.random.default_rng(0).normal(size=500)
    h = silverman_bandwidth(v)
    assert 0.1 < h < 0.5
    g, d = kde(v, n_grid=400)
    assert abs(np.trapezoid(d, g) - 1) < 1e-3
    with pytest.raises(ValueError):
        kde([])


def test_cycles_to_optimum_none_and_zero():
    ds = bowl()
    run = run_single(quick_config(), ds, 0)
    assert cycles_to_optimum(run, run.initial_ids[0]) == 0
    never = next(i for i in ds.ids if i not in run.observed_ids)
    assert cycles_to_optimum(run, never) is None


def test_emit_results_files(tmp_path):
    ds = bowl()
    res = run_campaign(quick_config(), ds)
    paths = emit_results(res, ds, tmp_path / "out")
    traj = (tmp_path / "out" / "trajectory.csv").read_text().splitlines()
    assert traj[0] == "run,cycle,selected_ids,best_so_far,selected_targets"
    assert len(traj) == 1 + 3 * 5
    assert set(paths) == {"trajectory.csv", "aggregate.csv", "kde.csv", "kde_full.csv", "manifest.json"}
    again = tmp_path / "again"
    emit_results(run_campaign(quick_config(), ds), ds, again)
    for name in paths:
        assert (tmp_path / "out" / name).read_bytes() == (again / name).read_bytes()


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 4))
def test_property_random_runs_are_monotone(master, k):
    ds = bowl(25, 2)
    cfg = quick_config(master_seed=master, n_selected=k, n_runs=2, n_cycles=3, n_init=2,
                       acquisition=AcquisitionConfig("random"))
    for run in run_campaign(cfg, ds).runs:
        assert np.all(np.diff(run.best_so_far) <= 0)
        assert len(set(run.observed_ids)) == len(run.observed_ids)
