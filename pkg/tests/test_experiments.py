import json
import math

import numpy as np
import pytest

from ising_robust import (
    ContaminationScheme,
    EnsembleSpec,
    EstimatorSettings,
    ExperimentSpec,
    GibbsSettings,
    InvalidSpec,
    NoUsableTrainingFits,
    ParseError,
    build_ensemble,
    gibbs_sample,
    load_experiment_spec,
    predict_leave_one_out,
    predict_train_test,
    run_experiment,
)
from ising_robust.experiments import REPORT_HEADER, ReportRow, experiment_spec_from_dict


def _small_spec(**overrides):
    base = dict(
        ensemble=EnsembleSpec(kind="lattice_2d", n=16),
        true_beta=0.5,
        contamination=(ContaminationScheme("pin_plus", 0.0),),
        lambdas=(0.0, 0.5),
        replicates=8,
        gibbs=GibbsSettings(burn_in_sweeps=50, thin_sweeps=1),
        base_seed=7,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


class TestSpecValidation:
    @pytest.mark.parametrize(
        "overrides",
        [
            dict(contamination=()),
            dict(lambdas=()),
            dict(replicates=0),
            dict(true_beta=float("nan")),
            dict(hamiltonian="matrix"),
        ],
    )
    def test_rejected(self, overrides):
        with pytest.raises(InvalidSpec):
            _small_spec(**overrides)

    def test_fix_graph_defaults(self):
        assert _small_spec().resolve_fix_graph() is True
        er = _small_spec(ensemble=EnsembleSpec(kind="erdos_renyi", n=20, p=0.2))
        assert er.resolve_fix_graph() is False
        forced = _small_spec(
            ensemble=EnsembleSpec(kind="erdos_renyi", n=20, p=0.2), fix_graph=True
        )
        assert forced.resolve_fix_graph() is True


class TestHamiltonianConvention:
    def test_default_is_pair_sum(self):
        assert _small_spec().hamiltonian == "pair_sum"

    def test_quadratic_form_is_pair_sum_with_doubled_couplings(self):
        # x^T J x visits every pair twice, so running it at half the inverse
        # temperature reproduces the pair-sum run replicate for replicate:
        # bias halves and MSE quarters, up to root solver tolerance
        common = dict(
            ensemble=EnsembleSpec(kind="lattice_2d", n=100),
            contamination=(ContaminationScheme("flip", 0.1),),
            lambdas=(0.0, 0.5),
            replicates=12,
            gibbs=GibbsSettings(burn_in_sweeps=100, thin_sweeps=1),
            base_seed=3,
        )
        pair = run_experiment(ExperimentSpec(true_beta=1.0, **common))
        quad = run_experiment(
            ExperimentSpec(true_beta=0.5, hamiltonian="quadratic_form", **common)
        )
        for p_row, q_row in zip(pair.rows, quad.rows):
            assert p_row.n_interior == common["replicates"]
            assert q_row.n_interior == common["replicates"]
            assert math.isclose(q_row.bias, p_row.bias / 2.0, rel_tol=1e-5, abs_tol=1e-7)
            assert math.isclose(q_row.mse, p_row.mse / 4.0, rel_tol=1e-5, abs_tol=1e-7)


class TestReportFormat:
    def test_header_fields(self):
        assert REPORT_HEADER == (
            "lambda,contamination_kind,contamination_fraction,mse,bias,"
            "n_interior,n_left_boundary,n_right_divergent,n_degenerate,replicates"
        )

    def test_row_round_trips_through_float(self):
        row = ReportRow(0.5, "flip", 0.1, 0.012345678901234567, -0.25, 7, 1, 0, 0, 8)
        fields = row.to_csv().split(",")
        assert len(fields) == len(REPORT_HEADER.split(","))
        assert float(fields[3]) == 0.012345678901234567
        assert fields[1] == "flip"
        assert fields[-1] == "8"


class TestRunExperiment:
    def test_shape_and_counts(self):
        spec = _small_spec(
            contamination=(
                ContaminationScheme("pin_plus", 0.0),
                ContaminationScheme("flip", 0.25),
            )
        )
        report = run_experiment(spec)
        assert len(report.rows) == 4  # schemes x lambdas, scheme-major
        assert [r.contamination_kind for r in report.rows] == ["pin_plus"] * 2 + ["flip"] * 2
        assert [r.lam for r in report.rows] == [0.0, 0.5, 0.0, 0.5]
        for row in report.rows:
            total = row.n_interior + row.n_left_boundary + row.n_right_divergent + row.n_degenerate
            assert total == row.replicates == spec.replicates

    def test_threaded_run_is_byte_identical(self):
        spec = _small_spec()
        serial = run_experiment(spec, threads=1).to_csv_string()
        pooled = run_experiment(spec, threads=4).to_csv_string()
        assert serial == pooled

    def test_rerun_is_byte_identical(self):
        spec = _small_spec(ensemble=EnsembleSpec(kind="erdos_renyi", n=20, p=0.25))
        a = run_experiment(spec).to_csv_string()
        b = run_experiment(spec).to_csv_string()
        assert a == b

    def test_seed_changes_output(self):
        a = run_experiment(_small_spec(base_seed=1)).to_csv_string()
        b = run_experiment(_small_spec(base_seed=2)).to_csv_string()
        assert a != b

    def test_degenerate_replicates_counted_not_averaged(self):
        # tiny 2x2 lattice: Gibbs regularly emits all-zero-field configurations
        spec = _small_spec(
            ensemble=EnsembleSpec(kind="lattice_2d", n=4),
            lambdas=(0.0,),
            replicates=40,
        )
        row = run_experiment(spec).rows[0]
        assert row.n_degenerate > 0
        assert row.n_degenerate < row.replicates
        assert math.isfinite(row.mse)

    def test_clamped_fits_enter_moments(self):
        # a single edge never has an interior root: every replicate clamps
        spec = _small_spec(
            ensemble=EnsembleSpec(kind="path_lattice_1d", n=2),
            lambdas=(0.0,),
            replicates=12,
        )
        row = run_experiment(spec).rows[0]
        assert row.n_interior == 0
        assert row.n_degenerate == 0
        assert row.n_left_boundary + row.n_right_divergent == 12
        assert math.isfinite(row.mse) and row.mse > 0.0

    def test_rejects_bad_thread_count(self):
        with pytest.raises(InvalidSpec):
            run_experiment(_small_spec(), threads=0)


class TestLeaveOneOut:
    def test_deterministic_hand_case(self, path3):
        # all-plus spins: held-out middle node is disconnected, so its fit is
        # degenerate and falls back to the full-sample fit
        out = predict_leave_one_out(path3, [1, 1, 1], [0.0, 0.5])
        assert len(out) == 2
        for acc in out:
            assert acc.accuracy == 1.0
            assert acc.n_fallback_nodes == 1

    def test_accuracy_beats_chance_on_model_draws(self):
        J = build_ensemble(EnsembleSpec(kind="erdos_renyi", n=30, seed=4, p=0.2))
        x = gibbs_sample(J, 0.8, 1, GibbsSettings(burn_in_sweeps=300, seed=6))[0]
        out = predict_leave_one_out(J, x, [0.0, 1.0])
        for acc in out:
            assert 0.0 <= acc.accuracy <= 1.0
            assert acc.accuracy >= 0.5

    def test_repeatable(self, path3):
        a = predict_leave_one_out(path3, [1, -1, 1], [0.0])
        b = predict_leave_one_out(path3, [1, -1, 1], [0.0])
        assert a == b


class TestTrainTest:
    def test_accuracy_on_model_draws(self):
        J = build_ensemble(EnsembleSpec(kind="erdos_renyi", n=30, seed=4, p=0.2))
        samples = gibbs_sample(J, 0.8, 10, GibbsSettings(burn_in_sweeps=300, seed=8))
        out = predict_train_test(J, samples[:5], samples[5:], [0.0, 0.5])
        for acc in out:
            assert 0.0 <= acc.accuracy <= 1.0
            assert acc.accuracy >= 0.5
            assert acc.n_train_used + acc.n_train_excluded == 5
            assert acc.n_train_used >= 1

    def test_no_interior_fits_raises(self, path3):
        with pytest.raises(NoUsableTrainingFits):
            predict_train_test(path3, [[1, 1, 1]], [[1, 1, 1]], [0.0])

    def test_empty_split_rejected(self, path3):
        with pytest.raises(InvalidSpec):
            predict_train_test(path3, [], [[1, 1, 1]], [0.0])


class TestConfigLoading:
    def _full_config(self):
        return {
            "ensemble": {"kind": "erdos_renyi", "n": 20, "p": 0.2},
            "true_beta": 0.6,
            "contamination": [{"kind": "flip", "fraction": 0.1}],
            "lambdas": [0.0, 0.5, 1.0],
            "replicates": 2,
            "gibbs": {"burn_in_sweeps": 20, "thin_sweeps": 1},
            "estimator": {"beta_max": 5.0},
            "base_seed": 11,
        }

    def test_full_round_trip(self, tmp_path):
        path = tmp_path / "exp.json"
        path.write_text(json.dumps(self._full_config()))
        spec = load_experiment_spec(path)
        assert spec.ensemble.kind == "erdos_renyi"
        assert spec.lambdas == (0.0, 0.5, 1.0)
        assert spec.estimator.beta_max == 5.0
        report = run_experiment(spec)
        assert len(report.rows) == 3

    def test_lambda_key_alias_in_estimator(self):
        cfg = self._full_config()
        cfg["estimator"] = {"lambda": 0.5}
        spec = experiment_spec_from_dict(cfg)
        assert spec.estimator.lam == 0.5

    def test_hamiltonian_key(self):
        cfg = self._full_config()
        assert experiment_spec_from_dict(cfg).hamiltonian == "pair_sum"
        cfg["hamiltonian"] = "quadratic_form"
        assert experiment_spec_from_dict(cfg).hamiltonian == "quadratic_form"
        cfg["hamiltonian"] = "xtx"
        with pytest.raises(InvalidSpec):
            experiment_spec_from_dict(cfg)

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda c: c.pop("true_beta"),
            lambda c: c.pop("lambdas"),
            lambda c: c["ensemble"].pop("kind"),
            lambda c: c["ensemble"].update(kind="smallworld"),
            lambda c: c["ensemble"].update(radius=3),
            lambda c: c["estimator"].update(solver="brent"),
        ],
    )
    def test_malformed_config_rejected(self, mutate):
        cfg = self._full_config()
        mutate(cfg)
        with pytest.raises(ParseError):
            experiment_spec_from_dict(cfg)

    def test_bad_json_rejected(self, tmp_path):
        path = tmp_path / "exp.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            load_experiment_spec(path)

    def test_non_object_rejected(self, tmp_path):
        path = tmp_path / "exp.json"
        path.write_text("[1, 2]")
        with pytest.raises(ParseError):
            load_experiment_spec(path)
