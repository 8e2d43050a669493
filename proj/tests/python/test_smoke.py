"""Smoke tests for the python bindings: drive the main operations end to end."""

import math
import os
import sys
import tempfile

import cfaudit


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def test_presets_and_generation():
    spec = cfaudit.preset_da()
    assert spec.total_count() == 80
    assert spec.sigma == 1.0

    ds = cfaudit.generate(spec, seed=7)
    assert len(ds) == 80
    again = cfaudit.generate(spec, seed=7)
    assert ds.rows() == again.rows()

    db = cfaudit.generate(cfaudit.preset_db(), seed=7)
    groups = [p.s for p in db.points()]
    assert groups.count(0) == 35 and groups.count(1) == 45


def test_train_predict_and_boundary():
    ds = cfaudit.generate(cfaudit.preset_da(), seed=11)
    features, sensitive, labels = cfaudit.split(ds)
    assert len(features) == len(sensitive) == len(labels) == 80

    model = cfaudit.train(features, labels, cfaudit.TrainConfig())
    assert cfaudit.accuracy(model, features, labels) == 1.0

    p = cfaudit.predict_proba(model, features[0])
    assert 0.0 < p < 1.0
    assert cfaudit.predict(model, features[0]) == (
        1 if cfaudit.signed_boundary_distance(model, features[0]) >= 0 else 0
    )


def test_counterfactuals_and_report():
    ds = cfaudit.generate(cfaudit.preset_da(), seed=11)
    features, _, labels = cfaudit.split(ds)
    model = cfaudit.train(features, labels, cfaudit.TrainConfig())

    cfg = cfaudit.GaConfig.desk_profile()
    cfg.seed = 33
    cfs = cfaudit.generate_all(model, ds, target_class=0, config=cfg)
    negatives = sum(1 for row in features if cfaudit.predict(model, row) == 0)
    assert len(cfs) == negatives

    for cf in cfs[:5]:
        assert cf.valid
        oracle = cfaudit.oracle_projection(model, features[cf.origin_index], cf.origin_index)
        assert cf.distance >= oracle.distance

    report = cfaudit.build_report(model, ds, cfs)
    assert close(report.statistical_parity, 1.0)
    assert report.burden_ratio > 2.0
    assert report.disparate_impact is False
    assert set(report.burden_by_group) == {0, 1}
    assert "statistical_parity" in report.to_json()


def test_metric_helpers():
    assert close(cfaudit.distance([0, 0], [3, 4], cfaudit.DistanceMetric.euclidean), 5.0)
    assert close(cfaudit.distance([1, 9], [5, 5], cfaudit.DistanceMetric.manhattan), 8.0)
    assert close(cfaudit.fitness([0], [2], cfaudit.DistanceMetric.euclidean), 0.5)
    assert cfaudit.disparate_impact(0.8)
    assert not cfaudit.disparate_impact(1.0)
    assert close(cfaudit.acceptance_rate([1, 0, 1, 1], [0, 0, 1, 1], 0), 0.5)
    assert close(cfaudit.statistical_parity([1, 0, 1, 1], [0, 0, 1, 1]), 0.5)


def test_run_experiment_roundtrip():
    with tempfile.TemporaryDirectory() as tmp:
        cfg = cfaudit.ExperimentConfig()
        cfg.source = cfaudit.DataSource.preset_db
        cfg.seed = 13
        cfg.output_dir = os.path.join(tmp, "db")
        run = cfaudit.run_experiment(cfg)
        assert run.accuracy == 1.0
        assert close(run.report.statistical_parity, 6.0 / 7.0, tol=1e-12)
        assert run.report.burden_ratio < 0.5
        for path in (run.dataset_csv, run.model_file, run.report_file, run.plot_file):
            assert os.path.exists(path)

        model, train_cfg = cfaudit.load_model(run.model_file)
        assert model.feature_count == 2
        assert train_cfg.iterations == 2000


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    main()
