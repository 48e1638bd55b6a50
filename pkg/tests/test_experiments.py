"""Cross-validation driver and the diffusion regression study."""

import numpy as np
import pytest

from sigreg.datagen import gen_ar, gen_poly_ar
from sigreg.experiments import (
    CrossValConfig,
    default_model_menu,
    run_crossval,
    run_diffusion_study,
)

FAST_CV = CrossValConfig(folds=5, holdout=0.2, seed=0)
AR_ES = [{"kind": "ar", "p": 3}, {"kind": "es", "p": 2, "n": 3}]


def test_config_validation():
    with pytest.raises(ValueError):
        CrossValConfig(folds=0)
    with pytest.raises(ValueError):
        CrossValConfig(holdout=0.0)
    with pytest.raises(ValueError):
        CrossValConfig(holdout=1.0)


def test_default_menu_shape():
    menu = default_model_menu()
    assert [m["kind"] for m in menu] == ["ar", "gp", "es"]
    assert menu[2] == {"kind": "es", "p": 2, "n": 3}


def test_report_structure_and_config_echo():
    lab = gen_ar(300, seed=0)
    rep = run_crossval(lab, AR_ES, FAST_CV)
    assert rep.config["folds"] == 5
    assert rep.config["holdout"] == 0.2
    assert rep.config["models"] == AR_ES
    assert [r.name for r in rep.results] == ["ar", "es"]
    for r in rep.results:
        assert r.fold_mse.shape == (5,)
        assert r.seconds >= 0.0
        assert r.mse_mean == pytest.approx(np.mean(r.fold_mse))
        assert r.mse_std == pytest.approx(np.std(r.fold_mse))
    assert rep.by_name("es").name == "es"
    with pytest.raises(KeyError):
        rep.by_name("gp")
    # AR(3) and ES(p=2) windows overlap on k = 2 .. N-2
    assert rep.n_rows == 297


def test_crossval_is_deterministic():
    lab = gen_poly_ar(250, seed=1)
    a = run_crossval(lab, AR_ES, FAST_CV)
    b = run_crossval(lab, AR_ES, FAST_CV)
    for ra, rb in zip(a.results, b.results):
        assert np.array_equal(ra.fold_mse, rb.fold_mse)
        assert ra.r2 == rb.r2


def test_folds_shared_across_model_sets():
    # adding a model must not change the folds others are scored on
    lab = gen_ar(300, seed=2)
    alone = run_crossval(lab, [{"kind": "ar", "p": 3}], FAST_CV)
    both = run_crossval(lab, AR_ES, FAST_CV)
    assert np.array_equal(alone.by_name("ar").fold_mse, both.by_name("ar").fold_mse)


def test_oracle_and_zero_reference_models():
    lab = gen_poly_ar(400, seed=3)
    rep = run_crossval(
        lab,
        [{"kind": "oracle", "p": 3}, {"kind": "zero", "p": 3, "name": "null"}],
        FAST_CV,
    )
    assert rep.by_name("oracle").mse_mean == 0.0
    # predicting zero scores the raw second moment of the true means
    null_mse = rep.by_name("null").mse_mean
    assert null_mse == pytest.approx(float(np.mean(lab.true_means**2)), rel=0.15)
    assert null_mse > 0


def test_named_models_and_unknown_kind():
    lab = gen_ar(200, seed=4)
    rep = run_crossval(lab, [{"kind": "ar", "p": 2, "name": "ar2"}], FAST_CV)
    assert rep.results[0].name == "ar2"
    with pytest.raises(ValueError):
        run_crossval(lab, [{"kind": "sarimax"}], FAST_CV)


def test_crossval_needs_enough_rows():
    lab = gen_ar(12, seed=5)
    with pytest.raises(ValueError):
        run_crossval(lab, AR_ES, FAST_CV)


def test_noise_free_series_scores_zero():
    lab = gen_ar(40, phi=(0.3, 0.6, 0.15, -0.1), sigma=0.0, burn_in=0)
    rep = run_crossval(lab, [{"kind": "es", "p": 2, "n": 3, "rcond": 1e-13}], FAST_CV)
    assert rep.by_name("es").mse_mean < 1e-16


def test_diffusion_study_shapes_and_determinism():
    rep = run_diffusion_study(samples=120, degrees=(2, 1), seed=0)
    assert rep.degrees == [1, 2]  # sorted, deduplicated
    assert len(rep.r2) == 2
    assert all(np.isfinite(v) and v <= 1.0 for v in rep.r2)
    assert rep.predictions.shape == (24,)
    assert rep.actual.shape == (24,)
    assert rep.config["samples"] == 120
    assert rep.config["step"] == pytest.approx(0.25 / 500)
    again = run_diffusion_study(samples=120, degrees=(1, 2), seed=0)
    assert np.array_equal(rep.predictions, again.predictions)
    assert rep.r2 == again.r2


def test_diffusion_study_degree_improves_fit():
    rep = run_diffusion_study(samples=400, degrees=(1, 3), seed=1)
    assert rep.r2[1] > rep.r2[0]


def test_diffusion_study_validation():
    with pytest.raises(ValueError):
        run_diffusion_study(samples=50, degrees=())
    with pytest.raises(ValueError):
        run_diffusion_study(samples=50, degrees=(0, 2))
    with pytest.raises(ValueError):
        run_diffusion_study(samples=50, degrees=(2,), train_frac=1.0)
