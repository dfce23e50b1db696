import json
import math

import numpy as np
import pytest

from su11bounds.config import MeasurementSetting, ModelConfig, DualHomodyneScheme, named_scheme
from su11bounds.errors import ParametersNotIdentifiable, SchemeError
from su11bounds.gaussian import LinearGaussianOutcomeModel, homodyne_outcome_model, outcome_models
from su11bounds.measurement import (
    BOUNDS_COLUMNS,
    OutcomeBatch,
    bound_comparison,
    estimate_and_mse,
    fisher_information,
    sample_outcomes,
    scheme_fisher_information,
    trace_inverse_fi,
)


def _toy(m=2, d=2, scale=1.0):
    return LinearGaussianOutcomeModel(np.eye(m, d), scale * np.eye(m), [f"c{i}" for i in range(m)])


def test_fi_identity():
    assert np.allclose(fisher_information(_toy()), np.eye(2))


def test_fi_heterodyne_g0():
    F = scheme_fisher_information(ModelConfig(alpha=1.0, g=0.0), named_scheme("heterodyne"))
    assert np.allclose(F, 0.5 * np.eye(4), atol=1e-14)
    assert trace_inverse_fi(F) == pytest.approx(8.0, rel=1e-13)


@pytest.mark.parametrize("g", [0.25, 0.5, 1.0])
def test_fi_heterodyne_matches_engine_hcrb(g):
    F = scheme_fisher_information(ModelConfig(alpha=1.0, g=g), named_scheme("heterodyne"))
    assert trace_inverse_fi(F) == pytest.approx(4 * math.cosh(2 * g) + 4, rel=1e-12)


def test_squeezed_homodyne_singular():
    cfg = ModelConfig(alpha=1.0, g=0.5)
    F = scheme_fisher_information(cfg, named_scheme("homodyne-squeezed"))
    assert np.allclose(np.diag(F), math.exp(1.0) / 2, atol=1e-12)
    assert trace_inverse_fi(F) is None
    with pytest.raises(ParametersNotIdentifiable, match="not jointly identifiable"):
        m = homodyne_outcome_model(cfg, named_scheme("homodyne-squeezed"))
        estimate_and_mse(sample_outcomes(m, np.zeros(4), 10, 0), m, np.zeros(4))


def test_alternation_is_weighted_sum():
    cfg = ModelConfig(alpha=1.0, g=0.7)
    scheme = named_scheme("homodyne-alternating")
    parts = [w * fisher_information(m) for w, m in outcome_models(cfg, scheme)]
    assert np.allclose(scheme_fisher_information(cfg, scheme), parts[0] + parts[1], atol=1e-14)
    uneven = DualHomodyneScheme(scheme.settings, (0.2, 0.8))
    parts = [fisher_information(m) for _, m in outcome_models(cfg, uneven)]
    assert np.allclose(scheme_fisher_information(cfg, uneven), 0.2 * parts[0] + 0.8 * parts[1], atol=1e-14)


def test_weights_validated():
    s = named_scheme("heterodyne").settings
    with pytest.raises(SchemeError):
        DualHomodyneScheme(s, (0.5,))
    with pytest.raises(SchemeError):
        DualHomodyneScheme(s + s, (1.5, -0.5))


def test_channel_union_monotone():
    cfg = ModelConfig(alpha=1.0, g=0.4)
    one = MeasurementSetting(((0.3,), ()), (False, False))
    both = MeasurementSetting(((0.3,), (1.1,)), (False, False))
    from su11bounds.gaussian import setting_outcome_model

    F1 = fisher_information(setting_outcome_model(cfg, one))
    F2 = fisher_information(setting_outcome_model(cfg, both))
    assert np.all(np.diag(F2) >= np.diag(F1) - 1e-12)
    assert np.linalg.eigvalsh(F2).min() >= -1e-12


def test_noiseless_sampling():
    m = LinearGaussianOutcomeModel(np.eye(2), 1e-12 * np.eye(2), ["a", "b"])
    theta = np.array([0.3, -0.7])
    batch = sample_outcomes(m, theta, 100, 1)
    assert np.allclose(batch.data, theta, atol=1e-5)
    res = estimate_and_mse(batch, m, theta)
    assert np.abs(res.mse).max() < 1e-9


def test_sample_mean_law_of_large_numbers():
    m = homodyne_outcome_model(ModelConfig(alpha=1.0, g=0.3), named_scheme("heterodyne"))
    theta = np.array([0.2, -0.1, 0.05, 0.3])
    batch = sample_outcomes(m, theta, 1_000_000, 11)
    target = m.offset + m.jacobian @ theta
    se = np.sqrt(np.diag(m.sigma) / batch.shots)
    assert np.all(np.abs(batch.data.mean(axis=0) - target) < 5 * se)


def test_sampling_deterministic_and_worker_invariant():
    m = _toy(3, 3)
    a = sample_outcomes(m, np.zeros(3), 5000, 4, block_size=700)
    b = sample_outcomes(m, np.zeros(3), 5000, 4, block_size=700, workers=3)
    assert np.array_equal(a.data, b.data)
    c = sample_outcomes(m, np.zeros(3), 5000, 5, block_size=700)
    assert not np.array_equal(a.data, c.data)


def test_batch_round_trip(tmp_path):
    m = _toy(3, 2)
    batch = sample_outcomes(m, np.zeros(2), 123, 9, block_size=50)
    side = batch.save(tmp_path / "out.bin")
    meta = json.loads(side.read_text())
    assert meta["layout"].startswith("column-major")
    # column-major: the first `shots` doubles are channel 0
    raw = np.fromfile(tmp_path / "out.bin", dtype="<f8")
    assert np.array_equal(raw[:123], batch.data[:, 0])
    again = OutcomeBatch.load(tmp_path / "out.bin")
    assert np.array_equal(again.data, batch.data)
    assert again.seed == 9 and again.block_size == 50


def test_mc_heterodyne_g0():
    cfg = ModelConfig(alpha=1.0, g=0.0)
    m = homodyne_outcome_model(cfg, named_scheme("heterodyne"))
    theta = np.zeros(4)
    res = estimate_and_mse(sample_outcomes(m, theta, 100_000, 2024), m, theta)
    assert abs(res.tr_mse - 8.0) < 5 * res.tr_mse_se
    assert np.all(np.abs(res.theta_hat_mean - theta) < 5 * res.bias_se)
    Finv = np.linalg.inv(fisher_information(m))
    slack = 5 * np.linalg.norm(res.mse_se, 2)
    assert np.linalg.eigvalsh(res.mse - Finv).min() >= -slack
    assert np.allclose(res.mse, res.mse.T)


def test_gls_unbiased_nonzero_theta():
    cfg = ModelConfig(alpha=0.5, g=0.6)
    m = homodyne_outcome_model(cfg, named_scheme("heterodyne"))
    theta = np.array([0.4, -0.3, 1.2, 0.0])
    res = estimate_and_mse(sample_outcomes(m, theta, 50_000, 3), m, theta)
    assert np.all(np.abs(res.theta_hat_mean - theta) < 5 * res.bias_se)


def test_estimation_deterministic():
    m = homodyne_outcome_model(ModelConfig(g=0.2), named_scheme("heterodyne"))
    r1 = estimate_and_mse(sample_outcomes(m, np.zeros(4), 2000, 8), m, np.zeros(4))
    r2 = estimate_and_mse(sample_outcomes(m, np.zeros(4), 2000, 8), m, np.zeros(4))
    assert json.dumps(r1.to_dict()) == json.dumps(r2.to_dict())


def test_bound_comparison_g0():
    rec = bound_comparison(0.0, named_scheme("heterodyne"))
    assert (rec.cs_paper, rec.ch_paper, rec.cf_paper) == (4.0, 8.0, 8.0)
    assert rec.cs_engine == pytest.approx(4.0, abs=1e-6)
    assert rec.ch_engine == pytest.approx(8.0, abs=1e-4)
    assert rec.tr_finv_engine == pytest.approx(8.0)
    assert rec.ordering_violations() == []
    assert len(rec.row()) == len(BOUNDS_COLUMNS)


def test_bound_comparison_reference_convergence():
    rec = bound_comparison(2.0, named_scheme("homodyne-squeezed"))
    assert rec.ch_paper / rec.cs_paper == pytest.approx(1 + math.exp(-8), abs=1e-12)
    assert rec.ch_paper == rec.cf_paper
    assert rec.tr_finv_engine is None


def test_ordering_flags():
    from su11bounds.measurement import BoundsRecord

    bad = BoundsRecord(0.0, 5.0, 4.0, "converged", 4, 8, 8, 3.0)
    flags = bad.ordering_violations()
    assert "ch_engine < cs_engine" in flags and "tr_finv_engine < ch_engine" in flags
