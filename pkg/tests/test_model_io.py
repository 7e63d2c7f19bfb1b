import json

import numpy as np
import pytest

from madkit.classify import MadModel, SvmParams, load_model, save_model, train
from madkit.core import MadkitError, ModelFormatError


@pytest.fixture
def model(rng):
    X = np.vstack([rng.normal(-1, 0.4, (15, 3)), rng.normal(1, 0.4, (15, 3))])
    y = np.concatenate([-np.ones(15), np.ones(15)])
    return train(X, y, SvmParams(), seed=0)


def test_roundtrip_scores_bit_exact(model, rng, tmp_path):
    path = tmp_path / "model.json"
    save_model(model, path)
    again = load_model(path)
    probes = rng.normal(0, 1.5, (100, 3))
    for x in probes:
        assert again.score(x) == model.score(x)


def test_batch_equals_one_by_one(model, rng):
    probes = rng.normal(0, 1, (25, 3))
    batch = model.score_batch(probes)
    singles = np.array([model.score(x) for x in probes])
    assert np.array_equal(batch, singles)


def test_score_invariant_to_sv_storage_order(model, rng):
    perm = rng.permutation(len(model.support_vectors))
    shuffled = MadModel(
        support_vectors=model.support_vectors[perm],
        dual_coef=model.dual_coef[perm],
        bias=model.bias, gamma=model.gamma,
        sigmoid_a=model.sigmoid_a, sigmoid_b=model.sigmoid_b)
    x = rng.normal(0, 1, 3)
    assert abs(shuffled.score(x) - model.score(x)) < 1e-12


def test_truncated_file_is_corrupt(model, tmp_path):
    path = tmp_path / "model.json"
    save_model(model, path)
    data = path.read_text()
    path.write_text(data[: len(data) // 2])
    with pytest.raises(ModelFormatError, match="corrupt"):
        load_model(path)


def test_version_mismatch_rejected(model, tmp_path):
    path = tmp_path / "model.json"
    save_model(model, path)
    doc = json.loads(path.read_text())
    doc["format"] = "madkit-model/99"
    path.write_text(json.dumps(doc))
    with pytest.raises(ModelFormatError, match="unsupported"):
        load_model(path)


def test_mangled_array_rejected(model, tmp_path):
    path = tmp_path / "model.json"
    save_model(model, path)
    doc = json.loads(path.read_text())
    doc["dual_coef"]["data"] = "!!!not-base64!!!"
    path.write_text(json.dumps(doc))
    with pytest.raises(ModelFormatError, match="dual_coef"):
        load_model(path)


def test_zero_support_vectors_rejected_on_save(tmp_path):
    empty = MadModel(support_vectors=np.zeros((0, 3)), dual_coef=np.zeros(0),
                     bias=0.0, gamma=1.0, sigmoid_a=-1.0, sigmoid_b=0.0)
    with pytest.raises(MadkitError, match="zero support vectors"):
        save_model(empty, tmp_path / "m.json")


def test_dim_mismatch_on_score(model):
    with pytest.raises(MadkitError, match="dim"):
        model.score(np.zeros(7))
