# Copyright 2026 The Hearthcast Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math

import pytest

import hearthcast as hc

HOUSE = {
    "surface_m2": 85.0,
    "heating_type": "electric",
    "water_heating_type": "electric",
    "cooking_type": "electric",
    "occupants": 3,
    "house_type": "house",
    "tariff_index": "base",
    "max_power_kva": 9,
}


@pytest.fixture(scope="module")
def data():
    return hc.generate(n=1500, seed=5)


@pytest.fixture(scope="module")
def tree(data):
    return hc.train("constrained_tree", data, {"min_bucket": 30})


def test_anchors():
    assert hc.annualize_car(700, 70) == 3650.0
    with pytest.raises(hc.InsufficientWindowError):
        hc.annualize_car(700, 69)
    assert hc.monthly_installment(3650) == 76.53
    assert round(hc.rmsd_delta(1710, 1861)) == -8


def test_metrics():
    m = hc.compute_metrics([1.0, 0.0, -1.0])
    assert m["msd"] == pytest.approx(2 / 3)
    assert m["rmsd"] == pytest.approx(math.sqrt(2 / 3))
    assert m["mad"] == 1.0


def test_generate_is_deterministic(data):
    assert hc.generate(n=1500, seed=5) == data
    assert hc.generate(n=1500, seed=6) != data
    assert data.splitlines()[0].startswith("surface_m2,heating_type")


def test_every_kind_round_trips(data):
    for kind in hc.MODEL_KINDS:
        model = hc.train(kind, data, seed=1)
        assert model.kind == kind
        back = hc.from_json(model.to_json())
        assert back.predict(HOUSE) == model.predict(HOUSE)
        assert back.to_json() == model.to_json()


def test_explain_reconstructs_prediction(tree):
    out = tree.explain(HOUSE)
    trace = out["trace"]
    assert trace["alpha"] + trace["beta"] * trace["surface"] == out["car_kwh"]
    assert out["car_kwh"] == tree.predict(HOUSE)
    assert isinstance(out["text"], str)


def test_explain_rejected_for_other_kinds(data):
    with pytest.raises(hc.ModelError):
        hc.train("legacy", data).explain(HOUSE)


def test_invalid_records(tree):
    with pytest.raises(hc.DataError):
        tree.predict(dict(HOUSE, surface_m2=-5))
    with pytest.raises(hc.DataError):
        tree.predict(dict(HOUSE, heating_type="coal"))
    with pytest.raises(hc.ConfigError):
        hc.train("svm", "")


def test_save_and_load(tmp_path, tree):
    path = tmp_path / "tree.json"
    tree.save(path)
    assert json.loads(path.read_text())["kind"] == "constrained_tree"
    assert hc.load(path).predict(HOUSE) == tree.predict(HOUSE)


def test_csv_predictions(tree, data):
    preds = tree.predict_csv(data)
    assert len(preds) == 1500
    assert all(math.isfinite(p) for p in preds)
    assert preds[0] == tree.predict_csv(data)[0]


def test_monotonicity_audit(tree, data):
    report = tree.audit_monotonicity(data, n_bases=50, seed=2)
    surface = [f for f in report["features"] if f["feature"] == "surface"]
    assert surface and surface[0]["violation_count"] == 0


def test_small_benchmark(tmp_path):
    spec = {
        "seed": 3,
        "generator": {"n": 1500},
        "forest": {"n_trees": 10},
        "boost": {"n_stages": 30},
    }
    report = hc.run_benchmark(spec, tmp_path)
    assert len(report["results"]) == 10
    assert any(tmp_path.iterdir())
