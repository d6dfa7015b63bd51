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
"""Household annual electricity consumption forecasting.

Records are dicts with the nine household fields (surface_m2, heating_type,
water_heating_type, cooking_type, occupants, house_type, tariff_index,
max_power_kva). Datasets are CSV text in the household layout.
"""

import json as _json
import os as _os

from . import _hearthcast
from ._hearthcast import (
    ConfigError,
    DataError,
    DEFAULT_UNIT_PRICE,
    Error,
    InsufficientWindowError,
    ModelError,
    SchemaError,
    annualize_car,
    monthly_installment,
    rmsd_delta,
)

MODEL_KINDS = (
    "legacy",
    "linear_regression",
    "cart",
    "random_forest",
    "gradient_boosting",
    "constrained_tree",
)


class Model:
    """A fitted model. Build with train(), load() or from_json()."""

    def __init__(self, native):
        self._native = native

    @property
    def kind(self):
        return self._native.kind

    def predict(self, record):
        """Annual consumption in kWh for one record dict."""
        return self._native.predict_json(_json.dumps(record))

    def predict_csv(self, csv_text):
        return self._native.predict_csv(csv_text)

    def explain(self, record, unit_price=DEFAULT_UNIT_PRICE):
        """Decision trace for a constrained tree; ModelError otherwise."""
        return _json.loads(self._native.explain_json(_json.dumps(record), unit_price))

    def audit_monotonicity(self, csv_text, n_bases=200, seed=0):
        return _json.loads(self._native.audit_json(csv_text, n_bases, seed))

    def to_json(self):
        return self._native.to_json()

    def save(self, path):
        self._native.save(_os.fspath(path))


def generate(n=20000, seed=0, **overrides):
    """Synthetic households as CSV text."""
    config = dict(overrides, n=n, seed=seed)
    return _hearthcast.generate_csv(_json.dumps(config))


def train(kind, csv_text, config=None, seed=None):
    return Model(_hearthcast.train(kind, csv_text, _json.dumps(config or {}), seed))


def load(path):
    return Model(_hearthcast.load_model(_os.fspath(path)))


def from_json(text):
    return Model(_hearthcast.model_from_json(text))


def compute_metrics(gaps):
    """msd, rmsd, mad, mae and n of a gap series."""
    return _json.loads(_hearthcast.compute_metrics(list(gaps)))


def run_benchmark(spec=None, out_dir=None):
    """Runs both regimes and returns the report dict; writes the bundle to
    out_dir when given."""
    text = _hearthcast.run_benchmark(
        _json.dumps(spec or {}), _os.fspath(out_dir) if out_dir else "")
    return _json.loads(text)


__all__ = [
    "ConfigError",
    "DataError",
    "DEFAULT_UNIT_PRICE",
    "Error",
    "InsufficientWindowError",
    "MODEL_KINDS",
    "Model",
    "ModelError",
    "SchemaError",
    "annualize_car",
    "compute_metrics",
    "from_json",
    "generate",
    "load",
    "monthly_installment",
    "rmsd_delta",
    "run_benchmark",
    "train",
]
