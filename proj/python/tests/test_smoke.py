# Copyright 2026 The GOAS Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import itertools

import numpy as np
import pytest

import goas


def pairwise_auc(scores, spoof):
    live = [s for s, y in zip(scores, spoof) if not y]
    attack = [s for s, y in zip(scores, spoof) if y]
    wins = sum(1.0 if a > l else 0.5 if a == l else 0.0 for a, l in itertools.product(attack, live))
    return 100.0 * wins / (len(live) * len(attack))


def test_version_matches_cli():
    code, out, _ = goas.run_cli(["--version"])
    assert code == 0
    assert goas.__version__ in out


def test_metric_examples():
    assert goas.auc([0.1, 0.2, 0.8, 0.9], [False, False, True, True]) == pytest.approx(100.0)
    assert goas.auc([0.2, 0.6, 0.4, 0.8], [False, False, True, True]) == pytest.approx(75.0)
    eer, _ = goas.eer([0.2, 0.6, 0.4, 0.8], [False, False, True, True])
    assert eer == pytest.approx(50.0)
    hter = goas.hter([0.1, 0.2, 0.3, 0.5, 0.6, 0.7], [False] * 3 + [True] * 3,
                     [0.1, 0.2, 0.3, 0.4, 0.7, 0.8], [False] * 3 + [True] * 3)
    assert hter == pytest.approx(100.0 / 6.0)


def test_auc_matches_pairwise_oracle():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(2, 40))
        scores = (rng.integers(0, 20, n) / 20.0).tolist()
        spoof = [bool(i % 2) for i in range(n)]
        assert goas.auc(scores, spoof) == pytest.approx(pairwise_auc(scores, spoof), abs=1e-9)


def test_single_class_is_validation_error():
    with pytest.raises(goas.ValidationError):
        goas.auc([0.1, 0.2], [False, False])
    with pytest.raises(ValueError):
        goas.auc([0.1], [False, True])


def test_patterns_and_spectra():
    grating = goas.medium_pattern(1, 64)
    assert grating.shape == (64, 64)
    assert abs(grating.mean()) < 1e-9
    assert not goas.medium_pattern(0, 64).any()
    sensor = goas.sensor_pattern(0, 3, 64, 7)
    assert np.sqrt((sensor ** 2).mean()) == pytest.approx(0.5, rel=1e-6)
    assert goas.spectral_correlation(grating, grating) == pytest.approx(1.0)
    assert goas.spectral_correlation(grating, goas.medium_pattern(2, 64)) < 0.5
    assert goas.log_power_spectrum(grating).shape == (64, 64)
    with pytest.raises(goas.ShapeError):
        goas.log_power_spectrum(np.zeros(8))


def test_synthetic_dataset_round_trip(tmp_path):
    made = goas.generate_synthetic_dataset(tmp_path / "data", sensors=2, mediums=2, size=32, seed=4,
                                           videos_per_combo=3, frames=1)
    assert len(made["records"]) == 12
    loaded = goas.load_manifest(tmp_path / "data" / "manifest.jsonl")
    assert [r["id"] for r in loaded["records"]] == [r["id"] for r in made["records"]]
    assert {r["split"] for r in loaded["records"]} == {"train", "test"}
    with pytest.raises(goas.Error):
        goas.load_manifest(tmp_path / "missing.jsonl")


def test_cli_rejects_unknown_flag():
    code, _, err = goas.run_cli(["eval", "--bogus"])
    assert code == 1
    assert "--bogus" in err
