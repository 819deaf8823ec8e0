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

"""Python bindings for the goas face anti-spoofing toolkit."""

from ._goas import (
    DivergenceError,
    Error,
    IoError,
    SchemaError,
    ShapeError,
    ValidationError,
    auc,
    eer,
    generate_synthetic_dataset,
    hter,
    load_manifest,
    log_power_spectrum,
    medium_pattern,
    roc,
    run_cli,
    sensor_pattern,
    spectral_correlation,
    version,
)

__version__ = version()

__all__ = [
    "DivergenceError",
    "Error",
    "IoError",
    "SchemaError",
    "ShapeError",
    "ValidationError",
    "auc",
    "eer",
    "generate_synthetic_dataset",
    "hter",
    "load_manifest",
    "log_power_spectrum",
    "medium_pattern",
    "roc",
    "run_cli",
    "sensor_pattern",
    "spectral_correlation",
    "version",
]
