# SPDX-License-Identifier: Apache-2.0
#
# starcf: downlink simulation and power allocation for STAR-RIS-assisted
# cell-free massive MIMO with multi-antenna users.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------

"""Python access to the starcf simulator.

Structured values are plain dicts and lists. Configuration and experiment
specs use the same JSON keys as the command-line tool.
"""

from __future__ import annotations

import json
from typing import Any, Iterable

from . import _starcf

__all__ = [
    "__version__",
    "csv_header",
    "default_config",
    "evaluate_instance",
    "figure_preset",
    "run_experiment",
    "to_csv",
    "trial_seed",
    "validate",
    "validate_config",
]

__version__: str = _starcf.__version__


def default_config() -> dict[str, Any]:
    """Default system configuration."""
    return json.loads(_starcf.default_config_json())


def validate_config(config: dict[str, Any]) -> dict[str, Any]:
    """Parse and check a configuration; raises ValueError when it is invalid."""
    return json.loads(_starcf.validate_config_json(json.dumps(config)))


def figure_preset(figure: int, full: bool = False) -> dict[str, Any]:
    """Experiment spec for figure preset 2, 3 or 4."""
    return json.loads(_starcf.figure_preset_json(figure, full))


def run_experiment(spec: dict[str, Any]) -> dict[str, Any]:
    """Run a sweep. Returns {"rows": [...], "metadata": {...}}."""
    return json.loads(_starcf.run_experiment_json(json.dumps(spec)))


def evaluate_instance(
    config: dict[str, Any], surface: str, seed: int, algorithms: Iterable[str]
) -> list[dict[str, Any]]:
    """Evaluate one scenario drop under each algorithm label."""
    return json.loads(
        _starcf.evaluate_instance_json(json.dumps(config), surface, seed, list(algorithms))
    )


def validate(trials: int = 10000, seeds: int = 20, root_seed: int = 1) -> dict[str, Any]:
    """Monte Carlo check of the closed-form moments."""
    return json.loads(_starcf.validate_json(trials, seeds, root_seed))


def to_csv(result: dict[str, Any]) -> str:
    """Render a run_experiment result with the CLI's CSV writer."""
    return _starcf.csv_text(json.dumps(result))


def csv_header() -> list[str]:
    return list(_starcf.csv_header())


def trial_seed(root_seed: int, trial: int) -> int:
    return _starcf.trial_seed(root_seed, trial)
