# Copyright 2026 The pixmim Authors. All rights reserved.
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

"""Native masked-image-modeling data pipeline.

Images are numpy arrays of shape (H, W, C) or (H, W), float in [0, 1] or uint8.
Configs are dicts or JSON strings with the same keys as the CLI config file.
"""

import json as _json

from . import _pixmim
from ._pixmim import (
    ConfigError,
    band_psnr,
    default_band_edges,
    derive_seed,
    dft,
    low_freq_target,
    masked_loss,
    patchify,
    random_mask,
)

__all__ = [
    "ConfigError",
    "band_psnr",
    "coverage",
    "default_band_edges",
    "derive_seed",
    "dft",
    "low_freq_target",
    "make_sample",
    "masked_loss",
    "patchify",
    "random_mask",
]


def _config_text(config):
    if config is None:
        return "{}"
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def make_sample(config, image, seed, foreground=None):
    """One training sample for `seed`, computed as gen-targets does for that seed.

    Returns a dict with augmented, visible, indices, targets, mask_visible,
    mask_bits and record.
    """
    return _pixmim.make_sample(_config_text(config), image, seed, foreground)


def coverage(config, foreground, seed):
    """(J, J under masking) of one augmented sample; None without foreground."""
    return _pixmim.coverage(_config_text(config), foreground, seed)
