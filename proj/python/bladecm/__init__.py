# Copyright 2026 The bladecm Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Blade condition monitoring: turbine simulator, dPCA and autoencoder
reconstruction models, GLR change detection and fault campaigns."""

from ._bladecm import (
    BladecmError,
    Config,
    Models,
    campaign,
    channels,
    detect,
    eigh,
    generate,
    glr_statistic,
    inject,
    monitor,
    select_components,
    train,
)

__all__ = [
    "BladecmError",
    "Config",
    "Models",
    "campaign",
    "channels",
    "detect",
    "eigh",
    "generate",
    "glr_statistic",
    "inject",
    "monitor",
    "select_components",
    "train",
]
